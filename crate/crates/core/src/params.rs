//! Parameter types shared by every module.
//!
//! All frequencies and rates are ordinary frequencies in MHz (ν = ω/2π).
//! Every closed form in this crate is homogeneous in the frequencies it
//! combines, so the 2π factors cancel and MHz values can be used directly.
//! The only exception is the time domain ([`crate::spectral::number_correlation`]),
//! where rates are converted to rad/µs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bare oscillator frequency at the Kerr-free operating point, MHz.
pub const DEFAULT_FREQ_A: f64 = 6940.0;

/// Relative tolerance used to call a pump amplitude "at" the coalescence point.
pub const COALESCENCE_TOL: f64 = 1e-3;

/// Pumped SNAIL-resonator parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    #[serde(default = "default_freq_a")]
    pub freq_a: f64,
    pub kappa: f64,
    #[serde(default)]
    pub delta_a: f64,
    #[serde(default)]
    pub lam: f64,
}

fn default_freq_a() -> f64 {
    DEFAULT_FREQ_A
}

impl OscillatorParams {
    pub fn new(kappa: f64, delta_a: f64, lam: f64) -> Self {
        Self {
            freq_a: DEFAULT_FREQ_A,
            kappa,
            delta_a,
            lam,
        }
    }

    /// Same oscillator with a different pump amplitude.
    pub fn with_lam(self, lam: f64) -> Self {
        Self { lam, ..self }
    }

    /// Critical pump amplitude sqrt(δ_a² + κ²/4) where the gain diverges.
    pub fn lambda_crit(&self) -> f64 {
        (self.delta_a * self.delta_a + 0.25 * self.kappa * self.kappa).sqrt()
    }

    /// Coalescence amplitude sqrt(δ_a² − κ²/4); `None` when |δ_a| < κ/2.
    pub fn lambda_co(&self) -> Option<f64> {
        let d = self.delta_a * self.delta_a - 0.25 * self.kappa * self.kappa;
        (d >= 0.0).then(|| d.sqrt())
    }

    pub fn is_stable(&self) -> bool {
        self.lam < self.lambda_crit()
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::invalid("kappa", format!("must be positive, got {}", self.kappa)));
        }
        if !(self.lam >= 0.0) || !self.lam.is_finite() {
            return Err(Error::invalid("lam", format!("must be non-negative, got {}", self.lam)));
        }
        if !self.delta_a.is_finite() {
            return Err(Error::invalid("delta_a", "must be finite"));
        }
        if !self.freq_a.is_finite() {
            return Err(Error::invalid("freq_a", "must be finite"));
        }
        Ok(())
    }

    /// Validates and rejects unstable parameter sets.
    pub(crate) fn require_stable(&self) -> Result<()> {
        self.check_finite()?;
        if !self.is_stable() {
            return Err(Error::Unstable {
                lam: self.lam,
                lambda_crit: self.lambda_crit(),
            });
        }
        Ok(())
    }
}

/// Qubit or transmon coupled to the oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    pub delta_q: f64,
    pub g: f64,
    pub chi_q: f64,
    #[serde(default)]
    pub gamma_1: f64,
    #[serde(default)]
    pub gamma_phi: f64,
    #[serde(default = "default_levels")]
    pub n_levels: usize,
}

fn default_levels() -> usize {
    3
}

impl TransmonParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0) || !self.g.is_finite() {
            return Err(Error::invalid("g", format!("must be positive, got {}", self.g)));
        }
        if self.n_levels < 2 {
            return Err(Error::invalid("n_levels", "need at least two levels"));
        }
        if !(self.gamma_1 >= 0.0) || !(self.gamma_phi >= 0.0) {
            return Err(Error::invalid("gamma_1", "rates must be non-negative"));
        }
        if !self.delta_q.is_finite() || !self.chi_q.is_finite() {
            return Err(Error::invalid("delta_q", "detunings must be finite"));
        }
        Ok(())
    }

    /// Total coherence decay rate γ_t = γ_1 + 2γ_φ.
    pub fn gamma_t(&self) -> f64 {
        self.gamma_1 + 2.0 * self.gamma_phi
    }
}

/// Coherent probe drive on the oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DriveSpec {
    #[serde(default)]
    pub n_d: f64,
    #[serde(default)]
    pub detuning_d: f64,
    #[serde(default)]
    pub theta: f64,
}

impl DriveSpec {
    pub fn new(n_d: f64, detuning_d: f64, theta: f64) -> Self {
        Self {
            n_d,
            detuning_d,
            theta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_d >= 0.0) || !self.n_d.is_finite() {
            return Err(Error::invalid("n_d", format!("must be non-negative, got {}", self.n_d)));
        }
        Ok(())
    }
}

/// Where the pump amplitude sits relative to the coalescence and instability points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpRegime {
    /// Detuned pump below coalescence: two separated gain peaks.
    Split,
    /// Within [`COALESCENCE_TOL`] of λ_co.
    CoalescenceOnset,
    /// Single merged peak (always the case when |δ_a| < κ/2).
    Merged,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub regime: PumpRegime,
    pub lambda_crit: f64,
    pub lambda_co: Option<f64>,
    /// λ_crit − λ; negative when unstable.
    pub margin_crit: f64,
    /// λ_co − λ when a coalescence point exists.
    pub margin_co: Option<f64>,
}

/// Classifies the pump amplitude without touching the input.
pub fn validate(p: &OscillatorParams) -> Result<StabilityReport> {
    p.check_finite()?;
    let lambda_crit = p.lambda_crit();
    let lambda_co = p.lambda_co();
    let stable = p.lam < lambda_crit;
    let regime = if !stable {
        PumpRegime::Unstable
    } else {
        match lambda_co {
            Some(co) if (p.lam - co).abs() <= COALESCENCE_TOL * co.max(f64::MIN_POSITIVE) => {
                PumpRegime::CoalescenceOnset
            }
            Some(co) if p.lam < co => PumpRegime::Split,
            _ => PumpRegime::Merged,
        }
    };
    Ok(StabilityReport {
        stable,
        regime,
        lambda_crit,
        lambda_co,
        margin_crit: lambda_crit - p.lam,
        margin_co: lambda_co.map(|co| co - p.lam),
    })
}

/// Squeezed-Fock eigenbasis of the detuned, pumped oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BogoliubovFrame {
    pub r: f64,
    pub s_db: f64,
    /// Ω_a[r], signed like δ_a.
    pub omega_bog: f64,
    pub delta_a: f64,
}

impl BogoliubovFrame {
    /// Frame with squeezing `r` for an oscillator detuned by `delta_a`.
    /// `delta_a = 0` is accepted only for the unsqueezed frame.
    pub fn from_squeezing(r: f64, delta_a: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::invalid("r", "must be finite and non-negative"));
        }
        if (delta_a == 0.0 && r > 0.0) || !delta_a.is_finite() {
            return Err(Error::NotBogoliubov { lam: f64::NAN, delta_a });
        }
        Ok(Self {
            r,
            s_db: 20.0 * r / std::f64::consts::LN_10,
            omega_bog: delta_a / (2.0 * r).cosh(),
            delta_a,
        })
    }

    pub fn cosh_r(&self) -> f64 {
        self.r.cosh()
    }

    pub fn sinh_r(&self) -> f64 {
        self.r.sinh()
    }

    pub fn cosh2(&self) -> f64 {
        let c = self.r.cosh();
        c * c
    }

    /// sinh²r, the effective thermal population of the squeezed mode.
    pub fn sinh2(&self) -> f64 {
        let s = self.r.sinh();
        s * s
    }

    /// Pump amplitude that produces this frame, λ = |δ_a| tanh 2r.
    pub fn lam(&self) -> f64 {
        self.delta_a.abs() * (2.0 * self.r).tanh()
    }

    /// Squeezing amplitude S = e^{2r} (linear).
    pub fn s_linear(&self) -> f64 {
        (2.0 * self.r).exp()
    }
}

/// Bogoliubov frame for a detuned pump below |δ_a|.
pub fn frame_of(p: &OscillatorParams) -> Result<BogoliubovFrame> {
    p.check_finite()?;
    if p.delta_a == 0.0 || p.lam >= p.delta_a.abs() {
        return Err(Error::NotBogoliubov {
            lam: p.lam,
            delta_a: p.delta_a,
        });
    }
    let r = 0.5 * (p.lam / p.delta_a.abs()).atanh();
    BogoliubovFrame::from_squeezing(r, p.delta_a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_operating_point() {
        let f = frame_of(&OscillatorParams::new(8.7, 20.0, 17.0)).unwrap();
        assert_relative_eq!(f.r, 0.6281, epsilon = 1e-4);
        assert_relative_eq!(f.s_db, 5.455, epsilon = 1e-3);
        assert_relative_eq!(f.omega_bog, 111f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(f.lam(), 17.0, max_relative = 1e-12);
    }

    #[test]
    fn identity_frame() {
        let f = frame_of(&OscillatorParams::new(8.7, 20.0, 0.0)).unwrap();
        assert_eq!(f.r, 0.0);
        assert_eq!(f.omega_bog, 20.0);
        assert_eq!(f.s_db, 0.0);
    }

    #[test]
    fn frame_rejects_resonant_pump_and_overdrive() {
        assert!(frame_of(&OscillatorParams::new(8.7, 0.0, 1.0)).is_err());
        assert!(frame_of(&OscillatorParams::new(8.7, 20.0, 20.0)).is_err());
        assert!(frame_of(&OscillatorParams::new(8.7, -20.0, 25.0)).is_err());
    }

    #[test]
    fn negative_detuning_carries_sign() {
        let f = frame_of(&OscillatorParams::new(8.7, -20.0, 17.0)).unwrap();
        assert!(f.r > 0.0);
        assert!(f.omega_bog < 0.0);
    }

    #[test]
    fn validate_examples() {
        let s = validate(&OscillatorParams::new(8.7, 0.0, 0.0)).unwrap();
        assert!(s.stable);
        assert_relative_eq!(s.margin_crit, 4.35, epsilon = 1e-12);
        assert_eq!(s.regime, PumpRegime::Merged);

        let s = validate(&OscillatorParams::new(8.7, 30.0, 29.683)).unwrap();
        assert!(s.stable);
        assert_eq!(s.regime, PumpRegime::CoalescenceOnset);
        assert_relative_eq!(s.lambda_co.unwrap(), 29.683, epsilon = 1e-3);

        let s = validate(&OscillatorParams::new(8.7, 0.0, 4.35)).unwrap();
        assert!(!s.stable);
        assert_eq!(s.regime, PumpRegime::Unstable);
    }

    #[test]
    fn validate_rejects_bad_kappa() {
        assert!(validate(&OscillatorParams::new(0.0, 0.0, 0.0)).is_err());
        assert!(validate(&OscillatorParams::new(-1.0, 0.0, 0.0)).is_err());
        assert!(validate(&OscillatorParams::new(f64::NAN, 0.0, 0.0)).is_err());
    }
}
