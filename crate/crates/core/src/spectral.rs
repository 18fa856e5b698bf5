//! Qubit frequency shift and induced dephasing from the photon statistics
//! of the (squeezed) oscillator.
//!
//! Detuned pumps use the Bogoliubov-frame results; a resonant pump
//! (δ_a = 0) uses the steady-state moments of the parametric oscillator.
//! Oscillating correlator terms at 2Ω_a[r] average out over the qubit
//! coherence time and are omitted.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bogoliubov::DispersiveResult;
use crate::error::{Error, Result};
use crate::io::Table;
use crate::params::{BogoliubovFrame, DriveSpec, OscillatorParams};

/// Results are flagged when |2Ω_a[r]| falls below this multiple of κ/2.
pub const COALESCENCE_MARGIN: f64 = 5.0;

/// Results are flagged when |χ[r]| exceeds this fraction of κ.
pub const WEAK_DISPERSIVE_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Warning {
    NearCoalescence,
    StrongDispersive,
    OffResonantDrive,
    DephasingModelMissing,
}

/// Contributions to the shift and dephasing, in MHz.
///
/// `lamb + stark` is the frequency shift and `thermal + drive` the dephasing.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ShiftParts {
    /// Vacuum-fluctuation (modified Lamb) frequency shift.
    pub lamb: f64,
    /// Drive-photon (AC-Stark) frequency shift.
    pub stark: f64,
    /// Dephasing from the effective thermal population.
    pub thermal: f64,
    /// Dephasing from the amplified drive photons.
    pub drive: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralShift {
    pub d_omega_q: f64,
    pub d_gamma_phi: f64,
    pub parts: ShiftParts,
    pub warnings: Vec<Warning>,
}

impl SpectralShift {
    pub fn from_parts(parts: ShiftParts, warnings: Vec<Warning>) -> Self {
        Self {
            d_omega_q: parts.lamb + parts.stark,
            d_gamma_phi: parts.thermal + parts.drive,
            parts,
            warnings,
        }
    }

    /// Adds the contributions of two independent effects.
    pub fn combine(&self, other: &SpectralShift) -> SpectralShift {
        let p = ShiftParts {
            lamb: self.parts.lamb + other.parts.lamb,
            stark: self.parts.stark + other.parts.stark,
            thermal: self.parts.thermal + other.parts.thermal,
            drive: self.parts.drive + other.parts.drive,
        };
        let mut w = self.warnings.clone();
        for x in &other.warnings {
            if !w.contains(x) {
                w.push(*x);
            }
        }
        SpectralShift::from_parts(p, w)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["x", "value"]);
        let rows = [
            self.d_omega_q,
            self.d_gamma_phi,
            self.parts.lamb,
            self.parts.stark,
            self.parts.thermal,
            self.parts.drive,
        ];
        for (i, v) in rows.into_iter().enumerate() {
            t.push(vec![i as f64, v]);
        }
        t.meta(
            "x",
            "0=d_omega_q 1=d_gamma_phi 2=lamb 3=stark 4=thermal 5=drive (MHz)",
        )
    }
}

fn near_coalescence(frame: &BogoliubovFrame, kappa: f64) -> bool {
    (2.0 * frame.omega_bog).abs() <= COALESCENCE_MARGIN * 0.5 * kappa
}

/// Occupation of the Bogoliubov mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Occupation {
    /// n̄_d cosh²r + sinh²r.
    pub n_alpha: f64,
    pub thermal: f64,
    pub coherent: f64,
    /// First-order anomalous moment ⟨α²⟩ ≈ (κ/4Ω)·sinh2r/(1 − iκ/2Ω).
    pub anomalous: Complex64,
    /// η = κ sinh2r / (4|Ω_a[r]|).
    pub eta: f64,
    pub near_coalescence: bool,
}

pub fn bo_occupation(frame: &BogoliubovFrame, drive: &DriveSpec, kappa: f64) -> Result<Occupation> {
    drive.validate()?;
    let thermal = frame.sinh2();
    let coherent = drive.n_d * frame.cosh2();
    let s2r = (2.0 * frame.r).sinh();
    let (anomalous, eta) = if frame.r == 0.0 {
        (Complex64::new(0.0, 0.0), 0.0)
    } else {
        let om = frame.omega_bog;
        let a = (kappa / (4.0 * om)) * s2r / Complex64::new(1.0, -kappa / (2.0 * om));
        (a, kappa * s2r / (4.0 * om.abs()))
    };
    Ok(Occupation {
        n_alpha: coherent + thermal,
        thermal,
        coherent,
        anomalous,
        eta,
        near_coalescence: near_coalescence(frame, kappa),
    })
}

/// Dispersive inputs for the undriven (Lamb) shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum UndrivenModel {
    /// Two-level qubit: χ[r] and the pump-off χ[0].
    TwoLevel { chi_r: f64, chi_0: f64 },
    /// Transmon: χ_t[r] with second-order qubit shifts δ_q^(2)[r] and δ_q^(2)[0].
    Transmon { chi_r: f64, lamb_r: f64, lamb_0: f64 },
}

impl UndrivenModel {
    /// Builds the model from dispersive results at squeezing r and at r = 0.
    pub fn from_results(at_r: &DispersiveResult, at_0: &DispersiveResult) -> Self {
        if at_r.lamb_oscillator.is_some() {
            UndrivenModel::Transmon {
                chi_r: at_r.chi,
                lamb_r: at_r.lamb_qubit,
                lamb_0: at_0.lamb_qubit,
            }
        } else {
            UndrivenModel::TwoLevel {
                chi_r: at_r.chi,
                chi_0: at_0.chi,
            }
        }
    }

    pub fn chi_r(&self) -> f64 {
        match *self {
            UndrivenModel::TwoLevel { chi_r, .. } | UndrivenModel::Transmon { chi_r, .. } => chi_r,
        }
    }
}

/// Thermal-qubit dephasing (χ²/κ)·n̄(1 + n̄).
pub fn thermal_dephasing(chi: f64, kappa: f64, n_th: f64) -> f64 {
    chi * chi / kappa * n_th * (1.0 + n_th)
}

/// Lamb shift and dephasing from the squeezed vacuum, referenced to pump off.
pub fn shift_undriven(model: &UndrivenModel, frame: &BogoliubovFrame, kappa: f64) -> SpectralShift {
    let s2 = frame.sinh2();
    let lamb = match *model {
        UndrivenModel::TwoLevel { chi_r, chi_0 } => chi_r * (0.5 + s2) - 0.5 * chi_0,
        UndrivenModel::Transmon { chi_r, lamb_r, lamb_0 } => lamb_r + chi_r * s2 - lamb_0,
    };
    let chi = model.chi_r();
    let mut warnings = Vec::new();
    if near_coalescence(frame, kappa) {
        warnings.push(Warning::NearCoalescence);
    }
    if chi.abs() > WEAK_DISPERSIVE_FRACTION * kappa {
        warnings.push(Warning::StrongDispersive);
    }
    SpectralShift::from_parts(
        ShiftParts {
            lamb,
            thermal: thermal_dephasing(chi, kappa, s2),
            ..Default::default()
        },
        warnings,
    )
}

/// AC-Stark shift and measurement dephasing for a drive resonant with the
/// Bogoliubov mode.
pub fn shift_driven(chi_r: f64, frame: &BogoliubovFrame, drive: &DriveSpec, kappa: f64) -> Result<SpectralShift> {
    drive.validate()?;
    let (c2, s2) = (frame.cosh2(), frame.sinh2());
    let n = drive.n_d * c2;
    let mut warnings = Vec::new();
    if near_coalescence(frame, kappa) {
        warnings.push(Warning::NearCoalescence);
    }
    if (drive.detuning_d - frame.omega_bog).abs() > 1e-9 * (1.0 + frame.omega_bog.abs()) {
        warnings.push(Warning::OffResonantDrive);
    }
    if chi_r.abs() > WEAK_DISPERSIVE_FRACTION * kappa {
        warnings.push(Warning::StrongDispersive);
    }
    Ok(SpectralShift::from_parts(
        ShiftParts {
            stark: chi_r * n,
            drive: 2.0 * chi_r * chi_r / kappa * (1.0 + 2.0 * s2) * n,
            ..Default::default()
        },
        warnings,
    ))
}

/// Steady-state moments of the resonantly pumped oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    /// ⟨a†a⟩
    pub n: f64,
    /// ⟨a²⟩
    pub a2: Complex64,
}

impl Moments {
    /// ⟨X_θ²⟩ with X_θ = (a e^{−iθ} + a† e^{iθ})/2.
    pub fn x_var(&self, theta: f64) -> f64 {
        0.25 * (2.0 * (self.a2 * Complex64::from_polar(1.0, -2.0 * theta)).re + 2.0 * self.n + 1.0)
    }

    /// ⟨P_θ²⟩ with P_θ = (a e^{−iθ} − a† e^{iθ})/2i.
    pub fn p_var(&self, theta: f64) -> f64 {
        0.25 * (-2.0 * (self.a2 * Complex64::from_polar(1.0, -2.0 * theta)).re + 2.0 * self.n + 1.0)
    }

    /// ⟨α†α⟩ in the Bogoliubov frame α = a cosh r − sign(δ_a) a† sinh r.
    pub fn bogoliubov_occupation(&self, frame: &BogoliubovFrame) -> f64 {
        let (c, s) = (frame.cosh_r(), frame.sinh_r());
        let sign = frame.delta_a.signum();
        (c * c + s * s) * self.n + s * s - sign * c * s * 2.0 * self.a2.re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonantSteadyState {
    pub moments: Moments,
    /// Steady-state anti-squeezing S∞ = (κ/2)/(κ/2 − λ), linear.
    pub s_inf: f64,
}

impl ResonantSteadyState {
    pub fn s_inf_db(&self) -> f64 {
        10.0 * self.s_inf.log10()
    }
}

fn check_resonant(p: &OscillatorParams) -> Result<()> {
    p.check_finite()?;
    if p.delta_a != 0.0 {
        return Err(Error::invalid("delta_a", "resonant-pump results need delta_a = 0"));
    }
    if p.lam >= 0.5 * p.kappa {
        return Err(Error::Unstable {
            lam: p.lam,
            lambda_crit: 0.5 * p.kappa,
        });
    }
    Ok(())
}

/// Closed-form steady state for δ_a = 0 and λ < κ/2.
pub fn resonant_steady_state(p: &OscillatorParams) -> Result<ResonantSteadyState> {
    check_resonant(p)?;
    let h = 0.5 * p.kappa;
    let den = h * h - p.lam * p.lam;
    Ok(ResonantSteadyState {
        moments: Moments {
            n: 0.5 * p.lam * p.lam / den,
            a2: Complex64::new(0.0, 0.5 * p.lam * h / den),
        },
        s_inf: h / (h - p.lam),
    })
}

/// Pump amplitude giving steady-state anti-squeezing `s_inf` (linear).
pub fn resonant_lambda_for_squeezing(kappa: f64, s_inf: f64) -> f64 {
    0.5 * kappa * (1.0 - 1.0 / s_inf)
}

/// Phase-dependent dephasing for a resonant pump, supplied by the caller.
pub trait ResonantDephasing {
    /// Induced dephasing in MHz for pump `p`, bare dispersive strength `chi_0`
    /// and drive `drive` (phase θ relative to the squeezed quadrature).
    fn dephasing(&self, p: &OscillatorParams, chi_0: f64, drive: &DriveSpec) -> f64;
}

/// Frequency shift for a resonant pump with a drive at ν_p/2.
///
/// The drive amplitude is ε_d = κ√n̄_d · e^{i(θ − π/4)}, so θ = 0 drives the
/// squeezed quadrature. Without a dephasing model, the dephasing is zero and
/// the result carries [`Warning::DephasingModelMissing`].
pub fn resonant_driven_shift(
    p: &OscillatorParams,
    chi_0: f64,
    drive: &DriveSpec,
    dephasing: Option<&dyn ResonantDephasing>,
) -> Result<SpectralShift> {
    check_resonant(p)?;
    drive.validate()?;
    let k2 = 0.25 * p.kappa * p.kappa;
    let l2 = p.lam * p.lam;
    let den = k2 - l2;
    let lamb = 0.5 * l2 / den * chi_0;
    let stark = k2 * (k2 + l2 - p.lam * p.kappa * (2.0 * drive.theta).cos()) / (den * den) * drive.n_d * chi_0;
    let mut warnings = Vec::new();
    let drive_deph = match dephasing {
        Some(m) => m.dephasing(p, chi_0, drive),
        None => {
            warnings.push(Warning::DephasingModelMissing);
            0.0
        }
    };
    Ok(SpectralShift::from_parts(
        ShiftParts {
            lamb,
            stark,
            thermal: 0.0,
            drive: drive_deph,
        },
        warnings,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationRegime {
    SqueezedVacuum,
    Thermal,
    Driven,
}

/// Source of photon-number fluctuations for [`number_correlation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fluctuations<'a> {
    Squeezed(&'a BogoliubovFrame),
    Thermal { n_th: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCurve {
    /// Lags in µs.
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    pub regime: CorrelationRegime,
    /// Weights of the e^{−κτ} and e^{−κτ/2} branches.
    pub weights: (f64, f64),
    pub kappa: f64,
    pub warnings: Vec<Warning>,
}

impl CorrelationCurve {
    /// Exact ∫₀^∞ C(τ)dτ in µs.
    pub fn integral(&self) -> f64 {
        let k = TAU * self.kappa;
        self.weights.0 / k + 2.0 * self.weights.1 / k
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["x", "value"]).meta("x", "lag in us");
        for (&x, &v) in self.taus.iter().zip(&self.values) {
            t.push(vec![x, v]);
        }
        t
    }
}

/// Symmetrized photon-number correlator C(τ) = ⟨δn(τ)δn(0)⟩.
///
/// Lags are in µs; κ (MHz) enters as the angular rate 2πκ rad/µs.
pub fn number_correlation(
    source: Fluctuations<'_>,
    drive: &DriveSpec,
    kappa: f64,
    taus: &[f64],
) -> Result<CorrelationCurve> {
    drive.validate()?;
    let mut warnings = Vec::new();
    let (weights, regime) = match source {
        Fluctuations::Squeezed(frame) => {
            if near_coalescence(frame, kappa) {
                warnings.push(Warning::NearCoalescence);
            }
            let (c2, s2) = (frame.cosh2(), frame.sinh2());
            let w = (s2 * (1.0 + s2), drive.n_d * c2 * (1.0 + 2.0 * s2));
            let regime = if drive.n_d > 0.0 {
                CorrelationRegime::Driven
            } else {
                CorrelationRegime::SqueezedVacuum
            };
            (w, regime)
        }
        Fluctuations::Thermal { n_th } => {
            if !(n_th >= 0.0) {
                return Err(Error::invalid("n_th", "must be non-negative"));
            }
            (
                (n_th * (1.0 + n_th), drive.n_d * (1.0 + 2.0 * n_th)),
                CorrelationRegime::Thermal,
            )
        }
    };
    let k = TAU * kappa;
    let values = taus
        .iter()
        .map(|&t| weights.0 * (-k * t.abs()).exp() + weights.1 * (-0.5 * k * t.abs()).exp())
        .collect();
    Ok(CorrelationCurve {
        taus: taus.to_vec(),
        values,
        regime,
        weights,
        kappa,
        warnings,
    })
}

/// Dephasing rate in MHz from a correlator integral, Δγ_φ = χ² ∫₀^∞ C(τ)dτ
/// with χ converted to rad/µs and the result back to MHz.
pub fn dephasing_from_integral(chi: f64, integral_us: f64) -> f64 {
    TAU * chi * chi * integral_us
}
