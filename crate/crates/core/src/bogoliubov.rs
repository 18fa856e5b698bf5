//! Dispersive coupling of a qubit or transmon to the Bogoliubov mode.
//!
//! Signal and idler detunings are Δ[r] = δ_q − Ω_a[r] and Σ[r] = δ_q + Ω_a[r].
//! Shifts are second order in the dressing parameter η; the dressed loss
//! channels enter the master equation at third order and are reported for
//! inspection only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{BogoliubovFrame, TransmonParams};

/// Upper bound on η for results to be considered dispersive.
pub const DISPERSIVE_ETA_MAX: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersiveResult {
    /// χ[r] (two-level) or χ_t[r] (transmon), MHz.
    pub chi: f64,
    /// Δ[r] = δ_q − Ω_a[r].
    pub delta_big: f64,
    /// Σ[r] = δ_q + Ω_a[r].
    pub sigma_big: f64,
    /// Counter-rotating coupling χ_a[r] dropped by the secular approximation.
    pub chi_anomalous: f64,
    pub eta: f64,
    pub dispersive_valid: bool,
    /// Second-order qubit frequency renormalization δ_q^(2)[r].
    pub lamb_qubit: f64,
    /// Second-order oscillator renormalization Ω_a^(2)[r] (transmon only).
    pub lamb_oscillator: Option<f64>,
}

fn detunings(q: &TransmonParams, frame: &BogoliubovFrame) -> Result<(f64, f64)> {
    q.validate()?;
    let delta = q.delta_q - frame.omega_bog;
    let sigma = q.delta_q + frame.omega_bog;
    if delta == 0.0 {
        return Err(Error::Resonance("qubit resonant with the signal mode (Δ[r] = 0)".into()));
    }
    if sigma == 0.0 {
        return Err(Error::Resonance("qubit resonant with the idler mode (Σ[r] = 0)".into()));
    }
    Ok((delta, sigma))
}

fn eta(q: &TransmonParams, frame: &BogoliubovFrame, kappa: f64, delta: f64, sigma: f64) -> f64 {
    let num = (q.g * frame.r.exp())
        .max(kappa)
        .max(q.gamma_1)
        .max(q.gamma_phi);
    num / delta.abs().min(sigma.abs())
}

fn anomalous(q: &TransmonParams, frame: &BogoliubovFrame, delta: f64, sigma: f64) -> f64 {
    q.g * q.g * (2.0 * frame.r).sinh() * q.delta_q / (delta * sigma)
}

/// Two-level dispersive strength χ[r] = 2g²cosh²r/Δ + 2g²sinh²r/Σ.
pub fn chi_qubit(q: &TransmonParams, frame: &BogoliubovFrame, kappa: f64) -> Result<DispersiveResult> {
    let (delta, sigma) = detunings(q, frame)?;
    let g2 = q.g * q.g;
    let chi = 2.0 * g2 * frame.cosh2() / delta + 2.0 * g2 * frame.sinh2() / sigma;
    let eta = eta(q, frame, kappa, delta, sigma);
    Ok(DispersiveResult {
        chi,
        delta_big: delta,
        sigma_big: sigma,
        chi_anomalous: anomalous(q, frame, delta, sigma),
        eta,
        dispersive_valid: eta < DISPERSIVE_ETA_MAX,
        lamb_qubit: 0.5 * chi,
        lamb_oscillator: None,
    })
}

/// Transmon dispersive strength including the |f⟩ level through χ_q.
pub fn chi_transmon(q: &TransmonParams, frame: &BogoliubovFrame, kappa: f64) -> Result<DispersiveResult> {
    let (delta, sigma) = detunings(q, frame)?;
    if q.chi_q + delta == 0.0 {
        return Err(Error::Resonance("e-f transition resonant with the signal mode (χ_q + Δ[r] = 0)".into()));
    }
    if q.chi_q + sigma == 0.0 {
        return Err(Error::Resonance("e-f transition resonant with the idler mode (χ_q + Σ[r] = 0)".into()));
    }
    let g2 = q.g * q.g;
    let (c2, s2) = (frame.cosh2(), frame.sinh2());
    let chi = 2.0 * g2 / delta * (q.chi_q / (q.chi_q + delta)) * c2
        + 2.0 * g2 / sigma * (q.chi_q / (q.chi_q + sigma)) * s2;
    let lamb_qubit = g2 * c2 / delta + g2 * s2 / sigma * (q.chi_q - sigma) / (q.chi_q + sigma);
    let lamb_oscillator = -g2 * c2 / delta - g2 * s2 / sigma;
    let eta = eta(q, frame, kappa, delta, sigma);
    Ok(DispersiveResult {
        chi,
        delta_big: delta,
        sigma_big: sigma,
        chi_anomalous: anomalous(q, frame, delta, sigma),
        eta,
        dispersive_valid: eta < DISPERSIVE_ETA_MAX,
        lamb_qubit,
        lamb_oscillator: Some(lamb_oscillator),
    })
}

/// Dispersive result with the variant chosen by `q.n_levels` (2 = qubit).
pub fn chi_auto(q: &TransmonParams, frame: &BogoliubovFrame, kappa: f64) -> Result<DispersiveResult> {
    if q.n_levels == 2 {
        chi_qubit(q, frame, kappa)
    } else {
        chi_transmon(q, frame, kappa)
    }
}

/// Straddling-regime dispersive shift (2g²/Δ)·χ_q/(Δ + χ_q) at bare detuning Δ.
pub fn straddle_chi(g: f64, chi_q: f64, detuning: f64) -> f64 {
    2.0 * g * g / detuning * chi_q / (detuning + chi_q)
}

/// Coefficients of an operator c_α·α + c_α†·α†.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub alpha: f64,
    pub alpha_dag: f64,
}

/// Dressed loss channels produced by the Schrieffer–Wolff transformation.
///
/// Each field is the prefactor multiplying the listed qubit operator. Their
/// Lindblad weights are third order in η, so none of them enters the
/// second-order shifts computed elsewhere in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedLossRates {
    /// √κ (g cosh²r/Δ − g sinh²r/Σ), multiplies σ−.
    pub purcell_down: f64,
    /// √κ g cosh r sinh r (1/Δ − 1/Σ), multiplies σ+.
    pub purcell_up: f64,
    /// √γ_1 (g cosh r/Δ α + g sinh r/Σ α†), multiplies σz.
    pub dressed_dephasing: ModeCoefficients,
    /// √(γ_φ/2) (2g cosh r/Δ α + 2g sinh r/Σ α†), multiplies σ+.
    pub dressed_excitation: ModeCoefficients,
    /// √(γ_φ/2) (2g cosh r/Δ α† + 2g sinh r/Σ α), multiplies σ−.
    pub dressed_relaxation: ModeCoefficients,
    pub kappa: f64,
    pub gamma_1: f64,
    pub gamma_phi: f64,
}

pub fn dressed_losses(q: &TransmonParams, frame: &BogoliubovFrame, kappa: f64) -> Result<DressedLossRates> {
    let (delta, sigma) = detunings(q, frame)?;
    let (c, s) = (frame.cosh_r(), frame.sinh_r());
    let g = q.g;
    let sk = kappa.sqrt();
    let s1 = q.gamma_1.sqrt();
    let sp = (0.5 * q.gamma_phi).sqrt();
    Ok(DressedLossRates {
        purcell_down: sk * (g * c * c / delta - g * s * s / sigma),
        purcell_up: sk * g * c * s * (1.0 / delta - 1.0 / sigma),
        dressed_dephasing: ModeCoefficients {
            alpha: s1 * g * c / delta,
            alpha_dag: s1 * g * s / sigma,
        },
        dressed_excitation: ModeCoefficients {
            alpha: sp * 2.0 * g * c / delta,
            alpha_dag: sp * 2.0 * g * s / sigma,
        },
        dressed_relaxation: ModeCoefficients {
            alpha: sp * 2.0 * g * s / sigma,
            alpha_dag: sp * 2.0 * g * c / delta,
        },
        kappa,
        gamma_1: q.gamma_1,
        gamma_phi: q.gamma_phi,
    })
}

/// Two-photon pump amplitude from the three-wave-mixing strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpConversion {
    pub lam: f64,
    /// g₃Π/ν_p with Π ≈ ε_p/(3ν_a) and ν_p ≈ 2ν_a; must be ≪ 1 for the RWA.
    pub rwa_ratio: f64,
}

pub fn pump_to_lambda(epsilon_p: f64, g3: f64, freq_a: f64) -> Result<PumpConversion> {
    if !(freq_a > 0.0) {
        return Err(Error::invalid("freq_a", "must be positive"));
    }
    let pi_disp = epsilon_p / (3.0 * freq_a);
    Ok(PumpConversion {
        lam: 2.0 * g3 * epsilon_p / freq_a,
        rwa_ratio: (g3 * pi_disp / (2.0 * freq_a)).abs(),
    })
}
