//! Truncated-Fock Lindblad solver used as an independent oracle.
//!
//! The joint Hamiltonian is written in the bare rotating frame (pump at
//! ν_p/2), never in the Bogoliubov frame, so agreement with the analytic
//! modules is a genuine check. Superoperators act on density matrices
//! stacked column by column: vec(AXB) = (Bᵀ ⊗ A) vec(X), and the element
//! ρ_ij sits at index i + j·d. Product-space index of |n⟩⊗|k⟩ is n·m + k
//! for m transmon levels.

mod closed;
mod coherence;
mod operators;
mod steady;
mod superop;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{DriveSpec, OscillatorParams};

pub use closed::{chi_closed_system, ClosedSystemChi};
pub use coherence::{quartic_dephasing, qubit_shift_dephasing, CoherenceEigen, CoherenceShift};
pub use steady::{steady_state, SteadyStateResult};
pub use superop::{build_liouvillian, Liouvillian, SparseSuperOp};

/// Population allowed beyond the truncation when sizing the Fock space.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LindbladConfig {
    pub n_fock: usize,
    /// 1 (oscillator only), 2 (qubit) or 3 (transmon with |f⟩).
    pub n_transmon: usize,
    pub solve_tol: f64,
    pub convergence_factor: f64,
}

impl Default for LindbladConfig {
    fn default() -> Self {
        Self {
            n_fock: 32,
            n_transmon: 1,
            solve_tol: 1e-9,
            convergence_factor: 1e-6,
        }
    }
}

impl LindbladConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_fock < 4 {
            return Err(Error::invalid("n_fock", "need at least 4 Fock states"));
        }
        if !(1..=3).contains(&self.n_transmon) {
            return Err(Error::invalid("n_transmon", "must be 1, 2 or 3"));
        }
        if !(self.solve_tol > 0.0 && self.solve_tol <= 1e-6) {
            return Err(Error::invalid("solve_tol", "must lie in (0, 1e-6]"));
        }
        if !(self.convergence_factor > 0.0) {
            return Err(Error::invalid("convergence_factor", "must be positive"));
        }
        Ok(())
    }

    /// Configuration sized by [`suggested_n_fock`] for the given model.
    pub fn sized_for(p: &OscillatorParams, drive: Option<&DriveSpec>, n_transmon: usize) -> Self {
        Self {
            n_fock: suggested_n_fock(p, drive, DEFAULT_TAIL_TOL),
            n_transmon,
            ..Self::default()
        }
    }
}

/// Exact steady-state ⟨a†a⟩ and |⟨a²⟩| of the pumped oscillator alone.
///
/// N = ½λ²/(κ²/4 + δ_a² − λ²) and ⟨a²⟩ = iλ(2N+1)/(κ + 2iδ_a).
pub fn oscillator_moments(p: &OscillatorParams) -> (f64, f64) {
    let q = 0.25 * p.kappa * p.kappa + p.delta_a * p.delta_a - p.lam * p.lam;
    let n = 0.5 * p.lam * p.lam / q;
    let m = p.lam * (2.0 * n + 1.0) / (p.kappa * p.kappa + 4.0 * p.delta_a * p.delta_a).sqrt();
    (n, m)
}

/// Photons injected by a static drive into the pumped oscillator, |⟨a⟩|².
fn coherent_photons(p: &OscillatorParams, drive: Option<&DriveSpec>) -> f64 {
    let Some(d) = drive else { return 0.0 };
    // Worst case over the drive phase of the linear response to ε_d = κ√n̄_d.
    let q = 0.25 * p.kappa * p.kappa + p.delta_a * p.delta_a - p.lam * p.lam;
    let gain = ((0.25 * p.kappa * p.kappa + p.delta_a * p.delta_a).sqrt() + p.lam) / q;
    let eps = p.kappa * d.n_d.sqrt();
    (0.5 * eps * gain).powi(2)
}

/// Estimated oscillator occupation used for the truncation guard.
pub fn estimated_occupation(p: &OscillatorParams, drive: Option<&DriveSpec>) -> f64 {
    oscillator_moments(p).0 + coherent_photons(p, drive)
}

/// Fock cutoff whose Gaussian tail beyond the cutoff is below `tail_tol`.
///
/// The squeezed thermal state has a Fock distribution decaying like q^n with
/// q = (N + |M|)/(N + |M| + 1); a coherent displacement adds a Poisson-like
/// offset.
pub fn suggested_n_fock(p: &OscillatorParams, drive: Option<&DriveSpec>, tail_tol: f64) -> usize {
    let (n, m) = oscillator_moments(p);
    let v = n + m;
    let squeezed = if v > 0.0 {
        (tail_tol.ln() / (v / (v + 1.0)).ln()).ceil() as usize
    } else {
        0
    };
    let coh = coherent_photons(p, drive);
    let shift = (coh + 8.0 * coh.sqrt()).ceil() as usize;
    (squeezed + shift).max(16)
}
