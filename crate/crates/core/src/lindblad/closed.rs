//! Dispersive strength from exact diagonalization of the dissipation-free
//! joint Hamiltonian.
//!
//! With κ = γ = 0 the Liouvillian eigenvalues are differences of Hamiltonian
//! eigenvalues, so the per-excitation shift of the coherence eigenvalue is
//! χ = (E₁ₑ − E₁g) − (E₀ₑ − E₀g), where |n, k⟩ are the dressed states
//! closest to squeezed Fock state n times transmon level k.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::operators::Space;
use super::LindbladConfig;
use crate::error::{Error, Result};
use crate::params::{OscillatorParams, TransmonParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedSystemChi {
    pub chi: f64,
    /// E(0,e) − E(0,g): dressed qubit frequency with the oscillator in its ground state.
    pub qubit_freq: f64,
    /// Dressed energies of (0,g), (1,g), (0,e), (1,e).
    pub energies: [f64; 4],
    /// Squared overlaps with the corresponding bare product states.
    pub overlaps: [f64; 4],
    pub n_fock: usize,
}

pub fn chi_closed_system(p: &OscillatorParams, q: &TransmonParams, cfg: &LindbladConfig) -> Result<ClosedSystemChi> {
    cfg.validate()?;
    q.validate()?;
    if p.lam >= p.delta_a.abs() {
        return Err(Error::NotBogoliubov {
            lam: p.lam,
            delta_a: p.delta_a,
        });
    }
    let levels = cfg.n_transmon.max(2);
    let n = cfg.n_fock;
    let to_real = |m: DMatrix<num_complex::Complex64>| m.map(|z| z.re);

    let osc = Space { n_fock: n, levels: 1 };
    let h_osc = to_real(osc.hamiltonian(p, None, None).to_dense());
    let eig = SymmetricEigen::new(h_osc);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    if p.delta_a < 0.0 {
        order.reverse();
    }
    let fock = |k: usize| eig.eigenvectors.column(order[k]).into_owned();

    let space = Space { n_fock: n, levels };
    let h = to_real(space.hamiltonian(p, Some(q), None).to_dense());
    let joint = SymmetricEigen::new(h);

    let mut energies = [0.0; 4];
    let mut overlaps = [0.0; 4];
    for (slot, (nf, k)) in [(0, 0), (1, 0), (0, 1), (1, 1)].into_iter().enumerate() {
        let phi = fock(nf);
        let mut reference = nalgebra::DVector::<f64>::zeros(space.dim());
        for m in 0..n {
            reference[space.idx(m, k)] = phi[m];
        }
        let (best, ov) = (0..space.dim())
            .map(|j| (j, joint.eigenvectors.column(j).dot(&reference).powi(2)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty spectrum");
        if ov < 0.5 {
            return Err(Error::AmbiguousSector { best: ov, second: f64::NAN });
        }
        energies[slot] = joint.eigenvalues[best];
        overlaps[slot] = ov;
    }
    Ok(ClosedSystemChi {
        chi: (energies[3] - energies[1]) - (energies[2] - energies[0]),
        qubit_freq: energies[2] - energies[0],
        energies,
        overlaps,
        n_fock: n,
    })
}
