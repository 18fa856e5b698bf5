//! Qubit frequency and linewidth from the Liouvillian coherence sector.
//!
//! The coherence |e⟩⟨g| evolves as e^{λt} with λ ≈ −iω_q − γ_t/2, so the
//! qubit frequency is −Im λ and the decay −Re λ. The eigenvalue is found by
//! shifted inverse iteration on two vectors started from σ+ρ_ss, and the
//! eigenvector with the larger overlap with σ+ρ_ss is kept.

use faer::linalg::solvers::Solve;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::steady::solve_once;
use super::superop::{build_liouvillian, Liouvillian};
use super::LindbladConfig;
use crate::error::{Error, Result};
use crate::params::{OscillatorParams, TransmonParams};
use crate::spectral::{ShiftParts, SpectralShift};

const MAX_ITER: usize = 200;
/// Runner-up overlap ratio above which the sector is called ambiguous.
const AMBIGUITY_RATIO: f64 = 0.9;

/// Coherence eigenvalue of one Liouvillian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceEigen {
    pub eigenvalue: Complex64,
    pub overlap: f64,
    pub runner_up_overlap: f64,
    pub iterations: usize,
    pub top_fock_population: f64,
}

/// Pump-on vs pump-off comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceShift {
    pub d_omega_q: f64,
    pub d_gamma_phi: f64,
    pub pumped: CoherenceEigen,
    pub reference: CoherenceEigen,
    pub cfg: LindbladConfig,
}

impl CoherenceShift {
    pub fn to_spectral_shift(&self) -> SpectralShift {
        SpectralShift::from_parts(
            ShiftParts {
                lamb: self.d_omega_q,
                thermal: self.d_gamma_phi,
                ..Default::default()
            },
            Vec::new(),
        )
    }
}

/// Shift and extra dephasing of the qubit caused by the pump, each
/// referenced to the same model with λ = 0.
pub fn qubit_shift_dephasing(p: &OscillatorParams, q: &TransmonParams, cfg: &LindbladConfig) -> Result<CoherenceShift> {
    if cfg.n_transmon < 2 {
        return Err(Error::invalid("n_transmon", "the coherence sector needs at least two levels"));
    }
    let pumped = coherence_eigen(&build_liouvillian(p, Some(q), None, cfg)?, q)?;
    let reference = coherence_eigen(&build_liouvillian(&p.with_lam(0.0), Some(q), None, cfg)?, q)?;
    Ok(CoherenceShift {
        d_omega_q: -pumped.eigenvalue.im + reference.eigenvalue.im,
        d_gamma_phi: -pumped.eigenvalue.re + reference.eigenvalue.re,
        pumped,
        reference,
        cfg: *cfg,
    })
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(a: &mut [Complex64]) {
    let n = norm(a);
    for z in a.iter_mut() {
        *z /= n;
    }
}

/// Modified Gram–Schmidt on two vectors.
fn orthonormalize(u: &mut [Complex64], v: &mut [Complex64]) {
    normalize(u);
    let c = dot(u, v);
    for (x, y) in v.iter_mut().zip(u.iter()) {
        *x -= c * y;
    }
    normalize(v);
}

/// Eigenpairs of a 2×2 complex matrix [[a, b], [c, d]].
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> [(Complex64, [Complex64; 2]); 2] {
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
    let mut out = [(Complex64::default(), [Complex64::default(); 2]); 2];
    for (slot, l) in out.iter_mut().zip([(tr + disc) * 0.5, (tr - disc) * 0.5]) {
        // (a − l) x + b y = 0; pick the better-conditioned row.
        let v = if b.norm() + (a - l).norm() >= c.norm() + (d - l).norm() {
            [b, l - a]
        } else {
            [l - d, c]
        };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        let v = if n > 0.0 { [v[0] / n, v[1] / n] } else { [Complex64::new(1.0, 0.0), Complex64::default()] };
        *slot = (l, v);
    }
    out
}

pub(crate) fn coherence_eigen(l: &Liouvillian, q: &TransmonParams) -> Result<CoherenceEigen> {
    let ss = solve_once(l)?;
    let space = l.space();
    let d = space.dim();
    let dim = d * d;
    let sp = space.sigma_plus().to_dense();
    let target = &sp * &ss.rho;
    let mut x0: Vec<Complex64> = target.as_slice().to_vec();
    normalize(&mut x0);
    let a = space.a().to_dense();
    let second = a.adjoint() * &target * &a;
    let mut u = x0.clone();
    let mut v: Vec<Complex64> = second.as_slice().to_vec();
    if norm(&v) < 1e-12 {
        // Deterministic filler that is generically not parallel to u.
        v = (0..dim).map(|i| Complex64::new(((i * 7919) % 104729) as f64, 1.0)).collect();
    }
    orthonormalize(&mut u, &mut v);

    let mu = Complex64::new(-0.5 * q.gamma_t(), -q.delta_q);
    let lu = l
        .matrix
        .to_faer(mu, None)?
        .sp_lu()
        .map_err(|e| Error::UnstableDynamics(format!("shifted factorization failed: {e:?}")))?;
    let solve = |x: &[Complex64]| -> Vec<Complex64> {
        let rhs = faer::Col::<Complex64>::from_fn(dim, |i| x[i]);
        let y = lu.solve(&rhs);
        (0..dim).map(|i| y[i]).collect()
    };

    let mut prev = [Complex64::new(f64::INFINITY, 0.0); 2];
    let mut pairs = eig2(Complex64::default(), Complex64::default(), Complex64::default(), Complex64::default());
    let mut iterations = 0;
    for it in 1..=MAX_ITER {
        iterations = it;
        u = solve(&u);
        v = solve(&v);
        orthonormalize(&mut u, &mut v);
        let lu_ = l.matrix.apply(&u);
        let lv = l.matrix.apply(&v);
        pairs = eig2(dot(&u, &lu_), dot(&u, &lv), dot(&v, &lu_), dot(&v, &lv));
        let mut vals = [pairs[0].0, pairs[1].0];
        vals.sort_by(|a, b| (a - mu).norm().total_cmp(&(b - mu).norm()));
        let scale = vals[0].norm().max(1.0);
        if (vals[0] - prev[0]).norm() < 1e-13 * scale && (vals[1] - prev[1]).norm() < 1e-9 * scale {
            break;
        }
        prev = vals;
    }

    let mut scored: Vec<(f64, Complex64)> = pairs
        .iter()
        .map(|(val, c)| {
            let w: Vec<Complex64> = u.iter().zip(&v).map(|(a, b)| c[0] * a + c[1] * b).collect();
            (dot(&x0, &w).norm() / norm(&w), *val)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (best, eigenvalue) = scored[0];
    let runner_up = scored[1].0;
    if runner_up >= AMBIGUITY_RATIO * best {
        return Err(Error::AmbiguousSector { best, second: runner_up });
    }
    Ok(CoherenceEigen {
        eigenvalue,
        overlap: best,
        runner_up_overlap: runner_up,
        iterations,
        top_fock_population: ss.top_fock_population,
    })
}

/// Photon-noise part of the induced dephasing.
///
/// The total coherence-decay change also contains Purcell and dressed-decay
/// terms of order g², while dephasing from photon-number noise is of order
/// χ² ∝ g⁴. Running at g and g/√2 and eliminating the g² term isolates it:
/// Δγ₄ = 2(Δγ(g) − 2Δγ(g/√2)).
pub fn quartic_dephasing(p: &OscillatorParams, q: &TransmonParams, cfg: &LindbladConfig) -> Result<f64> {
    let full = qubit_shift_dephasing(p, q, cfg)?.d_gamma_phi;
    let weak = TransmonParams {
        g: q.g / std::f64::consts::SQRT_2,
        ..*q
    };
    let half = qubit_shift_dephasing(p, &weak, cfg)?.d_gamma_phi;
    Ok(2.0 * (full - 2.0 * half))
}
