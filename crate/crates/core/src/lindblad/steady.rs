use faer::linalg::solvers::Solve;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::superop::Liouvillian;
use crate::error::{Error, Result};
use crate::spectral::Moments;

/// Number of quadrature angles reported in [`SteadyStateResult::x_var`].
const THETA_POINTS: usize = 16;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SteadyStateResult {
    pub moments: Moments,
    /// (θ, ⟨X_θ²⟩) on [0, π).
    pub x_var: Vec<(f64, f64)>,
    /// |Tr ρ − 1| before normalization.
    pub trace_residual: f64,
    /// max |ρ − ρ†|.
    pub hermiticity_residual: f64,
    pub min_eigenvalue: f64,
    /// ‖Lρ‖₂ for the normalized state.
    pub residual_norm: f64,
    /// Population in the top Fock level.
    pub top_fock_population: f64,
    pub n_fock: usize,
    /// Largest relative moment change when the Fock cutoff is doubled.
    pub truncation_change: f64,
    pub truncation_converged: bool,
    #[serde(skip)]
    pub rho: DMatrix<Complex64>,
}

/// Steady state of `l`, checked against a solve with twice the Fock cutoff.
pub fn steady_state(l: &Liouvillian) -> Result<SteadyStateResult> {
    let mut res = solve_once(l)?;
    let doubled = solve_once(&l.rebuild(2 * l.cfg.n_fock)?)?;
    let change = relative_change(&res.moments, &doubled.moments);
    res.truncation_change = change;
    res.truncation_converged = change < l.cfg.convergence_factor;
    Ok(res)
}

fn relative_change(a: &Moments, b: &Moments) -> f64 {
    let dn = (a.n - b.n).abs() / (b.n.abs() + 1e-12);
    let dm = (a.a2 - b.a2).norm() / (b.a2.norm() + 1e-12);
    dn.max(dm)
}

/// Solves Lρ = 0 with the first equation replaced by Tr ρ = 1.
pub(crate) fn solve_once(l: &Liouvillian) -> Result<SteadyStateResult> {
    let d = l.hilbert_dim();
    let dim = d * d;
    let one = Complex64::new(1.0, 0.0);
    let trace_row: Vec<(usize, Complex64)> = (0..d).map(|i| (i + i * d, one)).collect();
    let a = l.matrix.to_faer(Complex64::new(0.0, 0.0), Some((0, &trace_row)))?;
    let lu = a
        .sp_lu()
        .map_err(|e| Error::UnstableDynamics(format!("LU factorization failed: {e:?}")))?;
    let rhs = faer::Col::<Complex64>::from_fn(dim, |i| if i == 0 { one } else { Complex64::new(0.0, 0.0) });
    let x = lu.solve(&rhs);
    let v: Vec<Complex64> = (0..dim).map(|i| x[i]).collect();
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::UnstableDynamics("steady-state solve produced non-finite values".into()));
    }
    let mut rho = DMatrix::from_column_slice(d, d, &v);
    let trace = rho.trace();
    let trace_residual = (trace - one).norm();
    rho /= trace;

    let herm = (&rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sym = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let min_eigenvalue = sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    let residual_norm = l
        .matrix
        .apply(rho.as_slice())
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if min_eigenvalue < -1e-6 {
        return Err(Error::UnstableDynamics(format!(
            "steady state is not positive (min eigenvalue {min_eigenvalue:e})"
        )));
    }

    let space = l.space();
    let mut n = 0.0;
    let mut a2 = Complex64::new(0.0, 0.0);
    let mut top = 0.0;
    for f in 0..space.n_fock {
        for k in 0..space.levels {
            let i = space.idx(f, k);
            n += f as f64 * rho[(i, i)].re;
            if f + 1 == space.n_fock {
                top += rho[(i, i)].re;
            }
            if f >= 2 {
                a2 += ((f * (f - 1)) as f64).sqrt() * rho[(i, space.idx(f - 2, k))];
            }
        }
    }
    let moments = Moments { n, a2 };
    let x_var = (0..THETA_POINTS)
        .map(|j| {
            let th = std::f64::consts::PI * j as f64 / THETA_POINTS as f64;
            (th, moments.x_var(th))
        })
        .collect();
    Ok(SteadyStateResult {
        moments,
        x_var,
        trace_residual,
        hermiticity_residual: herm,
        min_eigenvalue,
        residual_norm,
        top_fock_population: top,
        n_fock: space.n_fock,
        truncation_change: f64::NAN,
        truncation_converged: false,
        rho,
    })
}
