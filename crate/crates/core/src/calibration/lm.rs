//! Damped least squares (Levenberg–Marquardt).
//!
//! Steps are accepted only when they lower the cost, or leave it unchanged to
//! rounding while lowering the gradient; the damping acts as a
//! trust region in the metric diag(JᵀJ). Jacobians are supplied analytically.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) struct LmOptions {
    pub max_iter: usize,
    /// Convergence when ‖Jᵀr‖∞ falls below this fraction of its initial value.
    pub gradient_tol: f64,
    /// Magnitude of the data entering r = model − data; sets the rounding
    /// floor of the gradient.
    pub value_scale: f64,
}

impl LmOptions {
    pub fn with_scale<'a>(values: impl IntoIterator<Item = &'a f64>) -> Self {
        Self {
            value_scale: values.into_iter().fold(0.0, |m, v| m.max(v.abs())),
            ..Self::default()
        }
    }
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            gradient_tol: 1e-10,
            value_scale: 0.0,
        }
    }
}

pub(crate) struct LmResult {
    pub x: Vec<f64>,
    pub residuals: Vec<f64>,
    pub jacobian: DMatrix<f64>,
    pub n_iter: usize,
    pub converged: bool,
    pub gradient_norm: f64,
}

impl LmResult {
    pub fn cost(&self) -> f64 {
        sq(&self.residuals)
    }

    /// s²(JᵀJ)⁻¹ with s² = Σr²/(m − n); `None` when JᵀJ is singular.
    pub fn covariance(&self) -> Option<DMatrix<f64>> {
        let m = self.residuals.len();
        let n = self.x.len();
        let jtj = self.jacobian.transpose() * &self.jacobian;
        let inv = jtj.cholesky()?.inverse();
        let dof = m.saturating_sub(n).max(1) as f64;
        let cov = inv * (self.cost() / dof);
        Some((&cov + cov.transpose()) * 0.5)
    }
}

fn sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Residuals r(x), or `None` outside the model's domain.
pub(crate) type Residuals<'a> = &'a dyn Fn(&[f64]) -> Option<Vec<f64>>;
/// ∂r/∂x with rows ordered like the residuals.
pub(crate) type Jacobian<'a> = &'a dyn Fn(&[f64]) -> DMatrix<f64>;

/// Minimizes Σr(x)².
pub(crate) fn minimize(f: Residuals, jac: Jacobian, x0: &[f64], opts: &LmOptions) -> Result<LmResult> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = f(&x).ok_or_else(|| Error::Degenerate("initial guess outside the model domain".into()))?;
    if r.len() < n {
        return Err(Error::Degenerate(format!("{} residuals for {n} parameters", r.len())));
    }
    let mut cost = sq(&r);
    let mut j = jac(&x);
    let grad = |j: &DMatrix<f64>, r: &[f64]| j.transpose() * DVector::from_column_slice(r);
    let mut g = grad(&j, &r);
    let g0 = g.amax();
    // A gradient within rounding of Σ|J_ik|(|r_i| + scale) is indistinguishable from zero.
    let floor = |j: &DMatrix<f64>, r: &[f64]| {
        (0..n)
            .map(|k| {
                r.iter()
                    .enumerate()
                    .map(|(i, v)| j[(i, k)].abs() * (v.abs() + opts.value_scale))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
            * 64.0
            * f64::EPSILON
    };
    let done = |g: &DVector<f64>, j: &DMatrix<f64>, r: &[f64]| {
        let cost = sq(r);
        cost == 0.0 || g.amax() <= (opts.gradient_tol * g0).max(floor(j, r))
    };
    let mut converged = g0 == 0.0 || done(&g, &j, &r);
    let mut mu = 1e-3;
    let mut n_iter = 0;

    while !converged && n_iter < opts.max_iter {
        n_iter += 1;
        let jtj = j.transpose() * &j;
        let mut accepted = false;
        for _ in 0..60 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += mu * jtj[(k, k)].max(1e-300);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                mu *= 10.0;
                continue;
            };
            let xn: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let Some(rn) = f(&xn) else {
                mu *= 4.0;
                continue;
            };
            let cn = sq(&rn);
            let take = if cn < cost {
                true
            } else if cn <= cost * (1.0 + 16.0 * f64::EPSILON) {
                // Cost flat to rounding: accept only if the gradient shrinks.
                let jn = jac(&xn);
                grad(&jn, &rn).amax() < g.amax()
            } else {
                false
            };
            if take {
                x = xn;
                r = rn;
                cost = cn;
                mu = (mu / 3.0).max(1e-12);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        j = jac(&x);
        g = grad(&j, &r);
        converged = done(&g, &j, &r);
        if !accepted {
            break;
        }
    }
    Ok(LmResult {
        x,
        residuals: r,
        jacobian: j,
        n_iter,
        converged,
        gradient_norm: g.amax(),
    })
}

/// Ordinary least squares y ≈ A c (columns of A are regressors).
pub(crate) fn linear_lsq(a: &DMatrix<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
    let at = a.transpose();
    (&at * a).cholesky().map(|c| c.solve(&(&at * y)))
}
