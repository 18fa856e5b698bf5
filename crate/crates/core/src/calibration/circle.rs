use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lm::{linear_lsq, minimize, LmOptions};
use super::FitReport;
use crate::error::{Error, Result};
use crate::scattering::ComplexSpectrum;

/// Smallest accepted angular coverage of the data around the fitted circle.
pub const MIN_ARC_COVERAGE: f64 = PI / 2.0;

/// Tilted resonance circle z(ω) = A + B/(γ_t/2 − i(ω − ν_q)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleModel {
    pub center: Complex64,
    pub radius: f64,
    /// arg B: rotation of the circle about its accumulation point A.
    pub tilt: f64,
    pub nu_q: f64,
    pub gamma_t: f64,
    /// Off-resonant limit A.
    pub accumulation: Complex64,
}

impl CircleModel {
    pub fn b(&self) -> Complex64 {
        Complex64::from_polar(self.radius * self.gamma_t, self.tilt)
    }

    pub fn eval(&self, omega: f64) -> Complex64 {
        self.accumulation + self.b() / Complex64::new(0.5 * self.gamma_t, -(omega - self.nu_q))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleFit {
    pub model: CircleModel,
    pub report: FitReport,
}

/// Algebraic (Kasa) circle: minimizes Σ(|z|² + D x + E y + F)².
fn kasa(z: &[Complex64]) -> Result<(Complex64, f64)> {
    let n = z.len();
    let a = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => z[i].re,
        1 => z[i].im,
        _ => 1.0,
    });
    let y = DVector::from_fn(n, |i, _| -z[i].norm_sqr());
    let c = linear_lsq(&a, &y).ok_or_else(|| Error::Degenerate("collinear or repeated points".into()))?;
    let center = Complex64::new(-0.5 * c[0], -0.5 * c[1]);
    let r2 = center.norm_sqr() - c[2];
    if !(r2 > 0.0) || !r2.is_finite() {
        return Err(Error::Degenerate("algebraic circle fit has no real radius".into()));
    }
    Ok((center, r2.sqrt()))
}

/// Follows the data around `center` in frequency order. Returns the swept
/// angle (coverage) and the angle of the accumulation point, which closes
/// the sweep halfway through the unvisited arc. The sweep ends are averaged
/// over a few points to tame noise near the accumulation point.
fn sweep_angles(freqs: &[f64], z: &[Complex64], center: Complex64) -> (f64, f64) {
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| freqs[a].total_cmp(&freqs[b]));
    let mut psi = Vec::with_capacity(z.len());
    let mut prev = (z[order[0]] - center).arg();
    let mut acc = prev;
    for &i in &order {
        let phi = (z[i] - center).arg();
        let mut d = phi - prev;
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        acc += d;
        prev = phi;
        psi.push(acc);
    }
    let n = psi.len();
    let m = (n / 20).max(1);
    let first = psi[..m].iter().sum::<f64>() / m as f64;
    let last = psi[n - m..].iter().sum::<f64>() / m as f64;
    let swept = (last - first).clamp(-2.0 * PI, 2.0 * PI);
    let acc_angle = last + swept.signum() * 0.5 * (2.0 * PI - swept.abs());
    (swept.abs(), acc_angle)
}

/// Fits a single Lorentzian resonance circle of arbitrary orientation and
/// offset. Reports the total linewidth γ_t; γ_1 and γ_φ are not separated.
pub fn fit_circle(spectrum: &ComplexSpectrum) -> Result<CircleFit> {
    let n = spectrum.len();
    if n < 4 {
        return Err(Error::Degenerate(format!("{n} points cannot fix a tilted circle")));
    }
    let z = &spectrum.values;
    let w = &spectrum.freqs;
    let (center, radius) = kasa(z)?;
    let (coverage, acc_angle) = sweep_angles(w, z, center);
    if coverage < MIN_ARC_COVERAGE {
        return Err(Error::Degenerate(format!(
            "arc coverage {:.1} deg below {:.0} deg",
            coverage.to_degrees(),
            MIN_ARC_COVERAGE.to_degrees()
        )));
    }
    let a0 = center + Complex64::from_polar(radius, acc_angle);

    // With u = (z − A)/(2(c − A)) = 1/(1 − 2iΔ/γ): ω = ν − (γ/2)·Im(1/u).
    let diam = 2.0 * (center - a0);
    let mut rows = Vec::with_capacity(n);
    for (&om, &v) in w.iter().zip(z) {
        let u = (v - a0) / diam;
        if u.norm() > 1e-6 {
            rows.push((om, (1.0 / u).im, u.norm_sqr()));
        }
    }
    let a = DMatrix::from_fn(rows.len(), 2, |i, j| {
        let s = rows[i].2.sqrt();
        if j == 0 { s } else { -rows[i].1 * s }
    });
    let y = DVector::from_fn(rows.len(), |i, _| rows[i].0 * rows[i].2.sqrt());
    let lin = linear_lsq(&a, &y).ok_or_else(|| Error::Degenerate("frequency axis carries no information".into()))?;
    let nu0 = lin[0];
    let gamma0 = 2.0 * lin[1].abs();
    let gamma0 = if gamma0 > 0.0 {
        gamma0
    } else {
        (w[n - 1] - w[0]).abs() / n as f64
    };
    let b0 = (center - a0) * gamma0;

    let f = |x: &[f64]| -> Option<Vec<f64>> {
        if !(x[5] > 0.0) {
            return None;
        }
        let a = Complex64::new(x[0], x[1]);
        let b = Complex64::new(x[2], x[3]);
        let mut r = Vec::with_capacity(2 * n);
        for (&om, &v) in w.iter().zip(z) {
            let d = a + b / Complex64::new(0.5 * x[5], -(om - x[4])) - v;
            r.push(d.re);
            r.push(d.im);
        }
        Some(r)
    };
    let jac = |x: &[f64]| {
        let b = Complex64::new(x[2], x[3]);
        let i = Complex64::i();
        let mut j = DMatrix::zeros(2 * n, 6);
        for (k, &om) in w.iter().enumerate() {
            let q = Complex64::new(0.5 * x[5], -(om - x[4]));
            let cols = [
                Complex64::new(1.0, 0.0),
                i,
                1.0 / q,
                i / q,
                -i * b / (q * q),
                -0.5 * b / (q * q),
            ];
            for (c, d) in cols.iter().enumerate() {
                j[(2 * k, c)] = d.re;
                j[(2 * k + 1, c)] = d.im;
            }
        }
        j
    };
    let x0 = [a0.re, a0.im, b0.re, b0.im, nu0, gamma0];
    let flat: Vec<f64> = z.iter().flat_map(|v| [v.re, v.im]).collect();
    let res = minimize(&f, &jac, &x0, &LmOptions::with_scale(&flat))?;
    if !res.converged {
        return Err(Error::NotConverged { iterations: res.n_iter });
    }
    let x = &res.x;
    let acc = Complex64::new(x[0], x[1]);
    let b = Complex64::new(x[2], x[3]);
    let model = CircleModel {
        center: acc + b / x[5],
        radius: b.norm() / x[5],
        tilt: b.arg(),
        nu_q: x[4],
        gamma_t: x[5],
        accumulation: acc,
    };
    let report = FitReport::from_lm(
        &[
            ("a_re", "1"),
            ("a_im", "1"),
            ("b_re", "MHz"),
            ("b_im", "MHz"),
            ("nu_q", "MHz"),
            ("gamma_t", "MHz"),
        ],
        &res,
        Vec::new(),
    );
    Ok(CircleFit { model, report })
}
