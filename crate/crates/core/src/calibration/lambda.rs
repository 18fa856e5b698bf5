use nalgebra::DMatrix;
use num_complex::Complex64;

use super::lm::{minimize, LmOptions};
use super::FitReport;
use crate::error::{Error, Result};
use crate::params::OscillatorParams;
use crate::scattering::{gamma_signal_unchecked, ComplexSpectrum, SpectrumKind};

/// Fits closer than this fraction to λ_crit are flagged as boundary hits.
pub const BOUNDARY_MARGIN: f64 = 1e-3;

fn jacobian(base: &OscillatorParams, spectrum: &ComplexSpectrum, lam: f64) -> DMatrix<f64> {
    // Γ_a = N/D − 1 with ∂D/∂λ = −2λ, so ∂Γ_a/∂λ = 2λN/D².
    let p = base.with_lam(lam);
    let k = p.kappa;
    let mut j = DMatrix::zeros(2 * spectrum.len(), 1);
    for (i, &w) in spectrum.freqs.iter().enumerate() {
        let num = Complex64::new(0.5 * k * k, -k * (w + p.delta_a));
        let den = Complex64::new(0.25 * k * k + p.delta_a * p.delta_a - lam * lam - w * w, -k * w);
        let d = 2.0 * lam * num / (den * den);
        j[(2 * i, 0)] = d.re;
        j[(2 * i + 1, 0)] = d.im;
    }
    j
}

fn residuals(base: &OscillatorParams, spectrum: &ComplexSpectrum, lam: f64) -> Option<Vec<f64>> {
    if !lam.is_finite() || lam.abs() >= base.lambda_crit() {
        return None;
    }
    let p = base.with_lam(lam);
    let mut r = Vec::with_capacity(2 * spectrum.len());
    for (&w, &v) in spectrum.freqs.iter().zip(&spectrum.values) {
        let d: Complex64 = gamma_signal_unchecked(&p, w) - v;
        r.push(d.re);
        r.push(d.im);
    }
    Some(r)
}

/// Candidate λ values from the largest observed power gain: the split-peak
/// maximum G = 1/(1 − λ²/δ²) and the on-resonance gain of a merged peak.
fn gain_inversions(kappa: f64, delta: f64, gain: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if gain > 1.0 {
        out.push(delta.abs() * (1.0 - 1.0 / gain).sqrt());
    }
    // |Γ_a(0)|² = G with D₀ = v − x, x = λ²: (1−G)x² + 2(u+Gv)x + u² + κ²δ² − Gv² = 0.
    let u = 0.25 * kappa * kappa - delta * delta;
    let v = 0.25 * kappa * kappa + delta * delta;
    let (a, b, c) = (1.0 - gain, 2.0 * (u + gain * v), u * u + kappa * kappa * delta * delta - gain * v * v);
    if a.abs() < 1e-300 {
        if b != 0.0 {
            out.push((-c / b).max(0.0).sqrt());
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            for x in [(-b + disc.sqrt()) / (2.0 * a), (-b - disc.sqrt()) / (2.0 * a)] {
                if x >= 0.0 && x < v {
                    out.push(x.sqrt());
                }
            }
        }
    }
    out
}

/// Fits the pump amplitude λ (MHz) to a reflection spectrum Γ_a[ω] with κ
/// and δ_a known. The spectrum must be normalized (no line background).
pub fn fit_lambda(spectrum: &ComplexSpectrum, kappa: f64, delta_a: f64) -> Result<FitReport> {
    if spectrum.kind != SpectrumKind::Signal {
        return Err(Error::invalid("spectrum", "fit_lambda needs a signal reflection spectrum"));
    }
    if spectrum.len() < 2 {
        return Err(Error::Degenerate("fit_lambda needs at least two frequency points".into()));
    }
    let base = OscillatorParams::new(kappa, delta_a, 0.0);
    base.check_finite()?;
    let lam_crit = base.lambda_crit();
    let f = |x: &[f64]| residuals(&base, spectrum, x[0]);
    let cost = |lam: f64| f(&[lam]).map_or(f64::INFINITY, |r| r.iter().map(|v| v * v).sum::<f64>());

    let g_obs = spectrum.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    let mut candidates = gain_inversions(kappa, delta_a, g_obs);
    candidates.extend((0..16).map(|i| lam_crit * i as f64 / 16.0));
    let start = candidates
        .into_iter()
        .map(|l| l.min(lam_crit * (1.0 - 1e-6)))
        .min_by(|a, b| cost(*a).total_cmp(&cost(*b)))
        .unwrap_or(0.0);

    let jac = |x: &[f64]| jacobian(&base, spectrum, x[0]);
    let flat: Vec<f64> = spectrum.values.iter().flat_map(|v| [v.re, v.im]).collect();
    let res = minimize(&f, &jac, &[start], &LmOptions::with_scale(&flat))?;
    if !res.converged {
        return Err(Error::NotConverged { iterations: res.n_iter });
    }
    let mut res = res;
    res.x[0] = res.x[0].abs();
    let mut warnings = Vec::new();
    if res.x[0] > (1.0 - BOUNDARY_MARGIN) * lam_crit {
        warnings.push(format!(
            "lambda {:.6} at the stability boundary (lambda_crit {:.6})",
            res.x[0], lam_crit
        ));
    }
    Ok(FitReport::from_lm(&[("lam", "MHz")], &res, warnings))
}
