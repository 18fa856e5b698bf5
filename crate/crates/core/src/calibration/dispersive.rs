use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::lm::{linear_lsq, minimize, LmOptions};
use super::FitReport;
use crate::error::{Error, Result};
use crate::params::{BogoliubovFrame, DriveSpec, OscillatorParams};
use crate::spectral::resonant_driven_shift;

/// Qubit shift and dephasing at one drive power, relative to the undriven qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftPoint {
    /// Drive power in arbitrary linear units.
    pub power: f64,
    pub d_omega: f64,
    pub d_gamma: Option<f64>,
}

/// Power sweep at one qubit detuning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftSeries {
    /// Label only; each series gets its own χ.
    pub detuning: f64,
    pub points: Vec<ShiftPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StraddlePoint {
    /// Δ = δ_q − δ_a in MHz.
    pub detuning: f64,
    pub chi: f64,
}

/// Shift and dephasing at injected photon number n̄_d, relative to n̄_d = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnhancedPoint {
    pub n_d: f64,
    pub d_omega: f64,
    pub d_gamma: Option<f64>,
}

/// Drive-induced shift versus drive phase for a resonant pump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub theta: f64,
    pub n_d: f64,
    pub d_omega: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }
}

/// Joint fit of per-detuning χ_i and a shared power scale P_0 with
/// Δω = χ P/P_0 and Δγ = 2χ² P/(κ P_0).
///
/// Without dephasing data only χ_i/P_0 is identifiable, which is reported as
/// [`Error::RankDeficient`].
pub fn fit_chi_n0(series: &[ShiftSeries], kappa: f64) -> Result<FitReport> {
    if !(kappa > 0.0) {
        return Err(Error::invalid("kappa", "must be positive"));
    }
    if series.is_empty() {
        return Err(Error::Degenerate("no shift series supplied".into()));
    }
    for s in series {
        if s.points.iter().all(|p| p.power == 0.0) {
            return Err(Error::Degenerate(format!(
                "no information: all drive powers are zero at detuning {}",
                s.detuning
            )));
        }
    }
    let has_gamma = |p: &ShiftPoint| p.d_gamma.is_some() && p.power != 0.0;
    if !series.iter().any(|s| s.points.iter().any(has_gamma)) {
        return Err(Error::RankDeficient(
            "chi and P0 enter only as chi/P0 without dephasing data".into(),
        ));
    }

    // Per-series slopes through the origin.
    let slope = |s: &ShiftSeries, pick: &dyn Fn(&ShiftPoint) -> Option<f64>| {
        let (mut num, mut den) = (0.0, 0.0);
        for p in &s.points {
            if let Some(y) = pick(p) {
                num += p.power * y;
                den += p.power * p.power;
            }
        }
        if den > 0.0 { num / den } else { f64::NAN }
    };
    let s_omega: Vec<f64> = series.iter().map(|s| slope(s, &|p| Some(p.d_omega))).collect();
    let s_gamma: Vec<f64> = series.iter().map(|s| slope(s, &|p| p.d_gamma)).collect();
    let p0_guesses: Vec<f64> = s_omega
        .iter()
        .zip(&s_gamma)
        .filter(|(a, b)| a.abs() > 0.0 && b.is_finite() && **b > 0.0)
        .map(|(a, b)| (0.5 * kappa * b / a) / a)
        .filter(|v| *v > 0.0 && v.is_finite())
        .collect();
    if p0_guesses.is_empty() {
        return Err(Error::RankDeficient("dephasing data carry no power dependence".into()));
    }
    let p0 = median(p0_guesses);
    let mut x0: Vec<f64> = s_omega.iter().map(|s| s * p0).collect();
    x0.push(p0);

    let k = series.len();
    let f = |x: &[f64]| -> Option<Vec<f64>> {
        let p0 = x[k];
        if !(p0 > 0.0) {
            return None;
        }
        let mut r = Vec::new();
        for (i, s) in series.iter().enumerate() {
            let chi = x[i];
            for p in &s.points {
                let n = p.power / p0;
                r.push(chi * n - p.d_omega);
                if let Some(g) = p.d_gamma {
                    r.push(2.0 * chi * chi / kappa * n - g);
                }
            }
        }
        Some(r)
    };
    let n_rows: usize = series
        .iter()
        .flat_map(|s| &s.points)
        .map(|p| 1 + p.d_gamma.is_some() as usize)
        .sum();
    let jac = |x: &[f64]| {
        let p0 = x[k];
        let mut j = DMatrix::zeros(n_rows, k + 1);
        let mut row = 0;
        for (i, s) in series.iter().enumerate() {
            let chi = x[i];
            for p in &s.points {
                let n = p.power / p0;
                j[(row, i)] = n;
                j[(row, k)] = -chi * n / p0;
                row += 1;
                if p.d_gamma.is_some() {
                    j[(row, i)] = 4.0 * chi / kappa * n;
                    j[(row, k)] = -2.0 * chi * chi / kappa * n / p0;
                    row += 1;
                }
            }
        }
        j
    };
    let data: Vec<f64> = series
        .iter()
        .flat_map(|s| &s.points)
        .flat_map(|p| [p.d_omega, p.d_gamma.unwrap_or(0.0)])
        .collect();
    let res = minimize(&f, &jac, &x0, &LmOptions::with_scale(&data))?;
    if !res.converged {
        return Err(Error::NotConverged { iterations: res.n_iter });
    }
    let names: Vec<String> = (0..k).map(|i| format!("chi_{i}")).collect();
    let mut named: Vec<(&str, &str)> = names.iter().map(|n| (n.as_str(), "MHz")).collect();
    named.push(("p0", "power"));
    Ok(FitReport::from_lm(&named, &res, Vec::new()))
}

/// Straddling-regime dispersive shift χ(Δ) = (2g²/Δ)·χ_q/(Δ + χ_q).
pub fn straddle_model(g: f64, chi_q: f64, detuning: f64) -> f64 {
    2.0 * g * g / detuning * chi_q / (detuning + chi_q)
}

/// Fits (g, χ_q) to χ versus Δ = δ_q − δ_a.
///
/// The start point comes from the linearization χΔ² = 2g²χ_q − χ_q·(χΔ).
pub fn fit_straddling(points: &[StraddlePoint]) -> Result<FitReport> {
    if points.len() < 2 {
        return Err(Error::Degenerate("need at least two detunings".into()));
    }
    let n = points.len();
    let a = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { -points[i].chi * points[i].detuning });
    let y = DVector::from_fn(n, |i, _| points[i].chi * points[i].detuning * points[i].detuning);
    let lin = linear_lsq(&a, &y).ok_or_else(|| Error::Degenerate("straddling data are degenerate".into()))?;
    let (u, v) = (lin[0], lin[1]);
    if !(u / v > 0.0) || !v.is_finite() {
        return Err(Error::Degenerate("linearized straddling fit gives no real coupling".into()));
    }
    let x0 = [(0.5 * u / v).sqrt(), v];

    let f = |x: &[f64]| -> Option<Vec<f64>> {
        points
            .iter()
            .map(|p| {
                let m = straddle_model(x[0], x[1], p.detuning);
                m.is_finite().then_some(m - p.chi)
            })
            .collect()
    };
    let jac = |x: &[f64]| {
        DMatrix::from_fn(points.len(), 2, |i, c| {
            let d = points[i].detuning;
            if c == 0 {
                2.0 * straddle_model(x[0], x[1], d) / x[0]
            } else {
                2.0 * x[0] * x[0] / (d + x[1]).powi(2)
            }
        })
    };
    let data: Vec<f64> = points.iter().map(|p| p.chi).collect();
    let res = minimize(&f, &jac, &x0, &LmOptions::with_scale(&data))?;
    if !res.converged {
        return Err(Error::NotConverged { iterations: res.n_iter });
    }
    let mut res = res;
    res.x[0] = res.x[0].abs();
    let chi_q = res.x[1];
    let (pole_lo, pole_hi) = (0.0f64.min(-chi_q), 0.0f64.max(-chi_q));
    let mut warnings = Vec::new();
    if points.iter().all(|p| p.detuning < pole_lo) || points.iter().all(|p| p.detuning > pole_hi) {
        warnings.push("poorly conditioned: all detunings on one side of both poles".to_string());
    }
    Ok(FitReport::from_lm(&[("g", "MHz"), ("chi_q", "MHz")], &res, warnings))
}

/// Fits the squeezed-frame dispersive strength χ[r] with
/// Δω = χ n̄_d cosh²r and Δγ = (2χ²/κ)(1 + 2 sinh²r) n̄_d cosh²r.
pub fn fit_chi_enhanced(points: &[EnhancedPoint], frame: &BogoliubovFrame, kappa: f64) -> Result<FitReport> {
    if !(kappa > 0.0) {
        return Err(Error::invalid("kappa", "must be positive"));
    }
    if points.iter().all(|p| p.n_d == 0.0) {
        return Err(Error::Degenerate("no information: all drive strengths are zero".into()));
    }
    let c2 = frame.cosh2();
    let enh = 1.0 + 2.0 * frame.sinh2();
    let (mut num, mut den) = (0.0, 0.0);
    for p in points {
        num += p.n_d * c2 * p.d_omega;
        den += (p.n_d * c2).powi(2);
    }
    let mut chi0 = num / den;
    if chi0 == 0.0 {
        // Shift data silent: start from the dephasing magnitude, negative branch.
        let (mut g_num, mut g_den) = (0.0, 0.0);
        for p in points {
            if let Some(g) = p.d_gamma {
                let c = 2.0 / kappa * enh * p.n_d * c2;
                g_num += c * g;
                g_den += c * c;
            }
        }
        chi0 = -(g_num / g_den).max(0.0).sqrt();
    }
    let f = |x: &[f64]| -> Option<Vec<f64>> {
        let chi = x[0];
        let mut r = Vec::new();
        for p in points {
            let n = p.n_d * c2;
            r.push(chi * n - p.d_omega);
            if let Some(g) = p.d_gamma {
                r.push(2.0 * chi * chi / kappa * enh * n - g);
            }
        }
        Some(r)
    };
    let jac = |x: &[f64]| {
        let mut rows = Vec::new();
        for p in points {
            let n = p.n_d * c2;
            rows.push(n);
            if p.d_gamma.is_some() {
                rows.push(4.0 * x[0] / kappa * enh * n);
            }
        }
        DMatrix::from_column_slice(rows.len(), 1, &rows)
    };
    let data: Vec<f64> = points.iter().flat_map(|p| [p.d_omega, p.d_gamma.unwrap_or(0.0)]).collect();
    let res = minimize(&f, &jac, &[chi0], &LmOptions::with_scale(&data))?;
    if !res.converged {
        return Err(Error::NotConverged { iterations: res.n_iter });
    }
    // Dephasing must grow with drive; the shift must follow one sign.
    let gamma_slope: f64 = points.iter().filter_map(|p| p.d_gamma.map(|g| g * p.n_d)).sum();
    let omega_slope: f64 = points.iter().map(|p| p.d_omega * p.n_d).sum();
    let m = res.residuals.len().max(1) as f64;
    let floor = 3.0 * (res.cost() / m).sqrt();
    let mixed = points.iter().any(|p| p.d_omega * omega_slope < 0.0 && p.d_omega.abs() > floor);
    let has_gamma = points.iter().any(|p| p.d_gamma.is_some());
    let mut warnings = Vec::new();
    if mixed || (has_gamma && gamma_slope <= 0.0) {
        warnings.push("inconsistent shift/dephasing sign pattern: check frame and regime".to_string());
    }
    Ok(FitReport::from_lm(&[("chi_r", "MHz")], &res, warnings))
}

/// Fits the bare χ_0 to the phase-dependent Stark shift of a resonantly
/// pumped oscillator (shifts relative to the undriven qubit).
pub fn fit_chi0_resonant(points: &[PhasePoint], p: &OscillatorParams) -> Result<FitReport> {
    let coeffs = points
        .iter()
        .map(|pt| Ok(resonant_driven_shift(p, 1.0, &DriveSpec::new(pt.n_d, 0.0, pt.theta), None)?.parts.stark))
        .collect::<Result<Vec<f64>>>()?;
    if coeffs.iter().all(|c| *c == 0.0) {
        return Err(Error::Degenerate("no information: all drive strengths are zero".into()));
    }
    let chi0 = coeffs.iter().zip(points).map(|(c, pt)| c * pt.d_omega).sum::<f64>()
        / coeffs.iter().map(|c| c * c).sum::<f64>();
    let f = |x: &[f64]| -> Option<Vec<f64>> {
        Some(coeffs.iter().zip(points).map(|(c, pt)| c * x[0] - pt.d_omega).collect())
    };
    let jac = |_: &[f64]| DMatrix::from_column_slice(coeffs.len(), 1, &coeffs);
    let data: Vec<f64> = points.iter().map(|p| p.d_omega).collect();
    let res = minimize(&f, &jac, &[chi0], &LmOptions::with_scale(&data))?;
    if !res.converged {
        return Err(Error::NotConverged { iterations: res.n_iter });
    }
    Ok(FitReport::from_lm(&[("chi_0", "MHz")], &res, Vec::new()))
}
