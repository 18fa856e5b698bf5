//! Fitting pipelines: λ from reflection spectra, tilted-circle qubit lines,
//! joint χ/power calibration, straddling (g, χ_q) and enhanced χ[r].
//!
//! Every fitter returns a [`FitReport`]; covariances are s²(JᵀJ)⁻¹ at the
//! optimum with s² the residual variance per degree of freedom.

mod circle;
mod dispersive;
mod lambda;
mod lm;
mod noise;

use serde::{Deserialize, Serialize};

pub use circle::{fit_circle, CircleFit, CircleModel, MIN_ARC_COVERAGE};
pub use dispersive::{
    fit_chi0_resonant, fit_chi_enhanced, fit_chi_n0, fit_straddling, straddle_model, EnhancedPoint, PhasePoint, ShiftPoint,
    ShiftSeries, StraddlePoint,
};
pub use lambda::{fit_lambda, BOUNDARY_MARGIN};
pub use noise::{add_noise, noise_sigma};

/// z-score of a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitParam {
    pub name: String,
    pub value: f64,
    pub unit: String,
    pub std_err: f64,
    /// 95% confidence interval, value ± 1.96 std_err.
    pub ci95: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub params: Vec<FitParam>,
    /// Row-major, ordered like `params`.
    pub covariance: Vec<Vec<f64>>,
    /// RMS of the residual vector in model units.
    pub residual_rms: f64,
    pub n_iter: usize,
    pub converged: bool,
    /// ‖Jᵀr‖∞ at the returned point.
    pub gradient_norm: f64,
    pub warnings: Vec<String>,
}

impl FitReport {
    fn from_lm(names: &[(&str, &str)], res: &lm::LmResult, warnings: Vec<String>) -> Self {
        let n = res.x.len();
        let cov = res.covariance();
        let covariance: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| cov.as_ref().map_or(f64::NAN, |c| c[(i, j)]))
                    .collect()
            })
            .collect();
        let params = names
            .iter()
            .zip(&res.x)
            .enumerate()
            .map(|(i, ((name, unit), &value))| {
                let std_err = covariance[i][i].max(0.0).sqrt();
                FitParam {
                    name: name.to_string(),
                    value,
                    unit: unit.to_string(),
                    std_err,
                    ci95: (value - Z95 * std_err, value + Z95 * std_err),
                }
            })
            .collect();
        let m = res.residuals.len().max(1) as f64;
        let mut warnings = warnings;
        if cov.is_none() {
            warnings.push("singular normal matrix: covariance unavailable".into());
        }
        Self {
            params,
            covariance,
            residual_rms: (res.cost() / m).sqrt(),
            n_iter: res.n_iter,
            converged: res.converged,
            gradient_norm: res.gradient_norm,
            warnings,
        }
    }

    pub fn param(&self, name: &str) -> Option<&FitParam> {
        self.params.iter().find(|p| p.name == name)
    }

    /// Value of a named parameter; NaN if absent.
    pub fn value(&self, name: &str) -> f64 {
        self.param(name).map_or(f64::NAN, |p| p.value)
    }

    pub fn std_err(&self, name: &str) -> f64 {
        self.param(name).map_or(f64::NAN, |p| p.std_err)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("FitReport serializes")
    }
}
