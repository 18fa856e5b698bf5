//! Run configuration read from a key-value or JSON parameter file.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};
use sqbo::{kv, TransmonParams};

use crate::error::CliError;

/// Accepts either a single number or a list of numbers.
fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(Option::<OneOrMany>::deserialize(d)?.map(|v| match v {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(xs) => xs,
    }))
}

fn list<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    Ok(one_or_many(d)?.unwrap_or_default())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub kappa: f64,
    /// Pump detunings to sweep; each command has its own default list.
    #[serde(deserialize_with = "one_or_many")]
    pub delta_a: Option<Vec<f64>>,
    pub probe_start: f64,
    pub probe_stop: f64,
    pub probe_points: usize,
    pub lam_points: usize,
    /// Sweep end as a fraction of λ_crit (gain commands) or |δ_a| (qubit commands).
    pub lam_max_frac: f64,
    /// Absolute sweep end in MHz; overrides `lam_max_frac`.
    pub lam_max: Option<f64>,
    /// Qubit minus bare oscillator frequency, MHz.
    pub qubit_detuning: f64,
    pub g: f64,
    pub chi_q: f64,
    pub gamma_1: f64,
    pub gamma_phi: f64,
    pub n_levels: usize,
    /// Drive strengths n̄_d of the synthetic χ measurement.
    #[serde(deserialize_with = "list")]
    pub drive_n: Vec<f64>,
    /// Drive phases used for the resonant (δ_a = 0) χ measurement.
    #[serde(deserialize_with = "list")]
    pub drive_theta: Vec<f64>,
    /// Standard deviation of Gaussian noise added to synthetic shifts, MHz.
    pub shift_noise: f64,
    /// Oracle evaluated on every `oracle_every`-th λ row.
    pub oracle_every: usize,
    /// Fock cutoff for the oracle; sized automatically when absent.
    pub n_fock: Option<usize>,
    #[serde(deserialize_with = "list")]
    pub moment_fractions: Vec<f64>,
    #[serde(deserialize_with = "list")]
    pub point_delta_a: Vec<f64>,
    #[serde(deserialize_with = "list")]
    pub point_lam: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kappa: 8.7,
            delta_a: None,
            probe_start: -60.0,
            probe_stop: 60.0,
            probe_points: 1201,
            lam_points: 41,
            lam_max_frac: 0.98,
            lam_max: None,
            qubit_detuning: -100.0,
            g: 4.9,
            chi_q: -114.0,
            gamma_1: 0.0,
            gamma_phi: 0.0,
            n_levels: 3,
            drive_n: vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            drive_theta: vec![0.0, 0.25 * std::f64::consts::PI, 0.5 * std::f64::consts::PI, 0.75 * std::f64::consts::PI],
            shift_noise: 0.0,
            oracle_every: 8,
            n_fock: None,
            moment_fractions: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            point_delta_a: vec![20.0, -40.0, 40.0],
            point_lam: vec![17.0, 30.0, 30.0],
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{') {
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config: {e}")))?
        } else {
            kv::from_str(&text)?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: &str| Err(CliError::Config(msg.to_string()));
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return bad("kappa must be positive");
        }
        if !(self.probe_stop > self.probe_start) || self.probe_points < 3 {
            return bad("probe grid needs probe_stop > probe_start and at least 3 points");
        }
        if self.lam_points < 2 {
            return bad("lam_points must be at least 2");
        }
        if !(self.lam_max_frac > 0.0 && self.lam_max_frac < 1.0) {
            return bad("lam_max_frac must lie in (0, 1)");
        }
        if self.lam_max.is_some_and(|l| !(l > 0.0)) {
            return bad("lam_max must be positive");
        }
        if self.delta_a.as_ref().is_some_and(|d| d.is_empty() || d.iter().any(|x| !x.is_finite())) {
            return bad("delta_a must be a non-empty list of finite numbers");
        }
        if self.drive_n.iter().any(|n| !(*n >= 0.0)) || self.drive_n.iter().all(|n| *n == 0.0) {
            return bad("drive_n needs non-negative values, at least one positive");
        }
        if self.drive_theta.is_empty() {
            return bad("drive_theta must not be empty");
        }
        if !(self.shift_noise >= 0.0) {
            return bad("shift_noise must be non-negative");
        }
        if self.oracle_every == 0 {
            return bad("oracle_every must be at least 1");
        }
        if self.moment_fractions.iter().any(|f| !(*f >= 0.0 && *f < 1.0)) {
            return bad("moment_fractions must lie in [0, 1)");
        }
        if self.point_delta_a.len() != self.point_lam.len() {
            return bad("point_delta_a and point_lam must have the same length");
        }
        self.transmon(0.0).validate()?;
        Ok(())
    }

    pub fn deltas(&self, default: &[f64]) -> Vec<f64> {
        self.delta_a.clone().unwrap_or_else(|| default.to_vec())
    }

    /// Transmon whose bare frequency sits `qubit_detuning` from the oscillator.
    pub fn transmon(&self, delta_a: f64) -> TransmonParams {
        TransmonParams {
            delta_q: delta_a + self.qubit_detuning,
            g: self.g,
            chi_q: self.chi_q,
            gamma_1: self.gamma_1,
            gamma_phi: self.gamma_phi,
            n_levels: self.n_levels,
        }
    }
}
