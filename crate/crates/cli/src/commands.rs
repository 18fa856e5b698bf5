//! The five dataset commands.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sqbo::bogoliubov::{chi_transmon, straddle_chi};
use sqbo::calibration::{fit_chi0_resonant, fit_chi_enhanced, EnhancedPoint, PhasePoint};
use sqbo::io::Table;
use sqbo::lindblad::{
    build_liouvillian, chi_closed_system, quartic_dephasing, qubit_shift_dephasing, steady_state, LindbladConfig,
    DEFAULT_TAIL_TOL,
};
use sqbo::scattering::{gain_summary, linspace, signal_spectrum, FreqGrid};
use sqbo::spectral::{bo_occupation, resonant_driven_shift, resonant_steady_state, shift_driven, shift_undriven, Moments,
    UndrivenModel};
use sqbo::{frame_of, validate, DriveSpec, OscillatorParams};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Output;

const QUBIT_DELTAS: [f64; 7] = [0.0, 20.0, -20.0, 30.0, -30.0, 40.0, -40.0];

/// Table rows plus notes on degraded cells (e.g. a failed oracle solve).
struct Rows {
    rows: Vec<Vec<f64>>,
    notes: Vec<String>,
}

impl From<Vec<Vec<f64>>> for Rows {
    fn from(rows: Vec<Vec<f64>>) -> Self {
        Self { rows, notes: Vec::new() }
    }
}

/// Row-level outcome, or a note explaining why the row was skipped.
type RowResult = Result<Rows, String>;

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Evaluates `tasks` in parallel, keeping their order, and logs skipped rows.
fn collect_rows<T: Sync>(out: &mut Output, table: &mut Table, tasks: &[T], f: impl Fn(&T) -> RowResult + Sync + Send) {
    let results: Vec<RowResult> = tasks.par_iter().map(f).collect();
    for r in results {
        match r {
            Ok(r) => {
                r.rows.into_iter().for_each(|row| table.push(row));
                r.notes.into_iter().for_each(|n| out.note(n));
            }
            Err(note) => out.note(note),
        }
    }
}

fn require_rows(table: &Table, name: &str) -> Result<(), CliError> {
    if table.rows.is_empty() {
        return Err(CliError::Numerical(format!("{name}: every row failed; see the sidecar log")));
    }
    Ok(())
}

/// λ sweep ending at `lam_max` or at `lam_max_frac·reference`.
fn lam_grid(cfg: &RunConfig, reference: f64) -> Vec<f64> {
    linspace(0.0, cfg.lam_max.unwrap_or(cfg.lam_max_frac * reference), cfg.lam_points)
}

/// λ range for the qubit commands: |δ_a| bounds the Bogoliubov frame, κ/2
/// bounds the resonant pump.
fn qubit_lam_grid(cfg: &RunConfig, delta_a: f64) -> Vec<f64> {
    let reference = if delta_a == 0.0 { 0.5 * cfg.kappa } else { delta_a.abs() };
    lam_grid(cfg, reference)
}

fn tasks(deltas: &[f64], grid: impl Fn(f64) -> Vec<f64>) -> Vec<(f64, usize, f64)> {
    deltas
        .iter()
        .flat_map(|&d| grid(d).into_iter().enumerate().map(move |(i, l)| (d, i, l)))
        .collect()
}

fn oracle_cfg(cfg: &RunConfig, p: &OscillatorParams, n_transmon: usize) -> LindbladConfig {
    match cfg.n_fock {
        Some(n_fock) => LindbladConfig { n_fock, n_transmon, ..LindbladConfig::default() },
        None => LindbladConfig::sized_for(p, None, n_transmon),
    }
}

pub fn gain_map(cfg: &RunConfig, out: &mut Output) -> Result<Vec<PathBuf>, CliError> {
    let freqs = linspace(cfg.probe_start, cfg.probe_stop, cfg.probe_points);
    let deltas = cfg.deltas(&[0.0, 30.0, -30.0]);
    let tasks = tasks(&deltas, |d| lam_grid(cfg, OscillatorParams::new(cfg.kappa, d, 0.0).lambda_crit()));
    let mut table = Table::new(["delta_a", "lam", "freq_mhz", "gain_db", "phase_rad"]);
    collect_rows(out, &mut table, &tasks, |&(d, _, lam)| {
        let p = OscillatorParams::new(cfg.kappa, d, lam);
        let s = signal_spectrum(&p, &freqs).map_err(|e| format!("gain_map delta_a={d} lam={lam}: skipped: {e}"))?;
        let rows: Vec<Vec<f64>> =
            s.freqs.iter().zip(&s.values).map(|(&w, v)| vec![d, lam, w, db(v.norm_sqr()), v.arg()]).collect();
        Ok(rows.into())
    });
    require_rows(&table, "gain_map")?;
    Ok(vec![out.write_table("gain_map.csv", table)?])
}

pub fn gbw(cfg: &RunConfig, out: &mut Output) -> Result<Vec<PathBuf>, CliError> {
    let grid = FreqGrid::new(cfg.probe_start, cfg.probe_stop, cfg.probe_points);
    let deltas = cfg.deltas(&[0.0, 30.0]);
    // λ = 0 has no gain peak, so each sweep starts one step in.
    let tasks: Vec<_> = tasks(&deltas, |d| {
        let mut g = lam_grid(cfg, OscillatorParams::new(cfg.kappa, d, 0.0).lambda_crit());
        g.remove(0);
        g
    });
    let mut table = Table::new([
        "delta_a",
        "lam",
        "gain_db",
        "bw_3db_mhz",
        "bw_sqrt_g_over_kappa",
        "peak_freq",
        "n_peaks",
        "merged",
        "regime",
    ]);
    table = table.meta("regime_codes", "0 split, 1 coalescence onset, 2 merged");
    collect_rows(out, &mut table, &tasks, |&(d, _, lam)| {
        let p = OscillatorParams::new(cfg.kappa, d, lam);
        let skip = |e: sqbo::Error| format!("gbw delta_a={d} lam={lam}: skipped: {e}");
        let report = validate(&p).map_err(skip)?;
        let s = gain_summary(&p, &grid).map_err(skip)?;
        let bw = s.bw_3db.unwrap_or(f64::NAN);
        let regime = match report.regime {
            sqbo::PumpRegime::Split => 0.0,
            sqbo::PumpRegime::CoalescenceOnset => 1.0,
            _ => 2.0,
        };
        Ok(vec![vec![
            d,
            lam,
            db(s.g_max),
            bw,
            bw * s.g_max.sqrt() / cfg.kappa,
            s.peak_freq,
            s.n_peaks as f64,
            flag(s.merged),
            regime,
        ]]
        .into())
    });
    require_rows(&table, "gbw")?;
    Ok(vec![out.write_table("gbw.csv", table)?])
}

struct QubitRow {
    shift: Vec<f64>,
    dephasing: Vec<f64>,
    note: Option<String>,
}

fn qubit_row(cfg: &RunConfig, d: f64, idx: usize, lam: f64, oracle: bool) -> Result<QubitRow, String> {
    let p = OscillatorParams::new(cfg.kappa, d, lam);
    let q = cfg.transmon(d);
    let skip = |e: sqbo::Error| format!("qubit_response delta_a={d} lam={lam}: skipped: {e}");
    let (s_db, d_omega, d_gamma, chi, occupancy, valid, near) = if d == 0.0 {
        let chi_0 = straddle_chi(q.g, q.chi_q, cfg.qubit_detuning);
        let ss = resonant_steady_state(&p).map_err(skip)?;
        let shift = resonant_driven_shift(&p, chi_0, &DriveSpec::default(), None).map_err(skip)?;
        (ss.s_inf_db(), shift.d_omega_q, f64::NAN, chi_0, ss.moments.n, true, false)
    } else {
        let f = frame_of(&p).map_err(skip)?;
        let at_r = chi_transmon(&q, &f, cfg.kappa).map_err(skip)?;
        let at_0 = chi_transmon(&q, &frame_of(&p.with_lam(0.0)).map_err(skip)?, cfg.kappa).map_err(skip)?;
        let shift = shift_undriven(&UndrivenModel::from_results(&at_r, &at_0), &f, cfg.kappa);
        let occ = bo_occupation(&f, &DriveSpec::default(), cfg.kappa).map_err(skip)?;
        (f.s_db, shift.d_omega_q, shift.d_gamma_phi, at_r.chi, occ.n_alpha, at_r.dispersive_valid, occ.near_coalescence)
    };
    let mut shift = vec![d, lam, s_db, d_omega, chi, occupancy, flag(valid), flag(near)];
    let mut dephasing = vec![d, lam, s_db, d_gamma, flag(near)];
    let mut note = None;
    if oracle {
        let (o_shift, o_deph) = if !idx.is_multiple_of(cfg.oracle_every) {
            (f64::NAN, f64::NAN)
        } else if lam == 0.0 {
            (0.0, 0.0)
        } else {
            let ocfg = oracle_cfg(cfg, &p, q.n_levels.min(3));
            match qubit_shift_dephasing(&p, &q, &ocfg).and_then(|s| Ok((s.d_omega_q, quartic_dephasing(&p, &q, &ocfg)?))) {
                Ok(v) => v,
                Err(e) => {
                    note = Some(format!("qubit_response delta_a={d} lam={lam}: oracle failed: {e}"));
                    (f64::NAN, f64::NAN)
                }
            }
        };
        shift.push(o_shift);
        dephasing.push(o_deph);
    }
    Ok(QubitRow { shift, dephasing, note })
}

pub fn qubit_response(cfg: &RunConfig, out: &mut Output, oracle: bool) -> Result<Vec<PathBuf>, CliError> {
    let deltas = cfg.deltas(&QUBIT_DELTAS);
    let tasks = tasks(&deltas, |d| qubit_lam_grid(cfg, d));
    let mut shift_cols = vec![
        "delta_a",
        "lam",
        "s_db",
        "d_omega_q",
        "chi",
        "occupancy",
        "dispersive_valid",
        "near_coalescence",
    ];
    let mut deph_cols = vec!["delta_a", "lam", "s_db", "d_gamma_phi", "near_coalescence"];
    if oracle {
        shift_cols.push("oracle_d_omega_q");
        deph_cols.push("oracle_d_gamma_phi");
    }
    let mut shift = Table::new(shift_cols);
    let mut deph = Table::new(deph_cols);
    if deltas.contains(&0.0) {
        out.note("qubit_response delta_a=0: no closed-form dephasing for a resonant pump; d_gamma_phi left nan");
    }
    let rows: Vec<Result<QubitRow, String>> =
        tasks.par_iter().map(|&(d, i, lam)| qubit_row(cfg, d, i, lam, oracle)).collect();
    for r in rows {
        match r {
            Ok(row) => {
                shift.push(row.shift);
                deph.push(row.dephasing);
                if let Some(n) = row.note {
                    out.note(n);
                }
            }
            Err(note) => out.note(note),
        }
    }
    require_rows(&shift, "qubit_response")?;
    Ok(vec![out.write_table("qubit_shift.csv", shift)?, out.write_table("qubit_dephasing.csv", deph)?])
}

fn noisy(rng: &mut ChaCha8Rng, noise: Option<&Normal<f64>>, x: f64) -> f64 {
    noise.map_or(x, |n| x + n.sample(rng))
}

fn chi_row(cfg: &RunConfig, seed: u64, task: usize, d: f64, idx: usize, lam: f64, oracle: bool) -> RowResult {
    let p = OscillatorParams::new(cfg.kappa, d, lam);
    let q = cfg.transmon(d);
    let skip = |e: sqbo::Error| format!("chi_sweep delta_a={d} lam={lam}: skipped: {e}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(task as u64));
    let normal = (cfg.shift_noise > 0.0).then(|| Normal::new(0.0, cfg.shift_noise).expect("validated noise"));
    let noise = normal.as_ref();
    let chi_0 = straddle_chi(q.g, q.chi_q, cfg.qubit_detuning);

    let (s_db, analytic, fit, near) = if d == 0.0 {
        let ss = resonant_steady_state(&p).map_err(skip)?;
        let mut pts = Vec::new();
        for &n_d in &cfg.drive_n {
            for &theta in &cfg.drive_theta {
                let s = resonant_driven_shift(&p, chi_0, &DriveSpec::new(n_d, 0.0, theta), None).map_err(skip)?;
                pts.push(PhasePoint { theta, n_d, d_omega: noisy(&mut rng, noise, s.parts.stark) });
            }
        }
        (ss.s_inf_db(), chi_0, fit_chi0_resonant(&pts, &p).map_err(skip)?, false)
    } else {
        let f = frame_of(&p).map_err(skip)?;
        let chi = chi_transmon(&q, &f, cfg.kappa).map_err(skip)?.chi;
        let mut pts = Vec::new();
        for &n_d in &cfg.drive_n {
            let s = shift_driven(chi, &f, &DriveSpec::new(n_d, f.omega_bog, 0.0), cfg.kappa).map_err(skip)?;
            pts.push(EnhancedPoint {
                n_d,
                d_omega: noisy(&mut rng, noise, s.d_omega_q),
                d_gamma: Some(noisy(&mut rng, noise, s.d_gamma_phi)),
            });
        }
        let near = bo_occupation(&f, &DriveSpec::default(), cfg.kappa).map_err(skip)?.near_coalescence;
        (f.s_db, chi, fit_chi_enhanced(&pts, &f, cfg.kappa).map_err(skip)?, near)
    };
    let name = if d == 0.0 { "chi_0" } else { "chi_r" };
    let mut row = vec![d, lam, s_db, analytic, fit.value(name), fit.std_err(name), analytic / chi_0, flag(near)];
    let mut notes = Vec::new();
    if oracle {
        let o = if d == 0.0 || !idx.is_multiple_of(cfg.oracle_every) {
            f64::NAN
        } else {
            chi_closed_system(&p, &q, &oracle_cfg(cfg, &p, 3)).map_or_else(
                |e| {
                    notes.push(format!("chi_sweep delta_a={d} lam={lam}: oracle failed: {e}"));
                    f64::NAN
                },
                |c| c.chi,
            )
        };
        row.push(o);
    }
    Ok(Rows { rows: vec![row], notes })
}

pub fn chi_sweep(cfg: &RunConfig, out: &mut Output, seed: u64, oracle: bool) -> Result<Vec<PathBuf>, CliError> {
    let deltas = cfg.deltas(&QUBIT_DELTAS);
    let tasks: Vec<(usize, (f64, usize, f64))> =
        tasks(&deltas, |d| qubit_lam_grid(cfg, d)).into_iter().enumerate().collect();
    let mut cols = vec!["delta_a", "lam", "s_db", "chi_analytic", "chi_fit", "chi_fit_std_err", "enhancement", "near_coalescence"];
    if oracle {
        cols.push("chi_oracle");
    }
    let mut table = Table::new(cols);
    collect_rows(out, &mut table, &tasks, |&(t, (d, i, lam))| chi_row(cfg, seed, t, d, i, lam, oracle));
    require_rows(&table, "chi_sweep")?;
    Ok(vec![out.write_table("chi_vs_lambda.csv", table)?])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub n: f64,
    pub a2_abs: f64,
    pub x_var_min: f64,
    pub x_var_max: f64,
}

impl MomentSet {
    fn from_moments(m: &Moments) -> Self {
        let abs = m.a2.norm();
        Self { n: m.n, a2_abs: abs, x_var_min: 0.25 * (2.0 * m.n + 1.0 - 2.0 * abs), x_var_max: 0.25 * (2.0 * m.n + 1.0 + 2.0 * abs) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentComparison {
    pub lam_fraction: f64,
    pub lam: f64,
    pub analytic: Option<MomentSet>,
    pub oracle: Option<MomentSet>,
    pub max_rel_error: Option<f64>,
    pub n_fock: Option<usize>,
    pub truncation_change: Option<f64>,
    pub truncation_converged: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftComparison {
    pub delta_a: f64,
    pub lam: f64,
    pub delta_q: f64,
    pub analytic_d_omega_q: Option<f64>,
    pub analytic_d_gamma_phi: Option<f64>,
    pub oracle_d_omega_q: Option<f64>,
    pub oracle_d_gamma_phi: Option<f64>,
    pub rel_error_shift: Option<f64>,
    pub rel_error_dephasing: Option<f64>,
    pub n_fock: Option<usize>,
    pub pumped_overlap: Option<f64>,
    pub top_fock_population: Option<f64>,
    pub truncation_converged: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub kappa: f64,
    pub resonant_moments: Vec<MomentComparison>,
    pub qubit_shifts: Vec<ShiftComparison>,
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn compare_moments(cfg: &RunConfig, frac: f64) -> MomentComparison {
    let lam = frac * 0.5 * cfg.kappa;
    let p = OscillatorParams::new(cfg.kappa, 0.0, lam);
    let mut row = MomentComparison {
        lam_fraction: frac,
        lam,
        analytic: None,
        oracle: None,
        max_rel_error: None,
        n_fock: None,
        truncation_change: None,
        truncation_converged: None,
        error: None,
    };
    let result = (|| -> sqbo::Result<()> {
        let exact = resonant_steady_state(&p)?.moments;
        let a = MomentSet::from_moments(&exact);
        let lcfg = match cfg.n_fock {
            Some(n_fock) => LindbladConfig { n_fock, ..LindbladConfig::default() },
            None => LindbladConfig {
                n_fock: sqbo::lindblad::suggested_n_fock(&p, None, DEFAULT_TAIL_TOL * 1e-2),
                ..LindbladConfig::default()
            },
        };
        let ss = steady_state(&build_liouvillian(&p, None, None, &lcfg)?)?;
        let o = MomentSet::from_moments(&ss.moments);
        // Vacuum has zero moments, so λ = 0 is compared in absolute terms.
        let mut err = if lam == 0.0 {
            (o.n - a.n).abs().max((o.a2_abs - a.a2_abs).abs())
        } else {
            rel(o.n, a.n).max(rel(o.a2_abs, a.a2_abs))
        };
        for &(th, v) in &ss.x_var {
            err = err.max(rel(v, exact.x_var(th)));
        }
        row.analytic = Some(a);
        row.oracle = Some(o);
        row.max_rel_error = Some(err);
        row.n_fock = Some(ss.n_fock);
        row.truncation_change = Some(ss.truncation_change);
        row.truncation_converged = Some(ss.truncation_converged);
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(e.to_string());
    }
    row
}

fn compare_shift(cfg: &RunConfig, d: f64, lam: f64) -> ShiftComparison {
    let p = OscillatorParams::new(cfg.kappa, d, lam);
    let q = cfg.transmon(d);
    let mut row = ShiftComparison {
        delta_a: d,
        lam,
        delta_q: q.delta_q,
        analytic_d_omega_q: None,
        analytic_d_gamma_phi: None,
        oracle_d_omega_q: None,
        oracle_d_gamma_phi: None,
        rel_error_shift: None,
        rel_error_dephasing: None,
        n_fock: None,
        pumped_overlap: None,
        top_fock_population: None,
        truncation_converged: None,
        error: None,
    };
    let result = (|| -> sqbo::Result<()> {
        let f = frame_of(&p)?;
        let at_r = chi_transmon(&q, &f, cfg.kappa)?;
        let at_0 = chi_transmon(&q, &frame_of(&p.with_lam(0.0))?, cfg.kappa)?;
        let analytic = shift_undriven(&UndrivenModel::from_results(&at_r, &at_0), &f, cfg.kappa);
        row.analytic_d_omega_q = Some(analytic.d_omega_q);
        row.analytic_d_gamma_phi = Some(analytic.d_gamma_phi);
        let ocfg = oracle_cfg(cfg, &p, q.n_levels.min(3));
        let s = qubit_shift_dephasing(&p, &q, &ocfg)?;
        let g = quartic_dephasing(&p, &q, &ocfg)?;
        row.oracle_d_omega_q = Some(s.d_omega_q);
        row.oracle_d_gamma_phi = Some(g);
        row.rel_error_shift = Some(rel(s.d_omega_q, analytic.d_omega_q));
        row.rel_error_dephasing = Some(rel(g, analytic.d_gamma_phi));
        row.n_fock = Some(s.cfg.n_fock);
        row.pumped_overlap = Some(s.pumped.overlap);
        row.top_fock_population = Some(s.pumped.top_fock_population);
        row.truncation_converged = Some(s.pumped.top_fock_population < ocfg.convergence_factor);
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(e.to_string());
    }
    row
}

pub fn oracle_compare(cfg: &RunConfig, out: &mut Output) -> Result<Vec<PathBuf>, CliError> {
    let resonant_moments: Vec<MomentComparison> =
        cfg.moment_fractions.par_iter().map(|&frac| compare_moments(cfg, frac)).collect();
    let points: Vec<(f64, f64)> = cfg.point_delta_a.iter().copied().zip(cfg.point_lam.iter().copied()).collect();
    let qubit_shifts: Vec<ShiftComparison> = points.par_iter().map(|&(d, lam)| compare_shift(cfg, d, lam)).collect();
    for m in &resonant_moments {
        if let Some(e) = &m.error {
            out.note(format!("oracle_compare moments lam_fraction={}: {e}", m.lam_fraction));
        }
    }
    for s in &qubit_shifts {
        if let Some(e) = &s.error {
            out.note(format!("oracle_compare delta_a={} lam={}: {e}", s.delta_a, s.lam));
        }
    }
    let report = OracleReport { kappa: cfg.kappa, resonant_moments, qubit_shifts };
    Ok(vec![out.write_json("oracle_report.json", &report)?])
}
