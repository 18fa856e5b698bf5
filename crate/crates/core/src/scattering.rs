//! Input-output reflection responses of the pumped oscillator, the qubit
//! line, and the qubit-oscillator anticrossing.
//!
//! Oscillator probe frequencies ω are detunings from half the pump
//! frequency; qubit and coupled spectra use absolute frequencies.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Table;
use crate::params::{OscillatorParams, TransmonParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Signal,
    Idler,
    Qubit,
    Coupled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexSpectrum {
    pub freqs: Vec<f64>,
    pub values: Vec<Complex64>,
    pub kind: SpectrumKind,
}

impl ComplexSpectrum {
    pub fn new(freqs: Vec<f64>, values: Vec<Complex64>, kind: SpectrumKind) -> Result<Self> {
        if freqs.len() != values.len() {
            return Err(Error::invalid("values", "length differs from freqs"));
        }
        if freqs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("freqs", "must be strictly increasing"));
        }
        Ok(Self { freqs, values, kind })
    }

    /// Samples `f` on `freqs`.
    pub fn sample(freqs: &[f64], kind: SpectrumKind, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(freqs.to_vec(), freqs.iter().map(|&w| f(w)).collect(), kind)
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Multiplies every point by a smooth background, as a measurement chain would.
    pub fn with_background(mut self, background: impl Fn(f64) -> Complex64) -> Self {
        for (v, &w) in self.values.iter_mut().zip(&self.freqs) {
            *v *= background(w);
        }
        self
    }

    pub fn power(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["freq_mhz", "re", "im", "abs_db", "phase_rad"]);
        for (&w, v) in self.freqs.iter().zip(&self.values) {
            t.push(vec![w, v.re, v.im, 10.0 * v.norm_sqr().log10(), v.arg()]);
        }
        t
    }

    pub fn from_table(table: &Table, kind: SpectrumKind) -> Result<Self> {
        let col = |name: &str| {
            table
                .column(name)
                .ok_or_else(|| Error::Parse { line: 0, message: format!("missing column `{name}`") })
        };
        let freqs = col("freq_mhz")?;
        let re = col("re")?;
        let im = col("im")?;
        let values = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        Self::new(freqs, values, kind)
    }
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![start],
        _ => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn denominator(p: &OscillatorParams, omega: f64) -> Complex64 {
    let k = p.kappa;
    Complex64::new(
        0.25 * k * k + p.delta_a * p.delta_a - p.lam * p.lam - omega * omega,
        -k * omega,
    )
}

/// Signal reflection coefficient Γ_a[ω].
pub fn gamma_signal(p: &OscillatorParams, omega: f64) -> Result<Complex64> {
    p.require_stable()?;
    Ok(gamma_signal_unchecked(p, omega))
}

pub(crate) fn gamma_signal_unchecked(p: &OscillatorParams, omega: f64) -> Complex64 {
    let k = p.kappa;
    let num = Complex64::new(0.5 * k * k, -k * (omega + p.delta_a));
    num / denominator(p, omega) - 1.0
}

/// Idler conversion coefficient Γ_i[ω] = iκλ/D[ω].
pub fn gamma_idler(p: &OscillatorParams, omega: f64) -> Result<Complex64> {
    p.require_stable()?;
    Ok(I * p.kappa * p.lam / denominator(p, omega))
}

pub fn signal_spectrum(p: &OscillatorParams, freqs: &[f64]) -> Result<ComplexSpectrum> {
    p.require_stable()?;
    ComplexSpectrum::sample(freqs, SpectrumKind::Signal, |w| gamma_signal_unchecked(p, w))
}

pub fn idler_spectrum(p: &OscillatorParams, freqs: &[f64]) -> Result<ComplexSpectrum> {
    p.require_stable()?;
    ComplexSpectrum::sample(freqs, SpectrumKind::Idler, |w| I * p.kappa * p.lam / denominator(p, w))
}

/// Power gain at ω = 0 for a resonant pump, ((κ²/4+λ²)/(κ²/4−λ²))².
pub fn resonant_peak_gain(kappa: f64, lam: f64) -> f64 {
    let k2 = 0.25 * kappa * kappa;
    let l2 = lam * lam;
    ((k2 + l2) / (k2 - l2)).powi(2)
}

/// Pump amplitude giving power gain `gain` at ω = 0 for a resonant pump.
pub fn resonant_lambda_for_gain(kappa: f64, gain: f64) -> f64 {
    let s = gain.sqrt();
    0.5 * kappa * ((s - 1.0) / (s + 1.0)).sqrt()
}

/// One local maximum of |Γ_a|².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainPeak {
    pub freq: f64,
    pub gain: f64,
    /// Half-power band edges around this peak; `None` below 3 dB of gain.
    pub band: Option<(f64, f64)>,
}

impl GainPeak {
    pub fn bw_3db(&self) -> Option<f64> {
        self.band.map(|(lo, hi)| hi - lo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainSummary {
    pub g_max: f64,
    /// Frequency of the signal peak (the maximum on the side of sign(δ_a)).
    pub peak_freq: f64,
    /// Full width where |Γ_a|² ≥ g_max/2 around the signal peak.
    pub bw_3db: Option<f64>,
    pub n_peaks: usize,
    pub lambda_co: Option<f64>,
    pub lambda_crit: f64,
    pub peaks: Vec<GainPeak>,
    /// True when the half-power band of the signal peak contains another peak.
    pub merged: bool,
}

/// Probe window for [`gain_summary`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreqGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl FreqGrid {
    pub fn new(start: f64, stop: f64, points: usize) -> Self {
        Self { start, stop, points }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 3 || !(self.stop > self.start) {
            return Err(Error::invalid("grid", "need stop > start and at least 3 points"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.points)
    }
}

/// Locates the gain peaks on the grid, refines them, and measures the
/// half-power bandwidths by bisection.
pub fn gain_summary(p: &OscillatorParams, grid: &FreqGrid) -> Result<GainSummary> {
    p.require_stable()?;
    grid.validate()?;
    let gain = |w: f64| gamma_signal_unchecked(p, w).norm_sqr();
    let ws = grid.values();
    let gs: Vec<f64> = ws.iter().map(|&w| gain(w)).collect();
    let n = ws.len();

    let mut peaks: Vec<GainPeak> = Vec::new();
    for i in 0..n {
        let left = if i > 0 { gs[i - 1] } else { f64::NEG_INFINITY };
        let right = if i + 1 < n { gs[i + 1] } else { f64::NEG_INFINITY };
        if gs[i] >= left && gs[i] > right {
            if i == 0 || i == n - 1 {
                return Err(Error::GridTooCoarse(format!(
                    "gain maximum at grid edge {} MHz is not bracketed",
                    ws[i]
                )));
            }
            let freq = golden_max(&gain, ws[i - 1], ws[i + 1]);
            let g = gain(freq);
            if g < gs[i] * (1.0 - 1e-12) {
                return Err(Error::GridTooCoarse("peak refinement failed".into()));
            }
            if peaks.last().is_none_or(|q: &GainPeak| (q.freq - freq).abs() > 1e-9 * (1.0 + freq.abs())) {
                peaks.push(GainPeak { freq, gain: g, band: None });
            }
        }
    }
    if peaks.is_empty() {
        return Err(Error::GridTooCoarse("no gain maximum found on the grid".into()));
    }

    for pk in &mut peaks {
        if pk.gain >= 2.0 {
            pk.band = Some(half_power_band(&gain, &ws, pk.freq, pk.gain / 2.0)?);
        }
    }

    let g_max = peaks.iter().map(|q| q.gain).fold(f64::NEG_INFINITY, f64::max);
    // Among (near-)equal maxima prefer the signal side.
    let side = if p.delta_a >= 0.0 { 1.0 } else { -1.0 };
    let signal = peaks
        .iter()
        .filter(|q| q.gain >= g_max * (1.0 - 1e-9))
        .max_by(|a, b| (side * a.freq).total_cmp(&(side * b.freq)))
        .copied()
        .expect("at least one peak");
    let merged = match signal.band {
        Some((lo, hi)) => peaks.iter().any(|q| q.freq != signal.freq && q.freq >= lo && q.freq <= hi),
        None => false,
    };
    Ok(GainSummary {
        g_max,
        peak_freq: signal.freq,
        bw_3db: signal.bw_3db(),
        n_peaks: peaks.len(),
        lambda_co: p.lambda_co(),
        lambda_crit: p.lambda_crit(),
        peaks,
        merged,
    })
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn half_power_band(f: &impl Fn(f64) -> f64, ws: &[f64], peak: f64, level: f64) -> Result<(f64, f64)> {
    let start = ws.partition_point(|&w| w < peak);
    let lo = (0..start.min(ws.len())).rev().find(|&i| f(ws[i]) < level);
    let hi = (start..ws.len()).find(|&i| f(ws[i]) < level);
    match (lo, hi) {
        (Some(i), Some(j)) => {
            let left = bisect(f, level, ws[i], ws[i + 1].min(peak));
            let right = bisect(f, level, ws[j], ws[j - 1].max(peak));
            Ok((left, right))
        }
        _ => Err(Error::GridTooCoarse(format!(
            "half-power point of the peak at {peak} MHz lies outside the grid"
        ))),
    }
}

/// Crossing of `f = level` between `below` (f < level) and `above` (f ≥ level).
fn bisect(f: &impl Fn(f64) -> f64, level: f64, mut below: f64, mut above: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (below + above);
        if mid == below || mid == above {
            break;
        }
        if f(mid) < level {
            below = mid;
        } else {
            above = mid;
        }
    }
    0.5 * (below + above)
}

/// Qubit-port reflection Γ_q(ω) = −1 + γ_1/(γ_t/2 − i(ω − ν_q)).
pub fn gamma_qubit(omega: f64, gamma_1: f64, gamma_t: f64, nu_q: f64) -> Result<Complex64> {
    if !(gamma_1 > 0.0) || !(gamma_t >= gamma_1) {
        return Err(Error::invalid("gamma_t", "need gamma_t >= gamma_1 > 0"));
    }
    Ok(gamma_1 / Complex64::new(0.5 * gamma_t, -(omega - nu_q)) - 1.0)
}

pub fn qubit_spectrum(freqs: &[f64], gamma_1: f64, gamma_t: f64, nu_q: f64) -> Result<ComplexSpectrum> {
    gamma_qubit(nu_q, gamma_1, gamma_t, nu_q)?;
    ComplexSpectrum::sample(freqs, SpectrumKind::Qubit, |w| {
        gamma_1 / Complex64::new(0.5 * gamma_t, -(w - nu_q)) - 1.0
    })
}

/// Oscillator reflection with the pump off and the qubit hybridized.
///
/// `omega` is absolute; the qubit sits at ν_a + (δ_q − δ_a) with linewidth γ_t.
pub fn gamma_coupled(p: &OscillatorParams, q: &TransmonParams, omega: f64) -> Result<Complex64> {
    p.check_finite()?;
    if p.lam != 0.0 {
        return Err(Error::invalid("lam", "the anticrossing response assumes the pump is off"));
    }
    let nu_a = p.freq_a;
    let nu_q = p.freq_a + q.delta_q - p.delta_a;
    let qubit = q.g * q.g / Complex64::new(0.5 * q.gamma_t(), -(omega - nu_q));
    Ok(p.kappa / (Complex64::new(0.5 * p.kappa, -(omega - nu_a)) + qubit) - 1.0)
}

pub fn coupled_spectrum(p: &OscillatorParams, q: &TransmonParams, freqs: &[f64]) -> Result<ComplexSpectrum> {
    let values = freqs.iter().map(|&w| gamma_coupled(p, q, w)).collect::<Result<Vec<_>>>()?;
    ComplexSpectrum::new(freqs.to_vec(), values, SpectrumKind::Coupled)
}
