use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::scattering::ComplexSpectrum;

/// Noise standard deviation per point: E|n|² = mean|s|² / 10^(snr/10).
pub fn noise_sigma(spectrum: &ComplexSpectrum, snr_db: f64) -> f64 {
    let mean_power = spectrum.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / spectrum.len().max(1) as f64;
    (mean_power / 10f64.powf(snr_db / 10.0)).sqrt()
}

/// Adds i.i.d. circular complex Gaussian noise at the given SNR (dB, relative
/// to the mean signal power). Deterministic in `seed`.
pub fn add_noise(spectrum: &ComplexSpectrum, snr_db: f64, seed: u64) -> Result<ComplexSpectrum> {
    if !snr_db.is_finite() {
        return Err(Error::invalid("snr_db", "must be finite"));
    }
    let sigma = noise_sigma(spectrum, snr_db);
    let normal = Normal::new(0.0, sigma / 2f64.sqrt()).map_err(|e| Error::invalid("snr_db", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = spectrum
        .values
        .iter()
        .map(|v| v + Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
        .collect();
    ComplexSpectrum::new(spectrum.freqs.clone(), values, spectrum.kind)
}
