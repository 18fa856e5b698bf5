//! Squeezed-photon qubit theory.
//!
//! A degenerate parametric oscillator pumped away from resonance behaves as
//! a "Bogoliubov oscillator" whose eigenstates are squeezed Fock states.
//! This crate evaluates its scattering response, the squeezing-enhanced
//! dispersive coupling to a qubit or transmon, the resulting qubit shifts
//! and dephasing, and checks them against a truncated-Fock Lindblad solver.
//! The [`calibration`] module holds the fitting procedures used to extract
//! λ, γ_t, χ and (g, χ_q) from spectra.
//!
//! Units: see [`params`].

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bogoliubov;
pub mod calibration;
pub mod error;
pub mod io;
pub mod kv;
pub mod lindblad;
pub mod params;
pub mod scattering;
pub mod spectral;

pub use error::{Error, Result};
pub use params::{
    frame_of, validate, BogoliubovFrame, DriveSpec, OscillatorParams, PumpRegime, StabilityReport,
    TransmonParams,
};
