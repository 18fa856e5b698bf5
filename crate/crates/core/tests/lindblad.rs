use approx::assert_relative_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqbo::bogoliubov::{chi_transmon, straddle_chi};
use sqbo::lindblad::{
    build_liouvillian, chi_closed_system, quartic_dephasing, oscillator_moments, qubit_shift_dephasing, steady_state,
    suggested_n_fock, LindbladConfig,
};
use sqbo::spectral::{SpectralShift, resonant_driven_shift, resonant_steady_state, shift_undriven, UndrivenModel};
use sqbo::{frame_of, DriveSpec, Error, OscillatorParams, TransmonParams};

const KAPPA: f64 = 8.7;

fn osc_cfg(n_fock: usize) -> LindbladConfig {
    LindbladConfig {
        n_fock,
        ..LindbladConfig::default()
    }
}

fn transmon(delta_q: f64) -> TransmonParams {
    TransmonParams {
        delta_q,
        g: 4.9,
        chi_q: -114.0,
        gamma_1: 0.0,
        gamma_phi: 0.0,
        n_levels: 3,
    }
}

#[test]
fn vacuum_is_dark_state() {
    let l = build_liouvillian(&OscillatorParams::new(KAPPA, 0.0, 0.0), None, None, &osc_cfg(8)).unwrap();
    let mut vac = DMatrix::zeros(8, 8);
    vac[(0, 0)] = Complex64::new(1.0, 0.0);
    assert!(l.apply(&vac).iter().all(|z| z.norm() < 1e-14));
}

#[test]
fn superoperator_dimension() {
    let q = transmon(-80.0);
    let cfg = LindbladConfig {
        n_fock: 6,
        n_transmon: 3,
        ..LindbladConfig::default()
    };
    let l = build_liouvillian(&OscillatorParams::new(KAPPA, 20.0, 5.0), Some(&q), None, &cfg).unwrap();
    assert_eq!(l.matrix.dim, (3 * 6) * (3 * 6));
}

#[test]
fn column_stacking_convention() {
    // Pure Hamiltonian part on a 2-level oscillator truncation: L(ρ) = −i[H, ρ].
    let p = OscillatorParams::new(1e-300, 3.0, 0.0);
    let l = build_liouvillian(&p, None, None, &osc_cfg(4)).unwrap();
    let mut rho = DMatrix::zeros(4, 4);
    rho[(1, 0)] = Complex64::new(1.0, 0.0);
    let out = l.apply(&rho);
    // |1⟩⟨0| picks up −i(E₁ − E₀) = −3i at row 1, column 0 (vec index 1).
    assert_relative_eq!(out[(1, 0)].im, -3.0, epsilon = 1e-12);
    assert_eq!(l.matrix.apply(rho.as_slice())[1], out[(1, 0)]);
}

#[test]
fn preserves_hermiticity() {
    let q = TransmonParams {
        gamma_1: 0.5,
        gamma_phi: 0.3,
        ..transmon(-80.0)
    };
    let cfg = LindbladConfig {
        n_fock: 6,
        n_transmon: 3,
        ..LindbladConfig::default()
    };
    let drive = DriveSpec::new(0.01, 0.0, 0.4);
    let l = build_liouvillian(&OscillatorParams::new(KAPPA, 20.0, 5.0), Some(&q), Some(&drive), &cfg).unwrap();
    let d = l.hilbert_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let rho = &m + m.adjoint();
    let out = l.apply(&rho);
    let err = (&out - out.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(err < 1e-12, "{err}");
    // Trace preservation.
    assert!(out.trace().norm() < 1e-11);
}

#[test]
fn truncation_guard() {
    let p = OscillatorParams::new(KAPPA, 0.0, 0.95 * KAPPA / 2.0);
    match build_liouvillian(&p, None, None, &osc_cfg(16)) {
        Err(Error::TruncationTooSmall { suggested, .. }) => assert!(suggested > 16),
        other => panic!("expected truncation error, got {other:?}"),
    }
}

#[test]
fn unstable_and_time_dependent_rejected() {
    assert!(build_liouvillian(&OscillatorParams::new(KAPPA, 0.0, 4.35), None, None, &osc_cfg(8)).is_err());
    let d = DriveSpec::new(0.1, 3.0, 0.0);
    assert!(build_liouvillian(&OscillatorParams::new(KAPPA, 0.0, 1.0), None, Some(&d), &osc_cfg(8)).is_err());
}

#[test]
fn resonant_moments_match_closed_forms() {
    for lam in [0.3 * KAPPA / 2.0, 0.6 * KAPPA / 2.0] {
        let p = OscillatorParams::new(KAPPA, 0.0, lam);
        let l = build_liouvillian(&p, None, None, &osc_cfg(suggested_n_fock(&p, None, 1e-12))).unwrap();
        let ss = steady_state(&l).unwrap();
        let exact = resonant_steady_state(&p).unwrap().moments;
        assert!(ss.truncation_converged);
        assert_relative_eq!(ss.moments.n, exact.n, max_relative = 1e-8);
        assert_relative_eq!(ss.moments.a2.im, exact.a2.im, max_relative = 1e-8);
        assert!(ss.moments.a2.re.abs() < 1e-10);
        assert!(ss.trace_residual < 1e-9);
        assert!(ss.min_eigenvalue > -1e-8);
        assert!(ss.hermiticity_residual < 1e-9);
        for &(th, v) in &ss.x_var {
            assert_relative_eq!(v, exact.x_var(th), max_relative = 1e-8);
        }
    }
}

#[test]
fn pump_off_gives_vacuum() {
    let ss = steady_state(&build_liouvillian(&OscillatorParams::new(KAPPA, 20.0, 0.0), None, None, &osc_cfg(8)).unwrap()).unwrap();
    assert!(ss.moments.n.abs() < 1e-14);
    assert!(ss.moments.a2.norm() < 1e-14);
}

#[test]
fn detuned_moments_and_bogoliubov_occupation() {
    let p = OscillatorParams::new(KAPPA, 20.0, 17.0);
    let cfg = osc_cfg(suggested_n_fock(&p, None, 1e-12));
    let ss = steady_state(&build_liouvillian(&p, None, None, &cfg).unwrap()).unwrap();
    let (n, m) = oscillator_moments(&p);
    assert_relative_eq!(ss.moments.n, n, max_relative = 1e-8);
    assert_relative_eq!(ss.moments.a2.norm(), m, max_relative = 1e-8);
    // In the Bogoliubov frame the occupation is sinh²r for any κ.
    let f = frame_of(&p).unwrap();
    assert_relative_eq!(ss.moments.bogoliubov_occupation(&f), f.sinh2(), max_relative = 1e-7);
    assert_relative_eq!(f.sinh2(), 0.4491, epsilon = 1e-4);
}

#[test]
fn driven_occupation_matches_phase_dependent_stark_coefficient() {
    // ⟨a†a⟩ under a drive at ν_p/2 is the coefficient of χ₀ in the resonant shift.
    let lam = 0.5 * KAPPA / 2.0;
    let p = OscillatorParams::new(KAPPA, 0.0, lam);
    for theta in [0.0, 0.7, std::f64::consts::FRAC_PI_2] {
        let drive = DriveSpec::new(0.5, 0.0, theta);
        let cfg = osc_cfg(suggested_n_fock(&p, Some(&drive), 1e-12));
        let ss = steady_state(&build_liouvillian(&p, None, Some(&drive), &cfg).unwrap()).unwrap();
        let expected = resonant_driven_shift(&p, 1.0, &drive, None).unwrap().d_omega_q;
        assert_relative_eq!(ss.moments.n, expected, max_relative = 1e-7);
    }
}

#[test]
fn closed_system_chi_at_operating_point() {
    let p = OscillatorParams::new(KAPPA, 20.0, 17.0);
    let q = transmon(-80.0);
    let cfg = LindbladConfig {
        n_fock: 40,
        n_transmon: 3,
        ..LindbladConfig::default()
    };
    let oracle = chi_closed_system(&p, &q, &cfg).unwrap();
    let analytic = chi_transmon(&q, &frame_of(&p).unwrap(), KAPPA).unwrap().chi;
    assert!(((oracle.chi - analytic) / analytic).abs() < 0.05, "{} vs {analytic}", oracle.chi);
    assert!(oracle.overlaps.iter().all(|&o| o > 0.8));

    let bare = chi_closed_system(&p.with_lam(0.0), &q, &cfg).unwrap();
    let b = straddle_chi(4.9, -114.0, -100.0);
    assert!(((bare.chi - b) / b).abs() < 0.01, "{} vs {b}", bare.chi);
}

#[test]
fn coherence_shift_vanishes_without_pump() {
    let q = TransmonParams {
        gamma_1: 0.5,
        gamma_phi: 0.2,
        ..transmon(-80.0)
    };
    let cfg = LindbladConfig {
        n_fock: 8,
        n_transmon: 3,
        ..LindbladConfig::default()
    };
    let s = qubit_shift_dephasing(&OscillatorParams::new(KAPPA, 20.0, 0.0), &q, &cfg).unwrap();
    assert_eq!(s.d_omega_q, 0.0);
    assert_eq!(s.d_gamma_phi, 0.0);
    // Bare coherence sits near the dressed qubit frequency.
    assert!((-s.reference.eigenvalue.im - (-80.0)).abs() < 1.0);
}

#[test]
fn coherence_shift_scales_with_g_squared() {
    let p = OscillatorParams::new(KAPPA, -40.0, 20.0);
    let cfg = LindbladConfig {
        n_fock: 24,
        n_transmon: 3,
        ..LindbladConfig::default()
    };
    let shift = |g: f64| {
        let q = TransmonParams {
            g,
            gamma_1: 0.5,
            gamma_phi: 0.2,
            ..transmon(-120.0)
        };
        qubit_shift_dephasing(&p, &q, &cfg).unwrap().d_omega_q
    };
    let (s1, s2) = (shift(0.5), shift(1.0));
    assert_relative_eq!(s2 / s1, 4.0, max_relative = 0.01);
}

fn closed_form(p: &OscillatorParams, q: &TransmonParams) -> SpectralShift {
    let f = frame_of(p).unwrap();
    let at_r = chi_transmon(q, &f, KAPPA).unwrap();
    let at_0 = chi_transmon(q, &frame_of(&p.with_lam(0.0)).unwrap(), KAPPA).unwrap();
    shift_undriven(&UndrivenModel::from_results(&at_r, &at_0), &f, KAPPA)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

// Qubit 100 MHz below the bare oscillator, pump well below |δ_a|.
const FAR_POINTS: [(f64, f64); 3] = [(-40.0, 30.0), (40.0, 30.0), (-30.0, 20.0)];

#[test]
fn coherence_shift_matches_closed_form_far_from_coalescence() {
    for (delta_a, lam) in FAR_POINTS {
        let p = OscillatorParams::new(KAPPA, delta_a, lam);
        let q = TransmonParams {
            gamma_1: 0.5,
            gamma_phi: 0.2,
            ..transmon(delta_a - 100.0)
        };
        let oracle = qubit_shift_dephasing(&p, &q, &LindbladConfig::sized_for(&p, None, 3)).unwrap();
        let analytic = closed_form(&p, &q);
        assert!(rel(oracle.d_omega_q, analytic.d_omega_q) < 0.1, "{oracle:?} vs {analytic:?}");
        assert!(oracle.pumped.overlap > 0.95);
    }
}

#[test]
fn photon_noise_dephasing_matches_closed_form() {
    for (delta_a, lam) in FAR_POINTS {
        let p = OscillatorParams::new(KAPPA, delta_a, lam);
        let q = TransmonParams {
            gamma_1: 0.5,
            gamma_phi: 0.2,
            ..transmon(delta_a - 100.0)
        };
        let quartic = quartic_dephasing(&p, &q, &LindbladConfig::sized_for(&p, None, 3)).unwrap();
        let analytic = closed_form(&p, &q).d_gamma_phi;
        assert!(rel(quartic, analytic) < 0.1, "{quartic} vs {analytic}");
    }
}
