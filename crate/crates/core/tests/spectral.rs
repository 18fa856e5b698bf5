use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use sqbo::bogoliubov::{chi_qubit, chi_transmon};
use sqbo::scattering::{linspace, resonant_peak_gain};
use sqbo::spectral::*;
use sqbo::{frame_of, BogoliubovFrame, DriveSpec, OscillatorParams, TransmonParams};

const KAPPA: f64 = 8.7;

fn frame(delta_a: f64, lam: f64) -> BogoliubovFrame {
    frame_of(&OscillatorParams::new(KAPPA, delta_a, lam)).unwrap()
}

fn transmon(delta_q: f64) -> TransmonParams {
    TransmonParams { delta_q, g: 4.9, chi_q: -114.0, gamma_1: 0.5, gamma_phi: 0.2, n_levels: 3 }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn occupation_examples() {
    let none = DriveSpec::default();
    assert_eq!(bo_occupation(&frame(20.0, 0.0), &none, KAPPA).unwrap().n_alpha, 0.0);
    let o = bo_occupation(&frame(20.0, 17.0), &none, KAPPA).unwrap();
    assert_relative_eq!(o.n_alpha, 0.4491, epsilon = 1e-4);
    for lam in linspace(0.0, 17.0, 35) {
        assert!(bo_occupation(&frame(20.0, lam), &none, KAPPA).unwrap().n_alpha <= 1.2);
    }
    let o = bo_occupation(&frame(20.0, 17.0), &DriveSpec::new(1.0, 0.0, 0.0), KAPPA).unwrap();
    assert_relative_eq!(o.n_alpha, o.thermal + o.coherent, max_relative = 1e-15);
    assert_relative_eq!(o.coherent, frame(20.0, 17.0).r.cosh().powi(2), max_relative = 1e-12);
}

#[test]
fn near_coalescence_flag() {
    // |2Ω| ≤ 5κ/2 is flagged.
    let o = bo_occupation(&frame(20.0, 17.0), &DriveSpec::default(), KAPPA).unwrap();
    assert!(o.near_coalescence);
    let o = bo_occupation(&frame(40.0, 17.0), &DriveSpec::default(), KAPPA).unwrap();
    assert!(!o.near_coalescence);
}

#[test]
fn undriven_reference_is_zero() {
    let f0 = frame(20.0, 0.0);
    let q = transmon(-80.0);
    let c = chi_qubit(&q, &f0, KAPPA).unwrap();
    let t = chi_transmon(&q, &f0, KAPPA).unwrap();
    for model in [UndrivenModel::from_results(&c, &c), UndrivenModel::from_results(&t, &t)] {
        let s = shift_undriven(&model, &f0, KAPPA);
        assert_eq!(s.d_omega_q, 0.0);
        assert_eq!(s.d_gamma_phi, 0.0);
    }
}

#[test]
fn undriven_dephasing_example() {
    let f = BogoliubovFrame::from_squeezing(0.6281, 20.0).unwrap();
    let s = shift_undriven(&UndrivenModel::TwoLevel { chi_r: -0.5, chi_0: -0.3 }, &f, KAPPA);
    assert_relative_eq!(s.d_gamma_phi, 0.0187, epsilon = 1e-4);
    assert_relative_eq!(s.d_omega_q, -0.5 * (0.5 + f.sinh2()) + 0.15, max_relative = 1e-12);
}

#[test]
fn thermal_mapping_is_exact() {
    let f = frame(-30.0, 22.0);
    let s = shift_undriven(&UndrivenModel::Transmon { chi_r: -0.4, lamb_r: 0.1, lamb_0: 0.05 }, &f, KAPPA);
    assert_eq!(s.d_gamma_phi, thermal_dephasing(-0.4, KAPPA, f.sinh2()));
}

#[test]
fn driven_examples() {
    let f = BogoliubovFrame::from_squeezing(0.6281, 20.0).unwrap();
    let zero = shift_driven(-0.5, &f, &DriveSpec::new(0.0, f.omega_bog, 0.0), KAPPA).unwrap();
    assert_eq!((zero.d_omega_q, zero.d_gamma_phi), (0.0, 0.0));
    let s = shift_driven(-0.5, &f, &DriveSpec::new(1.0, f.omega_bog, 0.0), KAPPA).unwrap();
    assert_relative_eq!(s.d_omega_q, -0.7246, epsilon = 1e-4);
    assert_relative_eq!(s.d_gamma_phi, 0.1581, epsilon = 1e-4);
    assert!(!s.warnings.contains(&Warning::OffResonantDrive));
    let off = shift_driven(-0.5, &f, &DriveSpec::new(1.0, 0.0, 0.0), KAPPA).unwrap();
    assert!(off.warnings.contains(&Warning::OffResonantDrive));

    let f0 = frame(20.0, 0.0);
    let s = shift_driven(-0.3, &f0, &DriveSpec::new(2.0, 20.0, 0.0), KAPPA).unwrap();
    assert_relative_eq!(s.d_omega_q, -0.6, max_relative = 1e-12);
    assert_relative_eq!(s.d_gamma_phi, 2.0 * 0.09 * 2.0 / KAPPA, max_relative = 1e-12);
}

#[test]
fn resonant_moments_examples() {
    let vac = resonant_steady_state(&OscillatorParams::new(KAPPA, 0.0, 0.0)).unwrap();
    for th in linspace(0.0, PI, 9) {
        assert_relative_eq!(vac.moments.x_var(th), 0.25, max_relative = 1e-15);
    }
    let s = resonant_steady_state(&OscillatorParams::new(KAPPA, 0.0, 0.9 * KAPPA / 2.0)).unwrap();
    assert_relative_eq!(s.s_inf, 10.0, max_relative = 1e-12);
    assert_relative_eq!(s.s_inf_db(), 10.0, max_relative = 1e-12);

    let lam = resonant_lambda_for_squeezing(KAPPA, 10f64.powf(0.8));
    let s = resonant_steady_state(&OscillatorParams::new(KAPPA, 0.0, lam)).unwrap();
    assert_relative_eq!(s.s_inf_db(), 8.0, max_relative = 1e-12);
    assert!(s.moments.n > 1.15 && s.moments.n < 1.35, "{}", s.moments.n);

    assert!(resonant_steady_state(&OscillatorParams::new(KAPPA, 0.0, KAPPA / 2.0)).is_err());
    assert!(resonant_steady_state(&OscillatorParams::new(KAPPA, 5.0, 1.0)).is_err());
}

#[test]
fn resonant_driven_examples() {
    let p0 = OscillatorParams::new(KAPPA, 0.0, 0.0);
    let s = resonant_driven_shift(&p0, -0.25, &DriveSpec::new(2.0, 0.0, 0.4), None).unwrap();
    assert_relative_eq!(s.parts.stark, -0.5, max_relative = 1e-12);
    assert_eq!(s.parts.lamb, 0.0);
    assert!(s.warnings.contains(&Warning::DephasingModelMissing));

    let p = OscillatorParams::new(KAPPA, 0.0, 2.5);
    let at = |th: f64| resonant_driven_shift(&p, -0.25, &DriveSpec::new(1.0, 0.0, th), None).unwrap().parts.stark;
    for th in linspace(0.0, PI, 7) {
        assert_relative_eq!(at(th), at(th + PI), max_relative = 1e-12);
    }
    // cos2θ: the mean of opposite quadratures is the θ-average.
    let mean = 0.5 * (at(0.0) + at(PI / 2.0));
    for th in linspace(0.0, PI, 7) {
        let amp = 0.5 * (at(0.0) - at(PI / 2.0));
        assert_relative_eq!(at(th), mean + amp * (2.0 * th).cos(), max_relative = 1e-12);
    }
}

struct Fixed(f64);

impl ResonantDephasing for Fixed {
    fn dephasing(&self, _: &OscillatorParams, _: f64, _: &DriveSpec) -> f64 {
        self.0
    }
}

#[test]
fn resonant_dephasing_plug_in() {
    let p = OscillatorParams::new(KAPPA, 0.0, 2.0);
    let s = resonant_driven_shift(&p, -0.25, &DriveSpec::new(1.0, 0.0, 0.0), Some(&Fixed(0.03))).unwrap();
    assert_eq!(s.d_gamma_phi, 0.03);
    assert!(s.warnings.is_empty());
}

#[test]
fn useful_relation() {
    for f in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let lam = f * KAPPA / 2.0;
        let s = resonant_steady_state(&OscillatorParams::new(KAPPA, 0.0, lam)).unwrap();
        let g = resonant_peak_gain(KAPPA, lam);
        assert_relative_eq!(s.moments.n, (g.sqrt() - 1.0) / 4.0, max_relative = 1e-12);
    }
}

#[test]
fn correlator_examples() {
    let taus = linspace(0.0, 1.0, 11);
    let c = number_correlation(Fluctuations::Squeezed(&frame(20.0, 0.0)), &DriveSpec::default(), KAPPA, &taus).unwrap();
    assert!(c.values.iter().all(|v| *v == 0.0));
    assert_eq!(c.regime, CorrelationRegime::SqueezedVacuum);

    let f = frame(-30.0, 20.0);
    let sq = number_correlation(Fluctuations::Squeezed(&f), &DriveSpec::default(), KAPPA, &taus).unwrap();
    let th = number_correlation(Fluctuations::Thermal { n_th: f.sinh2() }, &DriveSpec::default(), KAPPA, &taus).unwrap();
    assert_eq!(sq.values, th.values);
    assert_eq!(th.regime, CorrelationRegime::Thermal);
    let dr = number_correlation(Fluctuations::Squeezed(&f), &DriveSpec::new(0.5, f.omega_bog, 0.0), KAPPA, &taus).unwrap();
    assert_eq!(dr.regime, CorrelationRegime::Driven);
}

/// Quadrature of the correlator over [0, 20/κ] reproduces the closed-form dephasing.
#[test]
fn correlator_integral_matches_closed_forms() {
    let points = [
        (40.0, 17.0, 0.0, -0.3),
        (40.0, 17.0, 1.0, -0.3),
        (-40.0, 30.0, 0.5, -0.2),
        (30.0, 20.0, 0.0, -0.5),
        (30.0, 25.0, 2.0, -0.1),
        (-30.0, 10.0, 1.5, -0.4),
        (60.0, 50.0, 0.0, -0.25),
        (60.0, 0.0, 3.0, -0.25),
        (-60.0, 45.0, 0.2, -0.6),
        (20.0, 5.0, 1.0, -0.35),
    ];
    for (da, lam, nd, chi) in points {
        let f = frame(da, lam);
        let drive = DriveSpec::new(nd, f.omega_bog, 0.0);
        let t_max = 20.0 / KAPPA;
        let curve = number_correlation(Fluctuations::Squeezed(&f), &drive, KAPPA, &[0.0]).unwrap();
        let (w0, w1) = curve.weights;
        let k = 2.0 * PI * KAPPA;
        let integral = simpson(|t| w0 * (-k * t).exp() + w1 * (-0.5 * k * t).exp(), 0.0, t_max, 20000);
        let numeric = dephasing_from_integral(chi, integral);
        let closed = thermal_dephasing(chi, KAPPA, f.sinh2())
            + shift_driven(chi, &f, &drive, KAPPA).unwrap().d_gamma_phi;
        assert!((numeric / closed - 1.0).abs() < 1e-6, "{da} {lam} {nd}: {numeric} vs {closed}");
        assert_relative_eq!(dephasing_from_integral(chi, curve.integral()), closed, max_relative = 1e-12);
    }
}

#[test]
fn shift_table_schema() {
    let f = frame(20.0, 17.0);
    let s = shift_driven(-0.5, &f, &DriveSpec::new(1.0, f.omega_bog, 0.0), KAPPA).unwrap();
    let t = s.to_table();
    assert!(!t.columns.is_empty());
    let json = serde_json::to_string(&s).unwrap();
    assert_eq!(serde_json::from_str::<SpectralShift>(&json).unwrap(), s);
}

proptest! {
    #[test]
    fn parts_sum_and_nonnegative_dephasing(
        da in prop_oneof![-60.0f64..-5.0, 5.0f64..60.0], frac in 0.0f64..0.95, nd in 0.0f64..4.0, chi in -1.0f64..1.0
    ) {
        let f = frame(da, frac * da.abs());
        let a = shift_undriven(&UndrivenModel::TwoLevel { chi_r: chi, chi_0: 0.5 * chi }, &f, KAPPA);
        let b = shift_driven(chi, &f, &DriveSpec::new(nd, f.omega_bog, 0.0), KAPPA).unwrap();
        let c = a.combine(&b);
        for s in [&a, &b, &c] {
            prop_assert!(s.d_gamma_phi >= 0.0);
            prop_assert!((s.parts.lamb + s.parts.stark - s.d_omega_q).abs() <= 1e-12 * s.d_omega_q.abs().max(1e-12));
            prop_assert!((s.parts.thermal + s.parts.drive - s.d_gamma_phi).abs() <= 1e-12 * s.d_gamma_phi.max(1e-12));
        }
    }

    #[test]
    fn correlator_positive_and_decaying(
        da in prop_oneof![-60.0f64..-5.0, 5.0f64..60.0], frac in 0.0f64..0.95, nd in 0.0f64..4.0
    ) {
        let f = frame(da, frac * da.abs());
        let taus = linspace(-2.0, 2.0, 81);
        let c = number_correlation(Fluctuations::Squeezed(&f), &DriveSpec::new(nd, f.omega_bog, 0.0), KAPPA, &taus).unwrap();
        prop_assert!(c.values[40] >= 0.0);
        for i in 41..81 {
            prop_assert!(c.values[i] <= c.values[i - 1]);
            prop_assert!((c.values[i] - c.values[80 - i]).abs() <= 1e-12 * c.values[40].max(1e-300));
        }
    }

    #[test]
    fn resonant_variance_bounds(frac in 0.0f64..0.999, theta in 0.0f64..PI) {
        let s = resonant_steady_state(&OscillatorParams::new(KAPPA, 0.0, frac * KAPPA / 2.0)).unwrap();
        let m = s.moments;
        prop_assert!(m.x_var(theta) + m.p_var(theta) >= 0.5 - 1e-15);
        prop_assert!(m.x_var(theta) >= 0.125 - 1e-15);
        prop_assert!(m.p_var(theta) >= 0.125 - 1e-15);
    }
}
