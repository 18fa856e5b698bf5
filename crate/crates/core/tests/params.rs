use approx::assert_relative_eq;
use proptest::prelude::*;
use sqbo::error::Error;
use sqbo::io::Table;
use sqbo::{frame_of, kv, validate, BogoliubovFrame, DriveSpec, OscillatorParams, PumpRegime, TransmonParams};

#[test]
fn stability_examples() {
    let r = validate(&OscillatorParams::new(8.7, 0.0, 0.0)).unwrap();
    assert!(r.stable);
    assert_relative_eq!(r.margin_crit, 4.35, max_relative = 1e-12);

    let co = (900.0f64 - 8.7 * 8.7 / 4.0).sqrt();
    assert_relative_eq!(co, 29.683, epsilon = 5e-4);
    let r = validate(&OscillatorParams::new(8.7, 30.0, co)).unwrap();
    assert!(r.stable);
    assert_eq!(r.regime, PumpRegime::CoalescenceOnset);
    assert_relative_eq!(r.lambda_co.unwrap(), co, max_relative = 1e-12);

    let r = validate(&OscillatorParams::new(8.7, 0.0, 4.35)).unwrap();
    assert!(!r.stable);
    assert_eq!(r.regime, PumpRegime::Unstable);
}

#[test]
fn stability_rejects_bad_kappa() {
    for k in [0.0, -1.0, f64::NAN] {
        assert!(matches!(
            validate(&OscillatorParams::new(k, 0.0, 0.0)),
            Err(Error::InvalidParameter { name: "kappa", .. })
        ));
    }
}

#[test]
fn regimes_along_a_sweep() {
    let p = OscillatorParams::new(8.7, 30.0, 0.0);
    assert_eq!(validate(&p.with_lam(10.0)).unwrap().regime, PumpRegime::Split);
    assert_eq!(validate(&p.with_lam(30.1)).unwrap().regime, PumpRegime::Merged);
    // Inside the coalescence region |δ_a| < κ/2 there is a single peak throughout.
    assert_eq!(validate(&OscillatorParams::new(8.7, 2.0, 1.0)).unwrap().regime, PumpRegime::Merged);
}

#[test]
fn frame_examples() {
    let f = frame_of(&OscillatorParams::new(8.7, 20.0, 17.0)).unwrap();
    assert_relative_eq!(f.r, 0.6281, epsilon = 1e-4);
    assert_relative_eq!(f.s_db, 5.5, epsilon = 0.05);
    assert_relative_eq!(f.omega_bog, (400.0f64 - 289.0).sqrt(), max_relative = 1e-12);
    assert_relative_eq!(f.omega_bog, 10.536, epsilon = 1e-3);

    let f = frame_of(&OscillatorParams::new(8.7, 20.0, 0.0)).unwrap();
    assert_eq!(f.r, 0.0);
    assert_eq!(f.omega_bog, 20.0);
}

#[test]
fn frame_rejections() {
    assert!(matches!(frame_of(&OscillatorParams::new(8.7, 0.0, 1.0)), Err(Error::NotBogoliubov { .. })));
    assert!(matches!(frame_of(&OscillatorParams::new(8.7, 20.0, 20.0)), Err(Error::NotBogoliubov { .. })));
    assert!(matches!(frame_of(&OscillatorParams::new(8.7, 20.0, 25.0)), Err(Error::NotBogoliubov { .. })));
}

#[test]
fn frame_from_squeezing_round_trip() {
    let f = frame_of(&OscillatorParams::new(8.7, -30.0, 21.0)).unwrap();
    let g = BogoliubovFrame::from_squeezing(f.r, -30.0).unwrap();
    assert_relative_eq!(g.omega_bog, f.omega_bog, max_relative = 1e-12);
    assert_relative_eq!(g.lam(), 21.0, max_relative = 1e-12);
    assert!(g.omega_bog < 0.0);
}

#[test]
fn drive_and_transmon_validation() {
    assert!(DriveSpec::new(-0.1, 0.0, 0.0).validate().is_err());
    assert!(DriveSpec::new(0.0, 0.0, 0.0).validate().is_ok());
    let mut q = TransmonParams { delta_q: -80.0, g: 4.9, chi_q: -114.0, gamma_1: 0.5, gamma_phi: 0.2, n_levels: 3 };
    assert!(q.validate().is_ok());
    assert_relative_eq!(q.gamma_t(), 0.9);
    q.n_levels = 1;
    assert!(q.validate().is_err());
    q.n_levels = 2;
    q.g = 0.0;
    assert!(q.validate().is_err());
}

#[test]
fn kv_and_json_round_trip() {
    let text = "# operating point\nkappa = 8.7\ndelta_a = 20\nlam = 17.0\n";
    let p: OscillatorParams = kv::from_str(text).unwrap();
    assert_eq!(p, OscillatorParams::new(8.7, 20.0, 17.0));
    let back: OscillatorParams = kv::from_str(&kv::to_string(&p).unwrap()).unwrap();
    assert_eq!(back, p);
    let json = serde_json::to_string(&p).unwrap();
    assert_eq!(serde_json::from_str::<OscillatorParams>(&json).unwrap(), p);

    let q: TransmonParams = kv::from_str("delta_q = -80\ng = 4.9\nchi_q = -114\n").unwrap();
    assert_eq!(q.n_levels, 3);
    assert_eq!(q.gamma_1, 0.0);
}

#[test]
fn kv_errors_carry_line_numbers() {
    match kv::parse("kappa = 8.7\nkappa = 9\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    match kv::parse("kappa 8.7\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn table_round_trip() {
    let mut t = Table::new(["x", "y"]).meta("kappa", 8.7);
    t.push(vec![1.0, f64::NAN]);
    t.push(vec![-2.5, 3.0e-12]);
    let back = Table::parse(&t.to_csv_string()).unwrap();
    assert_eq!(back.columns, t.columns);
    assert_eq!(back.metadata, t.metadata);
    assert_eq!(back.rows[1], t.rows[1]);
    assert!(back.rows[0][1].is_nan());
}

proptest! {
    #[test]
    fn frame_identities(delta in prop_oneof![-200.0f64..-0.5, 0.5f64..200.0], frac in 0.0f64..0.999) {
        let lam = frac * delta.abs();
        let f = frame_of(&OscillatorParams::new(8.7, delta, lam)).unwrap();
        let exact = delta.signum() * (delta * delta - lam * lam).sqrt();
        prop_assert!((delta / (2.0 * f.r).cosh() - exact).abs() <= 1e-12 * exact.abs());
        prop_assert!((f.omega_bog - exact).abs() <= 1e-12 * exact.abs());
        prop_assert!(((2.0 * f.r).tanh() - lam / delta.abs()).abs() <= 1e-12 * (lam / delta.abs()).max(1e-300));
        prop_assert!(f.r >= 0.0);
        prop_assert!((f.s_db - 20.0 * f.r / std::f64::consts::LN_10).abs() < 1e-12 * f.s_db.max(1.0));
    }

    #[test]
    fn frame_monotone(delta in prop_oneof![-200.0f64..-0.5, 0.5f64..200.0], a in 0.0f64..0.99, b in 0.0f64..0.99) {
        prop_assume!((a - b).abs() > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let f1 = frame_of(&OscillatorParams::new(8.7, delta, lo * delta.abs())).unwrap();
        let f2 = frame_of(&OscillatorParams::new(8.7, delta, hi * delta.abs())).unwrap();
        prop_assert!(f2.r > f1.r);
        prop_assert!(f2.omega_bog.abs() < f1.omega_bog.abs());
    }

    #[test]
    fn validate_is_pure(kappa in 0.1f64..20.0, delta in -60.0f64..60.0, lam in 0.0f64..80.0) {
        let p = OscillatorParams::new(kappa, delta, lam);
        let a = validate(&p).unwrap();
        let b = validate(&p).unwrap();
        prop_assert_eq!(a, b);
        let unstable = (delta == 0.0 && lam >= kappa / 2.0)
            || (delta != 0.0 && lam >= (delta * delta + kappa * kappa / 4.0).sqrt());
        prop_assert_eq!(a.stable, !unstable);
    }
}
