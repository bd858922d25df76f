use std::f64::consts::PI;

use hoelder_sr::bounds::{
    c1_limit_check, constant_c, curly_brace_check, curly_brace_sweep, rho_threshold,
    scaling_experiment, BundleInputs, ConstantsBundle,
};
use hoelder_sr::distance::OptimizerConfig;
use hoelder_sr::forms::{build_model, ModelKind};
use hoelder_sr::kv::Record;
use hoelder_sr::paths::Polyline;
use hoelder_sr::verify::random_bundle;
use hoelder_sr::{Error, Vec3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bundle(i: BundleInputs) -> ConstantsBundle {
    ConstantsBundle::assemble(i).unwrap()
}

/// Direct transcription of the constant, independent of the library.
fn c_formula(theta: f64, c_m: f64, k: f64, s: f64, a: f64) -> f64 {
    let e = 1.0 / (1.0 + theta);
    1.0 / (2.0 * c_m.powf(theta * e) * k.powf(e) * s.powf(-e) * a.powf(e))
}

#[test]
fn constant_matches_the_formula() {
    let b = bundle(BundleInputs {
        theta: 0.4,
        c_m: 0.3,
        k: 2.0,
        sin_phi0: 0.7,
        alpha_norm: 3.0,
        ..BundleInputs::unit(0.5)
    });
    assert!((b.c - c_formula(0.4, 0.3, 2.0, 0.7, 3.0)).abs() < 1e-14);
    let smooth = bundle(BundleInputs {
        c_m: 1.0 / (4.0 * PI),
        ..BundleInputs::unit(1.0)
    });
    assert!((smooth.c - PI.sqrt()).abs() < 1e-12);
}

#[test]
fn constant_has_the_expected_monotonicity() {
    let base = BundleInputs {
        theta: 0.5,
        c_m: 0.2,
        k: 0.5,
        sin_phi0: 0.6,
        alpha_norm: 2.0,
        ..BundleInputs::unit(0.5)
    };
    let c0 = bundle(base).c;
    assert!(bundle(BundleInputs { c_m: 0.3, ..base }).c < c0);
    assert!(bundle(BundleInputs { k: 0.6, ..base }).c < c0);
    assert!(
        bundle(BundleInputs {
            alpha_norm: 2.5,
            ..base
        })
        .c < c0
    );
    assert!(
        bundle(BundleInputs {
            sin_phi0: 0.7,
            ..base
        })
        .c > c0
    );
    let tiny = bundle(BundleInputs {
        sin_phi0: 1e-12,
        ..base
    })
    .c;
    assert!(tiny < 1e-3);
}

#[test]
fn rho_is_never_above_half_tau() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let b = random_bundle(&mut rng).unwrap();
        assert!(b.rho <= 0.5 * b.tau);
        assert!(b.rho <= b.eta);
        assert_eq!(rho_threshold(&b).unwrap().to_bits(), b.rho.to_bits());
        assert_eq!(constant_c(&b).unwrap().to_bits(), b.c.to_bits());
    }
}

#[test]
fn curly_brace_holds_on_random_bundles() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let b = random_bundle(&mut rng).unwrap();
        assert!(curly_brace_sweep(&b, 1000).unwrap() >= 0.5);
    }
    let unit = bundle(BundleInputs::unit(0.5));
    assert_eq!(curly_brace_check(&unit, 0.0).unwrap(), 1.0);
    assert!(matches!(
        curly_brace_check(&unit, 0.2),
        Err(Error::AboveThreshold { .. })
    ));
}

#[test]
fn serialized_bundle_recomputes_bit_identically() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let b = random_bundle(&mut rng).unwrap();
        let text = b.to_record().to_text();
        let back = ConstantsBundle::from_record(&Record::parse(&text).unwrap()).unwrap();
        assert_eq!(back, b);
        let json = serde_json::to_string(&b).unwrap();
        let back: ConstantsBundle = serde_json::from_str(&json).unwrap();
        assert_eq!(constant_c(&back).unwrap().to_bits(), b.c.to_bits());
    }
}

#[test]
fn tampered_bundle_is_rejected() {
    let b = bundle(BundleInputs::unit(0.5));
    let mut r = b.to_record();
    r.set("c", 0.6);
    assert!(ConstantsBundle::from_record(&r).is_err());
}

#[test]
fn limit_table_examples() {
    let unit = bundle(BundleInputs::unit(0.5));
    let t = c1_limit_check(&unit, &[0.9, 0.95, 0.999]).unwrap();
    assert!(t.values.iter().all(|c| (c - 0.5).abs() < 1e-15));
    let quarter = bundle(BundleInputs {
        c_m: 1.0 / (4.0 * PI),
        ..BundleInputs::unit(0.5)
    });
    let t = c1_limit_check(&quarter, &[0.9, 0.95, 0.99, 0.999]).unwrap();
    assert!(t.values.windows(2).all(|w| w[1] > w[0]));
    assert!(t.last_rel_gap < 0.01);
    assert!((t.limit - PI.sqrt()).abs() < 1e-12);
}

#[test]
fn scaling_rejects_bad_grids() {
    let (h, _) = build_model(ModelKind::Heisenberg, 0.5, 0.0, 0).unwrap();
    let axis = Polyline::segment(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.2)).unwrap();
    let cfg = OptimizerConfig::default();
    assert!(scaling_experiment(&h, &axis, &[0.1, 0.05], &cfg, None).is_err());
    let flat = Polyline::segment(Vec3::zeros(), Vec3::new(0.2, 0.0, 0.0)).unwrap();
    assert!(matches!(
        scaling_experiment(&h, &flat, &[0.1, 0.05, 0.01], &cfg, None),
        Err(Error::NotTransverse { .. })
    ));
    let b = bundle(BundleInputs {
        eta: 0.01,
        ..BundleInputs::unit(0.5)
    });
    assert!(matches!(
        scaling_experiment(&h, &axis, &[0.1, 0.05, 0.01], &cfg, Some(&b)),
        Err(Error::AboveThreshold { .. })
    ));
}

#[test]
fn heisenberg_slope_is_one_half() {
    let (h, _) = build_model(ModelKind::Heisenberg, 0.5, 0.0, 0).unwrap();
    let axis = Polyline::segment(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.2)).unwrap();
    let r = scaling_experiment(
        &h,
        &axis,
        &[0.01, 0.1, 0.02, 0.05],
        &OptimizerConfig::default(),
        None,
    )
    .unwrap();
    assert_eq!(r.epsilons(), vec![0.1, 0.05, 0.02, 0.01]);
    assert!((r.fitted_slope.unwrap() - 0.5).abs() < 0.05);
    let mut csv = Vec::new();
    r.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("epsilon,d_r,d_hat,lower_bound,violation")
    );
    assert_eq!(text.lines().count(), 5);
}
