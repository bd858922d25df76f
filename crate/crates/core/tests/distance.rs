use hoelder_sr::distance::{estimate_upper, heisenberg_vertical_exact, OptimizerConfig};
use hoelder_sr::forms::{build_model, ModelKind, OneForm};
use hoelder_sr::paths::horizontality_defect;
use hoelder_sr::{Error, Vec3};

fn heisenberg() -> OneForm {
    build_model(ModelKind::Heisenberg, 0.5, 0.0, 0).unwrap().0
}

#[test]
fn vertical_estimates_track_the_isoperimetric_value() {
    let h = heisenberg();
    let cfg = OptimizerConfig::default();
    for z in [0.1, 0.03] {
        let est = estimate_upper(&h, Vec3::zeros(), Vec3::new(0.0, 0.0, z), &cfg).unwrap();
        let exact = heisenberg_vertical_exact(z);
        assert!(
            est.value >= exact * (1.0 - 1e-3),
            "{} below {exact}",
            est.value
        );
        assert!(est.value <= exact * 1.03);
        assert!(est.defect < 1e-9);
        assert!(horizontality_defect(&est.path, &h) < 1e-9);
        assert!((est.path.end() - Vec3::new(0.0, 0.0, z)).norm() <= 1e-3 * z);
    }
}

#[test]
fn vertical_estimates_are_translation_invariant_in_z() {
    let h = heisenberg();
    let cfg = OptimizerConfig::default();
    let a = estimate_upper(&h, Vec3::zeros(), Vec3::new(0.0, 0.0, 0.05), &cfg).unwrap();
    let b = estimate_upper(
        &h,
        Vec3::new(0.0, 0.0, 0.2),
        Vec3::new(0.0, 0.0, 0.25),
        &cfg,
    )
    .unwrap();
    assert!((a.value - b.value).abs() < 1e-9);
}

#[test]
fn horizontal_pairs_cost_their_length() {
    let h = heisenberg();
    let cfg = OptimizerConfig::default();
    for q in [
        Vec3::new(0.2, 0.0, 0.0),
        Vec3::new(0.1, -0.3, 0.0),
        Vec3::new(0.0, 0.05, 0.0),
    ] {
        let est = estimate_upper(&h, Vec3::zeros(), q, &cfg).unwrap();
        let ratio = est.value / q.norm();
        assert!((1.0 - 1e-3..=1.05).contains(&ratio), "{ratio}");
    }
}

#[test]
fn coincident_points_are_at_distance_zero() {
    let est = estimate_upper(
        &heisenberg(),
        Vec3::new(0.1, 0.2, 0.3),
        Vec3::new(0.1, 0.2, 0.3),
        &OptimizerConfig::default(),
    )
    .unwrap();
    assert_eq!(est.value, 0.0);
    assert!(est.path.is_trivial());
}

#[test]
fn same_seed_same_answer() {
    let (p, _) = build_model(ModelKind::Perturbed, 0.5, 0.05, 7).unwrap();
    let cfg = OptimizerConfig {
        seed: 3,
        ..OptimizerConfig::default()
    };
    let q = Vec3::new(0.0, 0.0, 0.02);
    let a = estimate_upper(&p, Vec3::zeros(), q, &cfg).unwrap();
    let b = estimate_upper(&p, Vec3::zeros(), q, &cfg).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.path, b.path);
}

#[test]
fn zero_amplitude_perturbation_is_heisenberg() {
    let (p, _) = build_model(ModelKind::Perturbed, 0.5, 0.0, 7).unwrap();
    let h = heisenberg();
    let cfg = OptimizerConfig::default();
    let q = Vec3::new(0.0, 0.0, 0.05);
    let a = estimate_upper(&p, Vec3::zeros(), q, &cfg).unwrap();
    let b = estimate_upper(&h, Vec3::zeros(), q, &cfg).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
}

#[test]
fn foliation_cannot_climb() {
    let (f, _) = build_model(ModelKind::Foliation, 0.5, 0.0, 0).unwrap();
    let r = estimate_upper(
        &f,
        Vec3::zeros(),
        Vec3::new(0.0, 0.0, 0.05),
        &OptimizerConfig::default(),
    );
    match r {
        Err(Error::Unconverged { best }) => assert!(best.endpoint_gap > 0.04),
        other => panic!("expected no horizontal path, got {other:?}"),
    }
}
