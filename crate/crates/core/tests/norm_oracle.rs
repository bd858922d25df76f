use hoelder_sr::fields::synth_weierstrass;
use hoelder_sr::norm::{hoelder_norm_estimate, DomainBox, GridSpec};
use hoelder_sr::Vec3;

/// Exhaustive pair maximization on `n` evenly spaced points.
fn brute_force(f: impl Fn(f64) -> f64, theta: f64, lo: f64, hi: f64, n: usize) -> f64 {
    let xs: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let sup = vs.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut semi: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            semi = semi.max((vs[i] - vs[j]).abs() / (xs[j] - xs[i]).powf(theta));
        }
    }
    sup + semi
}

#[test]
fn power_function_matches_brute_force() {
    let f = |x: f64| x.abs().sqrt();
    let oracle = brute_force(f, 0.5, -1.0, 1.0, 4001);
    assert!((oracle - 2.0).abs() < 1e-9);
    let est = hoelder_norm_estimate(
        |x| f(x[0]),
        0.5,
        &DomainBox::cube(1, -1.0, 1.0),
        &GridSpec::new(10_001, 10_000, 0).unwrap(),
    )
    .unwrap();
    assert!(
        (est.value() - oracle).abs() / oracle <= 0.02,
        "{} vs {oracle}",
        est.value()
    );
}

#[test]
fn identity_on_unit_interval() {
    let oracle = brute_force(|x| x, 0.5, 0.0, 1.0, 2001);
    let est = hoelder_norm_estimate(
        |x| x[0],
        0.5,
        &DomainBox::cube(1, 0.0, 1.0),
        &GridSpec::new(1025, 1000, 0).unwrap(),
    )
    .unwrap();
    assert!((oracle - 2.0).abs() < 1e-9);
    assert!((est.value() - 2.0).abs() <= 0.04);
}

#[test]
fn estimate_never_beats_the_oracle_on_a_rough_field() {
    let w = synth_weierstrass(0.4, 2.0, 10, 1.0, 11).unwrap();
    let dir = Vec3::new(1.0, 0.5, 0.25);
    let f = |t: f64| w.eval(&(dir * t));
    let oracle = brute_force(f, 0.4, 0.0, 1.0, 2049);
    // the estimator samples a subset of the same grid's pairs
    let est = hoelder_norm_estimate(
        |x| f(x[0]),
        0.4,
        &DomainBox::cube(1, 0.0, 1.0),
        &GridSpec::new(2049, 4000, 5).unwrap(),
    )
    .unwrap();
    assert!(est.value() <= oracle + 1e-12, "{} > {oracle}", est.value());
    assert!(est.value() >= 0.8 * oracle, "{} << {oracle}", est.value());
}

#[test]
fn nested_grids_are_monotone_and_below_the_certified_bound() {
    let w = synth_weierstrass(0.3, 2.0, 12, 1.0, 3).unwrap();
    let cube = DomainBox::cube(3, 0.0, 1.0);
    let mut prev = 0.0;
    for r in [17, 33, 65, 129] {
        let est = hoelder_norm_estimate(
            |x| w.eval(&Vec3::new(x[0], x[1], x[2])),
            0.3,
            &cube,
            &GridSpec::new(r, 5000, 2).unwrap(),
        )
        .unwrap();
        assert!(est.value() >= prev);
        assert!(est.value() <= w.analytic_norm_bound);
        prev = est.value();
    }
    let plane = DomainBox::cube(2, 0.0, 1.0);
    let mut prev = 0.0;
    for r in [65, 129, 257, 513] {
        let est = hoelder_norm_estimate(
            |x| w.eval(&Vec3::new(x[0], x[1], 0.37)),
            0.3,
            &plane,
            &GridSpec::new(r, 5000, 2).unwrap(),
        )
        .unwrap();
        assert!(est.value() >= prev);
        assert!(est.value() <= w.analytic_norm_bound);
        prev = est.value();
    }
}

#[test]
fn scaling_is_exact() {
    let w = synth_weierstrass(0.5, 3.0, 6, 1.0, 2).unwrap();
    let d = DomainBox::cube(2, 0.0, 1.0);
    let g = GridSpec::new(33, 2000, 9).unwrap();
    let base = hoelder_norm_estimate(|x| w.eval(&Vec3::new(x[0], x[1], 0.0)), 0.5, &d, &g).unwrap();
    let scaled =
        hoelder_norm_estimate(|x| 4.0 * w.eval(&Vec3::new(x[0], x[1], 0.0)), 0.5, &d, &g).unwrap();
    assert_eq!(scaled.value(), 4.0 * base.value());
}

#[test]
fn fields_are_periodic() {
    let w = synth_weierstrass(0.3, 2.0, 12, 1.0, 3).unwrap();
    for i in 0..100 {
        let x = Vec3::new(
            (i as f64 * 0.731).sin(),
            (i as f64 * 1.37).cos(),
            i as f64 * 0.011,
        );
        for e in [Vec3::x(), Vec3::y(), Vec3::z()] {
            assert!((w.eval(&x) - w.eval(&(x + e))).abs() < 1e-9);
        }
    }
}
