use std::f64::consts::PI;

use hoelder_sr::disks::{
    boundary_integral, circle, estimate_k, fill_disk, lifted_circle_loop, loop_corpus,
    stokes_ratio, DiskFamily, FillConfig, DEFAULT_SIGMA,
};
use hoelder_sr::forms::{build_model, ModelKind};
use hoelder_sr::Vec3;

fn unbounded() -> FillConfig {
    FillConfig {
        delta_m: f64::INFINITY,
        ..FillConfig::default()
    }
}

#[test]
fn heisenberg_circle_integral() {
    let (h, _) = build_model(ModelKind::Heisenberg, 0.5, 0.0, 0).unwrap();
    let v = boundary_integral(&h, &circle(Vec3::zeros(), 1.0, 256)).unwrap();
    // the inscribed 256-gon has area (n/2) sin(2 pi/n)
    let polygon = 128.0 * (2.0 * PI / 256.0).sin();
    assert!((v + polygon).abs() < 1e-12);
    assert!((v + PI).abs() / PI < 1e-3);
    let reversed = boundary_integral(&h, &circle(Vec3::zeros(), 1.0, 256).reversed()).unwrap();
    assert!((v + reversed).abs() < 1e-12);
}

#[test]
fn lifted_circle_is_horizontal_except_for_the_descent() {
    let (h, _) = build_model(ModelKind::Heisenberg, 0.5, 0.0, 0).unwrap();
    let r = 0.05;
    let g = lifted_circle_loop(r, 512);
    // alpha vanishes on the lift, the descent contributes -pi r^2
    let v = boundary_integral(&h, &g).unwrap();
    assert!((v + PI * r * r).abs() < 1e-3 * PI * r * r, "{v}");
}

#[test]
fn flat_disk_area_and_ratio() {
    let (h, _) = build_model(ModelKind::Heisenberg, 0.5, 0.0, 0).unwrap();
    let (disk, report) = fill_disk(&circle(Vec3::zeros(), 1.0, 1024), &unbounded()).unwrap();
    assert!((report.area - PI).abs() / PI < 1e-3);
    let ratio = stokes_ratio(&h, &disk, 0.5, f64::INFINITY).unwrap();
    assert!((ratio - 0.5f64.sqrt()).abs() < 1e-4);
}

#[test]
fn corpus_fills_within_bounds_and_keeps_its_boundary() {
    let cfg = FillConfig::default();
    for (name, g) in loop_corpus(cfg.delta_m, 3) {
        let (disk, r) = fill_disk(&g, &cfg).unwrap();
        assert!(r.area_ok() && r.distance_ok(), "{name}: {r:?}");
        assert!(r.area <= r.cone_area);
        assert_eq!(disk.euler_characteristic(), 1, "{name}");
        assert!(disk.has_single_boundary_cycle(), "{name}");
        let b: Vec<Vec3> = disk.boundary.iter().map(|&i| disk.vertices[i]).collect();
        assert_eq!(b, g.vertices(), "{name}: boundary moved");
    }
}

#[test]
fn off_output_reads_back() {
    let (disk, _) = fill_disk(
        &circle(Vec3::new(0.1, 0.0, 0.2), 0.05, 12),
        &FillConfig::default(),
    )
    .unwrap();
    let mut buf = Vec::new();
    disk.write_off(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("OFF"));
    let counts: Vec<usize> = lines
        .next()
        .unwrap()
        .split_whitespace()
        .map(|s| s.parse().unwrap())
        .collect();
    let verts: Vec<Vec3> = (0..counts[0])
        .map(|_| {
            let c: Vec<f64> = lines
                .next()
                .unwrap()
                .split_whitespace()
                .map(|s| s.parse().unwrap())
                .collect();
            Vec3::new(c[0], c[1], c[2])
        })
        .collect();
    assert_eq!(verts, disk.vertices);
    let tris: Vec<[usize; 3]> = (0..counts[1])
        .map(|_| {
            let c: Vec<usize> = lines
                .next()
                .unwrap()
                .split_whitespace()
                .map(|s| s.parse().unwrap())
                .collect();
            assert_eq!(c[0], 3);
            [c[1], c[2], c[3]]
        })
        .collect();
    assert_eq!(tris, disk.triangles);
}

#[test]
fn smooth_form_obeys_the_area_bound() {
    let (h, _) = build_model(ModelKind::Heisenberg, 0.5, 0.0, 0).unwrap();
    let k = estimate_k(
        &h,
        0.5,
        &DiskFamily::admissible(DEFAULT_SIGMA),
        200,
        4,
        &FillConfig::default(),
        DEFAULT_SIGMA,
    )
    .unwrap();
    assert!(
        k.max_smooth_ratio() <= 1.0 + 1e-9,
        "{}",
        k.max_smooth_ratio()
    );
}

#[test]
fn k_estimate_grows_with_more_trials() {
    let (p, _) = build_model(ModelKind::Perturbed, 0.5, 0.05, 7).unwrap();
    let a = p.normalized();
    let fam = DiskFamily::admissible(DEFAULT_SIGMA);
    let fill = FillConfig::default();
    let small = estimate_k(&a, 0.5, &fam, 20, 1, &fill, DEFAULT_SIGMA).unwrap();
    let large = estimate_k(&a, 0.5, &fam, 80, 1, &fill, DEFAULT_SIGMA).unwrap();
    assert!(large.k_hat >= small.k_hat);
    assert_eq!(small.samples[..].len(), 20);
    for (s, l) in small.samples.iter().zip(&large.samples) {
        assert_eq!(s.normalized_ratio.to_bits(), l.normalized_ratio.to_bits());
    }
}
