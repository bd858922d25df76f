use hoelder_sr::bounds::{curly_brace_check, BundleInputs, ConstantsBundle};
use hoelder_sr::disks::{fill_disk, random_loop, FillConfig};
use hoelder_sr::forms::frame_from_normal;
use hoelder_sr::kv::Record;
use hoelder_sr::norm::{hoelder_norm_estimate, DomainBox, GridSpec};
use hoelder_sr::paths::Polyline;
use hoelder_sr::Vec3;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn inputs() -> impl Strategy<Value = BundleInputs> {
    (
        0.05f64..0.99,
        0.01f64..1.0,
        0.01f64..10.0,
        0.01f64..1.0,
        1.0f64..10.0,
        0.01f64..1.0,
    )
        .prop_map(|(theta, c_m, k, sin_phi0, alpha_norm, eta)| BundleInputs {
            theta,
            c_m,
            k,
            sin_phi0,
            alpha_norm,
            eta,
            ..BundleInputs::unit(theta)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kv_floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let mut r = Record::new();
        r.set("x", x);
        let back = Record::parse(&r.to_text()).unwrap();
        prop_assert_eq!(back.require::<f64>("x").unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn length_is_invariant(pts in prop::collection::vec(vec3(1.0), 2..20), d in vec3(5.0)) {
        let p = Polyline::new(pts, false).unwrap();
        let l = p.length();
        prop_assert!((p.translated(d).length() - l).abs() <= 1e-12 * (1.0 + l));
        prop_assert!((p.reversed().length() - l).abs() <= 1e-12 * (1.0 + l));
        prop_assert!(p.diameter() <= l + 1e-12);
    }

    #[test]
    fn frames_are_orthonormal(n in vec3(1.0).prop_filter("nonzero", |v| v.norm() > 1e-3)) {
        let u = n.normalize();
        let (e1, e2) = frame_from_normal(&u);
        prop_assert!((e1.norm() - 1.0).abs() < 1e-12);
        prop_assert!((e2.norm() - 1.0).abs() < 1e-12);
        prop_assert!(e1.dot(&e2).abs() < 1e-12);
        prop_assert!(e1.dot(&u).abs() < 1e-12);
        prop_assert!(e2.dot(&u).abs() < 1e-12);
    }

    #[test]
    fn constant_decreases_in_k(i in inputs(), f in 1.01f64..4.0) {
        let a = ConstantsBundle::assemble(i).unwrap();
        let b = ConstantsBundle::assemble(BundleInputs { k: i.k * f, ..i }).unwrap();
        prop_assert!(b.c < a.c);
        prop_assert!(b.rho <= a.rho);
    }

    #[test]
    fn curly_brace_is_at_least_half(i in inputs(), t in 0.0f64..1.0) {
        let b = ConstantsBundle::assemble(i).unwrap();
        let v = curly_brace_check(&b, t * b.rho).unwrap();
        prop_assert!(v >= 0.5 - 1e-12, "{}", v);
    }

    #[test]
    fn filled_disks_are_disks(seed in any::<u64>(), perimeter in 0.05f64..0.45, wobble in 0.0f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_loop(&mut rng, Vec3::zeros(), perimeter, wobble, 24);
        let (disk, report) = fill_disk(&g, &FillConfig::default()).unwrap();
        prop_assert_eq!(disk.euler_characteristic(), 1);
        prop_assert!(disk.has_single_boundary_cycle());
        prop_assert!(report.area_ok() && report.distance_ok());
        let b: Vec<Vec3> = disk.boundary.iter().map(|&i| disk.vertices[i]).collect();
        prop_assert_eq!(&b[..], g.vertices());
    }

    #[test]
    fn norm_is_homogeneous(s in 0.1f64..10.0, w in 1.0f64..20.0) {
        let f = move |x: &[f64]| (w * x[0]).sin();
        let d = DomainBox::cube(1, 0.0, 1.0);
        let g = GridSpec::new(65, 200, 1).unwrap();
        let a = hoelder_norm_estimate(f, 0.5, &d, &g).unwrap().value();
        let b = hoelder_norm_estimate(move |x: &[f64]| s * f(x), 0.5, &d, &g).unwrap().value();
        prop_assert!((b - s * a).abs() <= 1e-12 * b.max(1.0));
    }
}
