//! Vertical scaling of the distance and the pointwise lower bound
//! `d_H >= C d_R^(1/(1+theta))` for a Hölder perturbation of the Heisenberg
//! form. Takes about a minute in release mode.
use std::fs::File;

use hoelder_sr::bounds::{default_bundle_for, estimate_eta, scaling_experiment};
use hoelder_sr::disks::{estimate_k, DiskFamily, FillConfig, DEFAULT_SIGMA};
use hoelder_sr::distance::OptimizerConfig;
use hoelder_sr::forms::{build_model, ModelKind, DEFAULT_PERTURBATION};
use hoelder_sr::paths::Polyline;
use hoelder_sr::Vec3;

fn main() -> hoelder_sr::Result<()> {
    let cfg = OptimizerConfig::default();
    let axis = Polyline::segment(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.2))?;

    let (heis, _) = build_model(ModelKind::Heisenberg, 0.5, 0.0, 0)?;
    let smooth = scaling_experiment(&heis, &axis, &[0.1, 0.05, 0.02, 0.01], &cfg, None)?;
    println!(
        "heisenberg slope {:.4}, r2 {:.5}",
        smooth.fitted_slope.unwrap(),
        smooth.r2.unwrap()
    );

    let (alpha, _) = build_model(ModelKind::Perturbed, 0.5, DEFAULT_PERTURBATION, 7)?;
    let k = estimate_k(
        &alpha.normalized(),
        0.5,
        &DiskFamily::admissible(DEFAULT_SIGMA),
        1000,
        0,
        &FillConfig::default(),
        DEFAULT_SIGMA,
    )?;
    let eta = estimate_eta(&alpha, Vec3::zeros(), 0.5, &cfg, 16)?;
    let bundle = default_bundle_for(&alpha, &axis, k.k_hat, eta.eta)?;
    print!("{}", bundle.to_record().to_text());

    let eps: Vec<f64> = (0..20)
        .map(|i| bundle.rho * 0.95 * 0.8f64.powi(i))
        .collect();
    let r = scaling_experiment(&alpha, &axis, &eps, &cfg, Some(&bundle))?;
    for row in &r.rows {
        println!(
            "eps {:.3e}  d_hat {:.5}  bound {:.5}",
            row.epsilon,
            row.d_hat,
            row.lower_bound.unwrap()
        );
    }
    println!(
        "violations {}, slope {:.4}",
        r.violations,
        r.fitted_slope.unwrap()
    );
    r.write_csv(File::create("scaling.csv")?)?;
    Ok(())
}
