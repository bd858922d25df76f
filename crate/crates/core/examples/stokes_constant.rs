//! Empirical constant in `|int_{dD} a| <= K ||a|| |dD|^(1-theta) |D|^theta`.
//!
//! Writes the per-disk ratios to `stokes_ratios.csv`.
use std::fs::File;

use hoelder_sr::disks::{
    circle, estimate_k, fill_disk, stokes_ratio, DiskFamily, FillConfig, DEFAULT_SIGMA,
};
use hoelder_sr::forms::{build_model, ModelKind, DEFAULT_PERTURBATION};
use hoelder_sr::Vec3;

fn main() -> hoelder_sr::Result<()> {
    let (heis, _) = build_model(ModelKind::Heisenberg, 0.5, 0.0, 0)?;
    let unbounded = FillConfig {
        delta_m: f64::INFINITY,
        ..FillConfig::default()
    };
    let (disk, _) = fill_disk(&circle(Vec3::zeros(), 1.0, 512), &unbounded)?;
    println!(
        "flat unit disk, heisenberg: ratio {:.5} (1/sqrt 2 = {:.5})",
        stokes_ratio(&heis, &disk, 0.5, f64::INFINITY)?,
        0.5f64.sqrt()
    );

    let flat = DiskFamily::FlatCircles {
        r_min: 0.05,
        r_max: 0.4,
        segments: 128,
        center_half_width: 0.0,
    };
    let k = estimate_k(&heis, 0.5, &flat, 200, 0, &unbounded, f64::INFINITY)?;
    println!(
        "flat circles r in [0.05, 0.4]: K_hat {:.4}",
        k.k_hat * k.norm_upper
    );

    let (pert, _) = build_model(ModelKind::Perturbed, 0.5, DEFAULT_PERTURBATION, 7)?;
    let family = DiskFamily::admissible(DEFAULT_SIGMA);
    for trials in [10, 100, 1000] {
        let k = estimate_k(
            &pert.normalized(),
            0.5,
            &family,
            trials,
            0,
            &FillConfig::default(),
            DEFAULT_SIGMA,
        )?;
        println!(
            "perturbed, {trials:>4} admissible disks: K_hat {:.5}",
            k.k_hat
        );
        if trials == 1000 {
            k.write_csv(File::create("stokes_ratios.csv")?)?;
        }
    }
    Ok(())
}
