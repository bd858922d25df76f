//! Upper estimates of the horizontal distance in the Heisenberg model,
//! against the isoperimetric value `2 sqrt(pi z)` for vertical pairs.
//!
//! The shortest path is written to `heisenberg_path.csv`.
use std::fs::File;

use hoelder_sr::distance::{estimate_upper, heisenberg_vertical_exact, OptimizerConfig};
use hoelder_sr::forms::{build_model, ModelKind};
use hoelder_sr::Vec3;

fn main() -> hoelder_sr::Result<()> {
    let (alpha, model) = build_model(ModelKind::Heisenberg, 0.5, 0.0, 0)?;
    println!("{}", model.description);
    let cfg = OptimizerConfig::default();

    let mut last = None;
    for z in [0.1, 0.05, 0.02, 0.01] {
        let est = estimate_upper(&alpha, Vec3::zeros(), Vec3::new(0.0, 0.0, z), &cfg)?;
        let exact = heisenberg_vertical_exact(z);
        println!(
            "z = {z:<5} d_hat = {:.5}  exact = {exact:.5}  ratio {:.4}  defect {:.1e}  gap {:.1e}",
            est.value,
            est.value / exact,
            est.defect,
            est.endpoint_gap
        );
        last.get_or_insert(est);
    }

    // horizontal pairs cost about their Euclidean distance
    let flat = estimate_upper(&alpha, Vec3::zeros(), Vec3::new(0.3, 0.1, 0.0), &cfg)?;
    println!(
        "horizontal pair: d_hat / d_R = {:.4}",
        flat.value / 0.1f64.hypot(0.3)
    );

    last.unwrap()
        .path
        .write_csv(File::create("heisenberg_path.csv")?)?;
    Ok(())
}
