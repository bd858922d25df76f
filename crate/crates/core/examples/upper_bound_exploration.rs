//! Data for the open question of an upper bound: how `d_hat` compares with
//! `d_R^(1/(1+theta))` and with `sqrt(d_R)` for perturbations of growing
//! size. Nothing is asserted.
use hoelder_sr::bounds::scaling_experiment;
use hoelder_sr::distance::OptimizerConfig;
use hoelder_sr::forms::{build_model, ModelKind};
use hoelder_sr::paths::Polyline;
use hoelder_sr::Vec3;

fn main() -> hoelder_sr::Result<()> {
    let cfg = OptimizerConfig::default();
    let axis = Polyline::segment(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.1))?;
    let eps = [0.05, 0.02, 0.01, 0.005, 0.002];
    for amplitude in [0.0, 0.05, 0.2] {
        let (alpha, _) = build_model(ModelKind::Perturbed, 0.5, amplitude, 7)?;
        let r = scaling_experiment(&alpha, &axis, &eps, &cfg, None)?;
        println!("amplitude {amplitude}: slope {:?}", r.fitted_slope);
        for row in &r.rows {
            println!(
                "  eps {:<6} d_hat {:.4}  d_hat/eps^(2/3) {:.3}  d_hat/sqrt(eps) {:.3}",
                row.epsilon, row.d_hat, row.hoelder_ratio, row.sqrt_ratio
            );
        }
    }
    Ok(())
}
