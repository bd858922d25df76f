//! How far up can a horizontal path of length `eps` climb?
//!
//! In the Heisenberg model the answer is of order `eps^2`; for the
//! foliation `dz` it is zero, no matter how the path wiggles.
use std::f64::consts::PI;

use hoelder_sr::distance::reachability_probe;
use hoelder_sr::forms::{build_model, ModelKind, DEFAULT_PERTURBATION};
use hoelder_sr::Vec3;

fn main() -> hoelder_sr::Result<()> {
    for kind in [
        ModelKind::Heisenberg,
        ModelKind::Perturbed,
        ModelKind::Foliation,
    ] {
        let (alpha, _) = build_model(kind, 0.5, DEFAULT_PERTURBATION, 7)?;
        println!("{kind}");
        for eps in [0.2, 0.1, 0.05] {
            let r = reachability_probe(&alpha, Vec3::zeros(), eps, 512, 0)?;
            let dido = eps * eps / (4.0 * PI);
            println!(
                "  eps {eps:<5} max |dz| {:.3e}  = {:.3} x eps^2/(4 pi)",
                r.max_dz,
                r.max_dz / dido
            );
        }
    }
    Ok(())
}
