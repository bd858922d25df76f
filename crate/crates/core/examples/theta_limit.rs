//! The constant `C(theta)` stays bounded as `theta -> 1` and tends to its
//! value at `theta = 1`; `rho` and the curly-brace factor alongside.
use std::f64::consts::PI;

use hoelder_sr::bounds::{c1_limit_check, curly_brace_check, BundleInputs, ConstantsBundle};

fn main() -> hoelder_sr::Result<()> {
    let base = ConstantsBundle::assemble(BundleInputs {
        c_m: 1.0 / (4.0 * PI),
        ..BundleInputs::unit(0.5)
    })?;
    let thetas: Vec<f64> = [0.9, 0.95, 0.98, 0.99, 0.995, 0.999].to_vec();
    let t = c1_limit_check(&base, &thetas)?;
    for (th, c) in t.thetas.iter().zip(&t.values) {
        println!("theta {th:<6} C = {c:.6}");
    }
    println!(
        "theta 1      C = {:.6}  (sqrt pi = {:.6})",
        t.limit,
        PI.sqrt()
    );

    let unit = ConstantsBundle::assemble(BundleInputs::unit(0.5))?;
    println!("\nunit constants, theta 0.5: rho = {}", unit.rho);
    for l in [0.0, 0.01, 0.06, 0.12, 0.1249] {
        println!(
            "  l = {l:<7} 1 - (Q l^theta)^(1/(1+theta)) = {:.5}",
            curly_brace_check(&unit, l)?
        );
    }
    Ok(())
}
