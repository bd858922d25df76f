//! Hölder norm estimates on a few functions with known norms.
use hoelder_sr::norm::{hoelder_norm_estimate, DomainBox, GridSpec};

fn main() -> hoelder_sr::Result<()> {
    let theta = 0.5;
    let grid = GridSpec::new(10_001, 10_000, 1)?;

    let unit = DomainBox::cube(1, 0.0, 1.0);
    let sym = DomainBox::cube(1, -1.0, 1.0);
    let cases: [(&str, &DomainBox, fn(&[f64]) -> f64, f64); 3] = [
        ("|x|^0.5 on [0,1]", &unit, |x| x[0].abs().sqrt(), 2.0),
        ("|x|^0.5 on [-1,1]", &sym, |x| x[0].abs().sqrt(), 2.0),
        ("x on [0,1]", &unit, |x| x[0], 2.0),
    ];
    for (name, domain, f, exact) in cases {
        let est = hoelder_norm_estimate(f, theta, domain, &grid)?;
        println!(
            "{name:<20} sup {:.4}  seminorm {:.4}  total {:.4}  (exact {exact:.4})",
            est.sup_norm,
            est.seminorm,
            est.value()
        );
    }
    Ok(())
}
