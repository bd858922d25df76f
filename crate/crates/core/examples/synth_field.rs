//! Synthesize a Weierstrass-type field, evaluate it, and compare its grid
//! norm estimate with the certified bound.
//!
//! ```text
//! cargo run --example synth_field
//! ```
use hoelder_sr::fields::{synth_weierstrass, FieldRecipe};
use hoelder_sr::kv::Record;
use hoelder_sr::norm::{hoelder_norm_estimate, DomainBox, GridSpec};
use hoelder_sr::Vec3;

fn main() -> hoelder_sr::Result<()> {
    let field = synth_weierstrass(0.3, 2.0, 12, 1.0, 3)?;
    println!(
        "{} terms, sup bound {:.4}, seminorm bound {:.4}",
        field.depth + 1,
        field.sup_bound(),
        field.seminorm_bound()
    );

    for x in [
        Vec3::zeros(),
        Vec3::new(0.25, 0.5, 0.125),
        Vec3::new(1.25, 0.5, 0.125),
    ] {
        println!(
            "W({:.3}, {:.3}, {:.3}) = {:+.6}",
            x.x,
            x.y,
            x.z,
            field.eval(&x)
        );
    }

    let cube = DomainBox::cube(3, 0.0, 1.0);
    for r in [9, 17, 33] {
        let est = hoelder_norm_estimate(
            |p| field.eval(&Vec3::new(p[0], p[1], p[2])),
            0.3,
            &cube,
            &GridSpec::new(r, 20_000, 0)?,
        )?;
        println!(
            "resolution {r:>3}: estimate {:.4} <= {:.4}",
            est.value(),
            field.analytic_norm_bound
        );
    }

    // a field is fully described by its recipe
    let text = field.recipe().to_record().to_text();
    let again = FieldRecipe::from_record(&Record::parse(&text)?)?.build()?;
    assert_eq!(
        again.eval(&Vec3::new(0.1, 0.2, 0.3)),
        field.eval(&Vec3::new(0.1, 0.2, 0.3))
    );
    print!("{text}");
    Ok(())
}
