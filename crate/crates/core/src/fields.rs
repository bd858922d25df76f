//! Lacunary cosine series with a prescribed Hölder exponent.
//!
//! A field is `amplitude * sum_k lambda^(-theta k) cos(lambda^k (2pi/L) <d_k, x> + phi_k)`
//! with integer lattice directions `d_k`, so for integer `lambda` the field is
//! exactly `L`-periodic along every axis.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_theta, Error, Result};
use crate::kv::Record;
use crate::Vec3;

/// Integer lattice directions used for the harmonics.
pub const LATTICE_DIRECTIONS: [[i32; 3]; 9] = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 1, 0],
    [1, -1, 0],
    [1, 0, 1],
    [1, 0, -1],
    [0, 1, 1],
    [0, 1, -1],
];

#[derive(Debug, Clone, PartialEq)]
pub struct HoelderField {
    pub theta: f64,
    pub lambda: f64,
    pub depth: usize,
    pub phases: Vec<f64>,
    pub directions: Vec<[i32; 3]>,
    pub amplitude: f64,
    pub period: f64,
    pub seed: u64,
    /// Certified upper bound on `sup|W| + [W]_theta`.
    pub analytic_norm_bound: f64,
    terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq)]
struct Term {
    weight: f64,
    wave: Vec3,
    phase: f64,
}

/// Inputs of [`synth_weierstrass`]; also the serialized form of a field.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FieldRecipe {
    pub theta: f64,
    pub lambda: f64,
    pub depth: usize,
    pub amplitude: f64,
    pub seed: u64,
    pub period: f64,
}

impl Default for FieldRecipe {
    fn default() -> Self {
        Self {
            theta: 0.5,
            lambda: 2.0,
            depth: 12,
            amplitude: 1.0,
            seed: 0,
            period: 1.0,
        }
    }
}

impl FieldRecipe {
    pub fn to_record(&self) -> Record {
        let mut r = Record::new();
        r.set("theta", self.theta)
            .set("lambda", self.lambda)
            .set("depth", self.depth)
            .set("seed", self.seed)
            .set("amplitude", self.amplitude)
            .set("period", self.period);
        r
    }

    pub fn from_record(r: &Record) -> Result<Self> {
        let unknown = r.unknown_keys(&["theta", "lambda", "depth", "seed", "amplitude", "period"]);
        if !unknown.is_empty() {
            return Err(Error::UnknownKeys(unknown));
        }
        Ok(Self {
            theta: r.require("theta")?,
            lambda: r.require("lambda")?,
            depth: r.require("depth")?,
            seed: r.require("seed")?,
            amplitude: r.require("amplitude")?,
            period: r.get("period")?.unwrap_or(1.0),
        })
    }

    pub fn build(&self) -> Result<HoelderField> {
        HoelderField::with_period(
            self.theta,
            self.lambda,
            self.depth,
            self.amplitude,
            self.seed,
            self.period,
        )
    }
}

/// Synthesize a Weierstrass-type field on the unit-period chart.
pub fn synth_weierstrass(
    theta: f64,
    lambda: f64,
    depth: usize,
    amplitude: f64,
    seed: u64,
) -> Result<HoelderField> {
    HoelderField::with_period(theta, lambda, depth, amplitude, seed, 1.0)
}

impl HoelderField {
    pub fn with_period(
        theta: f64,
        lambda: f64,
        depth: usize,
        amplitude: f64,
        seed: u64,
        period: f64,
    ) -> Result<Self> {
        check_theta(theta)?;
        if !(lambda >= 2.0) || !lambda.is_finite() {
            return Err(Error::OutOfRange {
                name: "lambda",
                range: "[2, inf)",
                value: lambda,
            });
        }
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::OutOfRange {
                name: "amplitude",
                range: "[0, inf)",
                value: amplitude,
            });
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::OutOfRange {
                name: "period",
                range: "(0, inf)",
                value: period,
            });
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut phases = Vec::with_capacity(depth + 1);
        let mut directions = Vec::with_capacity(depth + 1);
        for _ in 0..=depth {
            phases.push(rng.gen_range(0.0..TAU));
            directions.push(LATTICE_DIRECTIONS[rng.gen_range(0..LATTICE_DIRECTIONS.len())]);
        }

        let terms: Vec<Term> = (0..=depth)
            .map(|k| {
                let freq = lambda.powi(k as i32) * TAU / period;
                let d = directions[k];
                Term {
                    weight: amplitude * lambda.powf(-theta * k as f64),
                    wave: Vec3::new(d[0] as f64, d[1] as f64, d[2] as f64) * freq,
                    phase: phases[k],
                }
            })
            .collect();

        let analytic_norm_bound = sup_bound(&terms) + seminorm_bound(&terms, theta);
        Ok(Self {
            theta,
            lambda,
            depth,
            phases,
            directions,
            amplitude,
            period,
            seed,
            analytic_norm_bound,
            terms,
        })
    }

    pub fn zero(theta: f64) -> Result<Self> {
        Self::with_period(theta, 2.0, 0, 0.0, 0, 1.0)
    }

    pub fn recipe(&self) -> FieldRecipe {
        FieldRecipe {
            theta: self.theta,
            lambda: self.lambda,
            depth: self.depth,
            amplitude: self.amplitude,
            seed: self.seed,
            period: self.period,
        }
    }

    #[inline]
    pub fn eval(&self, x: &Vec3) -> f64 {
        self.terms
            .iter()
            .map(|t| t.weight * (t.wave.dot(x) + t.phase).cos())
            .sum()
    }

    /// `amplitude * sum_k lambda^(-theta k)`.
    pub fn sup_bound(&self) -> f64 {
        sup_bound(&self.terms)
    }

    pub fn seminorm_bound(&self) -> f64 {
        seminorm_bound(&self.terms, self.theta)
    }
}

/// Free-function form of [`HoelderField::eval`].
pub fn eval_field(field: &HoelderField, x: &Vec3) -> f64 {
    field.eval(x)
}

fn sup_bound(terms: &[Term]) -> f64 {
    terms.iter().map(|t| t.weight).sum()
}

// Each term moves by at most min(2, |wave| r) over a displacement of length r,
// so [W]_theta <= sup_r g(r) with g(r) = sum_k w_k min(2, f_k r) / r^theta.
// On every interval between the breakpoints 2/f_k, g = a r^(1-theta) + b r^(-theta),
// which has no interior maximum; the sup is attained at a breakpoint.
fn seminorm_bound(terms: &[Term], theta: f64) -> f64 {
    let g = |r: f64| -> f64 {
        terms
            .iter()
            .map(|t| t.weight * (t.wave.norm() * r).min(2.0))
            .sum::<f64>()
            / r.powf(theta)
    };
    terms
        .iter()
        .filter(|t| t.weight > 0.0)
        .map(|t| g(2.0 / t.wave.norm()))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(synth_weierstrass(0.0, 4.0, 3, 1.0, 1).is_err());
        assert!(synth_weierstrass(1.0, 4.0, 3, 1.0, 1).is_err());
        assert!(synth_weierstrass(0.5, 1.5, 3, 1.0, 1).is_err());
        assert!(synth_weierstrass(0.5, 4.0, 3, -1.0, 1).is_err());
    }

    #[test]
    fn zero_field() {
        let f = synth_weierstrass(0.5, 4.0, 0, 0.0, 7).unwrap();
        assert_eq!(f.analytic_norm_bound, 0.0);
        for x in [Vec3::zeros(), Vec3::new(0.3, -1.2, 5.0)] {
            assert_eq!(f.eval(&x), 0.0);
        }
    }

    #[test]
    fn geometric_sup_bound() {
        let f = synth_weierstrass(0.5, 4.0, 8, 1.0, 1).unwrap();
        let expected: f64 = (0..=8).map(|k| 0.5f64.powi(k)).sum();
        assert!((f.sup_bound() - expected).abs() < 1e-15);
        assert!(f.sup_bound() < 2.0);
    }

    #[test]
    fn single_cosine_at_origin() {
        let mut f = synth_weierstrass(0.5, 2.0, 0, 1.0, 0).unwrap();
        // force cos(2 pi x / L) exactly
        f.terms[0].phase = 0.0;
        f.terms[0].wave = Vec3::new(TAU, 0.0, 0.0);
        assert_eq!(f.eval(&Vec3::zeros()), 1.0);
    }

    #[test]
    fn single_term_seminorm_bound_is_closed_form() {
        let f = synth_weierstrass(0.5, 2.0, 0, 1.0, 3).unwrap();
        let w = f.terms[0].wave.norm();
        // 2 (w/2)^theta
        assert!((f.seminorm_bound() - 2.0 * (w / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn recipe_rebuilds_identical_field() {
        let f = synth_weierstrass(0.3, 2.0, 12, 1.0, 3).unwrap();
        let text = f.recipe().to_record().to_text();
        let g = FieldRecipe::from_record(&Record::parse(&text).unwrap())
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(f, g);
    }
}
