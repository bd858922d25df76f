//! Sampled estimate of `||f||_{C^theta} = ||f||_inf + sup |f(x)-f(y)| / |x-y|^theta`.
//!
//! The result is a lower bound of the true norm: it only sees finitely many
//! points. Pairs come from two sources:
//!
//! - every grid node paired with the node `2^j` steps further along each axis
//!   (plus the full-extent offset), which makes the estimate nondecreasing
//!   under nested refinement (`r - 1` doubling);
//! - `pair_budget` random pairs in the continuous box, short-range biased by
//!   stratifying the pair distance over dyadic levels. The stream depends only
//!   on `seed`, so raising the budget only adds pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_theta, Error, Result};

const DYADIC_LEVELS: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub resolution: usize,
    pub pair_budget: usize,
    pub seed: u64,
}

impl GridSpec {
    pub fn new(resolution: usize, pair_budget: usize, seed: u64) -> Result<Self> {
        let g = Self {
            resolution,
            pair_budget,
            seed,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::Invalid("grid resolution must be at least 2".into()));
        }
        if self.pair_budget < 1 {
            return Err(Error::Invalid("pair budget must be at least 1".into()));
        }
        Ok(())
    }
}

/// Axis-aligned box in any dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Invalid(
                "box corners must have equal, nonzero dimension".into(),
            ));
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self {
            lo: vec![lo; dim],
            hi: vec![hi; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn check(&self) -> Result<()> {
        for axis in 0..self.dim() {
            if !(self.hi[axis] - self.lo[axis] > 0.0) {
                return Err(Error::DegenerateDomain { axis });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NormEstimate {
    pub sup_norm: f64,
    pub seminorm: f64,
}

impl NormEstimate {
    pub fn value(&self) -> f64 {
        self.sup_norm + self.seminorm
    }
}

pub fn hoelder_norm_estimate<F>(
    f: F,
    theta: f64,
    domain: &DomainBox,
    grid: &GridSpec,
) -> Result<NormEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_theta(theta)?;
    grid.validate()?;
    domain.check()?;

    let dim = domain.dim();
    let r = grid.resolution;
    let total = r
        .checked_pow(dim as u32)
        .ok_or_else(|| Error::Invalid("grid too large".into()))?;
    let steps: Vec<f64> = (0..dim)
        .map(|a| (domain.hi[a] - domain.lo[a]) / (r - 1) as f64)
        .collect();
    let strides: Vec<usize> = (0..dim).map(|a| r.pow(a as u32)).collect();

    let node = |flat: usize, buf: &mut Vec<f64>| {
        buf.clear();
        let mut rem = flat;
        for a in 0..dim {
            let i = rem % r;
            rem /= r;
            buf.push(if i == r - 1 {
                domain.hi[a]
            } else {
                domain.lo[a] + i as f64 * steps[a]
            });
        }
    };

    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(dim),
            |buf, flat| {
                node(flat, buf);
                f(buf)
            },
        )
        .collect();

    let mut sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut offsets: Vec<usize> = (0..).map(|j| 1usize << j).take_while(|&s| s < r).collect();
    if offsets.last() != Some(&(r - 1)) {
        offsets.push(r - 1);
    }

    let mut semi = 0.0f64;
    for a in 0..dim {
        for &s in &offsets {
            let dist = (s as f64 * steps[a]).powf(theta);
            let m = (0..total)
                .into_par_iter()
                .filter(|flat| (flat / strides[a]) % r + s < r)
                .map(|flat| (values[flat] - values[flat + s * strides[a]]).abs() / dist)
                .reduce(|| 0.0, f64::max);
            semi = semi.max(m);
        }
    }

    let extent = (0..dim)
        .map(|a| domain.hi[a] - domain.lo[a])
        .fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut x = vec![0.0; dim];
    let mut y = vec![0.0; dim];
    let mut dir = vec![0.0; dim];
    for i in 0..grid.pair_budget {
        for a in 0..dim {
            x[a] = rng.gen_range(domain.lo[a]..=domain.hi[a]);
        }
        let level = (i as u32 % DYADIC_LEVELS) as f64 + rng.gen::<f64>();
        let scale = extent * (-level).exp2();
        let mut n2 = 0.0f64;
        for d in dir.iter_mut() {
            *d = rng.gen_range(-1.0..1.0);
            n2 += *d * *d;
        }
        let n = n2.sqrt().max(f64::MIN_POSITIVE);
        let mut dist2 = 0.0;
        for a in 0..dim {
            y[a] = (x[a] + scale * dir[a] / n).clamp(domain.lo[a], domain.hi[a]);
            dist2 += (y[a] - x[a]) * (y[a] - x[a]);
        }
        let fx = f(&x);
        let fy = f(&y);
        sup = sup.max(fx.abs()).max(fy.abs());
        if dist2 > 0.0 {
            semi = semi.max((fx - fy).abs() / dist2.sqrt().powf(theta));
        }
    }

    Ok(NormEstimate {
        sup_norm: sup,
        seminorm: semi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> DomainBox {
        DomainBox::cube(1, -1.0, 1.0)
    }

    #[test]
    fn constant_field() {
        let est = hoelder_norm_estimate(|_| 3.0, 0.7, &line(), &GridSpec::new(33, 100, 1).unwrap())
            .unwrap();
        assert_eq!(est.value(), 3.0);
        assert_eq!(est.seminorm, 0.0);
    }

    #[test]
    fn degenerate_domain_is_rejected() {
        let d = DomainBox::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let err = hoelder_norm_estimate(|_| 0.0, 0.5, &d, &GridSpec::new(5, 1, 0).unwrap());
        assert!(matches!(err, Err(Error::DegenerateDomain { axis: 1 })));
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1, 10, 0).is_err());
        assert!(GridSpec::new(4, 0, 0).is_err());
    }

    #[test]
    fn bad_theta() {
        let g = GridSpec::new(5, 1, 0).unwrap();
        assert!(hoelder_norm_estimate(|_| 0.0, 1.0, &line(), &g).is_err());
    }
}
