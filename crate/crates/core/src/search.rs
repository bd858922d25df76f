//! Hooke-Jeeves pattern search.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternSearchOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_evals: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternSearchResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    pub final_step: f64,
}

impl PatternSearchResult {
    pub fn converged(&self, opts: &PatternSearchOptions) -> bool {
        self.final_step < opts.min_step
    }
}

/// Minimize `f` from `x0` with coordinate exploration and pattern moves.
///
/// The step halves whenever exploration around the base point fails and the
/// search stops when it falls below `min_step` or the budget runs out.
pub fn pattern_search<F>(mut f: F, x0: &[f64], opts: &PatternSearchOptions) -> PatternSearchResult
where
    F: FnMut(&[f64]) -> f64,
{
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut base = x0.to_vec();
    let mut fb = eval(&base, &mut evals);
    let mut step = opts.initial_step;

    let explore = |point: &mut Vec<f64>,
                   fp: &mut f64,
                   step: f64,
                   evals: &mut usize,
                   eval: &mut dyn FnMut(&[f64], &mut usize) -> f64| {
        for i in 0..point.len() {
            if *evals >= opts.max_evals {
                return;
            }
            let orig = point[i];
            point[i] = orig + step;
            let up = eval(point, evals);
            if up < *fp {
                *fp = up;
                continue;
            }
            if *evals >= opts.max_evals {
                point[i] = orig;
                return;
            }
            point[i] = orig - step;
            let down = eval(point, evals);
            if down < *fp {
                *fp = down;
                continue;
            }
            point[i] = orig;
        }
    };

    while step >= opts.min_step && evals < opts.max_evals {
        let mut trial = base.clone();
        let mut ft = fb;
        explore(&mut trial, &mut ft, step, &mut evals, &mut eval);
        if ft < fb {
            loop {
                let mut pattern: Vec<f64> =
                    trial.iter().zip(&base).map(|(t, b)| 2.0 * t - b).collect();
                base = std::mem::take(&mut trial);
                fb = ft;
                if evals >= opts.max_evals {
                    break;
                }
                let mut fp = eval(&pattern, &mut evals);
                explore(&mut pattern, &mut fp, step, &mut evals, &mut eval);
                if fp < fb {
                    trial = pattern;
                    ft = fp;
                } else {
                    break;
                }
            }
        } else {
            step *= 0.5;
        }
    }

    PatternSearchResult {
        x: base,
        fx: fb,
        evals,
        final_step: step,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_shifted_quadratic() {
        let opts = PatternSearchOptions {
            initial_step: 0.5,
            min_step: 1e-9,
            max_evals: 20_000,
        };
        let r = pattern_search(
            |x| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2) + (x[2] - 0.5).abs(),
            &[0.0, 0.0, 0.0],
            &opts,
        );
        assert!(r.converged(&opts));
        assert!((r.x[0] - 1.0).abs() < 1e-6);
        assert!((r.x[1] + 2.0).abs() < 1e-6);
        assert!((r.x[2] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn follows_curved_valley() {
        let opts = PatternSearchOptions {
            initial_step: 0.25,
            min_step: 1e-10,
            max_evals: 200_000,
        };
        let r = pattern_search(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &opts,
        );
        assert!(r.fx < 1e-8, "fx = {}", r.fx);
    }

    #[test]
    fn respects_budget() {
        let opts = PatternSearchOptions {
            initial_step: 1.0,
            min_step: 1e-300,
            max_evals: 50,
        };
        let r = pattern_search(|x| x.iter().map(|v| v * v).sum(), &[3.0; 4], &opts);
        assert!(r.evals <= 50);
    }
}
