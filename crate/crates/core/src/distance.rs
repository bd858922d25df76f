//! Upper estimates of the subriemannian distance.
//!
//! Horizontal paths are produced by integrating control sequences in the
//! kernel frame, so the only constraint left to the optimizer is the
//! endpoint. Controls are parametrized by a truncated Fourier series in time
//! (a circle in the frame is a single harmonic) and the penalized length
//! `|gamma| / l0 + w (gap / d_R)^2` is minimized by pattern search. The frame
//! of a Hölder form is not differentiable, so no gradients are used.

use std::f64::consts::{PI, TAU};

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{frame_from_normal, OneForm};
use crate::kv::{content_hash, join_list, Record};
use crate::paths::{
    horizontality_defect, integrate_controls, integrate_endpoint, ControlSequence, Polyline,
};
use crate::search::{pattern_search, PatternSearchOptions};
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Number of control steps `N`; the step is `1/N`.
    pub segments: usize,
    /// Fourier harmonics per control component.
    pub harmonics: usize,
    pub restarts: usize,
    /// Endpoint tolerance relative to `d_R(p, q)`.
    pub endpoint_tol: f64,
    pub defect_tol: f64,
    /// Objective evaluations per restart.
    pub max_evals: usize,
    /// Endpoint penalty weights; the next one is used when the search stalls
    /// short of the endpoint tolerance.
    pub penalty_schedule: Vec<f64>,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            segments: 64,
            harmonics: 4,
            restarts: 8,
            endpoint_tol: 1e-3,
            defect_tol: 0.05,
            max_evals: 6000,
            penalty_schedule: vec![1e3, 1e4, 1e5, 1e6, 1e7],
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.segments < 2 {
            return Err(Error::Invalid(
                "optimizer.segments must be at least 2".into(),
            ));
        }
        if self.restarts < 1 {
            return Err(Error::Invalid(
                "optimizer.restarts must be at least 1".into(),
            ));
        }
        for (name, v) in [
            ("endpoint_tol", self.endpoint_tol),
            ("defect_tol", self.defect_tol),
        ] {
            if !(v > 0.0) {
                return Err(Error::OutOfRange {
                    name: if name == "endpoint_tol" {
                        "optimizer.endpoint_tol"
                    } else {
                        "optimizer.defect_tol"
                    },
                    range: "(0, inf)",
                    value: v,
                });
            }
        }
        if self.penalty_schedule.is_empty() || self.penalty_schedule.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Invalid(
                "optimizer.penalty needs positive weights".into(),
            ));
        }
        Ok(())
    }

    pub fn to_record(&self) -> Record {
        let mut r = Record::new();
        r.set("segments", self.segments)
            .set("harmonics", self.harmonics)
            .set("restarts", self.restarts)
            .set("endpoint_tol", self.endpoint_tol)
            .set("defect_tol", self.defect_tol)
            .set("max_evals", self.max_evals)
            .set("penalty", join_list(&self.penalty_schedule))
            .set("seed", self.seed);
        r
    }

    /// Inverse of [`to_record`](Self::to_record); absent keys keep their defaults.
    pub fn from_record(r: &Record) -> Result<Self> {
        let unknown = r.unknown_keys(&[
            "segments",
            "harmonics",
            "restarts",
            "endpoint_tol",
            "defect_tol",
            "max_evals",
            "penalty",
            "seed",
        ]);
        if !unknown.is_empty() {
            return Err(Error::UnknownKeys(unknown));
        }
        let d = Self::default();
        let cfg = Self {
            segments: r.get("segments")?.unwrap_or(d.segments),
            harmonics: r.get("harmonics")?.unwrap_or(d.harmonics),
            restarts: r.get("restarts")?.unwrap_or(d.restarts),
            endpoint_tol: r.get("endpoint_tol")?.unwrap_or(d.endpoint_tol),
            defect_tol: r.get("defect_tol")?.unwrap_or(d.defect_tol),
            max_evals: r.get("max_evals")?.unwrap_or(d.max_evals),
            penalty_schedule: r.get_list("penalty")?.unwrap_or(d.penalty_schedule),
            seed: r.get("seed")?.unwrap_or(d.seed),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn hash(&self) -> String {
        content_hash(&self.to_record().to_text())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateStatus {
    Converged,
    Unconverged,
}

#[derive(Debug, Clone)]
pub struct DistanceEstimate {
    /// Length of the best horizontal path found.
    pub value: f64,
    pub path: Polyline,
    pub defect: f64,
    /// Euclidean distance between the path end and the target.
    pub endpoint_gap: f64,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub status: EstimateStatus,
}

/// JSON form of an estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub value: f64,
    pub defect: f64,
    pub endpoint_gap: f64,
    pub seed: u64,
    pub config_hash: String,
    pub status: EstimateStatus,
    pub restarts: usize,
    pub iterations: usize,
}

impl DistanceEstimate {
    pub fn converged(&self) -> bool {
        self.status == EstimateStatus::Converged
    }

    pub fn record(&self, cfg: &OptimizerConfig) -> EstimateRecord {
        EstimateRecord {
            value: self.value,
            defect: self.defect,
            endpoint_gap: self.endpoint_gap,
            seed: self.seed,
            config_hash: cfg.hash(),
            status: self.status,
            restarts: self.restarts,
            iterations: self.iterations,
        }
    }
}

/// `2 sqrt(pi |z|)`: a horizontal lift gains height equal to the enclosed
/// area, and the shortest loop enclosing area `A` is a circle of length
/// `2 sqrt(pi A)`.
pub fn heisenberg_vertical_exact(z: f64) -> f64 {
    2.0 * (PI * z.abs()).sqrt()
}

/// Fourier basis sampled at the step midpoints.
struct ControlBasis {
    segments: usize,
    harmonics: usize,
    table: Vec<f64>,
}

impl ControlBasis {
    fn new(segments: usize, harmonics: usize) -> Self {
        let width = 2 * harmonics + 1;
        let mut table = Vec::with_capacity(segments * width);
        for k in 0..segments {
            let t = (k as f64 + 0.5) / segments as f64;
            table.push(1.0);
            for j in 1..=harmonics {
                let a = TAU * j as f64 * t;
                table.push(a.cos());
                table.push(a.sin());
            }
        }
        Self {
            segments,
            harmonics,
            table,
        }
    }

    fn width(&self) -> usize {
        2 * self.harmonics + 1
    }

    fn step(&self) -> f64 {
        1.0 / self.segments as f64
    }

    fn controls<'a>(&'a self, params: &'a [f64]) -> impl Iterator<Item = [f64; 2]> + 'a {
        let w = self.width();
        let (c1, c2) = params.split_at(w);
        self.table.chunks_exact(w).map(move |row| {
            let mut u = [0.0, 0.0];
            for i in 0..w {
                u[0] += row[i] * c1[i];
                u[1] += row[i] * c2[i];
            }
            u
        })
    }

    fn sequence(&self, params: &[f64], start: Vec3) -> ControlSequence {
        ControlSequence {
            controls: self.controls(params).collect(),
            step: self.step(),
            start,
        }
    }
}

/// Parameters of `u = chord + loop`, where the loop is a circle of the given
/// perimeter traversed once, starting in direction `phase`.
fn ansatz(
    harmonics: usize,
    chord: [f64; 2],
    perimeter: f64,
    phase: f64,
    orientation: f64,
) -> Vec<f64> {
    let w = 2 * harmonics + 1;
    let mut p = vec![0.0; 2 * w];
    p[0] = chord[0];
    p[w] = chord[1];
    if harmonics >= 1 && perimeter > 0.0 {
        // u1 = -P sin(2 pi t + phase), u2 = s P cos(2 pi t + phase)
        let (s, c) = phase.sin_cos();
        p[1] = -perimeter * s;
        p[2] = -perimeter * c;
        p[w + 1] = orientation * perimeter * c;
        p[w + 2] = -orientation * perimeter * s;
    }
    p
}

/// Relative size of the random perturbation applied to restart starting points.
const RESTART_NOISE: f64 = 0.02;

struct Problem<'a> {
    alpha: &'a OneForm,
    start: Vec3,
    target: Vec3,
    d0: f64,
    l0: f64,
    basis: ControlBasis,
}

impl Problem<'_> {
    fn endpoint(&self, params: &[f64]) -> (Vec3, f64) {
        integrate_endpoint(
            self.alpha,
            self.start,
            self.basis.step(),
            self.basis.controls(params),
        )
    }

    fn objective(&self, params: &[f64], weight: f64) -> f64 {
        let (end, len) = self.endpoint(params);
        let gap = (end - self.target).norm() / self.d0;
        len / self.l0 + weight * gap * gap
    }
}

struct RestartOutcome {
    params: Vec<f64>,
    value: f64,
    gap: f64,
    evals: usize,
}

/// Close the remaining endpoint gap with finite-difference Gauss-Newton steps
/// over a few low-order control directions (chord, overall scale, first
/// harmonic), taking the minimum-norm step each time so the path shape moves
/// as little as possible.
fn correct_endpoint(
    problem: &Problem<'_>,
    params: &[f64],
    goal: f64,
    evals: &mut usize,
) -> (Vec<f64>, f64) {
    const MAX_ITERS: usize = 12;

    let w = problem.basis.width();
    let l0 = problem.l0;
    let mut directions: Vec<Vec<f64>> = Vec::new();
    for idx in [0, w] {
        let mut d = vec![0.0; params.len()];
        d[idx] = l0;
        directions.push(d);
    }
    let norm = params.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        directions.push(params.iter().map(|v| v * l0 / norm).collect());
    }
    if problem.basis.harmonics >= 1 {
        for idx in [1, 2, w + 1, w + 2] {
            let mut d = vec![0.0; params.len()];
            d[idx] = l0;
            directions.push(d);
        }
    }

    let mut x = params.to_vec();
    let gap_of = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let (end, _) = problem.endpoint(x);
        (problem.target - end, end)
    };
    let (mut residual, mut end) = gap_of(&x, evals);
    for _ in 0..MAX_ITERS {
        if residual.norm() <= goal {
            break;
        }
        // secant scale comparable to the residual: the endpoint map of a
        // Hölder frame is only approximately linear at the scale it is probed
        let fd_step = (4.0 * residual.norm() / l0).clamp(1e-8, 1e-3);
        let jac: Vec<Vec3> = directions
            .iter()
            .map(|d| {
                let probe: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + fd_step * b).collect();
                let (_, e) = gap_of(&probe, evals);
                (e - end) / fd_step
            })
            .collect();
        let mut jjt = Matrix3::zeros();
        for c in &jac {
            jjt += c * c.transpose();
        }
        jjt += Matrix3::identity() * (1e-12 * jjt.trace()).max(f64::MIN_POSITIVE);
        let Some(y) = jjt.lu().solve(&residual) else {
            break;
        };
        let coeffs: Vec<f64> = jac.iter().map(|c| c.dot(&y)).collect();

        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..6 {
            let trial: Vec<f64> = (0..x.len())
                .map(|i| {
                    x[i] + t * directions
                        .iter()
                        .zip(&coeffs)
                        .map(|(d, c)| c * d[i])
                        .sum::<f64>()
                })
                .collect();
            let (r, e) = gap_of(&trial, evals);
            if r.norm() < residual.norm() {
                x = trial;
                residual = r;
                end = e;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (x, residual.norm())
}

fn run_restart(problem: &Problem<'_>, cfg: &OptimizerConfig, init: Vec<f64>) -> RestartOutcome {
    let tol = cfg.endpoint_tol * problem.d0;
    let mut evals = 0;
    let (mut params, gap) = correct_endpoint(problem, &init, 0.1 * tol, &mut evals);

    // best feasible (gap within tolerance) or, failing that, smallest gap
    let mut best = (params.clone(), problem.endpoint(&params).1, gap);
    let better = |cand: &(Vec<f64>, f64, f64), best: &(Vec<f64>, f64, f64)| match (
        cand.2 <= tol,
        best.2 <= tol,
    ) {
        (true, true) => cand.1 < best.1,
        (true, false) => true,
        (false, true) => false,
        (false, false) => cand.2 < best.2,
    };

    let levels = cfg.penalty_schedule.len();
    let mut initial_step = 0.02 * problem.l0;
    for (level, &w) in cfg.penalty_schedule.iter().enumerate() {
        if evals >= cfg.max_evals {
            break;
        }
        let share = (cfg.max_evals - evals) * 2 / (levels - level + 1).max(2);
        let opts = PatternSearchOptions {
            initial_step,
            min_step: 1e-5 * problem.l0,
            max_evals: share.max(1),
        };
        let r = pattern_search(|x| problem.objective(x, w), &params, &opts);
        evals += r.evals;
        let (corrected, gap) = correct_endpoint(problem, &r.x, 0.1 * tol, &mut evals);
        let value = problem.endpoint(&corrected).1;
        let cand = (corrected, value, gap);
        let stalled = !better(&cand, &best);
        if !stalled {
            best = cand;
        }
        params = r.x;
        if stalled && best.2 <= tol {
            break;
        }
        initial_step = 0.005 * problem.l0;
    }
    let (params, value, gap) = best;
    RestartOutcome {
        params,
        value,
        gap,
        evals,
    }
}

/// Upper estimate of `d_H(p, q)`.
pub fn estimate_upper(
    alpha: &OneForm,
    p: Vec3,
    q: Vec3,
    cfg: &OptimizerConfig,
) -> Result<DistanceEstimate> {
    estimate_upper_seeded(alpha, p, q, cfg, &[])
}

/// As [`estimate_upper`], additionally considering the given horizontal
/// paths from `p` as candidates.
pub fn estimate_upper_seeded(
    alpha: &OneForm,
    p: Vec3,
    q: Vec3,
    cfg: &OptimizerConfig,
    seeds: &[Polyline],
) -> Result<DistanceEstimate> {
    cfg.validate()?;
    let chart = alpha.chart;
    let delta = chart.wrap(q - p);
    let d0 = delta.norm();
    if d0 == 0.0 {
        return Ok(DistanceEstimate {
            value: 0.0,
            path: Polyline::point(p),
            defect: 0.0,
            endpoint_gap: 0.0,
            restarts: 0,
            iterations: 0,
            seed: cfg.seed,
            status: EstimateStatus::Converged,
        });
    }
    let target = p + delta;

    let n = alpha.unit_normal(&p);
    let (e1, e2) = frame_from_normal(&n);
    let vertical = delta.dot(&n);
    let horizontal = delta - n * vertical;
    let chord = [horizontal.dot(&e1), horizontal.dot(&e2)];
    let perimeter = heisenberg_vertical_exact(vertical);

    let basis = ControlBasis::new(cfg.segments, cfg.harmonics);
    let l0 = (horizontal.norm() + perimeter).max(d0);
    let problem = Problem {
        alpha,
        start: p,
        target,
        d0,
        l0,
        basis,
    };
    let w0 = cfg.penalty_schedule[0];

    let best_ansatz = |phase: f64| -> Vec<f64> {
        let mut candidates = vec![ansatz(cfg.harmonics, chord, 0.0, 0.0, 1.0)];
        for s in [1.0, -1.0] {
            candidates.push(ansatz(cfg.harmonics, chord, perimeter, phase, s));
        }
        candidates
            .into_iter()
            .map(|c| (problem.objective(&c, w0), c))
            .fold(
                (f64::INFINITY, Vec::new()),
                |a, b| if b.0 < a.0 { b } else { a },
            )
            .1
    };

    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let init = if i == 0 {
                best_ansatz(0.0)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(i as u64);
                let mut init = best_ansatz(rng.gen_range(0.0..TAU));
                for v in init.iter_mut() {
                    *v += RESTART_NOISE * l0 * rng.gen_range(-1.0..1.0);
                }
                init
            };
            run_restart(&problem, cfg, init)
        })
        .collect();

    let iterations = outcomes.iter().map(|o| o.evals).sum();
    let tol = cfg.endpoint_tol * d0;

    let mut candidates: Vec<DistanceEstimate> = outcomes
        .iter()
        .map(|o| {
            let path = integrate_controls(&problem.basis.sequence(&o.params, p), alpha);
            let defect = horizontality_defect(&path, alpha);
            let ok = o.gap <= tol && defect <= cfg.defect_tol;
            DistanceEstimate {
                value: o.value,
                path,
                defect,
                endpoint_gap: o.gap,
                restarts: cfg.restarts,
                iterations,
                seed: cfg.seed,
                status: if ok {
                    EstimateStatus::Converged
                } else {
                    EstimateStatus::Unconverged
                },
            }
        })
        .collect();
    for s in seeds {
        if (s.start() - p).norm() > tol {
            continue;
        }
        let gap = (s.end() - target).norm();
        let defect = horizontality_defect(s, alpha);
        let ok = gap <= tol && defect <= cfg.defect_tol;
        candidates.push(DistanceEstimate {
            value: s.length(),
            path: s.clone(),
            defect,
            endpoint_gap: gap,
            restarts: cfg.restarts,
            iterations,
            seed: cfg.seed,
            status: if ok {
                EstimateStatus::Converged
            } else {
                EstimateStatus::Unconverged
            },
        });
    }

    let best_converged = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.converged())
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i);
    match best_converged {
        Some(i) => Ok(candidates.swap_remove(i)),
        None => {
            let i = candidates
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    a.1.endpoint_gap
                        .total_cmp(&b.1.endpoint_gap)
                        .then(a.0.cmp(&b.0))
                })
                .map(|(i, _)| i)
                .unwrap();
            Err(Error::Unconverged {
                best: Box::new(candidates.swap_remove(i)),
            })
        }
    }
}

/// Extremes of the set reached by short horizontal paths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReachReport {
    pub eps: f64,
    pub samples: usize,
    /// Largest `|z(end) - z(p)|`.
    pub max_dz: f64,
    /// Largest `d_R(p, end)`.
    pub max_dr: f64,
    pub endpoints: Vec<[f64; 3]>,
}

const PROBE_SEGMENTS: usize = 64;
const PROBE_HARMONICS: usize = 3;

/// Integrate `samples` random horizontal control sequences of length `< eps`
/// from `p`. Every fourth sample is a circular loop in the frame, the
/// maximizer of vertical gain for the unperturbed contact form.
pub fn reachability_probe(
    alpha: &OneForm,
    p: Vec3,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<ReachReport> {
    if !(eps > 0.0) {
        return Err(Error::OutOfRange {
            name: "eps",
            range: "(0, inf)",
            value: eps,
        });
    }
    if samples < 1 {
        return Err(Error::Invalid("samples must be at least 1".into()));
    }
    let basis = ControlBasis::new(PROBE_SEGMENTS, PROBE_HARMONICS);
    let budget = eps * (1.0 - 1e-9);

    let endpoints: Vec<Vec3> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (params, target) = if i % 4 == 0 {
                let orientation = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                let phase = rng.gen_range(0.0..TAU);
                (
                    ansatz(PROBE_HARMONICS, [0.0, 0.0], 1.0, phase, orientation),
                    budget,
                )
            } else {
                let params: Vec<f64> = (0..2 * basis.width())
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect();
                (params, budget * rng.gen_range(0.25..1.0))
            };
            let seq = basis.sequence(&params, p);
            let raw = seq.length();
            if raw == 0.0 {
                return p;
            }
            let scale = target / raw;
            let scaled = ControlSequence {
                controls: seq
                    .controls
                    .iter()
                    .map(|u| [u[0] * scale, u[1] * scale])
                    .collect(),
                ..seq
            };
            integrate_controls(&scaled, alpha).end()
        })
        .collect();

    let chart = alpha.chart;
    Ok(ReachReport {
        eps,
        samples,
        max_dz: endpoints
            .iter()
            .map(|e| (e.z - p.z).abs())
            .fold(0.0, f64::max),
        max_dr: endpoints
            .iter()
            .map(|e| chart.distance(&p, e))
            .fold(0.0, f64::max),
        endpoints: endpoints.iter().map(|e| [e.x, e.y, e.z]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::MetricChart;

    #[test]
    fn oracle_values() {
        assert_eq!(heisenberg_vertical_exact(0.0), 0.0);
        assert!((heisenberg_vertical_exact(0.1) - 1.120_998_243_279_585_7).abs() < 1e-12);
        let r = heisenberg_vertical_exact(0.4) / heisenberg_vertical_exact(0.1);
        assert!((r - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ansatz_is_a_closed_circle() {
        let basis = ControlBasis::new(64, 2);
        let params = ansatz(2, [0.0, 0.0], 1.0, 0.3, 1.0);
        let (mut x, mut y, mut area) = (0.0, 0.0, 0.0);
        let mut len = 0.0;
        for u in basis.controls(&params) {
            let (nx, ny) = (x + u[0] / 64.0, y + u[1] / 64.0);
            area += 0.5 * (x * ny - y * nx);
            len += u[0].hypot(u[1]) / 64.0;
            x = nx;
            y = ny;
        }
        assert!(x.abs() < 1e-12 && y.abs() < 1e-12);
        assert!((len - 1.0).abs() < 1e-12);
        // regular 64-gon of perimeter 1
        let expected = 1.0 / (4.0 * 64.0 * (PI / 64.0).tan());
        assert!((area - expected).abs() < 1e-12, "{area} vs {expected}");
    }

    #[test]
    fn same_point_is_zero() {
        let h = OneForm::heisenberg(0.5, &MetricChart::default());
        let e = estimate_upper(
            &h,
            Vec3::zeros(),
            Vec3::zeros(),
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert_eq!(e.value, 0.0);
        assert!(e.path.is_trivial());
    }

    #[test]
    fn config_validation() {
        let mut c = OptimizerConfig::default();
        c.segments = 1;
        assert!(c.validate().is_err());
        let mut c = OptimizerConfig::default();
        c.endpoint_tol = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn probe_rejects_bad_input() {
        let h = OneForm::heisenberg(0.5, &MetricChart::default());
        assert!(reachability_probe(&h, Vec3::zeros(), 0.0, 10, 0).is_err());
        assert!(reachability_probe(&h, Vec3::zeros(), 0.1, 0, 0).is_err());
    }
}
