//! Explicit constants of the lower bound, vertical scaling runs, and the
//! `theta -> 1` limit.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disks::{DEFAULT_C_M, DEFAULT_DELTA_M, DEFAULT_SIGMA};
use crate::distance::{estimate_upper, OptimizerConfig};
use crate::error::{Error, Result};
use crate::forms::{frame_from_normal, sin_angle, OneForm};
use crate::kv::Record;
use crate::paths::Polyline;
use crate::Vec3;

/// Every constant entering `d_H >= C d_R^(1/(1+theta))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsBundle {
    pub theta: f64,
    pub c_m: f64,
    pub k: f64,
    pub sin_phi0: f64,
    /// Certified bound for the Hölder norm of the normalized form.
    pub alpha_norm: f64,
    pub delta_m: f64,
    pub sigma: f64,
    pub tau: f64,
    pub eta: f64,
    pub rho: f64,
    pub c: f64,
}

/// Inputs from which a bundle is assembled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BundleInputs {
    pub theta: f64,
    pub c_m: f64,
    pub k: f64,
    pub sin_phi0: f64,
    pub alpha_norm: f64,
    pub delta_m: f64,
    pub sigma: f64,
    pub eta: f64,
}

impl BundleInputs {
    pub fn unit(theta: f64) -> Self {
        Self {
            theta,
            c_m: 1.0,
            k: 1.0,
            sin_phi0: 1.0,
            alpha_norm: 1.0,
            delta_m: f64::INFINITY,
            sigma: f64::INFINITY,
            eta: f64::INFINITY,
        }
    }
}

const BUNDLE_KEYS: [&str; 11] = [
    "theta",
    "c_m",
    "k",
    "sin_phi0",
    "alpha_norm",
    "delta_m",
    "sigma",
    "tau",
    "eta",
    "rho",
    "c",
];

impl ConstantsBundle {
    pub fn assemble(i: BundleInputs) -> Result<Self> {
        let mut b = Self {
            theta: i.theta,
            c_m: i.c_m,
            k: i.k,
            sin_phi0: i.sin_phi0,
            alpha_norm: i.alpha_norm,
            delta_m: i.delta_m,
            sigma: i.sigma,
            tau: i.delta_m.min(i.sigma),
            eta: i.eta,
            rho: f64::NAN,
            c: f64::NAN,
        };
        b.check_inputs()?;
        b.c = constant_c(&b)?;
        b.rho = rho_threshold(&b)?;
        Ok(b)
    }

    fn check_inputs(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::OutOfRange {
                name: "theta",
                range: "(0, 1]",
                value: self.theta,
            });
        }
        if self.sin_phi0 == 0.0 {
            return Err(Error::HorizontalCurve);
        }
        if !(self.sin_phi0 > 0.0 && self.sin_phi0 <= 1.0) {
            return Err(Error::OutOfRange {
                name: "sin_phi0",
                range: "(0, 1]",
                value: self.sin_phi0,
            });
        }
        for (name, v) in [
            ("c_m", self.c_m),
            ("k", self.k),
            ("alpha_norm", self.alpha_norm),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::OutOfRange {
                    name,
                    range: "(0, inf)",
                    value: v,
                });
            }
        }
        for (name, v) in [
            ("delta_m", self.delta_m),
            ("sigma", self.sigma),
            ("eta", self.eta),
        ] {
            if !(v > 0.0) {
                return Err(Error::OutOfRange {
                    name,
                    range: "(0, inf]",
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// Full invariant check, including that `tau`, `rho` and `C` match the formulas.
    pub fn validate(&self) -> Result<()> {
        self.check_inputs()?;
        let tau = self.delta_m.min(self.sigma);
        if self.tau.to_bits() != tau.to_bits() {
            return Err(Error::Invalid(format!(
                "tau = {} but min(delta_m, sigma) = {tau}",
                self.tau
            )));
        }
        let c = constant_c(self)?;
        if self.c.to_bits() != c.to_bits() {
            return Err(Error::Invalid(format!(
                "stored C = {} but the formula gives {c}",
                self.c
            )));
        }
        let rho = rho_threshold(self)?;
        if self.rho.to_bits() != rho.to_bits() {
            return Err(Error::Invalid(format!(
                "stored rho = {} but the formula gives {rho}",
                self.rho
            )));
        }
        Ok(())
    }

    pub fn to_record(&self) -> Record {
        let mut r = Record::new();
        r.set("theta", self.theta)
            .set("c_m", self.c_m)
            .set("k", self.k)
            .set("sin_phi0", self.sin_phi0)
            .set("alpha_norm", self.alpha_norm)
            .set("delta_m", self.delta_m)
            .set("sigma", self.sigma)
            .set("tau", self.tau)
            .set("eta", self.eta)
            .set("rho", self.rho)
            .set("c", self.c);
        r
    }

    pub fn from_record(r: &Record) -> Result<Self> {
        let unknown = r.unknown_keys(&BUNDLE_KEYS);
        if !unknown.is_empty() {
            return Err(Error::UnknownKeys(unknown));
        }
        let b = Self {
            theta: r.require("theta")?,
            c_m: r.require("c_m")?,
            k: r.require("k")?,
            sin_phi0: r.require("sin_phi0")?,
            alpha_norm: r.require("alpha_norm")?,
            delta_m: r.require("delta_m")?,
            sigma: r.require("sigma")?,
            tau: r.require("tau")?,
            eta: r.require("eta")?,
            rho: r.require("rho")?,
            c: r.require("c")?,
        };
        b.validate()?;
        Ok(b)
    }
}

/// `Q = c_M^theta K (sin phi0)^-1 ||alpha||`; every constant is a power of it.
fn q_factor(b: &ConstantsBundle) -> f64 {
    b.c_m.powf(b.theta) * b.k * b.alpha_norm / b.sin_phi0
}

/// `{2 c_M^(theta/(1+theta)) K^(1/(1+theta)) (sin phi0)^(-1/(1+theta)) ||alpha||^(1/(1+theta))}^-1`.
///
/// Defined for `theta` in `(0, 1]`; the endpoint is the smooth limit.
pub fn constant_c(b: &ConstantsBundle) -> Result<f64> {
    b.check_inputs()?;
    let e = 1.0 / (1.0 + b.theta);
    let denom =
        2.0 * b.c_m.powf(b.theta * e) * b.k.powf(e) * b.sin_phi0.powf(-e) * b.alpha_norm.powf(e);
    Ok(1.0 / denom)
}

/// `min(eta, tau/2, 1 / (2^((1+theta)/theta) c_M K^(1/theta) (sin phi0)^(-1/theta) ||alpha||^(1/theta)))`.
pub fn rho_threshold(b: &ConstantsBundle) -> Result<f64> {
    b.check_inputs()?;
    let t = b.theta;
    let third = 1.0
        / (2f64.powf((1.0 + t) / t)
            * b.c_m
            * b.k.powf(1.0 / t)
            * b.sin_phi0.powf(-1.0 / t)
            * b.alpha_norm.powf(1.0 / t));
    Ok(b.eta.min(0.5 * b.tau).min(third))
}

/// The factor `1 - Q^(1/(1+theta)) l^(theta/(1+theta))` that the proof bounds
/// below by `1/2` for `l < rho`.
pub fn curly_brace_check(b: &ConstantsBundle, gamma0_length: f64) -> Result<f64> {
    let rho = rho_threshold(b)?;
    if !(gamma0_length >= 0.0 && gamma0_length < rho) {
        return Err(Error::AboveThreshold {
            length: gamma0_length,
            rho,
        });
    }
    let e = 1.0 / (1.0 + b.theta);
    Ok(1.0 - q_factor(b).powf(e) * gamma0_length.powf(b.theta * e))
}

/// Minimum of [`curly_brace_check`] over `n` lengths spread over `(0, rho)`,
/// the last one just below `rho`.
pub fn curly_brace_sweep(b: &ConstantsBundle, n: usize) -> Result<f64> {
    let rho = rho_threshold(b)?;
    let mut worst = f64::INFINITY;
    for i in 1..=n {
        let l = if i == n {
            rho * (1.0 - 1e-12)
        } else {
            rho * i as f64 / n as f64
        };
        worst = worst.min(curly_brace_check(b, l)?);
    }
    Ok(worst)
}

/// Minimum of `sin(angle(kernel, tangent))` over `samples_per_segment`
/// evenly spaced interior points of every segment.
pub fn min_sin_angle(alpha: &OneForm, curve: &Polyline, samples_per_segment: usize) -> Result<f64> {
    let m = samples_per_segment.max(1);
    let mut worst = f64::INFINITY;
    for (index, (a, b)) in curve.segments().enumerate() {
        let d = b - a;
        for j in 0..m {
            let x = a + d * ((j as f64 + 0.5) / m as f64);
            let s = sin_angle(alpha, &x, &d)?;
            if s <= 0.0 {
                return Err(Error::NotTransverse { index });
            }
            worst = worst.min(s);
        }
    }
    if worst.is_infinite() {
        return Err(Error::Invalid("curve has no segments".into()));
    }
    Ok(worst)
}

/// One radius tried by [`estimate_eta`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtaTrial {
    pub radius: f64,
    /// Largest upper estimate among the test points, infinite if any failed.
    pub max_dhat: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtaEstimate {
    pub eta: f64,
    pub trials: Vec<EtaTrial>,
    pub procedure: String,
}

/// Empirical continuity threshold: the largest radius `r` in
/// `tau/2, tau/4, ...` such that `d_H(p, q) < tau/2` is certified by a
/// converged upper estimate for every test point `q = p + r u`, halved.
///
/// Test directions are the unit normal (both signs), the two kernel frame
/// vectors and one mixed direction. The normal is tried first since it is
/// the slowest direction.
pub fn estimate_eta(
    alpha: &OneForm,
    p: Vec3,
    tau: f64,
    cfg: &OptimizerConfig,
    max_halvings: usize,
) -> Result<EtaEstimate> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::OutOfRange {
            name: "tau",
            range: "(0, inf)",
            value: tau,
        });
    }
    let n = alpha.unit_normal(&p);
    let (e1, e2) = frame_from_normal(&n);
    let dirs = [n, -n, e1, e2, (n + e1 + e2).normalize()];
    let target = 0.5 * tau;
    let mut trials = Vec::new();
    let mut r = target;
    for _ in 0..=max_halvings {
        let mut worst: f64 = 0.0;
        for u in &dirs {
            let d = match estimate_upper(alpha, p, p + u * r, cfg) {
                Ok(e) => e.value,
                Err(Error::Unconverged { .. }) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            worst = worst.max(d);
            if !(worst < target) {
                break;
            }
        }
        let accepted = worst < target;
        trials.push(EtaTrial {
            radius: r,
            max_dhat: worst,
            accepted,
        });
        if accepted {
            return Ok(EtaEstimate {
                eta: 0.5 * r,
                trials,
                procedure: format!(
                    "largest r in tau/2 * 2^-k with every converged d_hat(p, p + r u) < tau/2 over {} directions, halved",
                    dirs.len()
                ),
            });
        }
        r *= 0.5;
    }
    Err(Error::Invalid(format!(
        "no radius down to {} keeps d_hat below tau/2 = {target}",
        2.0 * r
    )))
}

/// Assemble the bundle for a form and a transverse curve.
pub fn bundle_for(
    alpha: &OneForm,
    curve: &Polyline,
    k: f64,
    eta: f64,
    c_m: f64,
    delta_m: f64,
    sigma: f64,
) -> Result<ConstantsBundle> {
    ConstantsBundle::assemble(BundleInputs {
        theta: alpha.theta,
        c_m,
        k,
        sin_phi0: min_sin_angle(alpha, curve, 8)?,
        alpha_norm: alpha.normalized().norm_upper,
        delta_m,
        sigma,
        eta,
    })
}

/// Bundle with the default `c_M`, `delta_M` and `sigma`.
pub fn default_bundle_for(
    alpha: &OneForm,
    curve: &Polyline,
    k: f64,
    eta: f64,
) -> Result<ConstantsBundle> {
    bundle_for(
        alpha,
        curve,
        k,
        eta,
        DEFAULT_C_M,
        DEFAULT_DELTA_M,
        DEFAULT_SIGMA,
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingRow {
    pub epsilon: f64,
    pub d_r: f64,
    /// Upper estimate of `d_H`; infinite when the optimizer found no path.
    pub d_hat: f64,
    pub converged: bool,
    pub lower_bound: Option<f64>,
    pub violation: bool,
    /// `d_hat / d_R^(1/(1+theta))`
    pub hoelder_ratio: f64,
    /// `d_hat / sqrt(d_R)`
    pub sqrt_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingResult {
    pub theta: f64,
    pub rows: Vec<ScalingRow>,
    pub fitted_slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r2: Option<f64>,
    pub violations: usize,
    /// Some estimate did not converge.
    pub partial: bool,
    /// Fit quality below 0.98.
    pub flagged: bool,
    pub bundle: Option<ConstantsBundle>,
}

impl ScalingResult {
    pub fn epsilons(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.epsilon).collect()
    }

    pub fn dhat(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.d_hat).collect()
    }

    pub fn unconverged(&self) -> usize {
        self.rows.iter().filter(|r| !r.converged).count()
    }

    /// `epsilon,d_r,d_hat,lower_bound,violation`; an absent bound is empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "epsilon,d_r,d_hat,lower_bound,violation")?;
        for r in &self.rows {
            let lb = r.lower_bound.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{}",
                r.epsilon, r.d_r, r.d_hat, lb, r.violation as u8
            )?;
        }
        Ok(())
    }
}

/// Ordinary least squares `y = slope x + intercept`; returns `(slope, intercept, r2)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some((slope, intercept, r2))
}

/// Estimate `d_H(p, q_eps)` for `q_eps` at arclength `eps` along `curve`
/// (which starts at `p`), fit `log d_hat` against `log d_R`, and count
/// failures of `d_hat >= C d_R^(1/(1+theta))` when a bundle is given.
pub fn scaling_experiment(
    alpha: &OneForm,
    curve: &Polyline,
    epsilons: &[f64],
    cfg: &OptimizerConfig,
    bundle: Option<&ConstantsBundle>,
) -> Result<ScalingResult> {
    if epsilons.len() < 3 {
        return Err(Error::Invalid(format!(
            "scaling needs at least 3 epsilons, got {}",
            epsilons.len()
        )));
    }
    min_sin_angle(alpha, curve, 8)?;
    let theta = alpha.theta;
    let mut eps: Vec<f64> = epsilons.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    if eps.windows(2).any(|w| w[0] == w[1]) || eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Invalid(
            "epsilons must be positive and distinct".into(),
        ));
    }
    if let Some(b) = bundle {
        b.validate()?;
        let rho = rho_threshold(b)?;
        if eps[0] >= rho {
            return Err(Error::AboveThreshold {
                length: eps[0],
                rho,
            });
        }
    }
    let p = curve.start();
    let exponent = 1.0 / (1.0 + theta);
    let rows = eps
        .par_iter()
        .map(|&e| {
            let q = curve.point_at(e)?;
            let d_r = alpha.chart.distance(&p, &q);
            let (d_hat, converged) = match estimate_upper(alpha, p, q, cfg) {
                Ok(est) => (est.value, true),
                Err(Error::Unconverged { .. }) => (f64::INFINITY, false),
                Err(err) => return Err(err),
            };
            let lower_bound = bundle.map(|b| b.c * d_r.powf(exponent));
            let violation = converged && lower_bound.is_some_and(|lb| d_hat < lb);
            Ok(ScalingRow {
                epsilon: e,
                d_r,
                d_hat,
                converged,
                lower_bound,
                violation,
                hoelder_ratio: d_hat / d_r.powf(exponent),
                sqrt_ratio: d_hat / d_r.sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (lx, ly): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.converged)
        .map(|r| (r.d_r.ln(), r.d_hat.ln()))
        .unzip();
    let fit = if lx.len() >= 3 {
        fit_line(&lx, &ly)
    } else {
        None
    };
    Ok(ScalingResult {
        theta,
        violations: rows.iter().filter(|r| r.violation).count(),
        partial: rows.iter().any(|r| !r.converged),
        fitted_slope: fit.map(|f| f.0),
        intercept: fit.map(|f| f.1),
        r2: fit.map(|f| f.2),
        flagged: fit.map_or(true, |f| f.2 < 0.98),
        rows,
        bundle: bundle.copied(),
    })
}

/// `C(theta)` on a grid below 1 against the formula at `theta = 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitTable {
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    pub limit: f64,
    /// `|C(theta_last) - C(1)| / C(1)`
    pub last_rel_gap: f64,
    pub monotone: bool,
    pub finite: bool,
}

impl LimitTable {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "theta,c")?;
        for (t, c) in self.thetas.iter().zip(&self.values) {
            writeln!(w, "{t},{c}")?;
        }
        writeln!(w, "1,{}", self.limit)
    }
}

/// Evaluate `C` along `thetas` (sorted ascending, all `< 1`) with the other
/// inputs of `base` held fixed.
pub fn c1_limit_check(base: &ConstantsBundle, thetas: &[f64]) -> Result<LimitTable> {
    let mut ts = thetas.to_vec();
    ts.sort_by(f64::total_cmp);
    if ts.is_empty() {
        return Err(Error::Invalid("theta grid is empty".into()));
    }
    let at = |theta: f64| constant_c(&ConstantsBundle { theta, ..*base });
    let values = ts
        .iter()
        .map(|&t| {
            crate::error::check_theta(t)?;
            at(t)
        })
        .collect::<Result<Vec<_>>>()?;
    let limit = at(1.0)?;
    let last = *values.last().unwrap();
    let increasing = values.windows(2).all(|w| w[1] >= w[0]);
    let decreasing = values.windows(2).all(|w| w[1] <= w[0]);
    Ok(LimitTable {
        finite: values.iter().all(|v| v.is_finite()),
        monotone: increasing || decreasing,
        last_rel_gap: (last - limit).abs() / limit,
        thetas: ts,
        values,
        limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::MetricChart;
    use std::f64::consts::PI;

    fn unit(theta: f64) -> ConstantsBundle {
        ConstantsBundle::assemble(BundleInputs::unit(theta)).unwrap()
    }

    #[test]
    fn unit_constants_give_one_half() {
        for t in [0.1, 0.5, 0.9, 1.0] {
            assert!((unit(t).c - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn smooth_limit_value() {
        let b = ConstantsBundle::assemble(BundleInputs {
            c_m: 1.0 / (4.0 * PI),
            ..BundleInputs::unit(1.0)
        })
        .unwrap();
        assert!((b.c - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rho_examples() {
        let b = ConstantsBundle::assemble(BundleInputs {
            eta: 0.1,
            delta_m: 0.2,
            sigma: 0.2,
            ..BundleInputs::unit(0.5)
        })
        .unwrap();
        assert!((b.rho - 0.1).abs() < 1e-15);
        assert!((unit(0.5).rho - 0.125).abs() < 1e-15);
    }

    #[test]
    fn curly_brace_at_boundary() {
        let b = unit(0.5);
        let v = curly_brace_check(&b, 0.12).unwrap();
        assert!((v - (1.0 - 0.12f64.cbrt())).abs() < 1e-12);
        assert!((v - 0.5068).abs() < 1e-4);
        assert!(curly_brace_check(&b, 0.125).is_err());
        assert!(curly_brace_sweep(&b, 1000).unwrap() >= 0.5);
    }

    #[test]
    fn horizontal_sin_is_rejected() {
        let r = ConstantsBundle::assemble(BundleInputs {
            sin_phi0: 0.0,
            ..BundleInputs::unit(0.5)
        });
        assert!(matches!(r, Err(Error::HorizontalCurve)));
    }

    #[test]
    fn transversality() {
        let h = OneForm::heisenberg(0.5, &MetricChart::default());
        let axis = Polyline::segment(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.2)).unwrap();
        assert!((min_sin_angle(&h, &axis, 4).unwrap() - 1.0).abs() < 1e-12);
        let off = Polyline::segment(Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.2)).unwrap();
        assert!((min_sin_angle(&h, &off, 4).unwrap() - 2.0 / 5f64.sqrt()).abs() < 1e-12);
        let flat = Polyline::segment(Vec3::zeros(), Vec3::x()).unwrap();
        assert!(matches!(
            min_sin_angle(&h, &flat, 4),
            Err(Error::NotTransverse { index: 0 })
        ));
    }

    #[test]
    fn fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v - 1.0).collect();
        let (s, i, r2) = fit_line(&x, &y).unwrap();
        assert!((s - 0.5).abs() < 1e-12 && (i + 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn record_round_trip_is_exact() {
        let b = ConstantsBundle::assemble(BundleInputs {
            theta: 0.37,
            c_m: 1.0 / (2.0 * PI),
            k: 0.731,
            sin_phi0: 0.93,
            alpha_norm: 2.17,
            delta_m: 0.5,
            sigma: 0.5,
            eta: 0.003,
        })
        .unwrap();
        let back = ConstantsBundle::from_record(&Record::parse(&b.to_record().to_text()).unwrap())
            .unwrap();
        assert_eq!(back, b);
        assert_eq!(rho_threshold(&back).unwrap().to_bits(), b.rho.to_bits());
    }

    #[test]
    fn limit_table() {
        let base = ConstantsBundle::assemble(BundleInputs {
            c_m: 2.0,
            k: 3.0,
            alpha_norm: 1.5,
            sin_phi0: 0.8,
            ..BundleInputs::unit(0.5)
        })
        .unwrap();
        let t = c1_limit_check(&base, &[0.9, 0.95, 0.999]).unwrap();
        assert!((t.limit - 1.0 / (2.0 * 11.25f64.sqrt())).abs() < 1e-12);
        assert!(t.monotone && t.finite && t.last_rel_gap < 0.01);
    }
}
