//! Contact-type 1-forms on the periodic chart and their kernel planes.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_theta, Error, Result};
use crate::fields::{FieldRecipe, HoelderField};
use crate::kv::Record;
use crate::Vec3;

/// Default amplitude of the Hölder perturbation in the `perturbed` model.
pub const DEFAULT_PERTURBATION: f64 = 0.05;

/// Flat chart `[-L/2, L/2]^3` with the Euclidean metric.
///
/// A periodic chart is the 3-torus and distances wrap. The contact-type
/// models are not periodic (their `x dy - y dx` part grows linearly), so
/// their chart only fixes the box over which Hölder norms are bounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricChart {
    pub period: f64,
    pub periodic: bool,
}

impl Default for MetricChart {
    fn default() -> Self {
        Self {
            period: 1.0,
            periodic: true,
        }
    }
}

impl MetricChart {
    pub fn new(period: f64) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::OutOfRange {
                name: "period",
                range: "(0, inf)",
                value: period,
            });
        }
        Ok(Self {
            period,
            periodic: true,
        })
    }

    pub fn non_periodic(self) -> Self {
        Self {
            periodic: false,
            ..self
        }
    }

    /// Shortest representative of `d` modulo the period lattice.
    pub fn wrap(&self, d: Vec3) -> Vec3 {
        if self.periodic {
            d.map(|c| c - self.period * (c / self.period).round())
        } else {
            d
        }
    }

    /// Flat torus distance.
    pub fn distance(&self, a: &Vec3, b: &Vec3) -> f64 {
        self.wrap(b - a).norm()
    }

    pub fn diameter(&self) -> f64 {
        3f64.sqrt() * self.period
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Heisenberg,
    Perturbed,
    Foliation,
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heisenberg" => Ok(Self::Heisenberg),
            "perturbed" => Ok(Self::Perturbed),
            "foliation" => Ok(Self::Foliation),
            other => Err(Error::Invalid(format!(
                "unknown model kind `{other}` (expected heisenberg, perturbed or foliation)"
            ))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Heisenberg => "heisenberg",
            Self::Perturbed => "perturbed",
            Self::Foliation => "foliation",
        })
    }
}

#[derive(Debug, Clone)]
enum Coefficients {
    /// `(y/2, -x/2, 1)`
    Heisenberg,
    /// `dz`
    Foliation,
    /// `((y + eps Q)/2, -(x + eps P)/2, 1)`
    Perturbed {
        p: HoelderField,
        q: HoelderField,
        eps: f64,
    },
}

impl Coefficients {
    #[inline]
    fn eval(&self, x: &Vec3) -> Vec3 {
        match self {
            Self::Heisenberg => Vec3::new(0.5 * x.y, -0.5 * x.x, 1.0),
            Self::Foliation => Vec3::new(0.0, 0.0, 1.0),
            Self::Perturbed { p, q, eps } => Vec3::new(
                0.5 * (x.y + eps * q.eval(x)),
                -0.5 * (x.x + eps * p.eval(x)),
                1.0,
            ),
        }
    }
}

/// Per-coefficient sup and Hölder seminorm bounds over the chart box, and a
/// lower bound on the pointwise dual norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientBounds {
    pub sup: [f64; 3],
    pub seminorm: [f64; 3],
    pub min_norm: f64,
}

impl CoefficientBounds {
    /// `max_i (sup_i + [a_i]_theta)`.
    pub fn raw_norm(&self) -> f64 {
        (0..3)
            .map(|i| self.sup[i] + self.seminorm[i])
            .fold(0.0, f64::max)
    }

    /// Bound for `alpha / |alpha|`: coefficients are at most 1 in modulus and
    /// `|v/|v| - w/|w|| <= |v - w| / min(|v|, |w|)`.
    pub fn unit_norm(&self) -> f64 {
        let semi = self.seminorm.iter().map(|s| s * s).sum::<f64>().sqrt();
        1.0 + semi / self.min_norm
    }

    fn scaled(&self, s: f64) -> Self {
        Self {
            sup: self.sup.map(|v| v * s),
            seminorm: self.seminorm.map(|v| v * s),
            min_norm: self.min_norm * s,
        }
    }
}

/// A nowhere-vanishing 1-form whose kernel is the horizontal distribution.
#[derive(Debug, Clone)]
pub struct OneForm {
    coeffs: Arc<Coefficients>,
    scale: f64,
    normalized: bool,
    pub theta: f64,
    pub chart: MetricChart,
    /// Bounds for the raw (unnormalized, scaled) coefficients.
    pub bounds: CoefficientBounds,
    /// Certified upper bound for `||alpha||_{C^theta}` of the form as evaluated.
    pub norm_upper: f64,
}

impl OneForm {
    fn from_parts(
        coeffs: Coefficients,
        theta: f64,
        chart: MetricChart,
        bounds: CoefficientBounds,
    ) -> Self {
        Self {
            coeffs: Arc::new(coeffs),
            scale: 1.0,
            normalized: false,
            theta,
            chart,
            norm_upper: bounds.raw_norm(),
            bounds,
        }
    }

    pub fn heisenberg(theta: f64, chart: &MetricChart) -> Self {
        let chart = chart.non_periodic();
        let half = 0.5 * chart.period;
        let semi = 0.5 * chart.diameter().powf(1.0 - theta);
        Self::from_parts(
            Coefficients::Heisenberg,
            theta,
            chart,
            CoefficientBounds {
                sup: [0.5 * half, 0.5 * half, 1.0],
                seminorm: [semi, semi, 0.0],
                min_norm: 1.0,
            },
        )
    }

    pub fn dz(theta: f64) -> Self {
        Self::from_parts(
            Coefficients::Foliation,
            theta,
            MetricChart::default(),
            CoefficientBounds {
                sup: [0.0, 0.0, 1.0],
                seminorm: [0.0; 3],
                min_norm: 1.0,
            },
        )
    }

    pub fn perturbed(p: HoelderField, q: HoelderField, eps: f64, chart: &MetricChart) -> Self {
        let chart = chart.non_periodic();
        let theta = p.theta;
        let half = 0.5 * chart.period;
        let lin = chart.diameter().powf(1.0 - theta);
        let bounds = CoefficientBounds {
            sup: [
                0.5 * (half + eps * q.sup_bound()),
                0.5 * (half + eps * p.sup_bound()),
                1.0,
            ],
            seminorm: [
                0.5 * (lin + eps * q.seminorm_bound()),
                0.5 * (lin + eps * p.seminorm_bound()),
                0.0,
            ],
            min_norm: 1.0,
        };
        Self::from_parts(Coefficients::Perturbed { p, q, eps }, theta, chart, bounds)
    }

    /// `s * alpha` for `s > 0`.
    pub fn scaled(&self, s: f64) -> Self {
        assert!(s > 0.0, "scale must be positive");
        let mut out = self.clone();
        out.scale *= s;
        out.bounds = self.bounds.scaled(s);
        if !out.normalized {
            out.norm_upper = out.bounds.raw_norm();
        }
        out
    }

    /// `alpha / |alpha|_g`, i.e. the form with `alpha(X) = 1` on the unit normal.
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        out.normalized = true;
        out.norm_upper = self.bounds.unit_norm();
        out
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    #[inline]
    pub fn coefficients(&self, x: &Vec3) -> Vec3 {
        let a = self.coeffs.eval(x) * self.scale;
        if self.normalized {
            a / a.norm()
        } else {
            a
        }
    }

    #[inline]
    pub fn eval(&self, x: &Vec3, v: &Vec3) -> f64 {
        self.coefficients(x).dot(v)
    }

    /// Unit normal to the kernel plane at `x`.
    #[inline]
    pub fn unit_normal(&self, x: &Vec3) -> Vec3 {
        self.coeffs.eval(x).normalize()
    }
}

pub fn eval_form(alpha: &OneForm, x: &Vec3, v: &Vec3) -> f64 {
    alpha.eval(x, v)
}

pub fn dual_norm(alpha: &OneForm, x: &Vec3) -> f64 {
    alpha.coefficients(x).norm()
}

/// Orthonormal basis of the plane orthogonal to the unit vector `n`.
///
/// The axis most aligned with `n` is dropped (the lower index is kept on
/// ties) and the other two are Gram-Schmidt projected in index order. The
/// frame is continuous wherever the dropped axis does not change.
#[inline]
pub fn frame_from_normal(n: &Vec3) -> (Vec3, Vec3) {
    let abs = n.abs();
    let mut drop = 0;
    for i in 1..3 {
        if abs[i] >= abs[drop] {
            drop = i;
        }
    }
    let (i, j) = match drop {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let mut a = Vec3::zeros();
    a[i] = 1.0;
    let mut b = Vec3::zeros();
    b[j] = 1.0;
    let e1 = (a - n * n[i]).normalize();
    let b = b - n * n[j];
    let e2 = (b - e1 * e1.dot(&b)).normalize();
    (e1, e2)
}

pub fn kernel_frame(alpha: &OneForm, x: &Vec3) -> (Vec3, Vec3) {
    frame_from_normal(&alpha.unit_normal(x))
}

/// `sin` of the angle between `v` and the kernel plane at `x`.
pub fn sin_angle(alpha: &OneForm, x: &Vec3, v: &Vec3) -> Result<f64> {
    let vn = v.norm();
    if vn == 0.0 {
        return Err(Error::ZeroVector);
    }
    let a = alpha.coefficients(x);
    Ok((a.dot(v).abs() / (a.norm() * vn)).clamp(0.0, 1.0))
}

/// Serializable description of a model; rebuilding it gives the same form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub kind: ModelKind,
    pub theta: f64,
    pub amplitude: f64,
    pub seed: u64,
    pub lambda: f64,
    pub depth: usize,
    pub period: f64,
}

impl ModelDescriptor {
    pub fn new(kind: ModelKind, theta: f64, amplitude: f64, seed: u64) -> Self {
        Self {
            kind,
            theta,
            amplitude,
            seed,
            lambda: 2.0,
            depth: 12,
            period: 1.0,
        }
    }

    pub fn to_record(&self) -> Record {
        let mut r = Record::new();
        r.set("kind", self.kind)
            .set("theta", self.theta)
            .set("amplitude", self.amplitude)
            .set("seed", self.seed)
            .set("lambda", self.lambda)
            .set("depth", self.depth)
            .set("period", self.period);
        r
    }

    pub fn from_record(r: &Record) -> Result<Self> {
        let unknown = r.unknown_keys(&[
            "kind",
            "theta",
            "amplitude",
            "seed",
            "lambda",
            "depth",
            "period",
        ]);
        if !unknown.is_empty() {
            return Err(Error::UnknownKeys(unknown));
        }
        let kind: ModelKind = r.require::<String>("kind")?.parse()?;
        let d = Self::new(kind, 0.5, DEFAULT_PERTURBATION, 0);
        Ok(Self {
            kind,
            theta: r.get("theta")?.unwrap_or(d.theta),
            amplitude: r.get("amplitude")?.unwrap_or(d.amplitude),
            seed: r.get("seed")?.unwrap_or(d.seed),
            lambda: r.get("lambda")?.unwrap_or(d.lambda),
            depth: r.get("depth")?.unwrap_or(d.depth),
            period: r.get("period")?.unwrap_or(d.period),
        })
    }

    pub fn build(&self) -> Result<(OneForm, DistributionModel)> {
        build_model_with(self)
    }
}

#[derive(Debug, Clone)]
pub struct DistributionModel {
    pub kind: ModelKind,
    /// Recipes of the `(P, Q)` fields and the amplitude they enter with.
    pub perturbation: Option<(FieldRecipe, FieldRecipe, f64)>,
    pub description: String,
    pub chart: MetricChart,
}

pub fn build_model(
    kind: ModelKind,
    theta: f64,
    amplitude: f64,
    seed: u64,
) -> Result<(OneForm, DistributionModel)> {
    build_model_with(&ModelDescriptor::new(kind, theta, amplitude, seed))
}

fn build_model_with(d: &ModelDescriptor) -> Result<(OneForm, DistributionModel)> {
    check_theta(d.theta)?;
    let chart = MetricChart::new(d.period)?.non_periodic();
    Ok(match d.kind {
        ModelKind::Heisenberg => (
            OneForm::heisenberg(d.theta, &chart),
            DistributionModel {
                kind: d.kind,
                perturbation: None,
                description: "dz - (x dy - y dx)/2, smooth and bracket generating".into(),
                chart,
            },
        ),
        ModelKind::Foliation => (
            OneForm {
                chart,
                ..OneForm::dz(d.theta)
            },
            DistributionModel {
                kind: d.kind,
                perturbation: None,
                description: "dz, integrable (horizontal planes z = const)".into(),
                chart,
            },
        ),
        ModelKind::Perturbed => {
            if !(d.amplitude >= 0.0) {
                return Err(Error::OutOfRange {
                    name: "amplitude",
                    range: "[0, inf)",
                    value: d.amplitude,
                });
            }
            let rp = FieldRecipe {
                theta: d.theta,
                lambda: d.lambda,
                depth: d.depth,
                amplitude: 1.0,
                seed: d.seed,
                period: d.period,
            };
            let rq = FieldRecipe {
                seed: d.seed.wrapping_add(1),
                ..rp
            };
            let p = rp.build()?;
            let q = rq.build()?;
            (
                OneForm::perturbed(p, q, d.amplitude, &chart),
                DistributionModel {
                    kind: d.kind,
                    perturbation: Some((rp, rq, d.amplitude)),
                    description: format!(
                        "dz - ((x + eps P) dy - (y + eps Q) dx)/2 with C^{} fields, eps = {}",
                        d.theta, d.amplitude
                    ),
                    chart,
                },
            )
        }
    })
}
