use thiserror::Error;

use crate::distance::DistanceEstimate;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} must lie in {range}, got {value}")]
    OutOfRange {
        name: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("degenerate domain: axis {axis} has zero extent")]
    DegenerateDomain { axis: usize },

    #[error("zero vector has no angle to the distribution")]
    ZeroVector,

    #[error("polyline segment {index} has zero length")]
    ZeroSegment { index: usize },

    #[error("polyline must be closed")]
    OpenPolyline,

    #[error("loop length {length} is not below delta_M = {delta_m} (filling needs volume less than delta_M)")]
    LoopTooLong { length: f64, delta_m: f64 },

    #[error("disk is not admissible: max(diam, length) = {size} is not below sigma = {sigma}")]
    NotAdmissible { size: f64, sigma: f64 },

    #[error("degenerate disk: {0}")]
    DegenerateDisk(String),

    #[error("curve is not transverse to the distribution at sample {index}")]
    NotTransverse { index: usize },

    #[error("length {length} is not below rho = {rho}")]
    AboveThreshold { length: f64, rho: f64 },

    #[error("sin(phi_0) must be positive")]
    HorizontalCurve,

    #[error("estimate did not reach the endpoint within tolerance (gap {}, defect {})", .best.endpoint_gap, .best.defect)]
    Unconverged { best: Box<DistanceEstimate> },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),

    #[error("missing key `{0}`")]
    MissingKey(String),

    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "theta",
            range: "(0,1)",
            value: theta,
        })
    }
}
