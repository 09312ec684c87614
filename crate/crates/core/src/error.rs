use thiserror::Error;

use crate::spaces::MetricViolation;

/// Which configured limit was hit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cap {
    Points,
    Dimension,
    Vertices,
    Iterations,
}

impl Cap {
    pub fn name(self) -> &'static str {
        match self {
            Cap::Points => "points",
            Cap::Dimension => "dimension",
            Cap::Vertices => "vertices",
            Cap::Iterations => "iterations",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed linear program: {0}")]
    MalformedProgram(String),
    #[error("polytope is unbounded")]
    UnboundedPolytope,
    #[error("polytope is empty")]
    EmptyPolytope,
    #[error("polytope is not full-dimensional (affine rank {rank} < {dim})")]
    DegeneratePolytope { rank: usize, dim: usize },
    #[error("{} cap exceeded: {value} > configured limit {limit}", cap.name())]
    CapExceeded { cap: Cap, limit: usize, value: usize },
    #[error("invalid metric: {}", summarize(.0))]
    InvalidMetric(Vec<MetricViolation>),
    #[error("invalid norm: {0}")]
    InvalidNorm(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("exponent must be a rational >= 1, got {0}")]
    InvalidExponent(String),
    #[error("point {0} is not in the target space")]
    PointOutOfRange(usize),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("constraint generation did not converge in {iterations} iterations (bounds [{lower}, {upper}])")]
    NonConvergence { iterations: usize, lower: String, upper: String },
    #[error("certificate atom {0} lies outside its unit ball")]
    SupportOutsideBall(usize),
    #[error("operation requires a scalar codomain, found dimension {0}")]
    NonScalarCodomain(usize),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver failure: {0}")]
    Solver(String),
}

fn summarize(v: &[MetricViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl Error {
    /// True when the failure is a configured limit rather than bad input.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
