use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({u}, {v}) has non-positive or non-finite weight {weight}")]
    NonPositiveWeight { u: usize, v: usize, weight: f64 },

    #[error("vertex index {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("undirected network has conflicting weights on edge ({u}, {v})")]
    AsymmetricUndirected { u: usize, v: usize },

    #[error("edge ({u}, {v}) listed twice with different weights")]
    DuplicateEdge { u: usize, v: usize },

    #[error("vertex {vertex} has zero out-degree")]
    ZeroOutDegree { vertex: usize },

    #[error("network is not strongly connected")]
    NotStronglyConnected,

    #[error("numerical iteration did not converge (residual {residual:e})")]
    NumericalNonConvergence { residual: f64 },

    #[error("undirected degree requested for a directed network")]
    ModeInvalidForDirected,

    #[error("operation requires undirected networks")]
    DirectedInput,

    #[error("vertex attributes `{0}` missing")]
    MissingAttributes(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid marginal: {0}")]
    MarginalInvalid(String),

    #[error("numerical underflow in entropic solver: {0}")]
    NumericalUnderflow(String),

    #[error("policy iteration did not terminate within {cap} iterations")]
    IterationCapExceeded { cap: usize },

    #[error("instance with {states} joint states exceeds the limit of {limit}")]
    InstanceTooLarge { states: usize, limit: usize },

    #[error("linear program is infeasible or unbounded: {0}")]
    LinearProgram(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("map is not surjective: target vertex {missing} has an empty fiber")]
    NotSurjective { missing: usize },

    #[error("map is not a factor map (max violation {max_violation:e})")]
    NotAFactor { max_violation: f64 },

    #[error("factor maps do not share a common target network")]
    CommonFactorMismatch,

    #[error("random generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("block labels do not match the alignment: {0}")]
    LabelMismatch(String),

    #[error("train/test split is degenerate: {0}")]
    DegenerateSplit(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },

    #[error("{path}: {source}")]
    InvariantViolation {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("missing file {0}")]
    MissingFile(PathBuf),

    #[error("edge ({u}, {v}) joins nodes of graphs {graph_u} and {graph_v}")]
    CrossGraphEdge {
        u: usize,
        v: usize,
        graph_u: usize,
        graph_v: usize,
    },

    #[error("{path}: index {index} out of range at line {line}")]
    IndexError {
        path: PathBuf,
        line: usize,
        index: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveWeight { .. } => "NonPositiveWeight",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::AsymmetricUndirected { .. } => "AsymmetricUndirected",
            Error::DuplicateEdge { .. } => "DuplicateEdge",
            Error::ZeroOutDegree { .. } => "ZeroOutDegree",
            Error::NotStronglyConnected => "NotStronglyConnected",
            Error::NumericalNonConvergence { .. } => "NumericalNonConvergence",
            Error::ModeInvalidForDirected => "ModeInvalidForDirected",
            Error::DirectedInput => "DirectedInput",
            Error::MissingAttributes(_) => "MissingAttributes",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::MarginalInvalid(_) => "MarginalInvalid",
            Error::NumericalUnderflow(_) => "NumericalUnderflow",
            Error::IterationCapExceeded { .. } => "IterationCapExceeded",
            Error::InstanceTooLarge { .. } => "InstanceTooLarge",
            Error::LinearProgram(_) => "LinearProgram",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::NotSurjective { .. } => "NotSurjective",
            Error::NotAFactor { .. } => "NotAFactor",
            Error::CommonFactorMismatch => "CommonFactorMismatch",
            Error::GenerationFailed { .. } => "GenerationFailed",
            Error::LabelMismatch(_) => "LabelMismatch",
            Error::DegenerateSplit(_) => "DegenerateSplit",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Parse { .. } => "ParseError",
            Error::InvariantViolation { .. } => "InvariantViolation",
            Error::MissingFile(_) => "MissingFile",
            Error::CrossGraphEdge { .. } => "CrossGraphEdge",
            Error::IndexError { .. } => "IndexError",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
