use thiserror::Error;

/// Coarse classification used by the command line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Data,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("input contains no records")]
    EmptyInput,
    #[error("time window [{start}, {end}) contains no contacts")]
    EmptyWindow { start: i64, end: i64 },
    #[error("undirected graphs with self-loops are not supported")]
    UnsupportedPairSpace,
    #[error("pair ({0}, {1}) is not admissible in this pair space")]
    InadmissiblePair(usize, usize),
    #[error("pair spaces differ: model has {model}, graph has {graph}")]
    PairSpaceMismatch { model: String, graph: String },
    #[error("block label {label} of node {node} is outside [0, {blocks})")]
    LabelOutOfRange { node: usize, label: usize, blocks: usize },
    #[error("block {0} has no nodes")]
    EmptyBlock(usize),
    #[error("assignment covers {got} nodes, graph has {expected}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("block {block} has zero {direction} degree")]
    ZeroDegreeBlock { block: usize, direction: &'static str },
    #[error("graph has no multi-edges")]
    EmptyGraph,
    #[error("family {0} requires a block assignment")]
    BlocksRequired(&'static str),
    #[error("operation not available for family {0}")]
    FamilyMismatch(&'static str),
    #[error("value {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },
    #[error("objective is not finite at {probe:?}")]
    NonFinite { probe: Vec<f64> },
    #[error("starting point violates the box constraints at coordinate {0}")]
    Infeasible(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("sample has zero variance")]
    ZeroVariance,
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("histograms have different bins")]
    BinMismatch,
    #[error("only {0} bin(s) left after merging expected counts")]
    TooFewBins(usize),
    #[error("{skipped} of {total} realizations failed")]
    TooManySkipped { skipped: usize, total: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain { .. }
            | Error::NonFinite { .. }
            | Error::ZeroVariance
            | Error::NoConvergence(_)
            | Error::Consistency(_)
            | Error::TooFewBins(_)
            | Error::TooManySkipped { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Data,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
