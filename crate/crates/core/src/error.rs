use std::path::PathBuf;

use crate::partition::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("the root node has no parent or sister")]
    RootHasNoParent,

    #[error("invalid node address: level {level}, index {index}")]
    InvalidNode { level: u32, index: u64 },

    #[error("invalid interval [{lo}, {hi})")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("node {0} is not present in the analysis tree")]
    MissingNode(NodeId),

    #[error("node {0} is not a leaf")]
    NotALeaf(NodeId),

    #[error("invalid Beta parameters alpha={alpha}, beta={beta}")]
    InvalidBeta { alpha: f64, beta: f64 },

    #[error("analysis tree invariant violated: {0}")]
    MalformedTree(String),

    #[error("interval [{lo}, {hi}) lies outside the domain")]
    OutsideDomain { lo: f64, hi: f64 },

    #[error("sample {0} lies outside the domain")]
    SampleOutsideDomain(f64),

    #[error("counting answer {answer} exceeds parent count {parent}")]
    InconsistentCount { answer: u64, parent: u64 },

    #[error("no candidate leaf left below the depth cap of {depth_cap}")]
    BudgetExhausted { depth_cap: u32 },

    #[error("leaves do not tile the domain: {0}")]
    NonTiling(String),

    #[error("intervals [{t_lo}, {t_hi}) and [{e_lo}, {e_hi}) are not adjacent")]
    NotAdjacent {
        t_lo: f64,
        t_hi: f64,
        e_lo: f64,
        e_hi: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rejection sampling gave up after {attempts} draws ({accepted} accepted)")]
    TooManyRejections { attempts: u64, accepted: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("csv error at {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
