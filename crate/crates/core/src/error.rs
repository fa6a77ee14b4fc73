use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex index {index} out of range for graph with {vertex_count} vertices")]
    VertexOutOfRange { index: usize, vertex_count: usize },

    #[error("edge ({0}, {1}) listed more than once")]
    DuplicateEdge(usize, usize),

    #[error("invalid edge weight {weight} on ({i}, {j})")]
    InvalidWeight { i: usize, j: usize, weight: f64 },

    #[error("graph must have at least one vertex")]
    EmptyGraph,

    #[error("graph has zero volume")]
    ZeroVolume,

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("invalid probability {value} at index {index}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("joint table contains a zero entry at ({0}, {1})")]
    ZeroEntry(usize, usize),

    #[error("ragged or empty table")]
    BadShape,

    #[error("expected a square table, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("alphabet mismatch: expected {expected}, got {got}")]
    AlphabetMismatch { expected: usize, got: usize },

    #[error("tree does not match graph: {0}")]
    TreeMismatch(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("nodes {0} and {1} are not distinct children of the root")]
    NotSiblings(usize, usize),

    #[error("tree is not a perfect x/y matching tree: {0}")]
    NotMatching(String),

    #[error("k = {k} requires more than k points, got {n}")]
    TooFewPoints { k: usize, n: usize },

    #[error("points must have dimension >= 1 and agree in dimension")]
    BadDimension,

    #[error("invalid batch: {0}")]
    InvalidBatch(String),

    #[error("negative coefficient {0}")]
    NegativeCoefficient(f64),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
