use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate arrow `{name}`")]
    DuplicateArrow { line: usize, name: String },
    #[error("line {line}: unknown arrow `{name}`")]
    UnknownArrow { line: usize, name: String },
    #[error("unknown builtin tiling `{0}`")]
    UnknownBuiltin(String),
    #[error("invalid parameter for `{name}`: {msg}")]
    InvalidParameter { name: String, msg: String },
    #[error("dimension mismatch: expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vertex {vertex} out of range (tiling has {count} vertices)")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("tiling is invalid: {0}")]
    InvalidTiling(String),
    #[error("weight lattice has torsion (invariant factors {0:?})")]
    Torsion(Vec<i64>),
    #[error("linear program infeasible: {0}")]
    Infeasible(String),
    #[error("no perfect matching exists")]
    NoMatching,
    #[error("inconsistent tiling: {0}")]
    Inconsistent(String),
    #[error("window exhausted at radius {radius}: {msg}")]
    WindowExhausted { radius: u32, msg: String },
    #[error("shortest-path table did not stabilize up to radius {0}")]
    NotStabilized(u32),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("negative height {height} at vertex {vertex} cell ({dx},{dy})")]
    NegativeHeight {
        vertex: usize,
        dx: i32,
        dy: i32,
        height: i64,
    },
    #[error("series error: {0}")]
    Series(String),
    #[error("expression parse error at offset {pos}: {msg}")]
    Expr { pos: usize, msg: String },
    #[error("consistency not certified: {0}")]
    NotCertified(String),
}
