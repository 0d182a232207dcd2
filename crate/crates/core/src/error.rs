use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors shared across all modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A node id outside `0..n`.
    IndexError { index: usize, len: usize },
    /// The same unordered edge appears twice.
    DuplicateEdge(usize, usize),
    /// An edge from a node to itself.
    SelfLoop(usize),
    /// Tensor/parameter shapes do not line up.
    DimensionError(String),
    /// A request exceeds what the structure can hold (too many edges, too
    /// large an eigenproblem, ...).
    CapacityError(String),
    /// An attribute has the wrong kind for the operation.
    TypeError(String),
    /// The operation needs at least one edge.
    EmptyGraph,
    /// Schemas disagree or a referenced column does not exist.
    SchemaError(String),
    /// An operation was called out of order (e.g. backward before forward).
    StateError(&'static str),
    /// A value violates the operation's contract.
    ValueError(String),
    /// Not enough samples to estimate anything.
    InsufficientData,
    /// The input collection is empty.
    EmptyData,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::IndexError { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::DuplicateEdge(u, v) => write!(f, "duplicate edge ({u}, {v})"),
            Error::SelfLoop(u) => write!(f, "self-loop at node {u}"),
            Error::DimensionError(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::CapacityError(msg) => write!(f, "capacity exceeded: {msg}"),
            Error::TypeError(msg) => write!(f, "type error: {msg}"),
            Error::EmptyGraph => write!(f, "operation requires a graph with edges"),
            Error::SchemaError(msg) => write!(f, "schema error: {msg}"),
            Error::StateError(msg) => write!(f, "invalid state: {msg}"),
            Error::ValueError(msg) => write!(f, "invalid value: {msg}"),
            Error::InsufficientData => write!(f, "not enough data"),
            Error::EmptyData => write!(f, "empty input"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
