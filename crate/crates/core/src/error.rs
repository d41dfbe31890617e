use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong inside the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: hypervectors need at least 2 entries")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("vertex {vertex} listed twice in hyperedge {edge}")]
    DuplicateMember { edge: usize, vertex: usize },

    #[error("hyperedge {0} is empty")]
    EmptyHyperedge(usize),

    #[error("attribute list has {got} entries but the graph has {n} vertices")]
    AttributeLength { got: usize, n: usize },

    #[error("unknown attribute key {0:?}")]
    UnknownKey(String),

    #[error("duplicate key {0:?}")]
    DuplicateKey(String),

    #[error("malformed input at line {line}: {reason}")]
    Malformed { line: usize, reason: String },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("codebook holds {available} {role} vectors, {requested} requested")]
    CapacityExceeded {
        role: &'static str,
        requested: usize,
        available: usize,
    },

    #[error("operation needs an embedding in mode {expected}, got {got}")]
    WrongMode {
        expected: &'static str,
        got: &'static str,
    },

    #[error("embedding was made with codebook {embedding:016x}, not {codebook:016x}")]
    CodebookMismatch { embedding: u64, codebook: u64 },

    #[error("bad magic bytes")]
    BadMagic,

    #[error("unsupported format version {0}")]
    VersionMismatch(u16),

    #[error("truncated payload: need {needed} bytes, found {found}")]
    Truncated { needed: usize, found: usize },

    #[error("fingerprint mismatch: header says {stored:016x}, content hashes to {computed:016x}")]
    FingerprintMismatch { stored: u64, computed: u64 },

    #[error("eigenvalue {value:e} below tolerance -{tolerance:e}")]
    NegativeEigenvalue { value: f64, tolerance: f64 },

    #[error("training diverged at epoch {epoch} (last finite loss {last_loss:e})")]
    Diverged { epoch: usize, last_loss: f64 },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by the filesystem rather than by the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Reads a UTF-8 file; undecodable content is malformed input, not an I/O
/// failure.
pub(crate) fn read_text(path: &std::path::Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    String::from_utf8(bytes).map_err(|e| Error::Malformed {
        line: 1,
        reason: format!("not valid UTF-8: {e}"),
    })
}
