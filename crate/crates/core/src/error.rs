use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed mesh or ground-truth text. `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("face {face}: vertex index {index} out of range (vertex count {count})")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        count: usize,
    },

    #[error("face {face} repeats a vertex index")]
    DegenerateFace { face: usize },

    #[error("mesh has no vertices")]
    EmptyMesh,

    #[error("bounding box diagonal is zero, cannot define a base scale")]
    ZeroDiagonal,

    #[error("vertex {index} out of range (vertex count {count})")]
    VertexOutOfRange { index: usize, count: usize },

    #[error("exhaustive refinement supports at most {max} candidates, got {got}")]
    TooManyCandidates { max: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
