use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator index {index} out of range for {strands} strands")]
    IndexOutOfRange { index: usize, strands: usize },
    #[error("invalid braid token {0:?}")]
    BadToken(String),
    #[error("a braid needs at least 3 strands, got {0}")]
    TooFewStrands(usize),
    #[error("strand counts differ ({0} vs {1})")]
    StrandMismatch(usize, usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("all coordinates are zero")]
    ZeroVector,
    #[error("scale factor must be positive")]
    NonPositiveScale,
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("no dominant real root: {0}")]
    NoDominantRealRoot(String),
    #[error("not irreducible: {0}")]
    NotIrreducible(String),
    #[error("invalid train track: {0}")]
    InvalidTrack(String),
    #[error("no weight for branch {0}")]
    MissingWeight(String),
    #[error("path is not smooth: {0}")]
    NonSmoothPath(String),
    #[error("no annotation for arc {0}")]
    MissingAnnotation(String),
    #[error("base point lies on a linearity wall: {0}")]
    TieAtBasepoint(String),
    #[error("matrix is singular")]
    Singular,
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
