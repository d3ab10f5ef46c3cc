use thiserror::Error;

/// Errors reported by frame operations.
///
/// Domain failures (a precondition that does not hold for the given data)
/// are distinguished from structural failures (shapes that cannot be
/// combined at all) so that callers and the CLI can map them to stable
/// error codes.
#[derive(Debug, Error)]
pub enum FrameError {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("shape mismatch in {context}: {detail}")]
    ShapeMismatch {
        context: &'static str,
        detail: String,
    },

    #[error("not a frame: {0}")]
    NotAFrame(String),

    #[error("not a dual pair: {0}")]
    NotADualPair(String),

    #[error("predicate failed: {0}")]
    PredicateFailed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("combinatorial guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("index {index} out of range for {context} of length {len}")]
    IndexOutOfRange {
        context: &'static str,
        index: usize,
        len: usize,
    },

    #[error("construction hypotheses failed: {0}")]
    HypothesesFailed(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid frame data: {0}")]
    InvalidFrameData(String),
}

impl FrameError {
    /// Stable machine-readable error code, used by the CLI error JSON.
    pub fn code(&self) -> &'static str {
        match self {
            FrameError::DimensionMismatch { .. } => "dimension_mismatch",
            FrameError::ShapeMismatch { .. } => "shape_mismatch",
            FrameError::NotAFrame(_) => "not_a_frame",
            FrameError::NotADualPair(_) => "not_a_dual_pair",
            FrameError::PredicateFailed(_) => "predicate_failed",
            FrameError::InvalidArgument(_) => "invalid_argument",
            FrameError::GuardExceeded(_) => "guard_exceeded",
            FrameError::IndexOutOfRange { .. } => "index_out_of_range",
            FrameError::HypothesesFailed(_) => "hypotheses_failed",
            FrameError::Json(_) => "json",
            FrameError::InvalidFrameData(_) => "invalid_frame_data",
        }
    }
}
