use alloc::string::String;

/// Error type shared by every module in the engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoreError {
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("empty raster")]
    EmptyRaster,
    #[error("view count mismatch: expected {expected}, got {got}")]
    ViewCountMismatch { expected: usize, got: usize },
    #[error("parameter length mismatch: teacher {teacher}, student {student}")]
    ParamLengthMismatch { teacher: usize, student: usize },
    #[error("missing class probabilities on student box")]
    MissingProbs,
    #[error("detector failed on image {image_id}: {message}")]
    DetectorFailure { image_id: u64, message: String },
    #[error("chip degenerated below minimum area after transform")]
    DegenerateChip,
}
