//! Error type shared across the crate.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed image: {0}")]
    Malformed(String),

    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("brain mask is empty (threshold too high?)")]
    EmptyMask,

    #[error("mask has {active} active pixels, fewer than {clusters} clusters")]
    MaskTooSmall { active: usize, clusters: usize },

    #[error("cluster {0} became degenerate (no membership mass)")]
    DegenerateCluster(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
