//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A feature vector and a memory (or two vectors) disagree on dimension.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// An operation needs at least one example in the named class.
    #[error("class {class} is empty")]
    EmptyClass { class: &'static str },

    /// The same vector appears in both classes, so no hyperplane separates them.
    #[error("vector appears in both classes (positive index {pos_index}, negative index {neg_index})")]
    SharedVector { pos_index: usize, neg_index: usize },

    /// Geometric quantities along the weight direction need a nonzero weight vector.
    #[error("weight vector has zero norm: projection direction is undefined")]
    ZeroWeightVector,

    /// A parameter violated its documented range or relation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// No embedded glyph template exists for this character.
    #[error("no glyph template for character {0:?}")]
    UnknownCharacter(char),

    /// A data file failed to parse; `line` is 1-based.
    #[error("malformed input at line {line}: {reason}")]
    Format { line: usize, reason: String },

    /// A weight or threshold left the finite range during training.
    #[error("training diverged at epoch {epoch}: {what} became non-finite")]
    NonFinite { epoch: u32, what: &'static str },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn format(line: usize, reason: impl Into<String>) -> Self {
        Error::Format {
            line,
            reason: reason.into(),
        }
    }
}
