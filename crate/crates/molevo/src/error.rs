use thiserror::Error;

/// Errors produced by sequence handling, parsing, and evaluation.
#[derive(Debug, Error)]
pub enum MolevoError {
    #[error("invalid DNA base '{base}' at position {position}")]
    InvalidBase { base: char, position: usize },

    #[error("invalid amino acid '{residue}' at position {position} in sequence '{id}'")]
    InvalidResidue {
        id: String,
        residue: char,
        position: usize,
    },

    #[error("FASTA parse error: {0}")]
    Fasta(String),

    #[error("empty record id")]
    EmptyId,

    #[error("zero-length sequence requested")]
    ZeroLength,

    #[error("empty protein")]
    EmptyProtein,

    #[error("pattern parse error at position {position}: {message}")]
    Pattern { position: usize, message: String },

    #[error("objective vector length mismatch: {left} vs {right}")]
    VectorLength { left: usize, right: usize },

    #[error("invalid config: {field}: {message}")]
    Config { field: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, MolevoError>;
