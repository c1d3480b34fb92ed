use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not a bosonic mode: subsystem {0}")]
    NotBosonic(usize),

    #[error("not a qubit: subsystem {0}")]
    NotQubit(usize),

    #[error("invalid space layout: {0}")]
    Layout(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("spectral singularity regime: {0}")]
    SpectralSingularity(String),

    #[error("exceptional point: supermode map singular (lambda = 0)")]
    SingularSupermodes,

    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),

    #[error("ill-conditioned operator (condition ~ {condition:.3e}): {context}")]
    IllConditioned { condition: f64, context: String },

    #[error("eigenvector matching unreliable near EP (condition ~ {0:.3e})")]
    NearExceptionalPoint(f64),

    #[error("generator is PT-symmetric; cannot fit")]
    Unidentifiable,

    #[error("sweep failed at {parameter} = {value}: {source}")]
    AtGridPoint {
        parameter: String,
        value: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Unwraps grid-point context, returning the root cause.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtGridPoint { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
