use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {max_dev:e})")]
    NonHermitian { max_dev: f64 },
    #[error("matrix trace is {trace}, expected 1 within 1e-10")]
    TraceNotOne { trace: f64 },
    #[error("fidelity F[{index}] = {value:e} is below -1e-12")]
    NegativeFidelity { index: usize, value: f64 },
    #[error("entry F[{index}] = {value:e} is below -1e-12")]
    NegativeEntry { index: usize, value: f64 },
    #[error("entries sum to {sum}, expected 1 within 1e-8")]
    NotNormalized { sum: f64 },
    #[error("no state found for target {target} after {attempts} draws")]
    RegionUnreachable { target: String, attempts: u64 },
    #[error("both inequality halves are violated; the input is not a valid probability vector")]
    MutualExclusionBreach,
    #[error("invalid quad ({p0}, {p3}, {p4}, {p7}): {reason}")]
    InvalidQuad {
        p0: f64,
        p3: f64,
        p4: f64,
        p7: f64,
        reason: &'static str,
    },
    #[error("argument {value} outside domain {domain}")]
    DomainError { value: f64, domain: &'static str },
    #[error("quad does not lie in region {expected}")]
    RegionMismatch { expected: String },
    #[error("solver did not reach the requested tolerance within {iterations} iterations")]
    NotConverged { iterations: u64 },
}

impl Error {
    /// Short machine-readable tag, used by the CLI error channel.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonHermitian { .. } => "NonHermitian",
            Error::TraceNotOne { .. } => "TraceNotOne",
            Error::NegativeFidelity { .. } => "NegativeFidelity",
            Error::NegativeEntry { .. } => "NegativeEntry",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::RegionUnreachable { .. } => "RegionUnreachable",
            Error::MutualExclusionBreach => "MutualExclusionBreach",
            Error::InvalidQuad { .. } => "InvalidQuad",
            Error::DomainError { .. } => "DomainError",
            Error::RegionMismatch { .. } => "RegionMismatch",
            Error::NotConverged { .. } => "NotConverged",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
