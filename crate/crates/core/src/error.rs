//! Error types shared by all modules.

/// Errors fall into two categories: usage errors (bad arguments, dimension
/// mismatches) and numerical failures (convergence, residue checks). The
/// category determines the process exit code used by the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian: max |A - A^H| entry = {deviation:.3e} (tolerance {tol:.1e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("no eigenvalue within {tol:.1e} of m = {m}")]
    EigenvalueMatch { m: f64, tol: f64 },

    #[error("residual imaginary part {0:.3e} exceeds tolerance")]
    ImaginaryResidue(f64),

    #[error("probability table violates invariants: {0}")]
    BadProbabilities(String),

    #[error("engines disagree: |trace - closed form| = {0:.3e}")]
    EngineDisagreement(f64),

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by invalid caller input rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::DimMismatch(_)
                | Error::InvalidArgument(_)
                | Error::NonFinite(_)
                | Error::NotHermitian { .. }
                | Error::Io { .. }
        )
    }

    /// Process exit code convention: 2 for usage errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        if self.is_usage() {
            2
        } else {
            3
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
