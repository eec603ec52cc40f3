//! Centralized numerical tolerances.
//!
//! Every threshold used by the library lives here so that no module carries
//! ad-hoc magic numbers. Values are grouped by what they bound, not by where
//! they are used.

/// Tolerance configuration shared across the library.
///
/// `Tolerances::default()` gives the values every test and acceptance
/// criterion is pinned to; the CLI can override individual fields.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Max entrywise |A - A^H| for a matrix to count as Hermitian.
    pub hermiticity: f64,
    /// Eigenpair residual ‖A·v − λ·v‖₂ relative to ‖A‖_F.
    pub eig_residual: f64,
    /// Entrywise |V^H V − I| for eigenvector orthonormality.
    pub orthonormality: f64,
    /// Matching eigenvalues of a direction operator to the m grid.
    pub eigenvalue_match: f64,
    /// Eigenvalues closer than this are grouped into one eigenspace.
    pub degeneracy: f64,
    /// Projector identities (idempotency, completeness, orthogonality).
    pub projector: f64,
    /// State vectors must be normalized to within this before use.
    pub state_norm: f64,
    /// Max imaginary residue tolerated when a trace must be real.
    pub imaginary_residue: f64,
    /// Probabilities may undershoot 0 / overshoot 1 by this much before error.
    pub probability_slack: f64,
    /// Joint probability tables must sum to 1 within this.
    pub table_sum: f64,
    /// Trace engine vs. closed form agreement required by the verifier.
    pub oracle_equivalence: f64,
    /// Agreement required when the CHSH value is computed by both engines.
    pub engine_agreement: f64,
    /// Max off-anti-diagonal joint probability for the uniqueness property.
    pub uniqueness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-12,
            eig_residual: 1e-10,
            orthonormality: 1e-10,
            eigenvalue_match: 1e-8,
            degeneracy: 1e-8,
            projector: 1e-10,
            state_norm: 1e-10,
            imaginary_residue: 1e-10,
            probability_slack: 1e-10,
            table_sum: 1e-10,
            oracle_equivalence: 1e-9,
            engine_agreement: 1e-8,
            uniqueness: 1e-10,
        }
    }
}

/// Cap on cyclic Jacobi sweeps before reporting a convergence failure.
pub const MAX_JACOBI_SWEEPS: usize = 500;

/// Kronecker products larger than this dimension are refused.
pub const MAX_KRON_DIM: usize = 4096;

/// Largest supported 2j (keeps every eigenproblem at dimension ≤ 26).
pub const MAX_TWO_J: u32 = 25;

/// Kahan-compensated summation kicks in above this many series terms.
pub const KAHAN_THRESHOLD: usize = 1000;
