//! Correlation coefficients of spin singlets under outcome relabeling.
//!
//! The library builds spin-j observables in arbitrary directions, assigns
//! arbitrary real labels to their outcomes, constructs the singlet states
//! those observables are measured on, and evaluates joint probabilities and
//! correlation coefficients two ways: through a Born-rule trace engine and
//! through literal transcriptions of the known closed forms. A verifier
//! drives the two routes against each other; confirmed disagreements are
//! recorded as machine-readable errata instead of being patched. On top of
//! that sit CHSH evaluation and angle-space search, the enhancement-domain
//! analysis of combined coefficients, and the step-function Fourier buildup.

pub mod closedform;
pub mod correlate;
pub mod error;
pub mod inequalities;
pub mod linalg;
pub mod spin;
pub mod states;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{Complex64, ComplexMatrix, EigenSystem};
pub use spin::{Direction, LabelVector, SpinMagnitude, SpinObservable};
pub use states::{DensityMatrix, SingletFamily, SingletState, StateVector};
pub use tol::Tolerances;
