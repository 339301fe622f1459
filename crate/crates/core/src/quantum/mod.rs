//! Preparations, measurements and the one-shot distinguishability theorem.

mod density;
mod measurement;
mod ops;
mod theorem;
mod unitary;

pub use density::DensityMatrix;
pub use measurement::{Grouping, LabelPartition, Outcome, OutcomeDistribution, Povm, ProjectiveInstrument};
pub(crate) use ops::eigen_instrument;
pub use ops::{
    apply_instrument, apply_unitary, are_orthogonal, mixture_eigen_instrument, outcome_probability, Orthogonality,
};
pub use theorem::{
    coarse_grain, distinguishing_povm_from_orthogonal, is_one_shot_distinguishing, verify_orthogonality_theorem,
    OrthogonalityProof, ProofStep,
};
pub use theorem::{PHI_OUTCOME, PSI_OUTCOME};
pub use unitary::{hadamard, rotate_to};

use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("not a density matrix (trace {trace}, smallest eigenvalue {min_eigenvalue:e})")]
    NotDensity { trace: f64, min_eigenvalue: f64 },
    #[error("weights are not convex (sum {sum}, smallest {min})")]
    NotConvex { sum: f64, min: f64 },
    #[error("POVM has no elements")]
    EmptyPovm,
    #[error("duplicate outcome label `{0}`")]
    DuplicateLabel(String),
    #[error("element `{label}` is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { label: String, min_eigenvalue: f64 },
    #[error("elements do not sum to the identity (deviation {deviation:e})")]
    Incomplete { deviation: f64 },
    #[error("element `{label}` is not a projector")]
    NotIdempotent { label: String },
    #[error("projectors `{first}` and `{second}` are not orthogonal")]
    OverlappingProjectors { first: String, second: String },
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("invalid partition of outcome labels: {0}")]
    InvalidPartition(String),
    #[error("states are not orthogonal (tr = {overlap})")]
    NotOrthogonal { overlap: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("proof step `{step}` failed: {value:e} exceeds bound {bound:e}")]
    ProofStepFailed { step: String, value: f64, bound: f64 },
}

pub type Result<T> = std::result::Result<T, QuantumError>;
