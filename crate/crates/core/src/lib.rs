//! Quantum ideal gases, semi-permeable diaphragms and observer-relative heat
//! accounting for isothermal cyclic processes.
//!
//! The numerical core is generic over the scalar type ([`scalar::Real`] is
//! implemented for `f32` and `f64`); the aliases at the crate root fix it to
//! `f64`, with `*32` variants for single precision.

pub mod diaphragm;
pub mod linalg;
pub mod observers;
pub mod protocol;
pub mod quantum;
pub mod sampling;
pub mod scalar;
pub mod thermo;

pub use scalar::Real;

pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
pub type HermitianMatrix64 = linalg::HermitianMatrix<f64>;
pub type StateVector64 = linalg::StateVector<f64>;
pub type SpectralDecomposition64 = linalg::SpectralDecomposition<f64>;
pub type DensityMatrix64 = quantum::DensityMatrix<f64>;
pub type Povm64 = quantum::Povm<f64>;
pub type ProjectiveInstrument64 = quantum::ProjectiveInstrument<f64>;
pub type GasChamber64 = thermo::GasChamber<f64>;
pub type GasContents64 = thermo::GasContents<f64>;
pub type HeatLedger64 = thermo::HeatLedger<f64>;

pub type ComplexMatrix32 = linalg::ComplexMatrix<f32>;
pub type HermitianMatrix32 = linalg::HermitianMatrix<f32>;
pub type StateVector32 = linalg::StateVector<f32>;
pub type DensityMatrix32 = quantum::DensityMatrix<f32>;
pub type GasChamber32 = thermo::GasChamber<f32>;
