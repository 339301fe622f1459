use super::{QuantumError, Result};
use crate::linalg::{HermitianMatrix, Keep, StateVector};
use crate::scalar::Real;

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: HermitianMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: HermitianMatrix<T>) -> Result<Self> {
        let trace = matrix.trace();
        let min_eigenvalue = matrix.eig()?.min_eigenvalue();
        if (trace - T::one()).abs() > T::ZERO_TOL || min_eigenvalue < -T::ZERO_TOL {
            return Err(QuantumError::NotDensity {
                trace: trace.as_f64(),
                min_eigenvalue: min_eigenvalue.as_f64(),
            });
        }
        Ok(Self { matrix })
    }

    pub fn pure(v: &StateVector<T>) -> Result<Self> {
        Ok(Self {
            matrix: HermitianMatrix::projector(v)?,
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: HermitianMatrix::identity(dim).scale(T::one() / T::from_usize(dim).unwrap()),
        }
    }

    /// `Σ w_i ρ_i` for convex weights.
    pub fn mixture(components: &[(T, &DensityMatrix<T>)]) -> Result<Self> {
        check_convex(components.iter().map(|(w, _)| *w))?;
        let dim = components[0].1.dim();
        let mut acc = HermitianMatrix::zeros(dim);
        for (w, rho) in components {
            acc = acc.checked_add(&rho.matrix.scale(*w))?;
        }
        Self::new(acc)
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> HermitianMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.tensor(&other.matrix),
        }
    }

    /// Reduced state on one factor of a `d1 × d2` bipartition.
    pub fn partial_trace(&self, dims: (usize, usize), keep: Keep) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.partial_trace(dims, keep)?,
        })
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> T {
        self.matrix
            .trace_product(&self.matrix)
            .expect("same matrix has matching dimension")
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.matrix.approx_eq(&other.matrix, tol)
    }

    pub(crate) fn from_trusted(matrix: HermitianMatrix<T>) -> Self {
        Self { matrix }
    }
}

/// Weights must be non-negative and sum to one.
pub(crate) fn check_convex<T: Real>(weights: impl Iterator<Item = T>) -> Result<()> {
    let mut sum = T::zero();
    let mut min = T::infinity();
    let mut count = 0;
    for w in weights {
        sum += w;
        min = min.min(w);
        count += 1;
    }
    if count == 0 || (sum - T::one()).abs() > T::INPUT_TOL || min < T::zero() || !sum.is_finite() {
        return Err(QuantumError::NotConvex {
            sum: sum.as_f64(),
            min: if count == 0 { f64::NAN } else { min.as_f64() },
        });
    }
    Ok(())
}
