use num_complex::Complex;
use num_traits::Zero;

use super::{ComplexMatrix, LinalgError, Result, SpectralDecomposition, StateVector};
use crate::scalar::Real;

/// Which tensor factor survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Keep {
    First,
    Second,
}

/// Complex square matrix equal to its own adjoint.
///
/// Construction symmetrizes `(M + M†)/2` after checking the asymmetry is
/// within tolerance, so stored entries are exactly Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    inner: ComplexMatrix<T>,
}

impl<T: Real> HermitianMatrix<T> {
    pub fn new(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        Self::from_matrix(ComplexMatrix::from_rows(rows)?)
    }

    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        Self::from_matrix(ComplexMatrix::from_real_rows(rows)?)
    }

    /// Input-level constructor (tolerance `INPUT_TOL`).
    pub fn from_matrix(m: ComplexMatrix<T>) -> Result<Self> {
        Self::symmetrized(m, T::INPUT_TOL)
    }

    /// Constructor for matrices produced by arithmetic on Hermitian inputs.
    pub(crate) fn from_derived(m: ComplexMatrix<T>) -> Result<Self> {
        let scale = T::one().max(m.frobenius_norm());
        Self::symmetrized(m, T::DERIVED_TOL * scale)
    }

    fn symmetrized(m: ComplexMatrix<T>, tol: T) -> Result<Self> {
        let asymmetry = m.hermitian_asymmetry();
        if asymmetry > tol {
            return Err(LinalgError::NotHermitian {
                asymmetry: asymmetry.as_f64(),
            });
        }
        let half = T::lit(0.5);
        let inner = ComplexMatrix::from_fn(m.dim(), |i, j| {
            if i == j {
                Complex::new(m.get(i, i).re, T::zero())
            } else {
                (m.get(i, j) + m.get(j, i).conj()).scale(half)
            }
        });
        Ok(Self { inner })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: ComplexMatrix::zeros(dim),
        }
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut inner = ComplexMatrix::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            inner.set(i, i, Complex::new(v, T::zero()));
        }
        Self { inner }
    }

    /// Rank-one projector `|v><v|`.
    pub fn projector(v: &StateVector<T>) -> Result<Self> {
        let norm = v.norm();
        if (norm - T::one()).abs() > T::INPUT_TOL {
            return Err(LinalgError::NotNormalized { norm: norm.as_f64() });
        }
        Ok(Self::outer(v, T::one()))
    }

    /// `weight |v><v|` without a normalization check.
    pub(crate) fn outer(v: &StateVector<T>, weight: T) -> Self {
        let a = v.amplitudes();
        let n = a.len();
        let mut inner = ComplexMatrix::zeros(n);
        for i in 0..n {
            inner.set(i, i, Complex::new(a[i].norm_sqr() * weight, T::zero()));
            for j in (i + 1)..n {
                let z = (a[i] * a[j].conj()).scale(weight);
                inner.set(i, j, z);
                inner.set(j, i, z.conj());
            }
        }
        Self { inner }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.inner.get(row, col)
    }

    pub fn as_matrix(&self) -> &ComplexMatrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.inner
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).map(|i| self.inner.get(i, i).re).sum()
    }

    /// `tr(self * other)`; real for Hermitian arguments.
    pub fn trace_product(&self, other: &Self) -> Result<T> {
        self.inner.same_dim(&other.inner)?;
        let n = self.dim();
        let mut acc = Complex::<T>::zero();
        for i in 0..n {
            for k in 0..n {
                acc += self.get(i, k) * other.get(k, i);
            }
        }
        debug_assert!(acc.im.abs() <= T::DERIVED_TOL * T::one().max(acc.re.abs()));
        Ok(acc.re)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            inner: self.inner.checked_add(&other.inner)?,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            inner: self.inner.checked_sub(&other.inner)?,
        })
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            inner: self.inner.scale(Complex::new(factor, T::zero())),
        }
    }

    /// Matrix product; generally not Hermitian.
    pub fn product(&self, other: &Self) -> Result<ComplexMatrix<T>> {
        self.inner.checked_mul(&other.inner)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            inner: self.inner.kron(&other.inner),
        }
    }

    /// Traces out one factor of a `d1 x d2` bipartite matrix.
    pub fn partial_trace(&self, dims: (usize, usize), keep: Keep) -> Result<Self> {
        let (d1, d2) = dims;
        if d1 == 0 || d2 == 0 || d1 * d2 != self.dim() {
            return Err(LinalgError::DimFactorMismatch {
                dim: self.dim(),
                d1,
                d2,
            });
        }
        let inner = match keep {
            Keep::First => ComplexMatrix::from_fn(d1, |i, j| (0..d2).map(|k| self.get(i * d2 + k, j * d2 + k)).sum()),
            Keep::Second => ComplexMatrix::from_fn(d2, |i, j| (0..d1).map(|k| self.get(k * d2 + i, k * d2 + j)).sum()),
        };
        Ok(Self { inner })
    }

    /// `U H U†`.
    pub fn conjugate(&self, unitary: &ComplexMatrix<T>) -> Result<Self> {
        let m = unitary.checked_mul(&self.inner)?.checked_mul(&unitary.adjoint())?;
        Self::from_derived(m)
    }

    pub fn eig(&self) -> Result<SpectralDecomposition<T>> {
        SpectralDecomposition::jacobi(self)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.inner.max_abs_diff(&other.inner)
    }

    pub fn frobenius_distance(&self, other: &Self) -> Result<T> {
        Ok(self.inner.checked_sub(&other.inner)?.frobenius_norm())
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.max_abs_diff(other).map(|d| d <= tol).unwrap_or(false)
    }

    pub fn is_positive_semidefinite(&self, tol: T) -> Result<bool> {
        Ok(self.eig()?.min_eigenvalue() >= -tol)
    }

    /// `P² = P` within `tol` (entrywise).
    pub fn is_idempotent(&self, tol: T) -> Result<bool> {
        let sq = self.product(self)?;
        Ok(sq.max_abs_diff(&self.inner)? <= tol)
    }
}
