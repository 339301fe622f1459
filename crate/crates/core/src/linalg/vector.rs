use num_complex::Complex;
use num_traits::{One, Zero};

use super::{ComplexMatrix, LinalgError, Result};
use crate::scalar::Real;

/// Unit-norm ket.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Accepts amplitudes whose norm is already 1 within the input tolerance.
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_finite(&amplitudes)?;
        let norm = norm(&amplitudes);
        if (norm - T::one()).abs() > T::INPUT_TOL {
            return Err(LinalgError::NotNormalized { norm: norm.as_f64() });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_finite(&amplitudes)?;
        let norm = norm(&amplitudes);
        if norm <= T::ZERO_TOL {
            return Err(LinalgError::ZeroVector);
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn from_real(amplitudes: &[T]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| Complex::new(x, T::zero())).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex::zero(); dim];
        amplitudes[index] = Complex::one();
        Self { amplitudes }
    }

    pub(crate) fn from_raw(amplitudes: Vec<Complex<T>>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        norm(&self.amplitudes)
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self { amplitudes }
    }

    pub fn apply(&self, op: &ComplexMatrix<T>) -> Result<Self> {
        if op.dim() != self.dim() {
            return Err(LinalgError::DimMismatch {
                left: op.dim(),
                right: self.dim(),
            });
        }
        let n = self.dim();
        let amplitudes = (0..n)
            .map(|i| (0..n).map(|j| op.get(i, j) * self.amplitudes[j]).sum())
            .collect();
        Ok(Self { amplitudes })
    }

    /// Multiplies by the phase that makes the first non-negligible amplitude
    /// real and positive.
    pub(crate) fn canonical_phase(mut self) -> Self {
        if let Some(lead) = self.amplitudes.iter().find(|z| z.norm() > T::INPUT_TOL) {
            let phase = lead.conj() / lead.norm();
            for z in &mut self.amplitudes {
                *z *= phase;
            }
        }
        self
    }
}

fn norm<T: Real>(amplitudes: &[Complex<T>]) -> T {
    amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

fn check_finite<T: Real>(amplitudes: &[Complex<T>]) -> Result<()> {
    match amplitudes.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        Some(row) => Err(LinalgError::NonFinite { row, col: 0 }),
        None if amplitudes.is_empty() => Err(LinalgError::Empty),
        None => Ok(()),
    }
}
