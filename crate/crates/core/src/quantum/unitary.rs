use num_complex::Complex;

use super::Result;
use crate::linalg::{ComplexMatrix, LinalgError, StateVector};
use crate::scalar::Real;

pub fn hadamard<T: Real>() -> ComplexMatrix<T> {
    let h = T::one() / T::lit(2.0).sqrt();
    ComplexMatrix::from_real_rows(&[vec![h, h], vec![h, -h]]).expect("2x2 literal")
}

/// Unitary taking the pure state `from` to `to`.
///
/// With `<from|to> = |c| e^{iθ}`, this is `e^{iθ} (I - 2|w><w|/<w|w>)` for
/// `w = from - e^{-iθ} to`: a Householder reflection exchanging `from` with
/// the phase-aligned `to`, acting as the identity on every vector orthogonal
/// to both. For orthogonal real kets it reduces to
/// `I - P_from - P_to + |to><from| + |from><to|`, and `rotate_to(z+, x+)` is
/// the Hadamard gate.
pub fn rotate_to<T: Real>(from: &StateVector<T>, to: &StateVector<T>) -> Result<ComplexMatrix<T>> {
    if from.dim() != to.dim() {
        return Err(LinalgError::DimMismatch {
            left: from.dim(),
            right: to.dim(),
        }
        .into());
    }
    let c = from.inner(to)?;
    let phase = if c.norm() > T::ZERO_TOL {
        c / c.norm()
    } else {
        Complex::new(T::one(), T::zero())
    };
    let w: Vec<Complex<T>> = from
        .amplitudes()
        .iter()
        .zip(to.amplitudes())
        .map(|(a, b)| a - b * phase.conj())
        .collect();
    let wn = w.iter().map(|z| z.norm_sqr()).sum::<T>();
    let n = from.dim();
    let identity = ComplexMatrix::identity(n).scale(phase);
    if wn <= T::INPUT_TOL * T::INPUT_TOL {
        return Ok(identity);
    }
    let factor = phase.scale(T::lit(2.0) / wn);
    let reflection = ComplexMatrix::from_fn(n, |i, j| w[i] * w[j].conj() * factor);
    Ok(&identity - &reflection)
}
