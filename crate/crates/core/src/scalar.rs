//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real field the library is generic over.
///
/// The associated tolerances are the numerical contract of the crate. The
/// `f64` values are the reference ones; `f32` gets looser values scaled to
/// its machine epsilon.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Slack admitted on user-supplied inputs (Hermiticity, normalization, convexity).
    const INPUT_TOL: Self;
    /// Threshold below which traces, probabilities and eigenvalues count as zero.
    const ZERO_TOL: Self;
    /// Slack for quantities derived through several arithmetic steps.
    const DERIVED_TOL: Self;
    /// Off-diagonal Frobenius norm at which Jacobi sweeps stop.
    const JACOBI_TOL: Self;
    /// Eigenvalues closer than this belong to one degenerate cluster.
    const CLUSTER_GAP: Self;
    /// Outcomes below this probability carry no post-measurement state.
    const OUTCOME_CUTOFF: Self;

    /// Lossless-enough conversion of a literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const INPUT_TOL: Self = 1e-12;
    const ZERO_TOL: Self = 1e-10;
    const DERIVED_TOL: Self = 1e-9;
    const JACOBI_TOL: Self = 1e-13;
    const CLUSTER_GAP: Self = 1e-9;
    const OUTCOME_CUTOFF: Self = 1e-12;
}

impl Real for f32 {
    const INPUT_TOL: Self = 1e-5;
    const ZERO_TOL: Self = 1e-5;
    const DERIVED_TOL: Self = 1e-4;
    const JACOBI_TOL: Self = 1e-6;
    const CLUSTER_GAP: Self = 1e-4;
    const OUTCOME_CUTOFF: Self = 1e-6;
}
