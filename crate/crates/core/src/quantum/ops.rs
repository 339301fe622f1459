use super::density::check_convex;
use super::{DensityMatrix, Outcome, OutcomeDistribution, ProjectiveInstrument, QuantumError, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::scalar::Real;

/// Born rule `tr(ρ E)`, clamped to `[0, 1]`.
pub fn outcome_probability<T: Real>(rho: &DensityMatrix<T>, element: &HermitianMatrix<T>) -> Result<T> {
    let p = rho.matrix().trace_product(element)?;
    Ok(p.max(T::zero()).min(T::one()))
}

/// Lüders update for every outcome of a projective instrument.
pub fn apply_instrument<T: Real>(
    rho: &DensityMatrix<T>,
    instrument: &ProjectiveInstrument<T>,
) -> Result<OutcomeDistribution<T>> {
    let mut outcomes = Vec::with_capacity(instrument.len());
    for (label, proj) in instrument.projectors() {
        let projected = proj
            .as_matrix()
            .checked_mul(rho.matrix().as_matrix())?
            .checked_mul(proj.as_matrix())?;
        let projected = HermitianMatrix::from_derived(projected)?;
        let weight = projected.trace();
        let probability = weight.max(T::zero()).min(T::one());
        let post_state = if weight < T::OUTCOME_CUTOFF {
            None
        } else {
            Some(DensityMatrix::from_trusted(projected.scale(T::one() / weight)))
        };
        outcomes.push(Outcome {
            label: label.clone(),
            probability,
            post_state,
        });
    }
    Ok(OutcomeDistribution { outcomes })
}

/// `U ρ U†` for unitary `U`.
pub fn apply_unitary<T: Real>(rho: &DensityMatrix<T>, unitary: &ComplexMatrix<T>) -> Result<DensityMatrix<T>> {
    check_unitary(unitary)?;
    Ok(DensityMatrix::from_trusted(rho.matrix().conjugate(unitary)?))
}

pub(crate) fn check_unitary<T: Real>(unitary: &ComplexMatrix<T>) -> Result<()> {
    let deviation = (&unitary.adjoint() * unitary).max_abs_diff(&ComplexMatrix::identity(unitary.dim()))?;
    if deviation > T::ZERO_TOL {
        return Err(QuantumError::NotUnitary {
            deviation: deviation.as_f64(),
        });
    }
    Ok(())
}

/// Orthogonality verdict with its witness `tr(φψ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Orthogonality<T> {
    pub orthogonal: bool,
    pub overlap: T,
}

pub fn are_orthogonal<T: Real>(phi: &DensityMatrix<T>, psi: &DensityMatrix<T>) -> Result<Orthogonality<T>> {
    let overlap = phi.matrix().trace_product(psi.matrix())?;
    Ok(Orthogonality {
        orthogonal: overlap <= T::ZERO_TOL,
        overlap,
    })
}

/// Mixes `states` with `weights` and returns the mixture together with the
/// instrument of its eigenprojectors.
///
/// Eigenvalues within `CLUSTER_GAP` of each other share one projector; the
/// kernel is a cluster like any other. Labels are `e1, e2, ...` in
/// descending eigenvalue order.
pub fn mixture_eigen_instrument<T: Real>(
    weights: &[T],
    states: &[DensityMatrix<T>],
) -> Result<(DensityMatrix<T>, ProjectiveInstrument<T>)> {
    if weights.len() != states.len() {
        return Err(QuantumError::InvalidPartition(format!(
            "{} weights for {} states",
            weights.len(),
            states.len()
        )));
    }
    check_convex(weights.iter().copied())?;
    let components: Vec<_> = weights.iter().copied().zip(states.iter()).collect();
    let mixture = DensityMatrix::mixture(&components)?;
    let instrument = eigen_instrument(mixture.matrix())?;
    Ok((mixture, instrument))
}

/// Projective instrument onto the eigenspaces of `h`.
pub(crate) fn eigen_instrument<T: Real>(h: &HermitianMatrix<T>) -> Result<ProjectiveInstrument<T>> {
    let spectrum = h.eig()?;
    let vectors = spectrum.eigenvectors();
    let projectors = spectrum
        .clusters(T::CLUSTER_GAP)
        .into_iter()
        .enumerate()
        .map(|(i, range)| {
            let p = vectors[range].iter().fold(HermitianMatrix::zeros(h.dim()), |acc, v| {
                acc.checked_add(&HermitianMatrix::outer(v, T::one()))
                    .expect("eigenvectors share a dimension")
            });
            (format!("e{}", i + 1), p)
        })
        .collect();
    ProjectiveInstrument::new(projectors)
}
