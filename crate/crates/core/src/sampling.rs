//! Random states, unitaries and distinguishing configurations for
//! property-based checks.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::linalg::{ComplexMatrix, HermitianMatrix, StateVector};
use crate::quantum::{DensityMatrix, Grouping, Povm};
use crate::scalar::Real;

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(T::lit(re), T::lit(im))
}

/// Haar-random orthonormal basis: Gram-Schmidt on complex Gaussian vectors.
pub fn random_basis<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<StateVector<T>> {
    let mut basis: Vec<StateVector<T>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v: Vec<Complex<T>> = (0..dim).map(|_| gaussian(rng)).collect();
        for b in &basis {
            let c: Complex<T> = b.amplitudes().iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b.amplitudes()) {
                *vi -= c * bi;
            }
        }
        if let Ok(u) = StateVector::normalized(v) {
            basis.push(u);
        }
    }
    basis
}

/// Unitary whose columns are a [`random_basis`].
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    let basis = random_basis::<T, R>(rng, dim);
    ComplexMatrix::from_fn(dim, |i, j| basis[j].amplitudes()[i])
}

pub fn random_pure_state<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector<T> {
    loop {
        if let Ok(v) = StateVector::normalized((0..dim).map(|_| gaussian(rng)).collect()) {
            return v;
        }
    }
}

/// Uniform point in the open probability simplex.
pub fn random_weights<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).map(|x: f64| x.max(1e-6)).collect();
    let total: f64 = draws.iter().sum();
    let mut weights: Vec<T> = draws.iter().map(|x| T::lit(x / total)).collect();
    // Put the rounding residue on the largest weight so the sum is 1.
    let residue = T::one() - weights.iter().copied().sum::<T>();
    let largest = (0..n)
        .max_by(|&a, &b| weights[a].partial_cmp(&weights[b]).expect("finite weights"))
        .expect("n > 0");
    weights[largest] += residue;
    weights
}

fn mixed_on<T: Real>(vectors: &[StateVector<T>], weights: &[T]) -> DensityMatrix<T> {
    let dim = vectors[0].dim();
    let m = vectors
        .iter()
        .zip(weights)
        .fold(HermitianMatrix::zeros(dim), |acc, (v, w)| {
            acc.checked_add(&HermitianMatrix::outer(v, *w)).expect("same dimension")
        });
    DensityMatrix::new(m).expect("convex combination of projectors")
}

/// Random density matrix of the given rank (`1 ≤ rank ≤ dim`).
pub fn random_density<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix<T> {
    let basis = random_basis::<T, R>(rng, dim);
    let weights = random_weights::<T, R>(rng, rank);
    mixed_on(&basis[..rank], &weights)
}

/// `Σ f(λ) |v><v|` over the spectrum of `h`.
fn spectral_map<T: Real>(h: &HermitianMatrix<T>, f: impl Fn(T) -> T) -> HermitianMatrix<T> {
    let spectrum = h.eig().expect("small Hermitian matrix");
    spectrum
        .pairs()
        .fold(HermitianMatrix::zeros(h.dim()), |acc, (lambda, v)| {
            acc.checked_add(&HermitianMatrix::outer(v, f(lambda)))
                .expect("same dimension")
        })
}

fn sandwich<T: Real>(outer: &HermitianMatrix<T>, inner: &HermitianMatrix<T>) -> HermitianMatrix<T> {
    let m = outer.as_matrix() * inner.as_matrix();
    HermitianMatrix::from_derived(&m * outer.as_matrix()).expect("congruence preserves hermiticity")
}

/// Splits `total ≥ 0` into `n` full-rank-inside-`total` effects summing to it:
/// `total^{1/2} B_μ total^{1/2}` with `B_μ = S^{-1/2} G_μ S^{-1/2}`,
/// `S = Σ G_μ` for random positive `G_μ`.
fn split_effect<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    total: &HermitianMatrix<T>,
    n: usize,
) -> Vec<HermitianMatrix<T>> {
    let dim = total.dim();
    let gs: Vec<HermitianMatrix<T>> = (0..n)
        .map(|_| {
            let a = ComplexMatrix::from_fn(dim, |_, _| gaussian(rng));
            HermitianMatrix::from_derived(&a * &a.adjoint()).expect("A A† is Hermitian")
        })
        .collect();
    let s = gs.iter().fold(HermitianMatrix::zeros(dim), |acc, g| {
        acc.checked_add(g).expect("same dimension")
    });
    let s_inv_half = spectral_map(&s, |x| T::one() / x.sqrt());
    let root = spectral_map(total, |x| x.max(T::zero()).sqrt());
    gs.iter().map(|g| sandwich(&root, &sandwich(&s_inv_half, g))).collect()
}

/// Two states with a POVM that tells them apart in one shot.
#[derive(Clone, Debug)]
pub struct DistinguishingConfig<T> {
    pub phi: DensityMatrix<T>,
    pub psi: DensityMatrix<T>,
    pub povm: Povm<T>,
    pub grouping: Grouping,
}

/// Random basis split into `supp φ`, `supp ψ` and a remainder. The `E` side
/// sums to `P_ψ + X`, the `F` side to `P_φ + (P_rest - X)` for a random
/// `0 ≤ X ≤ P_rest`; each side is split into one to three effects.
pub fn random_distinguishing_config<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DistinguishingConfig<T> {
    assert!(dim >= 2, "two orthogonal states need dimension at least 2");
    let basis = random_basis::<T, R>(rng, dim);
    let a = rng.gen_range(1..dim);
    let b = rng.gen_range(1..=dim - a);
    let (phi_vecs, rest) = basis.split_at(a);
    let (psi_vecs, rest) = rest.split_at(b);
    let phi = mixed_on(phi_vecs, &random_weights::<T, R>(rng, a));
    let psi = mixed_on(psi_vecs, &random_weights::<T, R>(rng, b));

    let projector = |vs: &[StateVector<T>]| {
        vs.iter().fold(HermitianMatrix::zeros(dim), |acc, v| {
            acc.checked_add(&HermitianMatrix::outer(v, T::one()))
                .expect("same dimension")
        })
    };
    let x = rest.iter().fold(HermitianMatrix::zeros(dim), |acc, v| {
        let w = T::lit(rng.gen_range(0.0..=1.0));
        acc.checked_add(&HermitianMatrix::outer(v, w)).expect("same dimension")
    });
    let e = projector(psi_vecs).checked_add(&x).expect("same dimension");
    let f = HermitianMatrix::identity(dim).checked_sub(&e).expect("same dimension");

    let mut elements = Vec::new();
    let mut e_labels = Vec::new();
    let mut f_labels = Vec::new();
    let (ne, nf) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
    for (i, el) in split_effect(rng, &e, ne).into_iter().enumerate() {
        e_labels.push(format!("e{}", i + 1));
        elements.push((format!("e{}", i + 1), el));
    }
    for (i, el) in split_effect(rng, &f, nf).into_iter().enumerate() {
        f_labels.push(format!("f{}", i + 1));
        elements.push((format!("f{}", i + 1), el));
    }
    DistinguishingConfig {
        phi,
        psi,
        povm: Povm::new(elements).expect("effects are positive and complete"),
        grouping: Grouping::new(e_labels, f_labels),
    }
}

/// Random orthogonal pair of (generally mixed) states.
pub fn random_orthogonal_pair<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
) -> (DensityMatrix<T>, DensityMatrix<T>) {
    assert!(dim >= 2, "two orthogonal states need dimension at least 2");
    let basis = random_basis::<T, R>(rng, dim);
    let a = rng.gen_range(1..dim);
    let b = rng.gen_range(1..=dim - a);
    let phi = mixed_on(&basis[..a], &random_weights::<T, R>(rng, a));
    let psi = mixed_on(&basis[a..a + b], &random_weights::<T, R>(rng, b));
    (phi, psi)
}

/// Random pair with `tr(φψ) ≥ min_overlap`, found by rejection.
pub fn random_nonorthogonal_pair<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    min_overlap: T,
) -> (DensityMatrix<T>, DensityMatrix<T>) {
    loop {
        let r1 = rng.gen_range(1..=dim);
        let r2 = rng.gen_range(1..=dim);
        let phi = random_density::<T, R>(rng, dim, r1);
        let psi = random_density::<T, R>(rng, dim, r2);
        let overlap = phi.matrix().trace_product(psi.matrix()).expect("same dimension");
        if overlap >= min_overlap {
            return (phi, psi);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::is_one_shot_distinguishing;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_is_orthonormal_and_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in 1..=5 {
            let u = random_unitary::<f64, _>(&mut rng, dim);
            assert!(u.is_unitary(1e-12));
        }
    }

    #[test]
    fn weights_are_convex() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..6 {
            let w = random_weights::<f64, _>(&mut rng, n);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            assert!(w.iter().all(|x| *x > 0.0));
        }
    }

    #[test]
    fn density_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_density::<f64, _>(&mut rng, 4, 2);
        let positive = rho
            .matrix()
            .eig()
            .unwrap()
            .eigenvalues()
            .iter()
            .filter(|l| **l > 1e-10)
            .count();
        assert_eq!(positive, 2);
    }

    #[test]
    fn configs_distinguish() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for dim in 2..=4 {
            let c = random_distinguishing_config::<f64, _>(&mut rng, dim);
            assert!(is_one_shot_distinguishing(&c.povm, &c.grouping, &c.phi, &c.psi).unwrap());
        }
    }

    #[test]
    fn pairs_have_requested_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (a, b) = random_orthogonal_pair::<f64, _>(&mut rng, 3);
        assert!(a.matrix().trace_product(b.matrix()).unwrap().abs() < 1e-14);
        let (a, b) = random_nonorthogonal_pair::<f64, _>(&mut rng, 3, 1e-3);
        assert!(a.matrix().trace_product(b.matrix()).unwrap() >= 1e-3);
    }
}
