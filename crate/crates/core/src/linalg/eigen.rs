use num_complex::Complex;
use num_traits::{One, Zero};

use super::{ComplexMatrix, HermitianMatrix, LinalgError, Result, StateVector};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// `H = Σ λ_k |v_k><v_k|` with eigenvalues in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition<T> {
    eigenvalues: Vec<T>,
    eigenvectors: Vec<StateVector<T>>,
}

impl<T: Real> SpectralDecomposition<T> {
    /// Cyclic complex Jacobi rotations.
    ///
    /// Each pivot `(p, q)` is zeroed by `R = D·G` where `D` removes the phase
    /// of `a_pq` and `G` is the real Jacobi rotation of the resulting real
    /// symmetric 2x2 block. Accumulated rotations give the eigenvectors.
    pub(crate) fn jacobi(h: &HermitianMatrix<T>) -> Result<Self> {
        let n = h.dim();
        let mut a = h.as_matrix().clone();
        let mut v = ComplexMatrix::<T>::identity(n);
        let threshold = T::JACOBI_TOL * T::one().max(a.frobenius_norm());

        let mut sweeps = 0;
        while off_diagonal_norm(&a) > threshold {
            if sweeps == MAX_SWEEPS {
                return Err(LinalgError::ConvergenceFailure { sweeps });
            }
            sweeps += 1;
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }

        let mut pairs: Vec<(T, StateVector<T>)> = (0..n)
            .map(|k| {
                let column = (0..n).map(|i| v.get(i, k)).collect();
                (a.get(k, k).re, StateVector::from_raw(column))
            })
            .collect();
        pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).expect("finite eigenvalues"));
        let (eigenvalues, eigenvectors): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let eigenvectors = reorthonormalize_clusters(&eigenvalues, eigenvectors)
            .into_iter()
            .map(StateVector::canonical_phase)
            .collect();
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[StateVector<T>] {
        &self.eigenvectors
    }

    pub fn pairs(&self) -> impl Iterator<Item = (T, &StateVector<T>)> {
        self.eigenvalues.iter().copied().zip(&self.eigenvectors)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }

    /// `Σ λ_k |v_k><v_k|`.
    pub fn reassemble(&self) -> HermitianMatrix<T> {
        let n = self.eigenvectors.first().map_or(0, StateVector::dim);
        self.pairs().fold(HermitianMatrix::zeros(n), |acc, (lambda, v)| {
            acc.checked_add(&HermitianMatrix::outer(v, lambda))
                .expect("eigenvectors share a dimension")
        })
    }

    /// Index ranges of eigenvalues closer than `gap` to their neighbour.
    pub fn clusters(&self, gap: T) -> Vec<std::ops::Range<usize>> {
        cluster_ranges(&self.eigenvalues, gap)
    }

    /// Sum of `|v_k><v_k|` over eigenvalues above `threshold`.
    pub fn support_projector(&self, threshold: T) -> HermitianMatrix<T> {
        let n = self.eigenvectors.first().map_or(0, StateVector::dim);
        self.pairs()
            .filter(|(lambda, _)| *lambda > threshold)
            .fold(HermitianMatrix::zeros(n), |acc, (_, v)| {
                acc.checked_add(&HermitianMatrix::outer(v, T::one()))
                    .expect("eigenvectors share a dimension")
            })
    }
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a.get(p, q);
    let g = apq.norm();
    if g.is_zero() {
        return;
    }
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let theta = (aqq - app) / (g + g);
    let t = if theta >= T::zero() {
        T::one() / (theta + (T::one() + theta * theta).sqrt())
    } else {
        -T::one() / (-theta + (T::one() + theta * theta).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let phase = apq / g; // e^{i phi}

    // R restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    let r_pp = Complex::new(c, T::zero());
    let r_pq = Complex::new(s, T::zero());
    let r_qp = phase.conj().scale(-s);
    let r_qq = phase.conj().scale(c);

    let n = a.dim();
    // A <- A R (columns p, q)
    for i in 0..n {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, aip * r_pp + aiq * r_qp);
        a.set(i, q, aip * r_pq + aiq * r_qq);
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, vip * r_pp + viq * r_qp);
        v.set(i, q, vip * r_pq + viq * r_qq);
    }
    // A <- R† A (rows p, q)
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, r_pp.conj() * apj + r_qp.conj() * aqj);
        a.set(q, j, r_pq.conj() * apj + r_qq.conj() * aqj);
    }
    a.set(p, q, Complex::zero());
    a.set(q, p, Complex::zero());
    let (dp, dq) = (a.get(p, p).re, a.get(q, q).re);
    a.set(p, p, Complex::new(dp, T::zero()));
    a.set(q, q, Complex::new(dq, T::zero()));
}

fn cluster_ranges<T: Real>(values: &[T], gap: T) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || (values[k - 1] - values[k]).abs() >= gap {
            out.push(start..k);
            start = k;
        }
    }
    out
}

fn reorthonormalize_clusters<T: Real>(values: &[T], mut vectors: Vec<StateVector<T>>) -> Vec<StateVector<T>> {
    for range in cluster_ranges(values, T::CLUSTER_GAP) {
        if range.len() < 2 {
            continue;
        }
        for k in range.clone() {
            let mut amps = vectors[k].amplitudes().to_vec();
            for prev in &vectors[range.start..k] {
                let overlap: Complex<T> = prev.amplitudes().iter().zip(&amps).map(|(b, a)| b.conj() * a).sum();
                for (a, b) in amps.iter_mut().zip(prev.amplitudes()) {
                    *a -= overlap * b;
                }
            }
            let norm = amps.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            let inv = Complex::new(T::one() / norm, T::zero());
            vectors[k] = StateVector::from_raw(amps.into_iter().map(|z| z * inv).collect());
        }
    }
    vectors
}

impl<T: Real> SpectralDecomposition<T> {
    /// Residual `max_k ||H v_k - λ_k v_k||`.
    pub fn residual(&self, h: &HermitianMatrix<T>) -> T {
        self.pairs()
            .map(|(lambda, v)| {
                let hv = v.apply(h.as_matrix()).expect("dimension of decomposed matrix");
                hv.amplitudes()
                    .iter()
                    .zip(v.amplitudes())
                    .map(|(a, b)| (a - b.scale(lambda)).norm_sqr())
                    .sum::<T>()
                    .sqrt()
            })
            .fold(T::zero(), T::max)
    }

    /// Largest deviation of the eigenvector Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.eigenvectors.iter().enumerate() {
            for (j, b) in self.eigenvectors.iter().enumerate() {
                let target = if i == j { Complex::one() } else { Complex::zero() };
                let g = a.inner(b).expect("same dimension");
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}
