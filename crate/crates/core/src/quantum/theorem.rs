//! One-shot distinguishability ⇔ orthogonality, both directions executable.
//!
//! The forward direction is checked constructively: coarse-grain the
//! distinguishing POVM into `{E, F}`, expand `tr(φE)` and `tr(ψF)` in the
//! eigenbases of `E`, `φ` and `ψ`, and confirm every overlap the argument
//! forces to vanish actually does. The converse builds the POVM
//! `{P_supp(φ), I - P_supp(φ)}`.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::{DensityMatrix, Grouping, LabelPartition, Povm, QuantumError, Result};
use crate::linalg::{HermitianMatrix, StateVector};
use crate::scalar::Real;

/// True iff every `indicates_psi` element has `tr(φE) ≈ 0` and `tr(ψE) > 0`,
/// and symmetrically for `indicates_phi`.
pub fn is_one_shot_distinguishing<T: Real>(
    povm: &Povm<T>,
    grouping: &Grouping,
    phi: &DensityMatrix<T>,
    psi: &DensityMatrix<T>,
) -> Result<bool> {
    validate_grouping(povm, grouping)?;
    let fires = |rho: &DensityMatrix<T>, label: &str| -> Result<T> {
        let e = povm.element(label).expect("validated label");
        Ok(rho.matrix().trace_product(e)?)
    };
    for label in &grouping.indicates_psi {
        if fires(phi, label)? > T::ZERO_TOL || fires(psi, label)? <= T::ZERO_TOL {
            return Ok(false);
        }
    }
    for label in &grouping.indicates_phi {
        if fires(psi, label)? > T::ZERO_TOL || fires(phi, label)? <= T::ZERO_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sums the elements of each group; the coarse POVM is labeled by group name.
pub fn coarse_grain<T: Real>(povm: &Povm<T>, partition: &LabelPartition) -> Result<Povm<T>> {
    partition.validate(povm.labels())?;
    let elements = partition
        .groups
        .iter()
        .map(|(name, members)| {
            let sum = members.iter().try_fold(HermitianMatrix::zeros(povm.dim()), |acc, m| {
                acc.checked_add(povm.element(m).expect("validated label"))
            })?;
            Ok((name.clone(), sum))
        })
        .collect::<Result<Vec<_>>>()?;
    Povm::new(elements)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProofStep<T> {
    pub name: &'static str,
    pub value: T,
    pub bound: T,
}

impl<T: Real> ProofStep<T> {
    pub fn passed(&self) -> bool {
        self.value <= self.bound
    }
}

/// Record of a successful constructive check of `tr(φψ) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalityProof<T> {
    /// `{E, F}` after coarse-graining.
    pub coarse: Povm<T>,
    /// `E = Σ e_i |i><i|`, `e_i > 0`.
    pub e_spectrum: Vec<(T, StateVector<T>)>,
    /// `φ = Σ φ_k |k~><k~|`, `φ_k > 0`.
    pub phi_spectrum: Vec<(T, StateVector<T>)>,
    /// `ψ = Σ ψ_l |l^><l^|`, `ψ_l > 0`.
    pub psi_spectrum: Vec<(T, StateVector<T>)>,
    /// Vectors completing `{|i>} ∪ {|k~>}` to an orthonormal basis.
    pub completion: Vec<StateVector<T>>,
    pub steps: Vec<ProofStep<T>>,
    pub trace_phi_psi: T,
}

pub fn verify_orthogonality_theorem<T: Real>(
    phi: &DensityMatrix<T>,
    psi: &DensityMatrix<T>,
    povm: &Povm<T>,
    grouping: &Grouping,
) -> Result<OrthogonalityProof<T>> {
    if !is_one_shot_distinguishing(povm, grouping, phi, psi)? {
        return Err(QuantumError::PreconditionViolated(
            "the POVM does not distinguish the two states in one shot".into(),
        ));
    }
    let dim = phi.dim();
    let d = T::from_usize(dim).unwrap();
    let tol = T::ZERO_TOL;
    let slack = T::DERIVED_TOL;
    let n_e = T::from_usize(grouping.indicates_psi.len()).unwrap();
    let n_f = T::from_usize(grouping.indicates_phi.len()).unwrap();

    let coarse = coarse_grain(povm, &grouping.as_partition())?;
    let e = coarse.element(Grouping::PSI_GROUP).expect("coarse group").clone();
    let f = coarse.element(Grouping::PHI_GROUP).expect("coarse group").clone();
    let tr = |a: &HermitianMatrix<T>, b: &HermitianMatrix<T>| a.trace_product(b);

    let phi_e = tr(phi.matrix(), &e)?;
    let psi_e = tr(psi.matrix(), &e)?;
    let psi_f = tr(psi.matrix(), &f)?;
    let phi_f = tr(phi.matrix(), &f)?;
    let mut steps = vec![
        ProofStep {
            name: "coarse-graining: tr(phi E) = 0",
            value: phi_e,
            bound: n_e * tol,
        },
        ProofStep {
            name: "coarse-graining: tr(psi E) = 1",
            value: (psi_e - T::one()).abs(),
            bound: n_f * tol + slack,
        },
        ProofStep {
            name: "coarse-graining: tr(psi F) = 0",
            value: psi_f,
            bound: n_f * tol,
        },
        ProofStep {
            name: "coarse-graining: tr(phi F) = 1",
            value: (phi_f - T::one()).abs(),
            bound: n_e * tol + slack,
        },
    ];

    let e_spectrum = positive_part(&e)?;
    let phi_spectrum = positive_part(phi.matrix())?;
    let psi_spectrum = positive_part(psi.matrix())?;

    // tr(φE) = Σ_{k,i} φ_k e_i |<k~|i>|²
    let mut expansion = T::zero();
    let mut ki_overlap = T::zero();
    for (phi_k, k) in &phi_spectrum {
        for (e_i, i) in &e_spectrum {
            let o = k.inner(i)?.norm();
            expansion += *phi_k * *e_i * o * o;
            ki_overlap = ki_overlap.max(o);
        }
    }
    steps.push(ProofStep {
        name: "spectral expansion of tr(phi E)",
        value: (expansion - phi_e).abs(),
        bound: slack + d * tol,
    });
    let min_phi = min_weight(&phi_spectrum);
    let min_e = min_weight(&e_spectrum);
    let ortho_bound = (phi_e.max(T::zero()) / (min_phi * min_e)).sqrt() + slack;
    steps.push(ProofStep {
        name: "eigenvectors of E orthogonal to those of phi",
        value: ki_overlap,
        bound: ortho_bound,
    });

    // {|i>, |k~>, |j'>} complete basis and F = Σ(1-e_i)|i><i| + Σ|k~><k~| + Σ|j'><j'|
    let partial: Vec<StateVector<T>> = e_spectrum.iter().chain(&phi_spectrum).map(|(_, v)| v.clone()).collect();
    let gram_defect = gram_defect(&partial)?;
    steps.push(ProofStep {
        name: "eigenvectors of E and phi form an orthonormal set",
        value: gram_defect,
        bound: ortho_bound,
    });
    let completion = complete_basis(&partial, dim);
    let mut f_model = HermitianMatrix::zeros(dim);
    for (e_i, i) in &e_spectrum {
        f_model = f_model.checked_add(&HermitianMatrix::outer(i, T::one() - *e_i))?;
    }
    for v in phi_spectrum.iter().map(|(_, v)| v).chain(&completion) {
        f_model = f_model.checked_add(&HermitianMatrix::outer(v, T::one()))?;
    }
    steps.push(ProofStep {
        name: "F = I - E in the completed basis",
        value: f_model.max_abs_diff(&f)?,
        bound: d * (ortho_bound + ortho_bound + tol) + slack,
    });

    // tr(ψF) ≥ Σ_{l,k} ψ_l |<l^|k~>|², hence <l^|k~> = 0
    let mut lk_overlap = T::zero();
    for (_, l) in &psi_spectrum {
        for (_, k) in &phi_spectrum {
            lk_overlap = lk_overlap.max(l.inner(k)?.norm());
        }
    }
    let min_psi = min_weight(&psi_spectrum);
    steps.push(ProofStep {
        name: "eigenvectors of psi orthogonal to those of phi",
        value: lk_overlap,
        bound: ((psi_f.max(T::zero()) + d * (ortho_bound + ortho_bound)) / min_psi).sqrt() + slack,
    });

    let trace_phi_psi = tr(phi.matrix(), psi.matrix())?;
    steps.push(ProofStep {
        name: "tr(phi psi) = 0",
        value: trace_phi_psi.abs(),
        bound: T::DERIVED_TOL,
    });

    if let Some(failed) = steps.iter().find(|s| !s.passed()) {
        return Err(QuantumError::ProofStepFailed {
            step: failed.name.to_string(),
            value: failed.value.as_f64(),
            bound: failed.bound.as_f64(),
        });
    }
    Ok(OrthogonalityProof {
        coarse,
        e_spectrum,
        phi_spectrum,
        psi_spectrum,
        completion,
        steps,
        trace_phi_psi,
    })
}

/// Label of the support projector of φ in the converse construction.
pub const PHI_OUTCOME: &str = "phi";
/// Label of its complement.
pub const PSI_OUTCOME: &str = "psi";

/// Builds `{E = P_supp(φ), F = I - E}` for orthogonal φ, ψ.
pub fn distinguishing_povm_from_orthogonal<T: Real>(
    phi: &DensityMatrix<T>,
    psi: &DensityMatrix<T>,
) -> Result<(Povm<T>, Grouping)> {
    let check = super::are_orthogonal(phi, psi)?;
    if !check.orthogonal {
        return Err(QuantumError::NotOrthogonal {
            overlap: check.overlap.as_f64(),
        });
    }
    let support = phi.matrix().eig()?.support_projector(T::ZERO_TOL);
    let complement = HermitianMatrix::identity(phi.dim()).checked_sub(&support)?;
    let povm = Povm::new(vec![
        (PHI_OUTCOME.to_string(), support),
        (PSI_OUTCOME.to_string(), complement),
    ])?;
    Ok((povm, Grouping::new([PSI_OUTCOME], [PHI_OUTCOME])))
}

fn validate_grouping<T: Real>(povm: &Povm<T>, grouping: &Grouping) -> Result<()> {
    if grouping.indicates_psi.is_empty() || grouping.indicates_phi.is_empty() {
        return Err(QuantumError::InvalidPartition(
            "both sides of a distinguishing split need at least one outcome".into(),
        ));
    }
    grouping.as_partition().validate(povm.labels())
}

fn positive_part<T: Real>(h: &HermitianMatrix<T>) -> Result<Vec<(T, StateVector<T>)>> {
    Ok(h.eig()?
        .pairs()
        .filter(|(w, _)| *w > T::ZERO_TOL)
        .map(|(w, v)| (w, v.clone()))
        .collect())
}

fn min_weight<T: Real>(spectrum: &[(T, StateVector<T>)]) -> T {
    spectrum.iter().map(|(w, _)| *w).fold(T::infinity(), T::min)
}

fn gram_defect<T: Real>(vectors: &[StateVector<T>]) -> Result<T> {
    let mut worst = T::zero();
    for (a_idx, a) in vectors.iter().enumerate() {
        for (b_idx, b) in vectors.iter().enumerate() {
            let target = if a_idx == b_idx {
                Complex::one()
            } else {
                Complex::zero()
            };
            worst = worst.max((a.inner(b)? - target).norm());
        }
    }
    Ok(worst)
}

/// Gram-Schmidt over the standard basis against `partial`.
fn complete_basis<T: Real>(partial: &[StateVector<T>], dim: usize) -> Vec<StateVector<T>> {
    let mut basis: Vec<Vec<Complex<T>>> = partial.iter().map(|v| v.amplitudes().to_vec()).collect();
    let mut added = Vec::new();
    for k in 0..dim {
        if basis.len() >= dim {
            break;
        }
        let mut cand = StateVector::<T>::basis(dim, k).amplitudes().to_vec();
        for b in &basis {
            let overlap: Complex<T> = b.iter().zip(&cand).map(|(x, y)| x.conj() * y).sum();
            for (c, x) in cand.iter_mut().zip(b) {
                *c -= overlap * x;
            }
        }
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm > T::lit(1e-3) {
            let inv = Complex::new(T::one() / norm, T::zero());
            let v: Vec<_> = cand.into_iter().map(|z| z * inv).collect();
            basis.push(v.clone());
            added.push(StateVector::from_raw(v));
        }
    }
    added
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure(a: &[f64]) -> DensityMatrix<f64> {
        DensityMatrix::pure(&StateVector::from_real(a).unwrap()).unwrap()
    }

    fn z_povm() -> Povm<f64> {
        Povm::new(vec![
            ("z+".into(), HermitianMatrix::diagonal(&[1.0, 0.0])),
            ("z-".into(), HermitianMatrix::diagonal(&[0.0, 1.0])),
        ])
        .unwrap()
    }

    fn alphas() -> (DensityMatrix<f64>, DensityMatrix<f64>) {
        let s = 2f64.sqrt();
        (
            pure(&[(2.0 + s).sqrt(), (2.0 - s).sqrt()]),
            pure(&[-(2.0 - s).sqrt(), (2.0 + s).sqrt()]),
        )
    }

    fn alpha_povm() -> Povm<f64> {
        let (ap, am) = alphas();
        Povm::new(vec![("a+".into(), ap.into_matrix()), ("a-".into(), am.into_matrix())]).unwrap()
    }

    #[test]
    fn z_diaphragms_distinguish_z_states() {
        let g = Grouping::new(["z-"], ["z+"]);
        assert!(is_one_shot_distinguishing(&z_povm(), &g, &pure(&[1.0, 0.0]), &pure(&[0.0, 1.0])).unwrap());
        // swapped roles are not distinguishing with the same split
        assert!(!is_one_shot_distinguishing(&z_povm(), &g, &pure(&[0.0, 1.0]), &pure(&[1.0, 0.0])).unwrap());
    }

    #[test]
    fn no_alpha_split_separates_z_from_x() {
        let zp = pure(&[1.0, 0.0]);
        let xp = pure(&[1.0, 1.0]);
        for g in [Grouping::new(["a+"], ["a-"]), Grouping::new(["a-"], ["a+"])] {
            assert!(!is_one_shot_distinguishing(&alpha_povm(), &g, &zp, &xp).unwrap());
        }
    }

    #[test]
    fn single_element_povm_cannot_be_split() {
        let trivial = Povm::new(vec![("I".into(), HermitianMatrix::<f64>::identity(2))]).unwrap();
        let zp = pure(&[1.0, 0.0]);
        for g in [
            Grouping::new(["I"], Vec::<&str>::new()),
            Grouping::new(Vec::<&str>::new(), ["I"]),
        ] {
            assert!(matches!(
                is_one_shot_distinguishing(&trivial, &g, &zp, &zp),
                Err(QuantumError::InvalidPartition(_))
            ));
        }
    }

    #[test]
    fn coarse_graining_sums_groups() {
        let quarter = HermitianMatrix::<f64>::identity(2).scale(0.25);
        let povm = Povm::new(
            ["a", "b", "c", "d"]
                .iter()
                .map(|l| (l.to_string(), quarter.clone()))
                .collect(),
        )
        .unwrap();
        let part = LabelPartition::new(vec![
            ("E".into(), vec!["a".into(), "b".into()]),
            ("F".into(), vec!["c".into(), "d".into()]),
        ]);
        let coarse = coarse_grain(&povm, &part).unwrap();
        assert_eq!(coarse.len(), 2);
        assert!(coarse
            .element("E")
            .unwrap()
            .approx_eq(&HermitianMatrix::identity(2).scale(0.5), 1e-15));
        let same = coarse_grain(&z_povm(), &LabelPartition::singletons(["z+", "z-"])).unwrap();
        assert_eq!(same, z_povm());
    }

    #[test]
    fn coarse_graining_a_distinguishing_povm_saturates_probabilities() {
        // three-outcome POVM: two outcomes fire only on ψ = z-, one only on φ = z+
        let povm = Povm::new(vec![
            ("m1".into(), HermitianMatrix::diagonal(&[0.0, 0.3])),
            ("m2".into(), HermitianMatrix::diagonal(&[0.0, 0.7])),
            ("n1".into(), HermitianMatrix::diagonal(&[1.0, 0.0])),
        ])
        .unwrap();
        let g = Grouping::new(["m1", "m2"], ["n1"]);
        let (phi, psi) = (pure(&[1.0, 0.0]), pure(&[0.0, 1.0]));
        assert!(is_one_shot_distinguishing(&povm, &g, &phi, &psi).unwrap());
        let coarse = coarse_grain(&povm, &g.as_partition()).unwrap();
        let e = coarse.element("E").unwrap();
        assert_eq!(psi.matrix().trace_product(e).unwrap(), 1.0);
        assert_eq!(phi.matrix().trace_product(e).unwrap(), 0.0);
    }

    #[test]
    fn proof_of_diagonal_case() {
        let g = Grouping::new(["z-"], ["z+"]);
        let proof = verify_orthogonality_theorem(&pure(&[1.0, 0.0]), &pure(&[0.0, 1.0]), &z_povm(), &g).unwrap();
        assert_eq!(proof.trace_phi_psi, 0.0);
        assert!(proof.steps.iter().all(ProofStep::passed));
        assert!(proof.completion.is_empty());
    }

    #[test]
    fn proof_for_alpha_states() {
        let (ap, am) = alphas();
        let g = Grouping::new(["a-"], ["a+"]);
        let proof = verify_orthogonality_theorem(&ap, &am, &alpha_povm(), &g).unwrap();
        assert!(proof.trace_phi_psi.abs() < 1e-15);
        assert_eq!(proof.steps.len(), 10);
    }

    #[test]
    fn proof_refuses_non_distinguishing_input() {
        let g = Grouping::new(["a-"], ["a+"]);
        assert!(matches!(
            verify_orthogonality_theorem(&pure(&[1.0, 0.0]), &pure(&[1.0, 1.0]), &alpha_povm(), &g),
            Err(QuantumError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn converse_construction() {
        let (povm, g) = distinguishing_povm_from_orthogonal(&pure(&[1.0, 0.0]), &pure(&[0.0, 1.0])).unwrap();
        assert_eq!(
            povm.element(PHI_OUTCOME).unwrap(),
            &HermitianMatrix::diagonal(&[1.0, 0.0])
        );
        assert_eq!(
            povm.element(PSI_OUTCOME).unwrap(),
            &HermitianMatrix::diagonal(&[0.0, 1.0])
        );
        assert!(is_one_shot_distinguishing(&povm, &g, &pure(&[1.0, 0.0]), &pure(&[0.0, 1.0])).unwrap());

        let (ap, am) = alphas();
        let (povm, g) = distinguishing_povm_from_orthogonal(&ap, &am).unwrap();
        assert!(povm.element(PHI_OUTCOME).unwrap().approx_eq(ap.matrix(), 1e-12));
        assert!(povm.element(PSI_OUTCOME).unwrap().approx_eq(am.matrix(), 1e-12));
        assert!(is_one_shot_distinguishing(&povm, &g, &ap, &am).unwrap());

        let mixed = DensityMatrix::new(HermitianMatrix::diagonal(&[0.5, 0.5, 0.0, 0.0])).unwrap();
        let e3 = DensityMatrix::pure(&StateVector::basis(4, 2)).unwrap();
        let (povm, _) = distinguishing_povm_from_orthogonal(&mixed, &e3).unwrap();
        assert!(povm
            .element(PHI_OUTCOME)
            .unwrap()
            .approx_eq(&HermitianMatrix::diagonal(&[1.0, 1.0, 0.0, 0.0]), 1e-12));
    }

    #[test]
    fn converse_rejects_overlapping_states() {
        assert!(matches!(
            distinguishing_povm_from_orthogonal(&pure(&[1.0, 0.0]), &pure(&[1.0, 1.0])),
            Err(QuantumError::NotOrthogonal { .. })
        ));
    }
}
