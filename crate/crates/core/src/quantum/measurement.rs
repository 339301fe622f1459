use std::collections::BTreeSet;

use super::{DensityMatrix, QuantumError, Result};
use crate::linalg::HermitianMatrix;
use crate::scalar::Real;

/// Labeled positive operators summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm<T> {
    elements: Vec<(String, HermitianMatrix<T>)>,
}

impl<T: Real> Povm<T> {
    pub fn new(elements: Vec<(String, HermitianMatrix<T>)>) -> Result<Self> {
        let dim = check_labels_and_dims(&elements)?;
        for (label, e) in &elements {
            let min_eigenvalue = e.eig()?.min_eigenvalue();
            if min_eigenvalue < -T::ZERO_TOL {
                return Err(QuantumError::NotPositive {
                    label: label.clone(),
                    min_eigenvalue: min_eigenvalue.as_f64(),
                });
            }
        }
        check_complete(&elements, dim)?;
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[(String, HermitianMatrix<T>)] {
        &self.elements
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(|(l, _)| l.as_str())
    }

    pub fn element(&self, label: &str) -> Option<&HermitianMatrix<T>> {
        self.elements.iter().find(|(l, _)| l == label).map(|(_, e)| e)
    }

    pub fn dim(&self) -> usize {
        self.elements[0].1.dim()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `(label, tr(ρ E))` for every element.
    pub fn probabilities(&self, rho: &DensityMatrix<T>) -> Result<Vec<(String, T)>> {
        self.elements
            .iter()
            .map(|(l, e)| Ok((l.clone(), super::outcome_probability(rho, e)?)))
            .collect()
    }
}

/// Mutually orthogonal projectors summing to the identity, with the
/// Lüders update `ρ ↦ ΠρΠ / tr(ΠρΠ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveInstrument<T> {
    projectors: Vec<(String, HermitianMatrix<T>)>,
}

impl<T: Real> ProjectiveInstrument<T> {
    pub fn new(projectors: Vec<(String, HermitianMatrix<T>)>) -> Result<Self> {
        let dim = check_labels_and_dims(&projectors)?;
        for (label, p) in &projectors {
            if !p.is_idempotent(T::ZERO_TOL)? {
                return Err(QuantumError::NotIdempotent { label: label.clone() });
            }
        }
        for (i, (a, pa)) in projectors.iter().enumerate() {
            for (b, pb) in &projectors[i + 1..] {
                let prod = pa.product(pb)?;
                let worst = prod.max_abs_diff(&crate::linalg::ComplexMatrix::zeros(dim))?;
                if worst > T::ZERO_TOL {
                    return Err(QuantumError::OverlappingProjectors {
                        first: a.clone(),
                        second: b.clone(),
                    });
                }
            }
        }
        check_complete(&projectors, dim)?;
        Ok(Self { projectors })
    }

    pub fn projectors(&self) -> &[(String, HermitianMatrix<T>)] {
        &self.projectors
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.projectors.iter().map(|(l, _)| l.as_str())
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].1.dim()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn relabel(self, labels: &[String]) -> Result<Self> {
        if labels.len() != self.projectors.len() {
            return Err(QuantumError::InvalidPartition(format!(
                "{} labels given for {} projectors",
                labels.len(),
                self.projectors.len()
            )));
        }
        let projectors = labels
            .iter()
            .cloned()
            .zip(self.projectors.into_iter().map(|(_, p)| p))
            .collect();
        Self::new(projectors)
    }

    pub fn as_povm(&self) -> Povm<T> {
        Povm {
            elements: self.projectors.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<T> {
    pub label: String,
    pub probability: T,
    /// Absent when the outcome probability is below the cutoff.
    pub post_state: Option<DensityMatrix<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution<T> {
    pub outcomes: Vec<Outcome<T>>,
}

impl<T: Real> OutcomeDistribution<T> {
    pub fn total_probability(&self) -> T {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    pub fn get(&self, label: &str) -> Option<&Outcome<T>> {
        self.outcomes.iter().find(|o| o.label == label)
    }
}

/// Partition of outcome labels into named groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelPartition {
    pub groups: Vec<(String, Vec<String>)>,
}

impl LabelPartition {
    pub fn new(groups: Vec<(String, Vec<String>)>) -> Self {
        Self { groups }
    }

    /// Every label in its own group, named after itself.
    pub fn singletons<'a>(labels: impl IntoIterator<Item = &'a str>) -> Self {
        Self {
            groups: labels
                .into_iter()
                .map(|l| (l.to_string(), vec![l.to_string()]))
                .collect(),
        }
    }

    /// Checks that the groups cover `labels` exactly once and are nonempty.
    pub fn validate<'a>(&self, labels: impl IntoIterator<Item = &'a str>) -> Result<()> {
        let expected: BTreeSet<&str> = labels.into_iter().collect();
        let mut seen = BTreeSet::new();
        let mut names = BTreeSet::new();
        for (name, members) in &self.groups {
            if !names.insert(name.as_str()) {
                return Err(QuantumError::InvalidPartition(format!("group `{name}` named twice")));
            }
            if members.is_empty() {
                return Err(QuantumError::InvalidPartition(format!("group `{name}` is empty")));
            }
            for m in members {
                if !expected.contains(m.as_str()) {
                    return Err(QuantumError::InvalidPartition(format!("unknown label `{m}`")));
                }
                if !seen.insert(m.as_str()) {
                    return Err(QuantumError::InvalidPartition(format!("label `{m}` appears twice")));
                }
            }
        }
        if seen.len() != expected.len() {
            let missing: Vec<_> = expected.difference(&seen).collect();
            return Err(QuantumError::InvalidPartition(format!(
                "labels not covered: {missing:?}"
            )));
        }
        Ok(())
    }
}

/// Two-way split of outcome labels for a one-shot discrimination of φ
/// against ψ.
///
/// `indicates_psi` holds the outcomes that never occur for φ (so seeing
/// one means ψ was prepared); `indicates_phi` the converse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grouping {
    pub indicates_psi: Vec<String>,
    pub indicates_phi: Vec<String>,
}

impl Grouping {
    pub fn new<S: Into<String>>(
        indicates_psi: impl IntoIterator<Item = S>,
        indicates_phi: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            indicates_psi: indicates_psi.into_iter().map(Into::into).collect(),
            indicates_phi: indicates_phi.into_iter().map(Into::into).collect(),
        }
    }

    pub const PSI_GROUP: &'static str = "E";
    pub const PHI_GROUP: &'static str = "F";

    pub fn as_partition(&self) -> LabelPartition {
        LabelPartition::new(vec![
            (Self::PSI_GROUP.to_string(), self.indicates_psi.clone()),
            (Self::PHI_GROUP.to_string(), self.indicates_phi.clone()),
        ])
    }
}

fn check_labels_and_dims<T: Real>(elements: &[(String, HermitianMatrix<T>)]) -> Result<usize> {
    let first = elements.first().ok_or(QuantumError::EmptyPovm)?;
    let dim = first.1.dim();
    let mut labels = BTreeSet::new();
    for (label, e) in elements {
        if !labels.insert(label.as_str()) {
            return Err(QuantumError::DuplicateLabel(label.clone()));
        }
        if e.dim() != dim {
            return Err(crate::linalg::LinalgError::DimMismatch {
                left: dim,
                right: e.dim(),
            }
            .into());
        }
    }
    Ok(dim)
}

fn check_complete<T: Real>(elements: &[(String, HermitianMatrix<T>)], dim: usize) -> Result<()> {
    let mut sum = HermitianMatrix::zeros(dim);
    for (_, e) in elements {
        sum = sum.checked_add(e)?;
    }
    let deviation = sum.max_abs_diff(&HermitianMatrix::identity(dim))?;
    if deviation > T::ZERO_TOL {
        return Err(QuantumError::Incomplete {
            deviation: deviation.as_f64(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z_instrument() -> ProjectiveInstrument<f64> {
        ProjectiveInstrument::new(vec![
            ("up".into(), HermitianMatrix::diagonal(&[1.0, 0.0])),
            ("down".into(), HermitianMatrix::diagonal(&[0.0, 1.0])),
        ])
        .unwrap()
    }

    #[test]
    fn instrument_validation() {
        assert_eq!(z_instrument().len(), 2);
        let x = HermitianMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let overlapping = ProjectiveInstrument::new(vec![
            ("z".into(), HermitianMatrix::diagonal(&[1.0, 0.0])),
            ("x".into(), x),
        ]);
        assert!(matches!(overlapping, Err(QuantumError::OverlappingProjectors { .. })));
        let not_projector =
            ProjectiveInstrument::new(vec![("half".into(), HermitianMatrix::<f64>::identity(2).scale(0.5))]);
        assert!(matches!(not_projector, Err(QuantumError::NotIdempotent { .. })));
        let incomplete = ProjectiveInstrument::new(vec![("up".into(), HermitianMatrix::<f64>::diagonal(&[1.0, 0.0]))]);
        assert!(matches!(incomplete, Err(QuantumError::Incomplete { .. })));
        let dup = ProjectiveInstrument::new(vec![
            ("a".into(), HermitianMatrix::<f64>::diagonal(&[1.0, 0.0])),
            ("a".into(), HermitianMatrix::diagonal(&[0.0, 1.0])),
        ]);
        assert_eq!(dup, Err(QuantumError::DuplicateLabel("a".into())));
        assert_eq!(ProjectiveInstrument::<f64>::new(vec![]), Err(QuantumError::EmptyPovm));
    }

    #[test]
    fn povm_validation() {
        let half = HermitianMatrix::<f64>::identity(2).scale(0.5);
        assert!(Povm::new(vec![("a".into(), half.clone()), ("b".into(), half.clone())]).is_ok());
        let neg = HermitianMatrix::diagonal(&[1.5, -0.5]);
        let rest = HermitianMatrix::diagonal(&[-0.5, 1.5]);
        assert!(matches!(
            Povm::new(vec![("a".into(), neg), ("b".into(), rest)]),
            Err(QuantumError::NotPositive { .. })
        ));
    }

    #[test]
    fn partition_validation() {
        let labels = ["a", "b", "c"];
        let ok = LabelPartition::new(vec![
            ("E".into(), vec!["a".into()]),
            ("F".into(), vec!["b".into(), "c".into()]),
        ]);
        assert!(ok.validate(labels).is_ok());
        let missing = LabelPartition::new(vec![("E".into(), vec!["a".into()])]);
        assert!(missing.validate(labels).is_err());
        let twice = LabelPartition::new(vec![
            ("E".into(), vec!["a".into(), "b".into()]),
            ("F".into(), vec!["b".into(), "c".into()]),
        ]);
        assert!(twice.validate(labels).is_err());
        let empty = LabelPartition::new(vec![
            ("E".into(), vec![]),
            ("F".into(), vec!["a".into(), "b".into(), "c".into()]),
        ]);
        assert!(empty.validate(labels).is_err());
        assert!(LabelPartition::singletons(labels).validate(labels).is_ok());
    }
}
