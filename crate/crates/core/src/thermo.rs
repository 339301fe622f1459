//! Isothermal ideal-gas heat accounting and the cyclic second-law audit.
//!
//! Heats are in units where Boltzmann's constant is 1, so a chamber with
//! `particles = N` at temperature `T` exchanges heats in multiples of `NT`.
//! Sign convention: `Q` is the heat absorbed by the gas.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::quantum::{DensityMatrix, QuantumError};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error("{what} must be strictly positive and finite, got {value}")]
    NonPositiveInput { what: &'static str, value: f64 },
    #[error("mixture weights are not convex (sum {sum}, smallest {min})")]
    NotConvex { sum: f64, min: f64 },
    #[error("cannot compare quantum contents with classical contents")]
    VariantMismatch,
    #[error("heat for step `{0}` is not finite")]
    NonFiniteHeat(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

impl From<LinalgError> for ThermoError {
    fn from(e: LinalgError) -> Self {
        ThermoError::Quantum(e.into())
    }
}

pub type Result<T> = std::result::Result<T, ThermoError>;

/// What a chamber is filled with.
#[derive(Clone, Debug, PartialEq)]
pub enum GasContents<T> {
    /// Convex mixture of gases labeled by density matrices.
    Quantum(Vec<(T, DensityMatrix<T>)>),
    /// Convex mixture of classical species, keyed by name.
    Classical(BTreeMap<String, T>),
}

impl<T: Real> GasContents<T> {
    pub fn pure(state: DensityMatrix<T>) -> Self {
        GasContents::Quantum(vec![(T::one(), state)])
    }

    pub fn quantum(mixture: Vec<(T, DensityMatrix<T>)>) -> Result<Self> {
        check_weights(mixture.iter().map(|(w, _)| *w))?;
        let dim = mixture[0].1.dim();
        if let Some((_, bad)) = mixture.iter().find(|(_, s)| s.dim() != dim) {
            return Err(LinalgError::DimMismatch {
                left: dim,
                right: bad.dim(),
            }
            .into());
        }
        Ok(GasContents::Quantum(mixture))
    }

    pub fn species(name: impl Into<String>) -> Self {
        GasContents::Classical(BTreeMap::from([(name.into(), T::one())]))
    }

    pub fn classical<S: Into<String>>(species: impl IntoIterator<Item = (S, T)>) -> Result<Self> {
        let mut bag = BTreeMap::new();
        for (name, w) in species {
            *bag.entry(name.into()).or_insert_with(T::zero) += w;
        }
        check_weights(bag.values().copied())?;
        Ok(GasContents::Classical(bag))
    }

    pub fn is_quantum(&self) -> bool {
        matches!(self, GasContents::Quantum(_))
    }

    /// `Σ w_i ρ_i` for quantum contents.
    pub fn assembled(&self) -> Option<DensityMatrix<T>> {
        match self {
            GasContents::Quantum(mixture) => {
                let dim = mixture[0].1.dim();
                let mut acc = crate::linalg::HermitianMatrix::zeros(dim);
                for (w, rho) in mixture {
                    acc = acc
                        .checked_add(&rho.matrix().scale(*w))
                        .expect("mixture components share a dimension");
                }
                Some(DensityMatrix::from_trusted(acc))
            }
            GasContents::Classical(_) => None,
        }
    }

    pub fn species_weights(&self) -> Option<&BTreeMap<String, T>> {
        match self {
            GasContents::Classical(bag) => Some(bag),
            GasContents::Quantum(_) => None,
        }
    }
}

fn check_weights<T: Real>(weights: impl Iterator<Item = T>) -> Result<()> {
    let mut sum = T::zero();
    let mut min = T::infinity();
    let mut count = 0;
    for w in weights {
        sum += w;
        min = min.min(w);
        count += 1;
    }
    if count == 0 || (sum - T::one()).abs() > T::INPUT_TOL || min <= T::zero() {
        return Err(ThermoError::NotConvex {
            sum: sum.as_f64(),
            min: min.as_f64(),
        });
    }
    Ok(())
}

/// One compartment of a container.
#[derive(Clone, Debug, PartialEq)]
pub struct GasChamber<T> {
    pub label: String,
    pub volume: T,
    pub temperature: T,
    /// Amount of gas, treated as a continuous quantity.
    pub particles: T,
    pub contents: GasContents<T>,
}

impl<T: Real> GasChamber<T> {
    pub fn new(
        label: impl Into<String>,
        volume: T,
        temperature: T,
        particles: T,
        contents: GasContents<T>,
    ) -> Result<Self> {
        positive("volume", volume)?;
        positive("temperature", temperature)?;
        positive("particle amount", particles)?;
        Ok(Self {
            label: label.into(),
            volume,
            temperature,
            particles,
            contents,
        })
    }

    /// `NkT/V` with `k = 1`.
    pub fn pressure(&self) -> T {
        self.particles * self.temperature / self.volume
    }
}

fn positive<T: Real>(what: &'static str, value: T) -> Result<()> {
    if value > T::zero() && value.is_finite() {
        Ok(())
    } else {
        Err(ThermoError::NonPositiveInput {
            what,
            value: value.as_f64(),
        })
    }
}

/// `Q = W = N k T ln(V_f / V_i)` with `k = 1`.
pub fn isothermal_heat<T: Real>(particles: T, temperature: T, v_initial: T, v_final: T) -> Result<T> {
    positive("particle amount", particles)?;
    positive("temperature", temperature)?;
    positive("initial volume", v_initial)?;
    positive("final volume", v_final)?;
    Ok(particles * temperature * (v_final / v_initial).ln())
}

/// Compares contents as physical states: quantum mixtures by their
/// assembled density matrix, classical bags by species weights.
pub fn contents_equal<T: Real>(a: &GasContents<T>, b: &GasContents<T>, tol: T) -> Result<bool> {
    match (a, b) {
        (GasContents::Quantum(_), GasContents::Quantum(_)) => {
            let (ra, rb) = (a.assembled().unwrap(), b.assembled().unwrap());
            Ok(ra.dim() == rb.dim() && ra.approx_eq(&rb, tol))
        }
        (GasContents::Classical(x), GasContents::Classical(y)) => {
            let keys_match = x.keys().all(|k| y.contains_key(k) || x[k] <= tol)
                && y.keys().all(|k| x.contains_key(k) || y[k] <= tol);
            Ok(keys_match
                && x.iter()
                    .all(|(k, w)| (*w - y.get(k).copied().unwrap_or_else(T::zero)).abs() <= tol))
        }
        _ => Err(ThermoError::VariantMismatch),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeatStep<T> {
    pub description: String,
    pub heat: T,
}

/// Ordered record of heat absorbed per process step.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatLedger<T> {
    pub steps: Vec<HeatStep<T>>,
    pub boltzmann_constant: T,
    pub cycle_claimed: bool,
}

impl<T: Real> Default for HeatLedger<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> HeatLedger<T> {
    pub fn new() -> Self {
        Self {
            steps: Vec::new(),
            boltzmann_constant: T::one(),
            cycle_claimed: false,
        }
    }

    pub fn push(&mut self, description: impl Into<String>, heat: T) -> Result<()> {
        let description = description.into();
        if !heat.is_finite() {
            return Err(ThermoError::NonFiniteHeat(description));
        }
        self.steps.push(HeatStep { description, heat });
        Ok(())
    }

    pub fn claim_cycle(&mut self) {
        self.cycle_claimed = true;
    }

    /// Sum in step order, in `k = 1` units.
    pub fn total(&self) -> T {
        self.steps.iter().fold(T::zero(), |acc, s| acc + s.heat)
    }

    /// Total in absolute units (multiplied by the configured `k`).
    pub fn absolute_total(&self) -> T {
        self.total() * self.boltzmann_constant
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SecondLaw {
    Satisfied,
    Violated,
    /// The process was not a cycle, so `Q ≤ 0` does not constrain it.
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleVerdict<T> {
    pub cycle_claimed: bool,
    pub cycle_actual: bool,
    pub total_heat: T,
    pub second_law: SecondLaw,
    /// Set when a cycle was claimed but the final state differs, so any
    /// positive net heat is not a second-law violation.
    pub apparent_violation_explained: bool,
}

/// Chamber-by-chamber equality: same count, volumes within relative `1e-9`,
/// contents equal within the derived tolerance. Labels are not compared.
pub fn chambers_match<T: Real>(initial: &[GasChamber<T>], final_: &[GasChamber<T>]) -> bool {
    initial.len() == final_.len()
        && initial.iter().zip(final_).all(|(a, b)| {
            let scale = a.volume.abs().max(b.volume.abs());
            (a.volume - b.volume).abs() <= T::DERIVED_TOL * scale
                && contents_equal(&a.contents, &b.contents, T::DERIVED_TOL).unwrap_or(false)
        })
}

pub fn audit_cycle<T: Real>(
    ledger: &HeatLedger<T>,
    initial: &[GasChamber<T>],
    final_: &[GasChamber<T>],
) -> CycleVerdict<T> {
    let cycle_actual = chambers_match(initial, final_);
    let total_heat = ledger.total();
    let second_law = if !cycle_actual {
        SecondLaw::NotApplicable
    } else if total_heat <= T::DERIVED_TOL {
        SecondLaw::Satisfied
    } else {
        SecondLaw::Violated
    };
    CycleVerdict {
        cycle_claimed: ledger.cycle_claimed,
        cycle_actual,
        total_heat,
        second_law,
        apparent_violation_explained: ledger.cycle_claimed && !cycle_actual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{HermitianMatrix, StateVector};

    const LN2: f64 = std::f64::consts::LN_2;

    fn pure(a: &[f64]) -> DensityMatrix<f64> {
        DensityMatrix::pure(&StateVector::from_real(a).unwrap()).unwrap()
    }

    #[test]
    fn isothermal_heat_examples() {
        assert!((isothermal_heat(1.0, 1.0, 1.0, 0.5).unwrap() + LN2).abs() < 1e-15);
        assert_eq!(isothermal_heat(1.0, 1.0, 1.0, 1.0).unwrap(), 0.0);
        assert!((isothermal_heat(1.0f64, 1.0, 0.5, 1.0).unwrap() - LN2).abs() < 1e-12);
        assert!(matches!(
            isothermal_heat(1.0, 0.0, 1.0, 1.0),
            Err(ThermoError::NonPositiveInput {
                what: "temperature",
                ..
            })
        ));
        assert!(isothermal_heat(-1.0, 1.0, 1.0, 1.0).is_err());
        assert!(isothermal_heat(1.0, 1.0, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn willard_mixture_decompositions_agree() {
        let zz = pure(&[1.0, 0.0]).tensor(&pure(&[1.0, 0.0]));
        let xz = pure(&[1.0, 1.0]).tensor(&pure(&[0.0, 1.0]));
        let a = GasContents::quantum(vec![(0.5, zz.clone()), (0.5, xz.clone())]).unwrap();
        let tau = DensityMatrix::new(zz.matrix().scale(0.5).checked_add(&xz.matrix().scale(0.5)).unwrap()).unwrap();
        assert!(contents_equal(&a, &GasContents::pure(tau), 1e-12).unwrap());
        assert!(contents_equal(&a, &a, 0.0).unwrap());
    }

    #[test]
    fn classical_bags() {
        let argon = GasContents::<f64>::species("Ar");
        let marie = GasContents::classical([("aAr", 0.5), ("bAr", 0.5)]).unwrap();
        assert!(!contents_equal(&argon, &marie, 1e-9).unwrap());
        assert!(contents_equal(&marie, &marie.clone(), 0.0).unwrap());
        assert_eq!(
            contents_equal(&argon, &GasContents::pure(pure(&[1.0, 0.0])), 1e-9),
            Err(ThermoError::VariantMismatch)
        );
        assert!(matches!(
            GasContents::classical([("a", 0.5), ("b", 0.4)]),
            Err(ThermoError::NotConvex { .. })
        ));
    }

    #[test]
    fn quantum_contents_validation() {
        assert!(
            GasContents::quantum(vec![(0.5, pure(&[1.0, 0.0])), (0.5, DensityMatrix::maximally_mixed(3))]).is_err()
        );
        assert!(GasContents::quantum(vec![(1.0, pure(&[1.0, 0.0])), (0.0, pure(&[0.0, 1.0]))]).is_err());
    }

    #[test]
    fn chamber_validation_and_pressure() {
        let c = GasChamber::new("a", 0.5, 2.0, 0.5, GasContents::<f64>::species("Ar")).unwrap();
        assert_eq!(c.pressure(), 2.0);
        assert!(GasChamber::new("a", 0.0, 1.0, 1.0, GasContents::<f64>::species("Ar")).is_err());
        assert!(GasChamber::new("a", 1.0, 1.0, f64::NAN, GasContents::<f64>::species("Ar")).is_err());
    }

    #[test]
    fn empty_ledger_on_identical_chambers() {
        let chambers = vec![GasChamber::new("a", 1.0, 1.0, 1.0, GasContents::species("Ar")).unwrap()];
        let v = audit_cycle(&HeatLedger::<f64>::new(), &chambers, &chambers);
        assert!(v.cycle_actual);
        assert_eq!(v.total_heat, 0.0);
        assert_eq!(v.second_law, SecondLaw::Satisfied);
        assert!(!v.apparent_violation_explained);
    }

    #[test]
    fn positive_heat_cycle_is_flagged() {
        let chambers = vec![GasChamber::new("a", 1.0, 1.0, 1.0, GasContents::species("Ar")).unwrap()];
        let mut ledger = HeatLedger::new();
        ledger.push("mix", LN2).unwrap();
        ledger.push("separate", -0.4164955).unwrap();
        ledger.claim_cycle();
        let v = audit_cycle(&ledger, &chambers, &chambers);
        assert_eq!(v.second_law, SecondLaw::Violated);
        assert!((v.total_heat - 0.2766516).abs() < 1e-6);
    }

    #[test]
    fn unfinished_cycle_is_not_applicable() {
        let a = vec![GasChamber::new("a", 1.0, 1.0, 1.0, GasContents::species("Ar")).unwrap()];
        let b = vec![GasChamber::new(
            "a",
            1.0,
            1.0,
            1.0,
            GasContents::classical([("aAr", 0.5), ("bAr", 0.5)]).unwrap(),
        )
        .unwrap()];
        let mut ledger = HeatLedger::new();
        ledger.push("mix", LN2).unwrap();
        ledger.claim_cycle();
        let v = audit_cycle(&ledger, &a, &b);
        assert!(!v.cycle_actual);
        assert_eq!(v.second_law, SecondLaw::NotApplicable);
        assert!(v.apparent_violation_explained);
        assert!(ledger.push("bad", f64::NAN).is_err());
    }

    #[test]
    fn volume_mismatch_breaks_cycle() {
        let c = |v: f64| GasChamber::new("a", v, 1.0, v, GasContents::pure(pure(&[1.0, 0.0]))).unwrap();
        assert!(!chambers_match(&[c(0.5)], &[c(0.5 + 1e-6)]));
        assert!(chambers_match(&[c(0.5)], &[c(0.5 + 1e-12)]));
        assert!(!chambers_match(&[c(0.5)], &[c(0.5), c(0.5)]));
        let _ = HermitianMatrix::<f64>::identity(1);
    }
}
