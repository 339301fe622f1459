//! Observer-relative descriptions of one physical run.
//!
//! A scenario is executed once on the ground truth. Each observer then sees
//! every intermediate state through its own reduction (a partial trace, or a
//! renaming of species it cannot tell apart) and audits the cycle in its own
//! description. Heats are measured quantities and shared by everyone.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::diaphragm::{self, DiaphragmError, Side};
use crate::linalg::{ComplexMatrix, HermitianMatrix, Keep, StateVector};
use crate::quantum::{Povm, ProjectiveInstrument, QuantumError};
use crate::scalar::Real;
use crate::thermo::{audit_cycle, CycleVerdict, GasChamber, GasContents, HeatLedger, ThermoError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObserverError {
    #[error("observer `{observer}` cannot reduce these contents: {reason}")]
    IncompatibleReduction { observer: String, reason: String },
    #[error(transparent)]
    Thermo(#[from] ThermoError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("no chamber labeled `{0}`")]
    UnknownChamber(String),
    #[error("chamber label `{0}` is already in use")]
    DuplicateChamber(String),
    #[error(transparent)]
    Diaphragm(#[from] DiaphragmError),
    #[error(transparent)]
    Observer(#[from] ObserverError),
}

/// Failure while running a scenario; `step` is 1-based, 0 means the initial
/// state.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("step {step} ({description}): {source}")]
pub struct ScenarioError {
    pub step: usize,
    pub description: String,
    pub source: RunError,
}

/// How an observer reduces the ground-truth description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObserverMode {
    /// Sees everything.
    Full,
    /// Sees only one factor of a bipartite Hilbert space.
    PartialTrace { dims: (usize, usize), keep: Keep },
    /// Cannot tell some species apart; maps each true species to the name
    /// the observer uses for it.
    SpeciesMap(BTreeMap<String, String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observer {
    pub name: String,
    pub mode: ObserverMode,
}

impl Observer {
    pub fn full(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            mode: ObserverMode::Full,
        }
    }

    pub fn partial_trace(name: impl Into<String>, d1: usize, d2: usize, keep: Keep) -> Self {
        Self {
            name: name.into(),
            mode: ObserverMode::PartialTrace { dims: (d1, d2), keep },
        }
    }

    pub fn species_map<A: Into<String>, B: Into<String>>(
        name: impl Into<String>,
        map: impl IntoIterator<Item = (A, B)>,
    ) -> Self {
        Self {
            name: name.into(),
            mode: ObserverMode::SpeciesMap(map.into_iter().map(|(a, b)| (a.into(), b.into())).collect()),
        }
    }

    fn incompatible(&self, reason: impl Into<String>) -> ObserverError {
        ObserverError::IncompatibleReduction {
            observer: self.name.clone(),
            reason: reason.into(),
        }
    }
}

/// What `obs` sees of `truth`.
///
/// Partial traces act on the assembled mixture, so the result is a single
/// reduced density matrix. Species maps rename and merge weights; species
/// the map does not cover keep their own name.
pub fn view_contents<T: Real>(obs: &Observer, truth: &GasContents<T>) -> Result<GasContents<T>, ObserverError> {
    match (&obs.mode, truth) {
        (ObserverMode::Full, _) => Ok(truth.clone()),
        (ObserverMode::PartialTrace { dims, keep }, GasContents::Quantum(_)) => {
            let rho = truth.assembled().expect("quantum contents");
            if dims.0 * dims.1 != rho.dim() {
                return Err(obs.incompatible(format!(
                    "factors {}x{} do not multiply to dimension {}",
                    dims.0,
                    dims.1,
                    rho.dim()
                )));
            }
            let reduced = rho
                .partial_trace(*dims, *keep)
                .map_err(|e| obs.incompatible(e.to_string()))?;
            Ok(GasContents::pure(reduced))
        }
        (ObserverMode::SpeciesMap(map), GasContents::Classical(bag)) => {
            let renamed = bag.iter().map(|(s, w)| (map.get(s).unwrap_or(s).clone(), *w));
            Ok(GasContents::classical(renamed)?)
        }
        (ObserverMode::PartialTrace { .. }, GasContents::Classical(_)) => {
            Err(obs.incompatible("partial trace of a classical gas"))
        }
        (ObserverMode::SpeciesMap(_), GasContents::Quantum(_)) => Err(obs.incompatible("species map of a quantum gas")),
    }
}

pub fn view_chambers<T: Real>(obs: &Observer, chambers: &[GasChamber<T>]) -> Result<Vec<GasChamber<T>>, ObserverError> {
    chambers
        .iter()
        .map(|c| {
            Ok(GasChamber {
                contents: view_contents(obs, &c.contents)?,
                ..c.clone()
            })
        })
        .collect()
}

/// One process step acting on the labeled chambers of a container.
#[derive(Clone, Debug, PartialEq)]
pub enum Operation<T> {
    Separate {
        chamber: String,
        instrument: ProjectiveInstrument<T>,
    },
    ClassicalSeparate {
        chamber: String,
        permeability: BTreeMap<String, Side>,
    },
    /// Merges `chambers` (all chambers when empty) into `target`, placed
    /// where the first merged chamber was.
    Mix {
        chambers: Vec<String>,
        target: String,
        distinguishing: bool,
    },
    Rotate {
        chamber: String,
        unitary: ComplexMatrix<T>,
    },
    Partition {
        chamber: String,
        parts: Vec<(String, T)>,
    },
    /// Declares the current state to be the initial one. No heat.
    ClaimCycle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario<T> {
    pub initial: Vec<GasChamber<T>>,
    pub steps: Vec<(String, Operation<T>)>,
}

impl<T: Real> Scenario<T> {
    pub fn new(initial: Vec<GasChamber<T>>) -> Self {
        Self {
            initial,
            steps: Vec::new(),
        }
    }

    pub fn then(mut self, description: impl Into<String>, op: Operation<T>) -> Self {
        self.steps.push((description.into(), op));
        self
    }
}

/// One observer's account of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct ObserverView<T> {
    pub name: String,
    /// Index 0 is the initial state, index `k` the state after step `k`.
    pub snapshots: Vec<Vec<GasChamber<T>>>,
    pub ledger: HeatLedger<T>,
    /// Audit of the final state against the initial one.
    pub verdict: CycleVerdict<T>,
    first_claim: Option<usize>,
}

impl<T: Real> ObserverView<T> {
    /// Audit as it stood after step `step` (0 = before anything ran).
    pub fn verdict_at(&self, step: usize) -> CycleVerdict<T> {
        let step = step.min(self.snapshots.len() - 1);
        let ledger = HeatLedger {
            steps: self.ledger.steps[..step].to_vec(),
            boltzmann_constant: self.ledger.boltzmann_constant,
            cycle_claimed: self.first_claim.is_some_and(|c| c <= step),
        };
        audit_cycle(&ledger, &self.snapshots[0], &self.snapshots[step])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioRun<T> {
    /// Shared by all observers.
    pub ledger: HeatLedger<T>,
    pub truth: Vec<Vec<GasChamber<T>>>,
    pub views: Vec<ObserverView<T>>,
}

impl<T: Real> ScenarioRun<T> {
    pub fn view(&self, name: &str) -> Option<&ObserverView<T>> {
        self.views.iter().find(|v| v.name == name)
    }
}

/// Executes `scenario` on the ground truth and renders it for each observer.
pub fn run_scenario<T: Real>(scenario: &Scenario<T>, observers: &[Observer]) -> Result<ScenarioRun<T>, ScenarioError> {
    let fail = |step: usize, description: &str| {
        let description = description.to_string();
        move |source: RunError| ScenarioError {
            step,
            description,
            source,
        }
    };

    check_unique(&scenario.initial).map_err(fail(0, "initial state"))?;
    let mut ledger = HeatLedger::new();
    let mut truth = vec![scenario.initial.clone()];
    let mut first_claim = None;
    for (i, (description, op)) in scenario.steps.iter().enumerate() {
        let current = truth.last().expect("initial snapshot");
        let (next, heat) = apply(current, op).map_err(fail(i + 1, description))?;
        if matches!(op, Operation::ClaimCycle) {
            ledger.claim_cycle();
            first_claim.get_or_insert(i + 1);
        }
        ledger
            .push(description.clone(), heat)
            .map_err(|e| fail(i + 1, description)(RunError::Diaphragm(e.into())))?;
        truth.push(next);
    }

    let mut views = Vec::with_capacity(observers.len());
    for obs in observers {
        let snapshots = truth
            .iter()
            .enumerate()
            .map(|(k, chambers)| {
                view_chambers(obs, chambers).map_err(|e| {
                    let description = if k == 0 {
                        "initial state"
                    } else {
                        &scenario.steps[k - 1].0
                    };
                    fail(k, description)(e.into())
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let verdict = audit_cycle(&ledger, &snapshots[0], snapshots.last().expect("initial snapshot"));
        views.push(ObserverView {
            name: obs.name.clone(),
            snapshots,
            ledger: ledger.clone(),
            verdict,
            first_claim,
        });
    }
    Ok(ScenarioRun { ledger, truth, views })
}

fn position<T>(chambers: &[GasChamber<T>], label: &str) -> Result<usize, RunError> {
    chambers
        .iter()
        .position(|c| c.label == label)
        .ok_or_else(|| RunError::UnknownChamber(label.to_string()))
}

fn check_unique<T>(chambers: &[GasChamber<T>]) -> Result<(), RunError> {
    for (i, c) in chambers.iter().enumerate() {
        if chambers[..i].iter().any(|d| d.label == c.label) {
            return Err(RunError::DuplicateChamber(c.label.clone()));
        }
    }
    Ok(())
}

fn replace<T: Clone>(chambers: &[GasChamber<T>], at: usize, with: Vec<GasChamber<T>>) -> Vec<GasChamber<T>> {
    let mut next = chambers[..at].to_vec();
    next.extend(with);
    next.extend_from_slice(&chambers[at + 1..]);
    next
}

fn apply<T: Real>(chambers: &[GasChamber<T>], op: &Operation<T>) -> Result<(Vec<GasChamber<T>>, T), RunError> {
    let (next, heat) = match op {
        Operation::Separate { chamber, instrument } => {
            let at = position(chambers, chamber)?;
            let r = diaphragm::separate(&chambers[at], instrument)?;
            (replace(chambers, at, r.chambers), r.heat)
        }
        Operation::ClassicalSeparate { chamber, permeability } => {
            let at = position(chambers, chamber)?;
            let r = diaphragm::classical_separate(&chambers[at], permeability)?;
            (replace(chambers, at, r.chambers), r.heat)
        }
        Operation::Mix {
            chambers: labels,
            target,
            distinguishing,
        } => {
            let mut picked = if labels.is_empty() {
                (0..chambers.len()).collect()
            } else {
                labels
                    .iter()
                    .map(|l| position(chambers, l))
                    .collect::<Result<Vec<_>, _>>()?
            };
            picked.sort_unstable();
            picked.dedup();
            let merging: Vec<_> = picked.iter().map(|&i| chambers[i].clone()).collect();
            let r = diaphragm::mix(&merging, *distinguishing, target)?;
            let mut next = Vec::with_capacity(chambers.len() + 1 - picked.len());
            for (i, c) in chambers.iter().enumerate() {
                if i == picked[0] {
                    next.push(r.chamber.clone());
                } else if !picked.contains(&i) {
                    next.push(c.clone());
                }
            }
            (next, r.heat)
        }
        Operation::Rotate { chamber, unitary } => {
            let at = position(chambers, chamber)?;
            let rotated = diaphragm::rotate(&chambers[at], unitary)?;
            (replace(chambers, at, vec![rotated]), T::zero())
        }
        Operation::Partition { chamber, parts } => {
            let at = position(chambers, chamber)?;
            let split = diaphragm::partition(&chambers[at], parts)?;
            (replace(chambers, at, split), T::zero())
        }
        Operation::ClaimCycle => (chambers.to_vec(), T::zero()),
    };
    check_unique(&next)?;
    Ok((next, heat))
}

/// `|α±⟩` of the eigenbasis of `½z+ + ½x+`.
pub fn alpha_kets<T: Real>() -> (StateVector<T>, StateVector<T>) {
    let two = T::lit(2.0);
    let (big, small) = ((two + two.sqrt()).sqrt(), (two - two.sqrt()).sqrt());
    let half = T::lit(0.5);
    (
        StateVector::from_real(&[half * big, half * small]).expect("unit literal"),
        StateVector::from_real(&[-half * small, half * big]).expect("unit literal"),
    )
}

/// Willard's instrument `E± = |α±z+⟩⟨α±z+| + |α±z−⟩⟨α±z−| = α± ⊗ I`,
/// labeled `plus` and `minus`.
pub fn willard_instrument<T: Real>() -> ProjectiveInstrument<T> {
    let (plus, minus) = alpha_kets::<T>();
    let lift = |v: &StateVector<T>| {
        HermitianMatrix::projector(v)
            .expect("unit vector")
            .tensor(&HermitianMatrix::identity(2))
    };
    ProjectiveInstrument::new(vec![("plus".into(), lift(&plus)), ("minus".into(), lift(&minus))])
        .expect("E+ and E- are complementary projectors")
}

pub fn build_willard_povm<T: Real>() -> Povm<T> {
    willard_instrument().as_povm()
}

impl From<QuantumError> for RunError {
    fn from(e: QuantumError) -> Self {
        RunError::Diaphragm(e.into())
    }
}
