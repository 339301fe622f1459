//! Semi-permeable diaphragms: measurement-driven separation of a chamber into
//! equal-pressure parts, the inverse mixing, and the isochoric steps (unitary
//! rotation, inserting a partition) that complete a cycle.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linalg::ComplexMatrix;
use crate::quantum::{apply_instrument, apply_unitary, are_orthogonal, Outcome, ProjectiveInstrument, QuantumError};
use crate::scalar::Real;
use crate::thermo::{isothermal_heat, GasChamber, GasContents, ThermoError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiaphragmError {
    #[error("chamber `{0}` does not hold a quantum gas")]
    NotQuantum(String),
    #[error("chamber `{0}` does not hold a classical gas")]
    NotClassical(String),
    #[error("state dimension {state} does not match instrument dimension {instrument}")]
    DimMismatch { state: usize, instrument: usize },
    #[error("chambers `{first}` and `{second}` are at different temperatures")]
    TemperatureMismatch { first: String, second: String },
    #[error(
        "gases in `{first}` and `{second}` are not orthogonal (overlap {overlap:.3e}); no diaphragm separates them"
    )]
    NotOrthogonal {
        first: String,
        second: String,
        overlap: f64,
    },
    #[error("cannot mix quantum and classical gases")]
    VariantMismatch,
    #[error("permeability does not cover species `{0}`")]
    UnknownSpecies(String),
    #[error("nothing to mix")]
    NoChambers,
    #[error("partition fractions must be positive and sum to 1: {0}")]
    InvalidFractions(String),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

pub type Result<T> = std::result::Result<T, DiaphragmError>;

/// Children of a separation, in outcome order, with the heat absorbed.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationResult<T> {
    pub chambers: Vec<GasChamber<T>>,
    pub heat: T,
    /// Every outcome, including those too improbable to get a chamber.
    /// Classical separations carry no post-state.
    pub per_outcome: Vec<Outcome<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixResult<T> {
    pub chamber: GasChamber<T>,
    pub heat: T,
}

/// What a classical diaphragm does with a species.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Transmitted,
    Reflected,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Transmitted => "transmitted",
            Side::Reflected => "reflected",
        }
    }
}

/// Separates a quantum gas with a diaphragm per instrument outcome.
///
/// Each outcome with probability `p > OUTCOME_CUTOFF` gets a chamber of
/// volume `pV` holding `pN` of the gas in the Lüders post-state, so all
/// children keep the parent's pressure. The heat is that of compressing
/// each fraction isothermally from `V` to `pV`: `NT Σ p ln p`.
pub fn separate<T: Real>(chamber: &GasChamber<T>, inst: &ProjectiveInstrument<T>) -> Result<SeparationResult<T>> {
    let rho = chamber
        .contents
        .assembled()
        .ok_or_else(|| DiaphragmError::NotQuantum(chamber.label.clone()))?;
    if rho.dim() != inst.dim() {
        return Err(DiaphragmError::DimMismatch {
            state: rho.dim(),
            instrument: inst.dim(),
        });
    }
    let distribution = apply_instrument(&rho, inst)?;
    let kept: Vec<_> = distribution
        .outcomes
        .iter()
        .filter(|o| o.probability > T::OUTCOME_CUTOFF && o.post_state.is_some())
        .collect();
    let total = kept.iter().fold(T::zero(), |acc, o| acc + o.probability);
    let mut chambers = Vec::with_capacity(kept.len());
    let mut heat = T::zero();
    for outcome in kept {
        let p = outcome.probability / total;
        let state = outcome.post_state.clone().expect("filtered above");
        let child = split_off(chamber, &outcome.label, p, GasContents::pure(state))?;
        heat += isothermal_heat(child.particles, chamber.temperature, chamber.volume, child.volume)?;
        chambers.push(child);
    }
    Ok(SeparationResult {
        chambers,
        heat,
        per_outcome: distribution.outcomes,
    })
}

/// Separates a classical species bag: transmitted species go to
/// `<label>.transmitted`, reflected ones to `<label>.reflected`.
pub fn classical_separate<T: Real>(
    chamber: &GasChamber<T>,
    permeability: &BTreeMap<String, Side>,
) -> Result<SeparationResult<T>> {
    let bag = chamber
        .contents
        .species_weights()
        .ok_or_else(|| DiaphragmError::NotClassical(chamber.label.clone()))?;
    let mut sides: BTreeMap<Side, Vec<(String, T)>> = BTreeMap::new();
    for (species, &w) in bag {
        let side = permeability
            .get(species)
            .ok_or_else(|| DiaphragmError::UnknownSpecies(species.clone()))?;
        sides.entry(*side).or_default().push((species.clone(), w));
    }
    let mut chambers = Vec::new();
    let mut per_outcome = Vec::new();
    let mut heat = T::zero();
    for (side, species) in sides {
        let p = species.iter().fold(T::zero(), |acc, (_, w)| acc + *w);
        let contents = GasContents::classical(species.into_iter().map(|(s, w)| (s, w / p)))?;
        let child = split_off(chamber, side.as_str(), p, contents)?;
        heat += isothermal_heat(child.particles, chamber.temperature, chamber.volume, child.volume)?;
        chambers.push(child);
        per_outcome.push(Outcome {
            label: side.as_str().to_string(),
            probability: p,
            post_state: None,
        });
    }
    Ok(SeparationResult {
        chambers,
        heat,
        per_outcome,
    })
}

fn split_off<T: Real>(parent: &GasChamber<T>, suffix: &str, p: T, contents: GasContents<T>) -> Result<GasChamber<T>> {
    Ok(GasChamber::new(
        format!("{}.{}", parent.label, suffix),
        p * parent.volume,
        parent.temperature,
        p * parent.particles,
        contents,
    )?)
}

/// Merges chambers into one called `label`.
///
/// The merged contents weight each chamber by its share of the particles.
/// With `distinguishing` set, the gases must be pairwise orthogonal and each
/// expands isothermally into the full volume, absorbing
/// `Σ N_i T ln(V/V_i) ≥ 0`; otherwise the partition is simply removed and
/// no heat is exchanged.
pub fn mix<T: Real>(chambers: &[GasChamber<T>], distinguishing: bool, label: &str) -> Result<MixResult<T>> {
    let first = chambers.first().ok_or(DiaphragmError::NoChambers)?;
    for c in &chambers[1..] {
        if (c.temperature - first.temperature).abs() > T::DERIVED_TOL * first.temperature {
            return Err(DiaphragmError::TemperatureMismatch {
                first: first.label.clone(),
                second: c.label.clone(),
            });
        }
        if c.contents.is_quantum() != first.contents.is_quantum() {
            return Err(DiaphragmError::VariantMismatch);
        }
    }
    let volume = chambers.iter().fold(T::zero(), |acc, c| acc + c.volume);
    let particles = chambers.iter().fold(T::zero(), |acc, c| acc + c.particles);

    if distinguishing {
        for (i, a) in chambers.iter().enumerate() {
            for b in &chambers[i + 1..] {
                let overlap = overlap(&a.contents, &b.contents)?;
                if overlap > T::ZERO_TOL {
                    return Err(DiaphragmError::NotOrthogonal {
                        first: a.label.clone(),
                        second: b.label.clone(),
                        overlap: overlap.as_f64(),
                    });
                }
            }
        }
    }

    let contents = match &first.contents {
        GasContents::Quantum(_) => {
            let mut mixture = Vec::new();
            for c in chambers {
                if let GasContents::Quantum(parts) = &c.contents {
                    let share = c.particles / particles;
                    mixture.extend(parts.iter().map(|(w, rho)| (share * *w, rho.clone())));
                }
            }
            GasContents::quantum(mixture)?
        }
        GasContents::Classical(_) => {
            let mut bag: Vec<(String, T)> = Vec::new();
            for c in chambers {
                if let GasContents::Classical(species) = &c.contents {
                    let share = c.particles / particles;
                    bag.extend(species.iter().map(|(s, w)| (s.clone(), share * *w)));
                }
            }
            GasContents::classical(bag)?
        }
    };

    let mut heat = T::zero();
    if distinguishing {
        for c in chambers {
            heat += isothermal_heat(c.particles, c.temperature, c.volume, volume)?;
        }
    }
    Ok(MixResult {
        chamber: GasChamber::new(label, volume, first.temperature, particles, contents)?,
        heat,
    })
}

/// [`mix`] restricted to classical species bags.
pub fn classical_mix<T: Real>(chambers: &[GasChamber<T>], distinguishing: bool, label: &str) -> Result<MixResult<T>> {
    if let Some(c) = chambers.iter().find(|c| c.contents.is_quantum()) {
        return Err(DiaphragmError::NotClassical(c.label.clone()));
    }
    mix(chambers, distinguishing, label)
}

/// `tr(ρσ)` for quantum gases; for species bags the analogue
/// `Σ_s w_a(s) w_b(s)`, zero exactly when no species is shared.
fn overlap<T: Real>(a: &GasContents<T>, b: &GasContents<T>) -> Result<T> {
    match (a, b) {
        (GasContents::Quantum(_), GasContents::Quantum(_)) => {
            let (ra, rb) = (a.assembled().unwrap(), b.assembled().unwrap());
            Ok(are_orthogonal(&ra, &rb)?.overlap)
        }
        (GasContents::Classical(x), GasContents::Classical(y)) => Ok(x
            .iter()
            .filter_map(|(s, w)| y.get(s).map(|v| *w * *v))
            .fold(T::zero(), |acc, v| acc + v)),
        _ => Err(DiaphragmError::VariantMismatch),
    }
}

/// Isochoric unitary rotation of every component; no heat is exchanged.
pub fn rotate<T: Real>(chamber: &GasChamber<T>, unitary: &ComplexMatrix<T>) -> Result<GasChamber<T>> {
    let GasContents::Quantum(parts) = &chamber.contents else {
        return Err(DiaphragmError::NotQuantum(chamber.label.clone()));
    };
    let rotated = parts
        .iter()
        .map(|(w, rho)| Ok((*w, apply_unitary(rho, unitary)?)))
        .collect::<std::result::Result<Vec<_>, QuantumError>>()?;
    Ok(GasChamber {
        contents: GasContents::Quantum(rotated),
        ..chamber.clone()
    })
}

/// Inserts impermeable walls, splitting a chamber into parts with the given
/// volume fractions. Contents and pressure are unchanged; no heat.
pub fn partition<T: Real>(chamber: &GasChamber<T>, parts: &[(String, T)]) -> Result<Vec<GasChamber<T>>> {
    let sum = parts.iter().fold(T::zero(), |acc, (_, f)| acc + *f);
    if parts.is_empty() || (sum - T::one()).abs() > T::INPUT_TOL || parts.iter().any(|(_, f)| *f <= T::zero()) {
        return Err(DiaphragmError::InvalidFractions(format!(
            "{} parts summing to {}",
            parts.len(),
            sum
        )));
    }
    parts
        .iter()
        .map(|(label, f)| {
            Ok(GasChamber::new(
                label.clone(),
                *f * chamber.volume,
                chamber.temperature,
                *f * chamber.particles,
                chamber.contents.clone(),
            )?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::StateVector;
    use crate::quantum::{hadamard, mixture_eigen_instrument, DensityMatrix};
    use crate::thermo::contents_equal;

    const LN2: f64 = std::f64::consts::LN_2;

    fn pure(a: &[f64]) -> DensityMatrix<f64> {
        DensityMatrix::pure(&StateVector::from_real(a).unwrap()).unwrap()
    }

    fn chamber(label: &str, v: f64, contents: GasContents<f64>) -> GasChamber<f64> {
        GasChamber::new(label, v, 1.0, v, contents).unwrap()
    }

    fn z_instrument() -> ProjectiveInstrument<f64> {
        ProjectiveInstrument::new(vec![
            ("up".into(), pure(&[1.0, 0.0]).into_matrix()),
            ("down".into(), pure(&[0.0, 1.0]).into_matrix()),
        ])
        .unwrap()
    }

    #[test]
    fn distinguishable_separation() {
        let gas = GasContents::quantum(vec![(0.5, pure(&[1.0, 0.0])), (0.5, pure(&[0.0, 1.0]))]).unwrap();
        let r = separate(&chamber("whole", 1.0, gas), &z_instrument()).unwrap();
        assert_eq!(r.chambers.len(), 2);
        assert_eq!(r.chambers[0].label, "whole.up");
        assert_eq!(r.chambers[0].volume, 0.5);
        assert_eq!(r.chambers[1].volume, 0.5);
        assert!((r.heat + LN2).abs() < 1e-15);
        assert!(contents_equal(&r.chambers[1].contents, &GasContents::pure(pure(&[0.0, 1.0])), 1e-15).unwrap());
    }

    #[test]
    fn nondistinguishable_separation() {
        let (lambda, inst) = mixture_eigen_instrument(&[0.5, 0.5], &[pure(&[1.0, 0.0]), pure(&[1.0, 1.0])]).unwrap();
        let r = separate(&chamber("whole", 1.0, GasContents::pure(lambda)), &inst).unwrap();
        assert!((r.chambers[0].volume - 0.8535534).abs() < 1e-6);
        assert!((r.chambers[1].volume - 0.1464466).abs() < 1e-6);
        assert!((r.heat + 0.4164955).abs() < 1e-6, "{}", r.heat);
        let total: f64 = r.chambers.iter().map(|c| c.volume).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn certain_outcome_keeps_one_chamber() {
        let r = separate(
            &chamber("c", 1.0, GasContents::pure(pure(&[1.0, 0.0]))),
            &z_instrument(),
        )
        .unwrap();
        assert_eq!(r.chambers.len(), 1);
        assert_eq!(r.chambers[0].volume, 1.0);
        assert_eq!(r.heat, 0.0);
        assert_eq!(r.per_outcome.len(), 2);
    }

    #[test]
    fn separation_preconditions() {
        let argon = chamber("c", 1.0, GasContents::species("Ar"));
        assert!(matches!(
            separate(&argon, &z_instrument()),
            Err(DiaphragmError::NotQuantum(_))
        ));
        let big = chamber("c", 1.0, GasContents::pure(DensityMatrix::maximally_mixed(4)));
        assert!(matches!(
            separate(&big, &z_instrument()),
            Err(DiaphragmError::DimMismatch { .. })
        ));
    }

    #[test]
    fn distinguishing_mix_of_orthogonal_four_level_states() {
        let zz = pure(&[1.0, 0.0]).tensor(&pure(&[1.0, 0.0]));
        let xz = pure(&[1.0, 1.0]).tensor(&pure(&[0.0, 1.0]));
        let r = mix(
            &[
                chamber("upper", 0.5, GasContents::pure(zz)),
                chamber("lower", 0.5, GasContents::pure(xz)),
            ],
            true,
            "whole",
        )
        .unwrap();
        assert!((r.heat - LN2).abs() < 1e-15);
        assert_eq!(r.chamber.volume, 1.0);
        assert_eq!(r.chamber.particles, 1.0);
    }

    #[test]
    fn distinguishing_mix_refuses_z_and_x() {
        let err = mix(
            &[
                chamber("upper", 0.5, GasContents::pure(pure(&[1.0, 0.0]))),
                chamber("lower", 0.5, GasContents::pure(pure(&[1.0, 1.0]))),
            ],
            true,
            "whole",
        )
        .unwrap_err();
        assert!(matches!(err, DiaphragmError::NotOrthogonal { overlap, .. } if (overlap - 0.5).abs() < 1e-15));
    }

    #[test]
    fn free_mix_exchanges_no_heat() {
        let r = mix(
            &[
                chamber("a", 0.5, GasContents::pure(pure(&[1.0, 0.0]))),
                chamber("b", 0.5, GasContents::pure(pure(&[1.0, 1.0]))),
            ],
            false,
            "whole",
        )
        .unwrap();
        assert_eq!(r.heat, 0.0);
        let lambda = r.chamber.contents.assembled().unwrap();
        assert!((lambda.matrix().get(0, 0).re - 0.75).abs() < 1e-15);
    }

    #[test]
    fn single_chamber_mix_is_identity() {
        let c = chamber("a", 1.0, GasContents::pure(pure(&[1.0, 0.0])));
        let r = mix(std::slice::from_ref(&c), true, "a").unwrap();
        assert_eq!(r.heat, 0.0);
        assert_eq!(r.chamber, c);
        assert_eq!(mix::<f64>(&[], true, "x"), Err(DiaphragmError::NoChambers));
    }

    #[test]
    fn mix_preconditions() {
        let a = chamber("a", 0.5, GasContents::pure(pure(&[1.0, 0.0])));
        let hot = GasChamber::new("b", 0.5, 2.0, 0.5, GasContents::pure(pure(&[0.0, 1.0]))).unwrap();
        assert!(matches!(
            mix(&[a.clone(), hot], true, "w"),
            Err(DiaphragmError::TemperatureMismatch { .. })
        ));
        let argon = chamber("b", 0.5, GasContents::species("Ar"));
        assert_eq!(mix(&[a, argon], false, "w"), Err(DiaphragmError::VariantMismatch));
    }

    #[test]
    fn separate_then_mix_round_trip() {
        let (lambda, inst) = mixture_eigen_instrument(&[0.5, 0.5], &[pure(&[1.0, 0.0]), pure(&[1.0, 1.0])]).unwrap();
        let parent = chamber("whole", 1.0, GasContents::pure(lambda));
        let s = separate(&parent, &inst).unwrap();
        let m = mix(&s.chambers, true, "whole").unwrap();
        assert!((s.heat + m.heat).abs() < 1e-12);
        assert!((m.chamber.volume - 1.0).abs() < 1e-12);
        assert!(contents_equal(&m.chamber.contents, &parent.contents, 1e-12).unwrap());
    }

    #[test]
    fn jaynes_classical_cycle() {
        let a = chamber("upper", 0.5, GasContents::species("aAr"));
        let b = chamber("lower", 0.5, GasContents::species("bAr"));
        let m = classical_mix(&[a, b], true, "whole").unwrap();
        assert!((m.heat - LN2).abs() < 1e-15);
        let perm = BTreeMap::from([
            ("aAr".to_string(), Side::Transmitted),
            ("bAr".to_string(), Side::Reflected),
        ]);
        let s = classical_separate(&m.chamber, &perm).unwrap();
        assert!((s.heat + LN2).abs() < 1e-15);
        assert_eq!(s.chambers[0].label, "whole.transmitted");
        assert_eq!(s.chambers[0].contents, GasContents::species("aAr"));
        assert_eq!(s.chambers[1].volume, 0.5);

        let only_a = BTreeMap::from([("aAr".to_string(), Side::Reflected)]);
        assert_eq!(
            classical_separate(&m.chamber, &only_a),
            Err(DiaphragmError::UnknownSpecies("bAr".into()))
        );
    }

    #[test]
    fn single_species_is_unchanged_by_classical_separation() {
        let c = chamber("c", 1.0, GasContents::species("Ar"));
        let perm = BTreeMap::from([("Ar".to_string(), Side::Reflected)]);
        let s = classical_separate(&c, &perm).unwrap();
        assert_eq!(s.heat, 0.0);
        assert_eq!(s.chambers.len(), 1);
        assert_eq!(s.chambers[0].volume, 1.0);
    }

    #[test]
    fn classical_mix_of_shared_species_is_refused() {
        let a = chamber("a", 0.5, GasContents::classical([("aAr", 0.5), ("bAr", 0.5)]).unwrap());
        let b = chamber("b", 0.5, GasContents::species("aAr"));
        assert!(matches!(
            classical_mix(&[a, b], true, "w"),
            Err(DiaphragmError::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn rotation_and_partition() {
        let c = chamber("lower", 0.5, GasContents::pure(pure(&[1.0, 0.0])));
        let r = rotate(&c, &hadamard()).unwrap();
        assert!(contents_equal(&r.contents, &GasContents::pure(pure(&[1.0, 1.0])), 1e-15).unwrap());
        assert_eq!(r.volume, 0.5);

        let parts = partition(&c, &[("a".into(), 0.5), ("b".into(), 0.5)]).unwrap();
        assert_eq!(parts[1].volume, 0.25);
        assert_eq!(parts[1].contents, c.contents);
        assert!(partition(&c, &[("a".into(), 0.5)]).is_err());
        assert!(partition(&c, &[("a".into(), 1.5), ("b".into(), -0.5)]).is_err());
    }
}
