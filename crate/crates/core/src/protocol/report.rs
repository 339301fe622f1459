use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::thermo::{GasChamber, GasContents};

pub const SCHEMA_VERSION: &str = "1";

/// How heats are reported.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Units {
    /// Multiples of `NkT` for the header's `PARTICLES` and `TEMPERATURE`.
    NkT,
    /// Joules (or whatever `kb` is in) for `particles` at `temperature`.
    Absolute { kb: f64, particles: f64, temperature: f64 },
}

impl Units {
    pub fn name(self) -> &'static str {
        match self {
            Units::NkT => "NkT",
            Units::Absolute { .. } => "absolute",
        }
    }

    /// Multiplier taking a heat in `NkT` units to these units.
    pub fn factor(self) -> f64 {
        match self {
            Units::NkT => 1.0,
            Units::Absolute {
                kb,
                particles,
                temperature,
            } => kb * particles * temperature,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: String,
    pub units: String,
    pub observers: Vec<ObserverReport>,
    pub expectations: Vec<ExpectationReport>,
}

impl RunReport {
    pub fn observer(&self, name: &str) -> Option<&ObserverReport> {
        self.observers.iter().find(|o| o.name == name)
    }

    pub fn all_expectations_passed(&self) -> bool {
        self.expectations.iter().all(|e| e.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObserverReport {
    pub name: String,
    pub steps: Vec<StepReport>,
    #[serde(rename = "total_Q")]
    pub total_q: f64,
    pub verdict: VerdictReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub description: String,
    #[serde(rename = "Q")]
    pub q: f64,
    pub chambers: Vec<ChamberReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChamberReport {
    pub label: String,
    pub volume: f64,
    pub particles: f64,
    pub contents_digest: ContentsDigest,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContentsDigest {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub species: Option<BTreeMap<String, f64>>,
    /// SHA-256 of the entries rounded to 1e-12.
    pub hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictReport {
    pub cycle_claimed: bool,
    pub cycle_actual: bool,
    #[serde(rename = "total_Q")]
    pub total_q: f64,
    pub second_law: String,
    pub apparent_violation_explained: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectationReport {
    pub line: usize,
    pub statement: String,
    pub passed: bool,
    pub detail: String,
}

/// Rounds to 1e-12 and clears negative zero so digests are stable.
fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12 + 0.0
}

pub(crate) fn digest(contents: &GasContents<f64>) -> ContentsDigest {
    let mut hasher = Sha256::new();
    match contents {
        GasContents::Quantum(_) => {
            let rho = contents.assembled().expect("quantum contents");
            let m = rho.matrix();
            for i in 0..m.dim() {
                for j in 0..m.dim() {
                    let z = m.get(i, j);
                    hasher.update(format!("{:.12},{:.12};", round12(z.re), round12(z.im)));
                }
            }
            let eigenvalues = m
                .eig()
                .map(|s| s.eigenvalues().iter().map(|&l| round12(l)).collect())
                .unwrap_or_default();
            ContentsDigest {
                eigenvalues: Some(eigenvalues),
                species: None,
                hash: format!("{:x}", hasher.finalize()),
            }
        }
        GasContents::Classical(bag) => {
            let species: BTreeMap<String, f64> = bag.iter().map(|(s, w)| (s.clone(), round12(*w))).collect();
            for (s, w) in &species {
                hasher.update(format!("{s}={w:.12};"));
            }
            ContentsDigest {
                eigenvalues: None,
                species: Some(species),
                hash: format!("{:x}", hasher.finalize()),
            }
        }
    }
}

pub(crate) fn chamber_report(c: &GasChamber<f64>) -> ChamberReport {
    ChamberReport {
        label: c.label.clone(),
        volume: c.volume,
        particles: c.particles,
        contents_digest: digest(&c.contents),
    }
}
