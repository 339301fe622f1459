use std::collections::BTreeMap;

use super::ast::*;
use super::eval::{eval, Env};
use super::report::*;
use super::ProtocolError;
use crate::observers::{run_scenario, Operation, Scenario, ScenarioRun};
use crate::quantum::{eigen_instrument, ProjectiveInstrument};
use crate::thermo::{GasChamber, GasContents};

const DEFAULT_TOLERANCE: f64 = 1e-4;

struct Pending {
    line: usize,
    /// Number of process steps run before this expectation.
    step: usize,
    expectation: Expectation,
}

/// Runs a protocol and reports heats in `NkT` units.
pub fn execute(p: &Protocol) -> Result<RunReport, ProtocolError> {
    execute_with_units(p, Units::NkT)
}

pub fn execute_with_units(p: &Protocol, units: Units) -> Result<RunReport, ProtocolError> {
    let h = &p.header;
    let runtime = |line: usize| move |message: String| ProtocolError::Runtime { line, message };

    let mut env = Env::default();
    let mut initial = Vec::new();
    let mut first_chamber_line = None;
    let mut scenario_steps = Vec::new();
    let mut step_lines = Vec::new();
    let mut pending = Vec::new();

    for s in &p.statements {
        let err = runtime(s.line);
        match &s.kind {
            StatementKind::State { name, expr } => {
                let v = eval(expr, &env).map_err(&err)?;
                env.values.insert(name.clone(), v);
            }
            StatementKind::Instrument { name, spec } => {
                let inst = build_instrument(spec, &env, h.dim).map_err(&err)?;
                env.instruments.insert(name.clone(), inst);
            }
            StatementKind::Chamber {
                label,
                fraction,
                contents,
            } => {
                first_chamber_line.get_or_insert(s.line);
                let contents = match (contents, h.dim) {
                    (ChamberSpec::Quantum(e), DimSpec::Quantum(n)) => {
                        let rho = eval(e, &env).and_then(|v| v.into_density()).map_err(&err)?;
                        if rho.dim() != n {
                            return Err(err(format!("state has dimension {}, header says {n}", rho.dim())));
                        }
                        GasContents::pure(rho)
                    }
                    (ChamberSpec::Classical(species), DimSpec::Classical) => {
                        GasContents::classical(species.iter().cloned()).map_err(|e| err(e.to_string()))?
                    }
                    _ => return Err(err("chamber contents do not match the DIM header".into())),
                };
                let chamber = GasChamber::new(
                    label.clone(),
                    fraction * h.volume,
                    h.temperature,
                    fraction * h.particles,
                    contents,
                )
                .map_err(|e| err(e.to_string()))?;
                initial.push(chamber);
            }
            StatementKind::Expect(e) => pending.push(Pending {
                line: s.line,
                step: scenario_steps.len(),
                expectation: e.clone(),
            }),
            kind => {
                let op = operation(kind, &env).map_err(&err)?;
                scenario_steps.push((kind.to_string(), op));
                step_lines.push(s.line);
            }
        }
    }

    let scenario = Scenario {
        initial,
        steps: scenario_steps,
    };
    let observers = h.effective_observers();
    let run = run_scenario(&scenario, &observers).map_err(|e| ProtocolError::Runtime {
        line: if e.step == 0 {
            first_chamber_line.unwrap_or(1)
        } else {
            step_lines[e.step - 1]
        },
        message: e.source.to_string(),
    })?;

    let to_nkt = 1.0 / (h.particles * h.temperature);
    let scale = to_nkt * units.factor();
    let observers = run
        .views
        .iter()
        .map(|view| {
            let steps = view
                .snapshots
                .iter()
                .enumerate()
                .map(|(k, chambers)| StepReport {
                    index: k,
                    description: if k == 0 {
                        "initial".to_string()
                    } else {
                        view.ledger.steps[k - 1].description.clone()
                    },
                    q: if k == 0 {
                        0.0
                    } else {
                        view.ledger.steps[k - 1].heat * scale
                    },
                    chambers: chambers.iter().map(chamber_report).collect(),
                })
                .collect();
            let v = &view.verdict;
            ObserverReport {
                name: view.name.clone(),
                steps,
                total_q: view.ledger.total() * scale,
                verdict: VerdictReport {
                    cycle_claimed: v.cycle_claimed,
                    cycle_actual: v.cycle_actual,
                    total_q: v.total_heat * scale,
                    second_law: second_law_word(v.second_law).to_string(),
                    apparent_violation_explained: v.apparent_violation_explained,
                },
            }
        })
        .collect();

    let expectations = pending.iter().map(|p| check(p, &run, to_nkt)).collect();

    Ok(RunReport {
        schema: SCHEMA_VERSION.to_string(),
        units: units.name().to_string(),
        observers,
        expectations,
    })
}

fn build_instrument(spec: &InstrumentSpec, env: &Env, dim: DimSpec) -> Result<ProjectiveInstrument<f64>, String> {
    let inst = match spec {
        InstrumentSpec::Projectors(ps) => {
            let projectors = ps
                .iter()
                .map(|(label, e)| Ok((label.clone(), eval(e, env)?.into_hermitian()?)))
                .collect::<Result<Vec<_>, String>>()?;
            ProjectiveInstrument::new(projectors).map_err(|e| e.to_string())?
        }
        InstrumentSpec::Eigenbasis { of, labels } => {
            let h = eval(of, env)?.into_hermitian()?;
            let inst = eigen_instrument(&h).map_err(|e| e.to_string())?;
            if labels.is_empty() {
                inst
            } else {
                inst.relabel(labels).map_err(|e| e.to_string())?
            }
        }
    };
    match dim {
        DimSpec::Quantum(n) if n != inst.dim() => {
            Err(format!("instrument has dimension {}, header says {n}", inst.dim()))
        }
        _ => Ok(inst),
    }
}

fn operation(kind: &StatementKind, env: &Env) -> Result<Operation<f64>, String> {
    Ok(match kind {
        StatementKind::Separate { chamber, instrument } => Operation::Separate {
            chamber: chamber.clone(),
            instrument: env
                .instruments
                .get(instrument)
                .cloned()
                .ok_or_else(|| format!("`{instrument}` is not an instrument"))?,
        },
        StatementKind::ClassicalSeparate { chamber, permeability } => Operation::ClassicalSeparate {
            chamber: chamber.clone(),
            permeability: permeability.iter().cloned().collect::<BTreeMap<_, _>>(),
        },
        StatementKind::Mix {
            distinguishing,
            target,
            chambers,
        } => Operation::Mix {
            chambers: chambers.clone(),
            target: target.clone(),
            distinguishing: *distinguishing,
        },
        StatementKind::RemovePartition { target, chambers } => Operation::Mix {
            chambers: chambers.clone(),
            target: target.clone(),
            distinguishing: false,
        },
        StatementKind::Partition { chamber, parts } => Operation::Partition {
            chamber: chamber.clone(),
            parts: parts.clone(),
        },
        StatementKind::Rotate { chamber, unitary } => Operation::Rotate {
            chamber: chamber.clone(),
            unitary: eval(unitary, env)?.into_unitary()?,
        },
        StatementKind::ClaimCycle => Operation::ClaimCycle,
        other => unreachable!("not a process step: {other}"),
    })
}

fn check(p: &Pending, run: &ScenarioRun<f64>, to_nkt: f64) -> ExpectationReport {
    let chambers = &run.truth[p.step];
    let near = |got: f64, want: f64, tol: Option<f64>| {
        let tol = tol.unwrap_or(DEFAULT_TOLERANCE);
        ((got - want).abs() <= tol, format!("got {got}, want {want} ± {tol}"))
    };
    let (passed, detail) = match &p.expectation {
        Expectation::TotalHeat { value, tol } => {
            let total: f64 = run.ledger.steps[..p.step].iter().map(|s| s.heat).sum();
            near(total * to_nkt, *value, *tol)
        }
        Expectation::Volume { chamber, value, tol } => match chambers.iter().find(|c| &c.label == chamber) {
            Some(c) => near(c.volume, *value, *tol),
            None => (false, format!("no chamber `{chamber}`")),
        },
        Expectation::Chambers(n) => (chambers.len() == *n, format!("got {} chambers", chambers.len())),
        Expectation::Cycle { observer, actual } => {
            let v = run
                .view(observer)
                .expect("observer checked at parse time")
                .verdict_at(p.step);
            (v.cycle_actual == *actual, format!("cycle_actual = {}", v.cycle_actual))
        }
        Expectation::SecondLaw { observer, verdict } => {
            let v = run
                .view(observer)
                .expect("observer checked at parse time")
                .verdict_at(p.step);
            (
                v.second_law == *verdict,
                format!(
                    "second law {} (Q = {} NkT)",
                    second_law_word(v.second_law),
                    v.total_heat * to_nkt
                ),
            )
        }
    };
    ExpectationReport {
        line: p.line,
        statement: p.expectation.to_string(),
        passed,
        detail,
    }
}
