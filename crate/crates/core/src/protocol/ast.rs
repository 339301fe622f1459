use std::fmt;

use crate::diaphragm::Side;
use crate::linalg::Keep;
use crate::observers::{Observer, ObserverMode};
use crate::thermo::SecondLaw;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(f64),
    Imaginary(f64),
    Name(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

impl Expr {
    /// Every name referenced outside function position.
    pub fn names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Name(n) => out.push(n),
            Expr::Neg(e) => e.collect_names(out),
            Expr::Binary(_, a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_names(out)),
            Expr::Number(_) | Expr::Imaginary(_) => {}
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(x) => write!(f, "{x}"),
            Expr::Imaginary(x) => write!(f, "{x}i"),
            Expr::Name(n) => f.write_str(n),
            Expr::Neg(e) => write!(f, "-{e}"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimSpec {
    Quantum(usize),
    Classical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub dim: DimSpec,
    pub temperature: f64,
    pub particles: f64,
    pub volume: f64,
    /// Empty means a single full-resolution observer named `truth`.
    pub observers: Vec<Observer>,
}

impl Header {
    pub fn effective_observers(&self) -> Vec<Observer> {
        if self.observers.is_empty() {
            vec![Observer::full("truth")]
        } else {
            self.observers.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstrumentSpec {
    Projectors(Vec<(String, Expr)>),
    /// Eigenprojectors of a Hermitian operator, optionally relabeled.
    Eigenbasis {
        of: Expr,
        labels: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChamberSpec {
    Quantum(Expr),
    Classical(Vec<(String, f64)>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expectation {
    TotalHeat {
        value: f64,
        tol: Option<f64>,
    },
    Volume {
        chamber: String,
        value: f64,
        tol: Option<f64>,
    },
    Chambers(usize),
    Cycle {
        observer: String,
        actual: bool,
    },
    SecondLaw {
        observer: String,
        verdict: SecondLaw,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum StatementKind {
    State {
        name: String,
        expr: Expr,
    },
    Instrument {
        name: String,
        spec: InstrumentSpec,
    },
    Chamber {
        label: String,
        fraction: f64,
        contents: ChamberSpec,
    },
    Separate {
        chamber: String,
        instrument: String,
    },
    ClassicalSeparate {
        chamber: String,
        permeability: Vec<(String, Side)>,
    },
    Mix {
        distinguishing: bool,
        target: String,
        chambers: Vec<String>,
    },
    RemovePartition {
        target: String,
        chambers: Vec<String>,
    },
    Partition {
        chamber: String,
        parts: Vec<(String, f64)>,
    },
    Rotate {
        chamber: String,
        unitary: Expr,
    },
    ClaimCycle,
    Expect(Expectation),
}

impl StatementKind {
    /// Process steps act on chambers and contribute a ledger entry.
    pub fn is_process_step(&self) -> bool {
        matches!(
            self,
            StatementKind::Separate { .. }
                | StatementKind::ClassicalSeparate { .. }
                | StatementKind::Mix { .. }
                | StatementKind::RemovePartition { .. }
                | StatementKind::Partition { .. }
                | StatementKind::Rotate { .. }
                | StatementKind::ClaimCycle
        )
    }
}

/// A statement with the line it came from. Equality ignores the line.
#[derive(Clone, Debug)]
pub struct Statement {
    pub line: usize,
    pub kind: StatementKind,
}

impl PartialEq for Statement {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Protocol {
    pub header: Header,
    pub statements: Vec<Statement>,
}

impl Protocol {
    pub fn process_steps(&self) -> impl Iterator<Item = &Statement> {
        self.statements.iter().filter(|s| s.kind.is_process_step())
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[String]) -> fmt::Result {
    for item in items {
        write!(f, " {item}")?;
    }
    Ok(())
}

fn write_tol(f: &mut fmt::Formatter<'_>, tol: Option<f64>) -> fmt::Result {
    match tol {
        Some(t) => write!(f, " {t}"),
        None => Ok(()),
    }
}

pub(crate) fn second_law_word(v: SecondLaw) -> &'static str {
    match v {
        SecondLaw::Satisfied => "satisfied",
        SecondLaw::Violated => "violated",
        SecondLaw::NotApplicable => "not_applicable",
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::TotalHeat { value, tol } => {
                write!(f, "EXPECT Q_total ≈ {value}")?;
                write_tol(f, *tol)
            }
            Expectation::Volume { chamber, value, tol } => {
                write!(f, "EXPECT volume {chamber} ≈ {value}")?;
                write_tol(f, *tol)
            }
            Expectation::Chambers(n) => write!(f, "EXPECT chambers {n}"),
            Expectation::Cycle { observer, actual } => write!(f, "EXPECT cycle {observer} {actual}"),
            Expectation::SecondLaw { observer, verdict } => {
                write!(f, "EXPECT second_law {observer} {}", second_law_word(*verdict))
            }
        }
    }
}

impl fmt::Display for StatementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatementKind::State { name, expr } => write!(f, "STATE {name} {expr}"),
            StatementKind::Instrument { name, spec } => {
                write!(f, "INSTRUMENT {name}")?;
                match spec {
                    InstrumentSpec::Projectors(ps) => {
                        for (label, e) in ps {
                            write!(f, " {label}={e}")?;
                        }
                        Ok(())
                    }
                    InstrumentSpec::Eigenbasis { of, labels } => {
                        write!(f, " eigenbasis({of})")?;
                        write_list(f, labels)
                    }
                }
            }
            StatementKind::Chamber {
                label,
                fraction,
                contents,
            } => {
                write!(f, "CHAMBER {label} {fraction}")?;
                match contents {
                    ChamberSpec::Quantum(e) => write!(f, " {e}"),
                    ChamberSpec::Classical(species) => {
                        for (s, w) in species {
                            write!(f, " {s}:{w}")?;
                        }
                        Ok(())
                    }
                }
            }
            StatementKind::Separate { chamber, instrument } => write!(f, "SEPARATE {chamber} {instrument}"),
            StatementKind::ClassicalSeparate { chamber, permeability } => {
                write!(f, "CSEPARATE {chamber}")?;
                for (s, side) in permeability {
                    write!(f, " {s}={}", side.as_str())?;
                }
                Ok(())
            }
            StatementKind::Mix {
                distinguishing,
                target,
                chambers,
            } => {
                let mode = if *distinguishing { "distinguishing" } else { "free" };
                write!(f, "MIX {mode} {target}")?;
                write_list(f, chambers)
            }
            StatementKind::RemovePartition { target, chambers } => {
                write!(f, "REMOVE_PARTITION {target}")?;
                write_list(f, chambers)
            }
            StatementKind::Partition { chamber, parts } => {
                write!(f, "PARTITION {chamber}")?;
                for (label, frac) in parts {
                    write!(f, " {label}={frac}")?;
                }
                Ok(())
            }
            StatementKind::Rotate { chamber, unitary } => write!(f, "ROTATE {chamber} {unitary}"),
            StatementKind::ClaimCycle => f.write_str("CLAIM_CYCLE"),
            StatementKind::Expect(e) => write!(f, "{e}"),
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = &self.header;
        match h.dim {
            DimSpec::Quantum(n) => writeln!(f, "DIM {n}")?,
            DimSpec::Classical => writeln!(f, "DIM classical")?,
        }
        writeln!(f, "TEMPERATURE {}", h.temperature)?;
        writeln!(f, "PARTICLES {}", h.particles)?;
        writeln!(f, "VOLUME {}", h.volume)?;
        for obs in &h.observers {
            write!(f, "OBSERVER {}", obs.name)?;
            match &obs.mode {
                ObserverMode::Full => writeln!(f, " full")?,
                ObserverMode::PartialTrace { dims, keep } => {
                    let keep = match keep {
                        Keep::First => "first",
                        Keep::Second => "second",
                    };
                    writeln!(f, " trace {} {} keep {keep}", dims.0, dims.1)?
                }
                ObserverMode::SpeciesMap(map) => {
                    f.write_str(" species")?;
                    for (from, to) in map {
                        write!(f, " {from}={to}")?;
                    }
                    writeln!(f)?
                }
            }
        }
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}
