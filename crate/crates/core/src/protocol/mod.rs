//! The `.qg` scenario language: a line-oriented script describing a gas
//! container, the process steps applied to it and the results expected.
//!
//! ```text
//! DIM 2
//! STATE zp ket(1, 0)
//! STATE zm ket(0, 1)
//! INSTRUMENT sz up=proj(zp) down=proj(zm)
//! CHAMBER whole 1 mix(0.5*zp + 0.5*zm)
//! SEPARATE whole sz
//! EXPECT Q_total ≈ -0.6931472 1e-6
//! ```

pub mod ast;
mod eval;
mod exec;
mod lexer;
mod parser;
mod report;

use thiserror::Error;

pub use ast::Protocol;
pub use exec::{execute, execute_with_units};
pub use parser::parse;
pub use report::{
    ChamberReport, ContentsDigest, ExpectationReport, ObserverReport, RunReport, StepReport, Units, VerdictReport,
    SCHEMA_VERSION,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("line {line}, column {col}: expected {expected}, found {found}")]
    SyntaxError {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("line {line}: `{name}` is not defined")]
    UndefinedName { line: usize, name: String },
    #[error("line {line}: `{name}` is already defined")]
    DuplicateName { line: usize, name: String },
    #[error("line {line}: a `DIM` header line must come first")]
    HeaderMissing { line: usize },
    #[error("line {line}: {message}")]
    Runtime { line: usize, message: String },
}

impl ProtocolError {
    pub fn line(&self) -> usize {
        match self {
            ProtocolError::SyntaxError { line, .. }
            | ProtocolError::UndefinedName { line, .. }
            | ProtocolError::DuplicateName { line, .. }
            | ProtocolError::HeaderMissing { line }
            | ProtocolError::Runtime { line, .. } => *line,
        }
    }
}

/// Scenario scripts shipped with the crate, by name.
pub const BUNDLED: [(&str, &str); 6] = [
    (
        "example1_distinguishable",
        include_str!("../../scenarios/example1_distinguishable.qg"),
    ),
    (
        "example2_nondistinguishable",
        include_str!("../../scenarios/example2_nondistinguishable.qg"),
    ),
    ("peres_tatiana", include_str!("../../scenarios/peres_tatiana.qg")),
    (
        "peres_willard_completed",
        include_str!("../../scenarios/peres_willard_completed.qg"),
    ),
    ("jaynes_johann", include_str!("../../scenarios/jaynes_johann.qg")),
    (
        "jaynes_marie_completed",
        include_str!("../../scenarios/jaynes_marie_completed.qg"),
    ),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, src)| *src)
}

/// Parses and executes a script in one go.
pub fn run_source(text: &str) -> Result<RunReport, ProtocolError> {
    execute(&parse(text)?)
}
