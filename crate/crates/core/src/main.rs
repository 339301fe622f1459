use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use quantum_gas::protocol::{self, Protocol, ProtocolError, RunReport, Units};

/// Boltzmann's constant in J/K.
const KB_SI: f64 = 1.380649e-23;

#[derive(Parser)]
#[command(name = "qgas", version, about = "Run quantum gas scenario scripts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a script and print each observer's ledger and verdict.
    Run {
        /// Script path, or the name of a bundled scenario.
        file: PathBuf,
        /// Also write the JSON report here.
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = UnitArg::Nkt)]
        units: UnitArg,
        /// Boltzmann constant for absolute units.
        #[arg(long = "kB", default_value_t = KB_SI)]
        kb: f64,
        /// Particle number for absolute units (defaults to the header's).
        #[arg(long = "N")]
        n: Option<f64>,
        /// Temperature for absolute units (defaults to the header's).
        #[arg(long = "T")]
        t: Option<f64>,
    },
    /// Parse a script without running it.
    Check { file: PathBuf },
    /// List the bundled scenarios.
    Scenarios,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Nkt,
    Absolute,
}

enum Failure {
    Io(String),
    Protocol(String, ProtocolError),
}

fn load(path: &Path) -> Result<(String, String), Failure> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok((path.display().to_string(), text)),
        Err(e) => {
            // fall back to a bundled script with the same stem
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            protocol::bundled(stem)
                .map(|src| (format!("<bundled {stem}>"), src.to_string()))
                .ok_or_else(|| Failure::Io(format!("{}: {e}", path.display())))
        }
    }
}

fn parse_file(path: &Path) -> Result<(String, Protocol), Failure> {
    let (name, text) = load(path)?;
    let p = protocol::parse(&text).map_err(|e| Failure::Protocol(name.clone(), e))?;
    Ok((name, p))
}

fn print_report(r: &RunReport) {
    let nkt = r.units == "NkT";
    let fmt = |q: f64| {
        if nkt {
            format!("{q:+.7} NkT")
        } else {
            format!("{q:+.7e}")
        }
    };
    for o in &r.observers {
        println!("observer {}", o.name);
        for s in o.steps.iter().skip(1) {
            println!("  {:>2}  Q = {}  {}", s.index, fmt(s.q), s.description);
        }
        let v = &o.verdict;
        println!("  total Q = {}", fmt(o.total_q));
        println!(
            "  cycle claimed: {}, actual: {}, second law: {}{}",
            v.cycle_claimed,
            v.cycle_actual,
            v.second_law,
            if v.apparent_violation_explained {
                " (apparent cycle only)"
            } else {
                ""
            }
        );
    }
    for e in &r.expectations {
        let mark = if e.passed { "ok  " } else { "FAIL" };
        println!("{mark} line {}: {}  [{}]", e.line, e.statement, e.detail);
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Scenarios => {
            for (name, _) in protocol::BUNDLED {
                println!("{name}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { file } => {
            let (name, p) = parse_file(&file)?;
            println!("{name}: ok, {} process steps", p.process_steps().count());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            file,
            json,
            units,
            kb,
            n,
            t,
        } => {
            let (name, p) = parse_file(&file)?;
            let units = match units {
                UnitArg::Nkt => Units::NkT,
                UnitArg::Absolute => Units::Absolute {
                    kb,
                    particles: n.unwrap_or(p.header.particles),
                    temperature: t.unwrap_or(p.header.temperature),
                },
            };
            let report = protocol::execute_with_units(&p, units).map_err(|e| Failure::Protocol(name, e))?;
            print_report(&report);
            if let Some(out) = json {
                std::fs::write(&out, report.to_json() + "\n")
                    .map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
            }
            Ok(if report.all_expectations_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Protocol(name, e)) => {
            eprintln!("error: {name}: {e}");
            ExitCode::from(2)
        }
    }
}
