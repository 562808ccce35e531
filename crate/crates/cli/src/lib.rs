//! Model files, verification suites and component tables for the `oddconn` binary.

pub mod components;
pub mod model;
pub mod report;
pub mod subject;
pub mod suites;

use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

pub use components::{components, Basis, Table};
pub use model::{parse_model, serialize_model, Model, ModelError};
pub use report::{CheckResult, Counterexample, Report, Status};
pub use subject::{resolve, InputError, Subject};
pub use suites::{replay, verify, SUITES};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    MachineReadable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisArg {
    Auto,
    Coordinate,
    Frame,
}

#[derive(Debug, Parser)]
#[command(name = "oddconn", version, about = "Exact checks and component tables for odd connections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run verification suites on a catalog entry or a model file.
    Verify {
        subject: String,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        trials: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Append wall-clock time; the report is then no longer byte-stable.
        #[arg(long)]
        timing: bool,
    },
    /// Print connection components.
    Components {
        subject: String,
        #[arg(long)]
        object: String,
        #[arg(long, value_enum, default_value = "auto")]
        basis: BasisArg,
        /// Named model field used as first argument instead of the basis.
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Built-in connections.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    List,
    /// Print an entry as a model file.
    Show { name: String },
}

/// Run with `args` (including the program name) and return the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    match cmd {
        Command::Verify { subject, suite, seed, trials, format, timing } => {
            let s = resolve(&subject).map_err(|e| e.to_string())?;
            let start = Instant::now();
            let mut report = verify(&s, &suite, seed, trials)?;
            if timing {
                report.timing_ms = Some(start.elapsed().as_millis() as u64);
            }
            let text = match format {
                Format::Text => report.to_text(),
                Format::MachineReadable => report.to_machine(),
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(if report.passed() { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Components { subject, object, basis, x, y, format } => {
            let s = resolve(&subject).map_err(|e| e.to_string())?;
            let basis = match basis {
                BasisArg::Auto => Basis::Auto,
                BasisArg::Coordinate => Basis::Coordinate,
                BasisArg::Frame => Basis::Frame,
            };
            let t = components(&s, &object, basis, x.as_deref(), y.as_deref())?;
            let text = match format {
                Format::Text => t.to_text(),
                Format::MachineReadable => t.to_machine(),
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(EXIT_PASS)
        }
        Command::Catalog { action: CatalogAction::List } => {
            for name in oddconn::catalog::entry_names() {
                let probe = if name == "canonical-rnn:<n>" { "canonical-rnn:2".to_string() } else { name.clone() };
                let desc = oddconn::catalog::lookup(&probe).map(|e| e.description).unwrap_or_default();
                let desc = if name == "canonical-rnn:<n>" { "canonical odd connection on R^n|n".to_string() } else { desc };
                writeln!(out, "{name:<28} {desc}").map_err(io)?;
            }
            Ok(EXIT_PASS)
        }
        Command::Catalog { action: CatalogAction::Show { name } } => {
            let s = resolve(&name).map_err(|e| e.to_string())?;
            write!(out, "# {}\n{}", s.description, serialize_model(&s.model)).map_err(io)?;
            Ok(EXIT_PASS)
        }
    }
}
