//! `nonfree`: JSON front end for the non-free tensor library.
//!
//! Every run prints one JSON report on stdout. Exit status is 0 for a
//! successful computation or a true verdict, 1 for a false verdict and 2 for
//! unusable input.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

const TOOL: &str = "nonfree";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "nonfree", version, about = "Explicit non-free tensors and their certificates")]
struct Cli {
    /// Seed for every random choice made by the command
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact constants, T^W, S0 and optional verification for size n
    Family {
        #[arg(long)]
        n: usize,
        /// Check all identities, the W equations, mu(T^W) = q and the halfspace
        #[arg(long)]
        verify: bool,
    },
    /// Moment map, spectra and diagonality of a tensor
    MomentMap {
        #[arg(long)]
        input: PathBuf,
    },
    /// Integrate the Kempf-Ness gradient flow
    Flow {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 1e-8)]
        residual_tol: f64,
        #[arg(long, default_value_t = 200_000)]
        max_steps: usize,
    },
    /// Check whether a support (or the support of a tensor) is free
    FreeSupport {
        /// JSON array of 1-based triples, or a tensor
        #[arg(long)]
        input: PathBuf,
        /// Dimensions for a bare support; defaults to its bounding box
        #[arg(long, num_args = 3, value_names = ["N1", "N2", "N3"])]
        dims: Option<Vec<usize>>,
    },
    /// Non-freeness certificate for T^W or one of the named 3x3x3 tensors
    CertifyNonfree {
        #[arg(long, conflicts_with = "named", required_unless_present = "named")]
        family: Option<usize>,
        /// T2 or T5
        #[arg(long)]
        named: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// GL-equivalence of a tensor supported on Gamma_n with S0
    ReduceS0 {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// One-sided moment polytope certificates
    Polytope {
        #[arg(long)]
        input: PathBuf,
        /// Halfspace {"h": [[..],[..],[..]], "c": ..} to certify
        #[arg(long, conflicts_with_all = ["refute", "inner"])]
        halfspace: Option<PathBuf>,
        /// Point [[..],[..],[..]] to refute
        #[arg(long, conflicts_with = "inner")]
        refute: Option<PathBuf>,
        /// Emit the inner points of a free support
        #[arg(long)]
        inner: bool,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Family { .. } => "family",
            Command::MomentMap { .. } => "moment-map",
            Command::Flow { .. } => "flow",
            Command::FreeSupport { .. } => "free-support",
            Command::CertifyNonfree { .. } => "certify-nonfree",
            Command::ReduceS0 { .. } => "reduce-s0",
            Command::Polytope { .. } => "polytope",
        }
    }
}

/// What a command produced: a result object and whether its verdict holds.
pub struct Outcome {
    pub result: Value,
    pub verdict: bool,
}

/// A failure before any result exists.
#[derive(Debug)]
pub struct InputError {
    pub kind: &'static str,
    pub message: String,
}

impl From<nonfree::Error> for InputError {
    fn from(e: nonfree::Error) -> Self {
        use nonfree::Error as E;
        let kind = match &e {
            E::DimensionMismatch(_) => "dimension-mismatch",
            E::EmptyDimension(_) | E::IndexOutOfRange { .. } | E::DuplicateEntry(_) | E::NonFinite(_) => {
                "malformed-tensor"
            }
            E::Format(_) => "malformed-input",
            E::InvalidSize { .. } => "invalid-size",
            E::ZeroTensor => "zero-tensor",
            _ => "invalid-input",
        };
        InputError { kind, message: e.to_string() }
    }
}

fn error_report(command: &str, kind: &str, message: &str) -> Value {
    json!({
        "tool": TOOL,
        "version": VERSION,
        "command": command,
        "error": {"kind": kind, "message": message},
    })
}

fn emit(report: &Value, path: Option<&PathBuf>) -> Result<(), String> {
    let bytes = output::to_bytes(report);
    match path {
        Some(p) => std::fs::write(p, &bytes).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            eprint!("{msg}");
            let _ = emit(&error_report("", "usage", msg.trim()), None);
            return ExitCode::from(2);
        }
    };
    let name = cli.command.name();
    let (config, result) = commands::run(&cli.command, cli.seed);
    let (report, code) = match result {
        Ok(out) => (
            json!({
                "tool": TOOL,
                "version": VERSION,
                "command": name,
                "config": config,
                "verdict": out.verdict,
                "result": out.result,
            }),
            if out.verdict { 0 } else { 1 },
        ),
        Err(e) => {
            eprintln!("error: {}", e.message);
            let mut r = error_report(name, e.kind, &e.message);
            r["config"] = config;
            (r, 2)
        }
    };
    if let Err(msg) = emit(&report, cli.output.as_ref()) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
