//! `ensemble-teleport`: run protocol sessions, parameter sweeps and operator
//! audits from the command line.
//!
//! Exit status is 0 when the command ran and every audit passed, 1 when an
//! audit exceeded its tolerance, and 2 for invalid input or a failed run.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ensemble_teleport::bell::BellIndex;
use ensemble_teleport::fidelity::PHASE_STEPS;
use ensemble_teleport::protocol::Preparation;

use commands::{defaults, MessageKind};
use output::Report;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 271_828;

#[derive(Parser, Debug)]
#[command(name = "ensemble-teleport", version, about = "Ensemble teleportation simulator and audits")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for sampled inputs.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    seed: u64,
    /// Tolerance override; each command has its own default.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PrepArg {
    Bell1,
    Bell2,
    Bell3,
    Bell4,
    Paut,
}

impl PrepArg {
    fn preparation(self) -> Preparation {
        let bell = |i| Preparation::Bell(BellIndex::new(i).expect("1..=4"));
        match self {
            Self::Bell1 => bell(1),
            Self::Bell2 => bell(2),
            Self::Bell3 => bell(3),
            Self::Bell4 => bell(4),
            Self::Paut => Preparation::Automatic,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MessageArg {
    TwoBits,
    Ping,
    Preagreed,
}

impl From<MessageArg> for MessageKind {
    fn from(m: MessageArg) -> Self {
        match m {
            MessageArg::TwoBits => MessageKind::TwoBits,
            MessageArg::Ping => MessageKind::Ping,
            MessageArg::Preagreed => MessageKind::PreAgreed,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Idempotence, orthogonality, completeness and PPT verdicts for the Bell projectors.
    BellAudit,
    /// One protocol session.
    Teleport(TeleportArgs),
    /// Fidelities over a (c11, |c12|, arg c12) grid.
    Sweep(SweepArgs),
    /// Spectrum, norm, idempotence factor and transformation of the automatic preparation.
    PautAudit,
    /// Compare the two state-update conventions on sampled inputs.
    AppendixCheck(AppendixArgs),
}

#[derive(Args, Debug)]
struct TeleportArgs {
    #[arg(long, allow_negative_numbers = true)]
    c11: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c12re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c12im: f64,
    #[arg(long, value_enum)]
    prep: PrepArg,
    /// Defaults to two-bits for Bell preparations and preagreed for paut.
    #[arg(long, value_enum)]
    message: Option<MessageArg>,
    /// Bob applies his correction (default).
    #[arg(long, overrides_with = "no_correct")]
    correct: bool,
    /// Bob leaves his state alone.
    #[arg(long)]
    no_correct: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Grid points per axis for c11 and the coherence fraction.
    #[arg(long, default_value_t = 11)]
    resolution: usize,
    /// Phases of c12, evenly spaced on [0, 2π).
    #[arg(long, default_value_t = PHASE_STEPS)]
    phases: usize,
    #[arg(long, value_enum, default_value_t = PrepArg::Bell1)]
    prep: PrepArg,
    /// Bob applies his correction (default is not to).
    #[arg(long, overrides_with = "no_correct")]
    correct: bool,
    #[arg(long)]
    no_correct: bool,
}

#[derive(Args, Debug)]
struct AppendixArgs {
    #[arg(long, default_value_t = 100)]
    samples: usize,
}

fn tolerance(given: Option<f64>, default: f64) -> Result<f64> {
    match given {
        None => Ok(default),
        Some(t) if t.is_finite() && t > 0.0 => Ok(t),
        Some(t) => bail!("--tol must be a positive finite number (got {t})"),
    }
}

fn run(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::BellAudit => commands::bell_audit_report(tolerance(g.tol, defaults::BELL_AUDIT)?),
        Command::PautAudit => commands::paut_audit_report(tolerance(g.tol, defaults::PAUT_AUDIT)?),
        Command::AppendixCheck(a) => {
            commands::appendix_check(a.samples, g.seed, tolerance(g.tol, defaults::APPENDIX)?)
        }
        Command::Teleport(a) => {
            let c = commands::coefficients(a.c11, a.c12re, a.c12im)?;
            let prep = a.prep.preparation();
            let message = a.message.map_or_else(|| commands::default_message(&prep), Into::into);
            commands::teleport(c, prep, message, !a.no_correct, tolerance(g.tol, defaults::AGREEMENT)?)
        }
        Command::Sweep(a) => commands::sweep(
            a.prep.preparation(),
            a.correct && !a.no_correct,
            a.resolution,
            a.phases,
            tolerance(g.tol, defaults::AGREEMENT)?,
        ),
    }
}

fn emit(report: &Report, g: &GlobalArgs) -> Result<()> {
    let text = match g.format {
        Format::Table => report.to_table(),
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json()?,
    };
    match &g.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, &cli.global) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: audit exceeded tolerance");
        ExitCode::from(1)
    }
}
