use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use incotherm_core::NumericConfig;

use crate::commands::{self, Sweep, WorkMode};
use crate::error::{CliError, CliResult};
use crate::format::to_json;
use crate::scenario::{self, Resolved};

#[derive(Debug, Parser)]
#[command(
    name = "incotherm",
    version,
    about = "Thermalisation steering robustness, survival times and work certificates"
)]
pub struct Cli {
    /// Scenario file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    /// Output file; stdout when absent and the scenario names none.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed of the single random generator.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Tolerance overrides: inline JSON object or a path to one.
    #[arg(long, global = true, value_name = "JSON|PATH")]
    pub tol_overrides: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AuditFormat {
    Table,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Robustness SR_γ with q* and the dual witness.
    Sr,
    /// Survival time under the scenario schedule.
    Tmin,
    /// Work figures of the Pauli example, or a certificate for the scenario.
    Work {
        /// Energy ratio δ of a single Pauli point.
        #[arg(long, conflicts_with = "sweep")]
        delta: Option<f64>,
        /// δ sweep `lo:hi:n`, written as CSV.
        #[arg(long, value_name = "LO:HI:N")]
        sweep: Option<Sweep>,
        /// NV nuclear-spin preset (δ = 1.59976e-7, T = 300 K).
        #[arg(long, conflicts_with_all = ["delta", "sweep"])]
        nv: bool,
    },
    /// Monotonicity audit under random operations and filters.
    Audit {
        /// Number of random trials.
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Apply condition-violating filters and flag them as not certified.
        #[arg(long)]
        permissive: bool,
        #[arg(long, value_enum, default_value_t = AuditFormat::Table)]
        format: AuditFormat,
    },
    /// Last vanishing time of steerability under the scenario evolution.
    Tstar {
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sr => "sr",
            Command::Tmin => "tmin",
            Command::Work { .. } => "work",
            Command::Audit { .. } => "audit",
            Command::Tstar { .. } => "tstar",
        }
    }
}

fn parse_overrides(s: &str) -> CliResult<serde_json::Map<String, serde_json::Value>> {
    let text = if s.trim_start().starts_with('{') {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|source| CliError::Io {
            path: s.to_string(),
            source,
        })?
    };
    match serde_json::from_str(&text) {
        Ok(serde_json::Value::Object(m)) => Ok(m),
        Ok(_) => Err(CliError::validation(
            "tolerance overrides must be a JSON object",
        )),
        Err(e) => Err(CliError::validation(format!("tolerance overrides: {e}"))),
    }
}

fn load_resolved(cli: &Cli) -> CliResult<Option<Resolved>> {
    let Some(path) = &cli.scenario else {
        return Ok(None);
    };
    let overrides = cli
        .tol_overrides
        .as_deref()
        .map(parse_overrides)
        .transpose()?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let s = scenario::load(path)?;
    Ok(Some(scenario::resolve(s, base, overrides.as_ref())?))
}

fn require(r: Option<&Resolved>, cmd: &str) -> CliResult<Resolved> {
    r.cloned()
        .ok_or_else(|| CliError::validation(format!("`{cmd}` needs --scenario")))
}

/// Runs a parsed command and returns the text it produces.
pub fn execute(cli: &Cli) -> CliResult<(String, Option<PathBuf>)> {
    let resolved = load_resolved(cli)?;
    let r = resolved.as_ref();
    let cmd = cli.command.name();
    let text = match &cli.command {
        Command::Sr => to_json(&commands::sr(&require(r, cmd)?)?)?,
        Command::Tmin => to_json(&commands::tmin(&require(r, cmd)?)?)?,
        Command::Work { delta, sweep, nv } => {
            let mode = match (delta, sweep, nv) {
                (_, _, true) => WorkMode::Nv,
                (Some(d), _, _) => WorkMode::Point(*d),
                (_, Some(s), _) => WorkMode::Sweep(*s),
                _ => WorkMode::Certificate,
            };
            let cfg = match r {
                Some(r) => r.cfg,
                None => match &cli.tol_overrides {
                    Some(o) => {
                        scenario::merge_tolerances(NumericConfig::default(), &parse_overrides(o)?)?
                    }
                    None => NumericConfig::default(),
                },
            };
            commands::work(mode, r, &cfg)?
        }
        Command::Audit {
            n,
            permissive,
            format,
        } => {
            let a = commands::audit(&require(r, cmd)?, *n, cli.seed, *permissive)?;
            match format {
                AuditFormat::Table => commands::audit_table(&a),
                AuditFormat::Json => to_json(&a)?,
            }
        }
        Command::Tstar { t_max, grid } => {
            to_json(&commands::tstar(&require(r, cmd)?, *t_max, *grid)?)?
        }
    };
    let dest = cli
        .out
        .clone()
        .or_else(|| r.and_then(|r| r.output_path(cmd)));
    Ok((text, dest))
}

fn emit(text: &str, dest: Option<&Path>) -> CliResult<()> {
    match dest {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "stdout".into(),
                source,
            }),
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let (text, dest) = execute(cli)?;
    emit(&text, dest.as_deref())
}

/// Exit codes: 0 success, 2 solver failure, 3 validation error.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("incotherm: {e}");
            e.to_exit()
        }
    }
}
