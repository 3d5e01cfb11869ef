mod gen;
mod ops;
mod report;
mod suites;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] orlicz_kit::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "orlicz-kit", version, about = "Orlicz norms, conjugates and charge decompositions")]
struct Cli {
    /// JSON input for the chosen subcommand; for `verify`, a run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "ORLICZ_KIT_SEED")]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Record wall-clock milliseconds per check (reports are then not reproducible).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Luxemburg and Amemiya norms of a sampled function.
    Norm,
    /// Fenchel conjugate of a grid function.
    Conjugate,
    /// Jordan, Hewitt–Yosida and de Giorgi decompositions of a charge.
    Decompose,
    /// Infimum of an integral functional against the integral of pointwise infima.
    Interchange,
    /// Conjugate of an integral functional.
    ConjugateIntegral,
    /// Membership in the subdifferential of an integral functional.
    Subdiff,
    /// Three-part decomposition of a linear functional.
    DecomposeFunctional,
    /// Δ₂ certificates against domain linearity.
    Reflexivity,
    /// Δ₂ classification of a catalog integrand.
    Delta2,
    /// Run verification suites.
    Verify {
        /// Suite name, repeatable; `all` runs every suite.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Run suites on parallel threads (output order is unchanged).
        #[arg(long)]
        parallel: bool,
    },
    /// List the verification suites.
    List,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Conjugate => "conjugate",
            Command::Decompose => "decompose",
            Command::Interchange => "interchange",
            Command::ConjugateIntegral => "conjugate-integral",
            Command::Subdiff => "subdiff",
            Command::DecomposeFunctional => "decompose-functional",
            Command::Reflexivity => "reflexivity",
            Command::Delta2 => "delta2",
            Command::Verify { .. } => "verify",
            Command::List => "list",
        }
    }
}

/// Run configuration file for `verify`; command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    seed: Option<u64>,
    tol: Option<f64>,
    #[serde(default)]
    suite: Vec<String>,
    out_path: Option<PathBuf>,
    format: Option<Format>,
}

struct Settings {
    seed: u64,
    tol: f64,
    out: Option<PathBuf>,
    format: Format,
}

const DEFAULT_TOL: f64 = 1e-6;

fn read(path: &PathBuf) -> Result<(String, String), CliError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: name.clone(),
        source,
    })?;
    Ok((name, text))
}

fn input(cli: &Cli) -> Result<(String, String), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("`{}` needs --config PATH", cli.command.name())))?;
    read(path)
}

fn settings(cli: &Cli, file: &RunConfig) -> Result<Settings, CliError> {
    let tol = cli.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Usage(format!("tolerance {tol} must be positive")));
    }
    Ok(Settings {
        seed: cli.seed.or(file.seed).unwrap_or(0),
        tol,
        out: cli.out.clone().or_else(|| file.out_path.clone()),
        format: cli.format.or(file.format).unwrap_or(Format::Json),
    })
}

fn verify(cli: &Cli, s: &Settings, mut names: Vec<String>, parallel: bool) -> Result<Report, CliError> {
    if names.is_empty() || names.iter().any(|n| n == "all") {
        names = suites::SUITES.iter().map(|s| s.name.to_string()).collect();
    }
    let mut chosen = Vec::new();
    for n in &names {
        let (i, _) = suites::find(n).ok_or_else(|| CliError::Usage(format!("unknown suite {n:?}; see `list`")))?;
        if !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    // declared order, whatever order they were requested in
    chosen.sort_unstable();
    let run = |i: usize| suites::run(i, s.seed, s.tol, cli.timings);
    let results: Vec<_> = if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = chosen.iter().map(|&i| scope.spawn(move || run(i))).collect();
            handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
        })
    } else {
        chosen.iter().map(|&i| run(i)).collect()
    };
    let mut records = Vec::new();
    for r in results {
        records.extend(r?);
    }
    let mut report = Report::new("verify", s.seed, s.tol, records);
    report.suites = chosen.iter().map(|&i| suites::SUITES[i].name.to_string()).collect();
    Ok(report)
}

fn execute(cli: &Cli) -> Result<(Report, Settings), CliError> {
    if let Command::Verify { suites, parallel } = &cli.command {
        let file = match &cli.config {
            Some(p) => {
                let (name, text) = read(p)?;
                ops::parse::<RunConfig>(&name, &text)?
            }
            None => RunConfig::default(),
        };
        let s = settings(cli, &file)?;
        let names = if suites.is_empty() { file.suite.clone() } else { suites.clone() };
        return Ok((verify(cli, &s, names, *parallel)?, s));
    }
    let s = settings(cli, &RunConfig::default())?;
    if let Command::List = cli.command {
        let list: Vec<_> = suites::SUITES
            .iter()
            .map(|x| serde_json::json!({"name": x.name, "about": x.about}))
            .collect();
        let mut r = Report::new("list", s.seed, s.tol, Vec::new());
        r.result = Some(serde_json::Value::Array(list));
        return Ok((r, s));
    }
    let (path, text) = input(cli)?;
    let (path, text) = (path.as_str(), text.as_str());
    let o = match cli.command {
        Command::Norm => ops::norm(path, text, s.tol)?,
        Command::Conjugate => ops::conjugate_grid(path, text)?,
        Command::Decompose => ops::decompose(path, text, s.tol)?,
        Command::Interchange => ops::interchange_op(path, text, s.seed, s.tol)?,
        Command::ConjugateIntegral => ops::conjugate_integral(path, text, s.seed, s.tol)?,
        Command::Subdiff => ops::subdiff(path, text, s.tol)?,
        Command::DecomposeFunctional => ops::decompose_functional_op(path, text, s.tol)?,
        Command::Reflexivity => ops::reflexivity(path, text, s.seed, s.tol)?,
        Command::Delta2 => ops::delta2_op(path, text)?,
        Command::Verify { .. } | Command::List => unreachable!(),
    };
    let mut r = Report::new(cli.command.name(), s.seed, s.tol, o.records);
    r.result = Some(o.result);
    Ok((r, s))
}

fn write(report: &Report, s: &Settings) -> Result<(), CliError> {
    let emit = |w: &mut dyn Write| match s.format {
        Format::Json => report.write_json(w),
        Format::Csv => report.write_csv(w),
    };
    match &s.out {
        Some(p) => {
            let io = |source| CliError::Io {
                path: p.display().to_string(),
                source,
            };
            let mut w = BufWriter::new(File::create(p).map_err(io)?);
            emit(&mut w).and_then(|_| w.flush()).map_err(io)
        }
        None => {
            let mut w = io::stdout().lock();
            match emit(&mut w) {
                // a closed pipe (`| head`) is not a failure of the run
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                }),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = execute(&cli).and_then(|(report, s)| {
        write(&report, &s)?;
        Ok(report)
    });
    match outcome {
        Ok(report) if report.all_passed() => ExitCode::SUCCESS,
        Ok(report) => {
            eprintln!("{} of {} checks failed", report.summary.failed, report.summary.total);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
