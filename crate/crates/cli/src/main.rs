//! `qbailey`: verify q-series identities, compute partition statistics and
//! evaluate q-series expressions from the command line.
//!
//! Exit status is 0 when every check passes, 1 when a check fails or an
//! evaluation fails, and 2 on usage, parse or configuration errors.

mod output;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use qbailey_core::catalogue::{registry, Params};
use qbailey_core::dsl::{evaluate, parse_str, EvalError};
use qbailey_core::partition::{partition_count, second_moment, spt, spt_star};

use output::{Format, Sink};

/// Largest `n` accepted by `compute`; the statistics are computed by
/// enumerating partitions.
const MAX_N: i64 = 80;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Eval(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qbailey",
    version,
    about = "Exact checks of q-series identities and Bailey pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run catalogue checks or a manifest and report pass/fail per task.
    Verify(VerifyArgs),
    /// Write the coefficient tables of checks, or a statistic, as CSV or JSON.
    Export(ExportArgs),
    /// Exact partition statistics by enumeration.
    Compute(ComputeArgs),
    /// Evaluate an expression to a truncated q-series.
    Series(SeriesArgs),
    /// List the catalogue.
    List,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Catalogue identity id, e.g. EULER.
    #[arg(long, conflicts_with = "manifest")]
    id: Option<String>,
    /// TOML manifest of checks.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Parameter value or grid: `M=3`, `M=0..6`. Repeatable.
    #[arg(long = "param", value_name = "NAME=VALUES")]
    params: Vec<String>,
    /// Truncation order T [default: 40, or the manifest's order].
    #[arg(long)]
    order: Option<i64>,
    /// Hard cap on the cutoff K of the E8_PENTA_CUBE triple sum.
    #[arg(long)]
    k_cap: Option<i64>,
    /// Largest index checked by pair and conjugate checks.
    #[arg(long)]
    n_max: Option<i64>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Include per-task wall time in the output.
    #[arg(long)]
    timings: bool,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Export a statistic table `n, value` instead of check tables.
    #[arg(long, value_enum, conflicts_with_all = ["id", "manifest"])]
    stat: Option<Stat>,
    /// Range of n for `--stat`.
    #[arg(long, value_name = "N or A..B", requires = "stat")]
    n: Option<String>,
    /// M for `--stat spt-star`.
    #[arg(long = "M", value_name = "M")]
    m: Option<i64>,
    #[arg(long, value_enum, default_value_t = ExportFormat::Csv)]
    format: ExportFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stat {
    /// p(n)
    P,
    /// Number of smallest parts, summed over the partitions of n.
    Spt,
    /// spt restricted to partitions with largest part at most smallest part + M.
    SptStar,
    /// Half the second rank moment: (1/2) sum_m m^2 N(m, n).
    RankMoment,
}

#[derive(Debug, Args)]
struct ComputeArgs {
    #[arg(value_enum)]
    stat: Stat,
    #[arg(long, value_name = "N or A..B")]
    n: String,
    #[arg(long = "M", value_name = "M")]
    m: Option<i64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SeriesArgs {
    /// Expression, e.g. "poch(q, inf)^3".
    expr: String,
    #[arg(long, default_value_t = 40)]
    order: i64,
    /// Parameter value `NAME=VALUE`. Repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Verify(a) => verify(a),
        Command::Export(a) => export(a),
        Command::Compute(a) => compute(a),
        Command::Series(a) => series(a),
        Command::List => {
            let mut out = String::new();
            for e in registry() {
                let params: Vec<String> = e
                    .params
                    .iter()
                    .map(|p| match p.default {
                        Some(d) => format!("[{}={}..{}, default {d}]", p.name, p.min, p.max),
                        None => format!("{}={}..{}", p.name, p.min, p.max),
                    })
                    .collect();
                out.push_str(&format!(
                    "{:<14} {:<21} {}\n",
                    e.id,
                    e.kind,
                    params.join(" ")
                ));
                out.push_str(&format!("{:<14} {}\n", "", e.description));
            }
            Sink::new(None)?.write(&out)?;
            Ok(0)
        }
    }
}

fn exit_for(all_passed: bool) -> u8 {
    if all_passed {
        0
    } else {
        1
    }
}

fn verify(a: VerifyArgs) -> Result<u8, CliError> {
    let sink = Sink::new(a.output.as_deref())?;
    let reports = tasks::run_all(&a.run)?;
    let text = match a.format {
        Format::Text => output::reports_text(&reports, a.timings),
        Format::Json => output::reports_json(&reports, a.timings, false),
        Format::Csv => output::reports_csv(&reports, a.timings),
    };
    sink.write(&text)?;
    Ok(exit_for(reports.iter().all(|r| r.passed())))
}

fn export(a: ExportArgs) -> Result<u8, CliError> {
    let sink = Sink::new(a.output.as_deref())?;
    if let Some(stat) = a.stat {
        let n =
            a.n.as_deref()
                .ok_or_else(|| CliError::Usage("--stat needs --n".into()))?;
        let rows = statistic(stat, n, a.m)?;
        let text = match a.format {
            ExportFormat::Csv => output::values_csv(&rows),
            ExportFormat::Json => output::values_json(&rows),
        };
        sink.write(&text)?;
        return Ok(0);
    }
    let reports = tasks::run_all(&a.run)?;
    let text = match a.format {
        ExportFormat::Csv => output::tables_csv(&reports),
        ExportFormat::Json => output::reports_json(&reports, false, true),
    };
    sink.write(&text)?;
    Ok(exit_for(reports.iter().all(|r| r.passed())))
}

fn statistic(stat: Stat, n: &str, m: Option<i64>) -> Result<Vec<(i64, String)>, CliError> {
    let ns = qbailey_core::dsl::parse_range(n).map_err(|e| CliError::Usage(format!("--n: {e}")))?;
    if let Some(bad) = ns.iter().find(|&&n| !(0..=MAX_N).contains(&n)) {
        return Err(CliError::Usage(format!("--n: {bad} outside 0..={MAX_N}")));
    }
    let m = match (stat, m) {
        (Stat::SptStar, Some(m)) if m >= 0 => Some(m as u32),
        (Stat::SptStar, Some(m)) => {
            return Err(CliError::Usage(format!("--M must be >= 0, got {m}")))
        }
        (Stat::SptStar, None) => return Err(CliError::Usage("spt-star needs --M".into())),
        (_, Some(_)) => return Err(CliError::Usage("--M only applies to spt-star".into())),
        (_, None) => None,
    };
    Ok(ns
        .into_iter()
        .map(|n| {
            let k = n as u32;
            let v = match stat {
                Stat::P => partition_count(k),
                Stat::Spt => spt(k),
                Stat::SptStar => spt_star(m.expect("checked"), k),
                Stat::RankMoment => second_moment(k),
            };
            (n, v.to_string())
        })
        .collect())
}

fn compute(a: ComputeArgs) -> Result<u8, CliError> {
    let sink = Sink::new(a.output.as_deref())?;
    let rows = statistic(a.stat, &a.n, a.m)?;
    let text = match a.format {
        Format::Text => output::values_text(&rows),
        Format::Json => output::values_json(&rows),
        Format::Csv => output::values_csv(&rows),
    };
    sink.write(&text)?;
    Ok(0)
}

fn series(a: SeriesArgs) -> Result<u8, CliError> {
    if a.order < 0 {
        return Err(CliError::Usage(format!(
            "--order must be >= 0, got {}",
            a.order
        )));
    }
    let sink = Sink::new(a.output.as_deref())?;
    let expr =
        parse_str(&a.expr).map_err(|e| CliError::Usage(format!("cannot parse expression: {e}")))?;
    let mut params = Params::new();
    for p in &a.params {
        let (name, values) = tasks::parse_param(p)?;
        let [v] = values[..] else {
            return Err(CliError::Usage(format!(
                "--param {p}: series takes a single value"
            )));
        };
        if params.insert(name.clone(), v).is_some() {
            return Err(CliError::Usage(format!("parameter `{name}` given twice")));
        }
    }
    let s = evaluate(&expr, &params, a.order)?;
    let rows: Vec<(i64, String)> = (s.min_exp().min(0)..=a.order)
        .map(|n| (n, s.coeff_or_zero(n).to_string()))
        .collect();
    let text = match a.format {
        Format::Text => format!("{s}\n"),
        Format::Json => output::values_json(&rows),
        Format::Csv => output::values_csv(&rows),
    };
    sink.write(&text)?;
    Ok(0)
}
