//! Command-line front end for `dfusion`.
//!
//! ```text
//! dfusion epsilon <granulation.json>
//! dfusion fuse <dnumbers.json> --epsilon 0.042
//! dfusion assess [--model model.json] --breaks 10 --pressure 0 --distance 3
//! dfusion batch [--model model.json] <scenarios.json>
//! ```
//!
//! Every command accepts `--format text|json`. Exit codes: 0 on success,
//! 1 on unreadable or invalid input, 2 when the evidence is in total
//! conflict.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use dfusion::config::{self, DNumberDoc};
use dfusion::intrusion::{self, IntrusionModel, Proposition, RiskTriple, Scenario};
use dfusion::{DNumber, DNumberError, IntrusionError};
use serde::{Deserialize, Serialize};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_CONFLICT: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "dfusion",
    version,
    about = "D-number evidence fusion and contaminant-intrusion risk"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the relative matrix and exclusive coefficient of a granulation.
    Epsilon {
        /// Granulation file: {"granules": [{"label", "shape": [a, b, c, d]}]}.
        file: PathBuf,
    },
    /// Discount D numbers by epsilon and combine them.
    Fuse {
        /// JSON array of D numbers: [{"frame": [..], "masses": [{"focal", "value"}]}].
        file: PathBuf,
        /// Exclusive coefficient used to discount every input.
        #[arg(long)]
        epsilon: f64,
    },
    /// Assess intrusion risk for one set of measurements.
    Assess {
        /// Model file; the built-in model is used when omitted.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Pipe breakage rate, breaks/100 km/year.
        #[arg(long, allow_negative_numbers = true)]
        breaks: f64,
        /// Transient pressure, psi.
        #[arg(long, allow_negative_numbers = true)]
        pressure: f64,
        /// Separation distance to the contamination source, m.
        #[arg(long, allow_negative_numbers = true)]
        distance: f64,
    },
    /// Assess every scenario of a scenario file.
    Batch {
        /// Scenario file: [{"id", "breaks", "pressure", "distance"}].
        scenarios: PathBuf,
        /// Model file; the built-in model is used when omitted.
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Conflict(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Conflict(_) => EXIT_CONFLICT,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Conflict(m) => m,
        }
    }
}

impl From<DNumberError> for CliError {
    fn from(e: DNumberError) -> Self {
        match e {
            DNumberError::TotalConflict(_) => CliError::Conflict(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<IntrusionError> for CliError {
    fn from(e: IntrusionError) -> Self {
        match e {
            IntrusionError::Fusion(d) => d.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Text written by a successful command.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

/// Parses `args` (including the program name) and runs the command,
/// writing to the given streams. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_INPUT
                }
            };
        }
    };
    let out = match execute(&cli) {
        Ok(out) => out,
        Err(e) => Output {
            stderr: format!("error: {}\n", e.message()),
            code: e.exit_code(),
            ..Output::default()
        },
    };
    let wrote = stdout
        .write_all(out.stdout.as_bytes())
        .and_then(|_| stdout.flush());
    let _ = stderr.write_all(out.stderr.as_bytes());
    match wrote {
        Ok(()) => out.code,
        Err(_) => EXIT_INPUT,
    }
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Epsilon { file } => cmd_epsilon(&read(file)?, cli.format),
        Command::Fuse { file, epsilon } => cmd_fuse(&read(file)?, *epsilon, cli.format),
        Command::Assess {
            model,
            breaks,
            pressure,
            distance,
        } => {
            let (model, warnings) = load_model(model.as_deref())?;
            let scenario = Scenario::new(*breaks, *pressure, *distance)?;
            let mut out = cmd_assess(&model, &scenario, cli.format)?;
            out.stderr.insert_str(0, &warnings);
            Ok(out)
        }
        Command::Batch { scenarios, model } => {
            let (model, warnings) = load_model(model.as_deref())?;
            let mut out = cmd_batch(&model, &read(scenarios)?, cli.format)?;
            out.stderr.insert_str(0, &warnings);
            Ok(out)
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn parse_error(path_kind: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("invalid {path_kind}: {e}"))
}

fn load_model(path: Option<&Path>) -> Result<(IntrusionModel, String), CliError> {
    let model = match path {
        Some(p) => config::parse_model(&read(p)?).map_err(|e| parse_error("model file", e))?,
        None => intrusion::default_model(),
    };
    let mut warnings = String::new();
    for w in model.warnings() {
        let _ = writeln!(warnings, "warning: {w}");
    }
    Ok((model, warnings))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct EpsilonReport {
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    pub epsilon: f64,
}

pub fn cmd_epsilon(text: &str, format: Format) -> Result<Output, CliError> {
    let g = config::parse_granulation(text).map_err(|e| parse_error("granulation file", e))?;
    let matrix = g
        .relative_matrix()
        .map_err(|e| CliError::Input(e.to_string()))?;
    let epsilon =
        dfusion::exclusive_coefficient(&matrix).map_err(|e| CliError::Input(e.to_string()))?;
    let stdout = match format {
        Format::Text => format!("{matrix}\n\nepsilon = {epsilon:.4}\n"),
        Format::Json => to_json(&EpsilonReport {
            labels: matrix.labels().to_vec(),
            matrix: matrix.rows().map(<[f64]>::to_vec).collect(),
            epsilon,
        }),
    };
    Ok(Output {
        stdout,
        ..Output::default()
    })
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct FuseReport {
    #[serde(flatten)]
    pub result: DNumberDoc,
    /// Conflict of each pairwise step, in input order.
    pub conflicts: Vec<f64>,
}

pub fn cmd_fuse(text: &str, epsilon: f64, format: Format) -> Result<Output, CliError> {
    let ds = config::parse_dnumbers(text).map_err(|e| parse_error("D-number file", e))?;
    if ds.len() < 2 {
        return Err(CliError::Input(format!(
            "fuse needs at least 2 D numbers, got {}",
            ds.len()
        )));
    }
    let discounted = ds
        .iter()
        .map(|d| d.normalize_incomplete().discount(epsilon))
        .collect::<Result<Vec<_>, _>>()?;
    let mut conflicts = Vec::with_capacity(discounted.len() - 1);
    let mut acc = discounted[0].clone();
    for d in &discounted[1..] {
        let step = acc.combine_with_conflict(d)?;
        conflicts.push(step.conflict);
        acc = step.result;
    }
    let stdout = match format {
        Format::Text => fuse_text(&acc, &conflicts),
        Format::Json => to_json(&FuseReport {
            result: DNumberDoc::from(&acc),
            conflicts,
        }),
    };
    Ok(Output {
        stdout,
        ..Output::default()
    })
}

fn fuse_text(d: &DNumber, conflicts: &[f64]) -> String {
    let rows: Vec<(String, f64)> = d
        .iter_frame_order()
        .into_iter()
        .map(|(f, m)| (format!("{{{}}}", d.frame().ordered(f).join(", ")), m))
        .collect();
    let width = rows
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    let mut s = String::new();
    for (k, m) in rows {
        let _ = writeln!(s, "{k:width$}  {m:.4}");
    }
    for (i, k) in conflicts.iter().enumerate() {
        let _ = writeln!(s, "conflict k{} = {k:.4}", i + 1);
    }
    s
}

fn verdict_code(p: Proposition) -> &'static str {
    match p {
        Proposition::Possible => "P",
        Proposition::Unknown => "P,NP",
        Proposition::NotPossible => "NP",
    }
}

fn verdict_line(r: &RiskTriple) -> String {
    let v = r.verdict();
    let what = match v {
        Proposition::Possible => "intrusion possible",
        Proposition::Unknown => "undetermined",
        Proposition::NotPossible => "intrusion not possible",
    };
    format!(
        "verdict: {what} ({v} carries the largest mass, {:.3})",
        r.get(v)
    )
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct AssessReport {
    pub scenario: Scenario,
    pub risk: RiskTriple,
    pub verdict: String,
}

pub fn cmd_assess(
    model: &IntrusionModel,
    scenario: &Scenario,
    format: Format,
) -> Result<Output, CliError> {
    let risk = model.assess(scenario)?;
    let stdout = match format {
        Format::Text => format!(
            "risk ({{P}}, {{P,NP}}, {{NP}}) = {risk}\n{}\n",
            verdict_line(&risk)
        ),
        Format::Json => to_json(&AssessReport {
            scenario: *scenario,
            risk,
            verdict: verdict_code(risk.verdict()).to_owned(),
        }),
    };
    Ok(Output {
        stdout,
        ..Output::default()
    })
}

/// One row of `batch --format json`.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum BatchRow {
    Assessed {
        id: String,
        breaks: f64,
        pressure: f64,
        distance: f64,
        risk: RiskTriple,
        verdict: String,
    },
    Failed {
        id: String,
        error: String,
    },
}

pub fn cmd_batch(model: &IntrusionModel, text: &str, format: Format) -> Result<Output, CliError> {
    let rows = config::parse_scenarios(text).map_err(|e| parse_error("scenario file", e))?;
    let mut results = Vec::with_capacity(rows.len());
    let mut all_conflicts = true;
    for row in rows {
        let outcome = row
            .scenario
            .map_err(CliError::Input)
            .and_then(|s| Ok((s, model.assess(&s)?)));
        results.push(match outcome {
            Ok((s, risk)) => {
                all_conflicts = false;
                BatchRow::Assessed {
                    id: row.id,
                    breaks: s.breaks,
                    pressure: s.pressure,
                    distance: s.distance,
                    risk,
                    verdict: verdict_code(risk.verdict()).to_owned(),
                }
            }
            Err(e) => {
                all_conflicts &= matches!(e, CliError::Conflict(_));
                BatchRow::Failed {
                    id: row.id,
                    error: e.message().to_owned(),
                }
            }
        });
    }
    let failed = results
        .iter()
        .filter(|r| matches!(r, BatchRow::Failed { .. }))
        .count();
    let code = if results.is_empty() || failed < results.len() {
        EXIT_OK
    } else if all_conflicts {
        EXIT_CONFLICT
    } else {
        EXIT_INPUT
    };
    let stdout = match format {
        Format::Text => batch_text(&results),
        Format::Json => to_json(&results),
    };
    let stderr = if failed > 0 {
        format!("{failed} of {} scenarios failed\n", results.len())
    } else {
        String::new()
    };
    Ok(Output {
        stdout,
        stderr,
        code,
    })
}

fn batch_text(rows: &[BatchRow]) -> String {
    let id_of = |r: &BatchRow| match r {
        BatchRow::Assessed { id, .. } | BatchRow::Failed { id, .. } => id.chars().count(),
    };
    let w = rows.iter().map(id_of).max().unwrap_or(0).max(2);
    let mut s = format!(
        "{:w$}  {:>8}  {:>8}  {:>8}  {:>6}  {:>6}  {:>6}  verdict\n",
        "id", "breaks", "pressure", "distance", "P", "P,NP", "NP"
    );
    for r in rows {
        let _ = match r {
            BatchRow::Assessed {
                id,
                breaks,
                pressure,
                distance,
                risk,
                verdict,
            } => writeln!(
                s,
                "{id:w$}  {breaks:>8.2}  {pressure:>8.2}  {distance:>8.2}  {:>6.3}  {:>6.3}  {:>6.3}  {verdict}",
                risk.p, risk.p_np, risk.np
            ),
            BatchRow::Failed { id, error } => writeln!(s, "{id:w$}  error: {error}"),
        };
    }
    s
}
