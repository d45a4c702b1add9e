//! Command-line front end: scenario files, experiment drivers, reports.
//!
//! Exit codes: 0 when every check passes, 1 when a numeric check fails,
//! 2 for invalid input, parameter violations and refused constructions.
//! Worker threads follow `RAYON_NUM_THREADS`.

pub mod experiments;
pub mod parse;
pub mod report;
pub mod scenario;
pub mod selftest;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use experiments::{default_scenario, run_cartan, run_exponential_sum, run_positive_defect, run_scenario, run_torus};
pub use report::{Check, Report, Table};
pub use scenario::{GridSpec, QuadratureSpec, Scenario, ScenarioKind, Spacing};
pub use selftest::{analysis_suite, run_selftest, run_selftest_with, SuiteScale};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("the divisor satisfies the boundary condition; no positive-defect curve is constructed")]
    DivisorSatisfiesCondition(Box<Report>),
    #[error("computation failed: {0}")]
    Computation(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Computation(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Reproduction {
    #[value(name = "ex518")]
    ExponentialSum,
    Cartan,
    #[value(name = "prop513")]
    PositiveDefect,
    Torus,
}

impl Reproduction {
    fn kind(self) -> ScenarioKind {
        match self {
            Reproduction::ExponentialSum => ScenarioKind::ExponentialSum,
            Reproduction::Cartan => ScenarioKind::Cartan,
            Reproduction::PositiveDefect => ScenarioKind::PositiveDefect,
            Reproduction::Torus => ScenarioKind::Torus,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario JSON file; missing fields take the defaults of the command.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub rmin: Option<f64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Log-spaced radius grid (linear when grid flags are given without it).
    #[arg(long)]
    pub log_grid: bool,
    /// Truncation levels, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<u32>>,
    /// Directory receiving report.json and one CSV per table.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// Absolute tolerance of the adaptive quadrature.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Characteristic, proximity and counting functions on a radius grid.
    Characteristic(CommonArgs),
    /// Defect estimates for a curve and a divisor.
    Defect(CommonArgs),
    /// Corner test of the boundary condition for a divisor.
    BoundaryCheck(CommonArgs),
    /// Stabilizer of a divisor under the torus action.
    Stabilizer(CommonArgs),
    /// Reproduces one of the worked examples.
    Reproduce {
        #[arg(value_enum)]
        which: Reproduction,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Invariant checks of every module at reduced scale.
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, Parser)]
#[command(name = "valdist", version, about = "Value distribution of curves in semi-tori and abelian varieties")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Overlays the fields present in `text` on the defaults for `kind`.
pub fn scenario_with_defaults(kind: ScenarioKind, text: Option<&str>) -> Result<Scenario, CliError> {
    let mut base = serde_json::to_value(default_scenario(kind)).expect("scenario serializes");
    if let Some(text) = text {
        let file: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::InvalidInput(format!("scenario: {e}")))?;
        let obj = file
            .as_object()
            .ok_or_else(|| CliError::InvalidInput("scenario must be a JSON object".into()))?;
        let declared = obj.get("kind").or_else(|| obj.get("type"));
        if let Some(d) = declared {
            if d.as_str() != Some(kind.name()) {
                return Err(CliError::InvalidInput(format!(
                    "scenario kind {d} does not match the command ({})",
                    kind.name()
                )));
            }
        }
        let base_obj = base.as_object_mut().expect("object");
        for (k, v) in obj {
            if k != "type" {
                base_obj.insert(k.clone(), v.clone());
            }
        }
    }
    let s: Scenario = serde_json::from_value(base).map_err(|e| CliError::InvalidInput(format!("scenario: {e}")))?;
    s.validate()?;
    Ok(s)
}

fn apply_flags(mut s: Scenario, a: &CommonArgs) -> Result<Scenario, CliError> {
    if a.rmin.is_some() || a.rmax.is_some() || a.steps.is_some() || a.log_grid {
        let mut g = s.grid.clone().unwrap_or_default();
        if let Some(x) = a.rmin {
            g.rmin = x;
        }
        if let Some(x) = a.rmax {
            g.rmax = x;
        }
        if let Some(x) = a.steps {
            g.steps = x;
        }
        g.spacing = if a.log_grid { Spacing::Log } else { Spacing::Linear };
        if s.kind == ScenarioKind::Torus {
            s.rmax = Some(g.rmax);
        }
        s.grid = Some(g);
        s.window = None;
    }
    if let Some(k) = &a.k {
        s.k = Some(k.clone());
    }
    if let Some(t) = a.tol {
        let mut q = s.quadrature.clone().unwrap_or(QuadratureSpec {
            abs_tol: t,
            initial_panels: None,
            max_panels: None,
        });
        q.abs_tol = t;
        s.quadrature = Some(q);
    }
    if let Some(o) = &a.out {
        s.output = Some(o.to_string_lossy().into_owned());
    }
    s.validate()?;
    Ok(s)
}

/// Builds the scenario a command would run, without running it.
pub fn resolve(kind: ScenarioKind, a: &CommonArgs) -> Result<Scenario, CliError> {
    let text = match &a.scenario {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| CliError::InvalidInput(format!("{}: {e}", p.display())))?),
        None => None,
    };
    apply_flags(scenario_with_defaults(kind, text.as_deref())?, a)
}

/// Writes `report.json` and one CSV per table into `dir`.
pub fn write_report(report: &Report, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), report.to_json() + "\n")?;
    for (name, table) in &report.tables {
        std::fs::write(dir.join(report::table_file_name(name)), table.to_csv())?;
    }
    Ok(())
}

/// One line per check, then one per scalar verdict.
pub fn summary_lines(report: &Report) -> Vec<String> {
    let mut lines: Vec<String> = report.checks.iter().map(|c| c.line()).collect();
    for (k, v) in &report.verdicts {
        if !(v.is_object() || v.is_array()) {
            lines.push(format!("{k} = {v}"));
        }
    }
    lines
}

fn emit(report: &Report, out: Option<&Path>, format: OutputFormat) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    if let Some(dir) = out {
        write_report(report, dir)?;
        for l in summary_lines(report) {
            writeln!(lock, "{l}")?;
        }
        return Ok(());
    }
    for l in summary_lines(report) {
        eprintln!("{l}");
    }
    match format {
        OutputFormat::Json => writeln!(lock, "{}", report.to_json())?,
        OutputFormat::Csv => {
            for (i, (name, table)) in report.tables.iter().enumerate() {
                if i > 0 {
                    writeln!(lock)?;
                }
                writeln!(lock, "# {name}")?;
                write!(lock, "{}", table.to_csv())?;
            }
        }
    }
    Ok(())
}

fn exit_for(report: &Report) -> i32 {
    if report.passed {
        0
    } else {
        1
    }
}

fn run_common(kind: ScenarioKind, a: &CommonArgs) -> i32 {
    let s = match resolve(kind, a) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let out = s.output.clone().map(PathBuf::from);
    match run_scenario(&s) {
        Ok(report) => match emit(&report, out.as_deref(), a.format) {
            Ok(()) => exit_for(&report),
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Err(CliError::DivisorSatisfiesCondition(report)) => {
            let _ = emit(&report, out.as_deref(), a.format);
            eprintln!("error: {}", CliError::DivisorSatisfiesCondition(report));
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (including the program name) and runs the command;
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match &cli.command {
        Command::Characteristic(a) => run_common(ScenarioKind::Characteristic, a),
        Command::Defect(a) => run_common(ScenarioKind::Defect, a),
        Command::BoundaryCheck(a) => run_common(ScenarioKind::Boundary, a),
        Command::Stabilizer(a) => run_common(ScenarioKind::Stabilizer, a),
        Command::Reproduce { which, common } => run_common(which.kind(), common),
        Command::Selftest { out, format, tol } => {
            let mut q = crate::nevanlinna::QuadratureSettings::default();
            if let Some(t) = tol {
                if !(*t > 0.0) {
                    eprintln!("error: tolerance must be positive");
                    return 2;
                }
                q.abs_tol = *t;
            }
            let report = run_selftest_with(&q);
            match emit(&report, out.as_deref(), *format) {
                Ok(()) => exit_for(&report),
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
    }
}
