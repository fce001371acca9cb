//! `multient` command-line front end.
//!
//! Exit codes: 0 success, 1 input error, 2 invalid request, 3 self-validation
//! mismatch. Values print with 12 digits after the decimal point.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::aggregate::{
    build_three_qubit_state, classify_with_mode, free_entanglement, free_entanglement_with_mode,
    isotropic_closed_form, isotropic_state, sweep_isotropic, three_qubit_closed_form,
    MeasureReport, SweepRow, Verdict, DEFAULT_TOL,
};
use crate::error::Error;
use crate::measures::MeasureKind;
use crate::numeric::C64;
use crate::regroup::CutMode;
use crate::state::{parse_state, State};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_REQUEST: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

/// Closed-form vs generic agreement required by `family` and `sweep`.
pub const FAMILY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "multient",
    version,
    about = "Multiparticle free-entanglement measure over all bipartite groupings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-cut values and their average for a state file.
    Measure(StateArgs),
    /// Separability verdict from the per-cut values.
    Classify(ClassifyArgs),
    /// Compare a closed-form family against the generic pipeline.
    Family {
        #[command(subcommand)]
        family: FamilyCommand,
    },
    /// Tabulate a closed-form family against the generic pipeline as CSV.
    Sweep {
        #[command(subcommand)]
        sweep: SweepCommand,
    },
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// State file.
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, value_enum, default_value_t = MeasureArg::Concurrence)]
    pub measure: MeasureArg,
    #[arg(long, value_enum, default_value_t = CutModeArg::Literal)]
    pub cut_mode: CutModeArg,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Cut values above this count as entangled.
    #[arg(long, default_value_t = DEFAULT_TOL, allow_negative_numbers = true)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum FamilyCommand {
    /// Three-qubit pure family: 8 complex coefficients as 16 reals (re im ...).
    ThreeQubit {
        #[arg(long, num_args = 16, required = true, allow_negative_numbers = true)]
        coeffs: Vec<f64>,
    },
    /// GHZ state mixed with white noise.
    Isotropic {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum SweepCommand {
    Isotropic {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x_min: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        x_max: f64,
        #[arg(long, default_value_t = 21)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Concurrence,
    Entropy,
    Negativity,
}

impl From<MeasureArg> for MeasureKind {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Concurrence => MeasureKind::Concurrence,
            MeasureArg::Entropy => MeasureKind::Entropy,
            MeasureArg::Negativity => MeasureKind::Negativity,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CutModeArg {
    Literal,
    Distinct,
}

impl From<CutModeArg> for CutMode {
    fn from(m: CutModeArg) -> Self {
        match m {
            CutModeArg::Literal => CutMode::Literal,
            CutModeArg::Distinct => CutMode::Distinct,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
}

/// Settings for the state-file commands after flag parsing.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub state_path: PathBuf,
    pub measure_kind: MeasureKind,
    pub tol: f64,
    pub cut_mode: CutMode,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    fn from_args(args: &StateArgs, tol: f64) -> Result<Self, CliError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::request(format!("--tol must be positive, got {tol}")));
        }
        Ok(Self {
            state_path: args.state.clone(),
            measure_kind: args.measure.into(),
            tol,
            cut_mode: args.cut_mode.into(),
            output_format: args.format,
            output_path: args.out.clone(),
        })
    }
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn request(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_REQUEST,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::RequiresPureState(_) | Error::OutOfRange(_) => EXIT_REQUEST,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// A successful command: text to emit and its exit status.
struct Outcome {
    text: String,
    out: Option<PathBuf>,
    code: i32,
    diagnostic: Option<String>,
}

/// Parses `args` (including the program name) and runs the command, writing
/// the report to `stdout` and diagnostics to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("error: invalid arguments");
            let _ = writeln!(stderr, "{first}");
            return EXIT_REQUEST;
        }
    };

    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            return e.code;
        }
    };

    match &outcome.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &outcome.text) {
                let _ = writeln!(stderr, "error: cannot write `{}`: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => {
            let _ = stdout.write_all(outcome.text.as_bytes());
        }
    }
    if let Some(d) = outcome.diagnostic {
        let _ = writeln!(stderr, "{d}");
    }
    outcome.code
}

fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Measure(args) => cmd_measure(&RunConfig::from_args(args, DEFAULT_TOL)?),
        Command::Classify(args) => cmd_classify(&RunConfig::from_args(&args.state, args.tol)?),
        Command::Family { family } => cmd_family(family),
        Command::Sweep { sweep } => cmd_sweep(sweep),
    }
}

fn load_state(path: &Path) -> Result<State, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::input(format!("cannot read state file `{}`: {e}", path.display()))
    })?;
    parse_state(&text)
        .map_err(|e| CliError::from(e).with_prefix(&format!("{}: ", path.display())))
}

impl CliError {
    fn with_prefix(mut self, prefix: &str) -> Self {
        self.message.insert_str(0, prefix);
        self
    }
}

pub fn format_value(v: f64) -> String {
    format!("{v:.12}")
}

fn header_lines(out: &mut String, state: &State, report: &MeasureReport) {
    let _ = writeln!(out, "dims: {}", state.shape());
    let _ = writeln!(out, "kind: {}", state.kind_name());
    let _ = writeln!(out, "measure: {}", report.kind);
    let _ = writeln!(out, "cut_mode: {}", report.cut_mode);
    let _ = writeln!(out, "cut_count: {}", report.cut_count);
}

fn join(positions: &[usize]) -> String {
    positions
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

pub fn render_measure(state: &State, report: &MeasureReport, format: OutputFormat) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Text => {
            header_lines(&mut out, state, report);
            for (k, v) in report.per_cut.iter().enumerate() {
                let _ = writeln!(out, "cut {}: {}  {}", k + 1, v.cut, format_value(v.value));
            }
            let _ = writeln!(out, "E_bar = {}", format_value(report.e_bar));
        }
        OutputFormat::Csv => {
            out.push_str("cut,side1,side2,value\n");
            for (k, v) in report.per_cut.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    k + 1,
                    join(v.cut.side1()),
                    join(&v.cut.side2()),
                    format_value(v.value)
                );
            }
            let _ = writeln!(out, "E_bar,,,{}", format_value(report.e_bar));
        }
    }
    out
}

fn flag_name(entangled: bool) -> &'static str {
    if entangled {
        "entangled"
    } else {
        "not-detected"
    }
}

pub fn render_verdict(state: &State, verdict: &Verdict, format: OutputFormat) -> String {
    let mut out = String::new();
    let report = &verdict.report;
    match format {
        OutputFormat::Text => {
            let _ = writeln!(out, "verdict: {}", verdict.class);
            let _ = writeln!(out, "tol: {:e}", verdict.tol);
            header_lines(&mut out, state, report);
            for (k, (v, &flag)) in report.per_cut.iter().zip(&verdict.per_cut_flags).enumerate() {
                let _ = writeln!(
                    out,
                    "cut {}: {}  {}  {}",
                    k + 1,
                    v.cut,
                    format_value(v.value),
                    flag_name(flag)
                );
            }
        }
        OutputFormat::Csv => {
            out.push_str("cut,side1,side2,value,flag\n");
            for (k, (v, &flag)) in report.per_cut.iter().zip(&verdict.per_cut_flags).enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    k + 1,
                    join(v.cut.side1()),
                    join(&v.cut.side2()),
                    format_value(v.value),
                    flag_name(flag)
                );
            }
            let _ = writeln!(out, "verdict,,,,{}", verdict.class);
        }
    }
    out
}

pub fn render_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("x,e_bar_closed,e_bar_generic\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_value(r.x),
            format_value(r.e_bar_closed),
            format_value(r.e_bar_generic)
        );
    }
    out
}

fn cmd_measure(config: &RunConfig) -> Result<Outcome, CliError> {
    let state = load_state(&config.state_path)?;
    let report = free_entanglement_with_mode(&state, config.measure_kind, config.cut_mode)?;
    Ok(Outcome {
        text: render_measure(&state, &report, config.output_format),
        out: config.output_path.clone(),
        code: EXIT_OK,
        diagnostic: None,
    })
}

fn cmd_classify(config: &RunConfig) -> Result<Outcome, CliError> {
    let state = load_state(&config.state_path)?;
    let verdict = classify_with_mode(&state, config.measure_kind, config.tol, config.cut_mode)?;
    Ok(Outcome {
        text: render_verdict(&state, &verdict, config.output_format),
        out: config.output_path.clone(),
        code: EXIT_OK,
        diagnostic: None,
    })
}

struct Comparison {
    label: String,
    closed: f64,
    generic: f64,
}

fn comparison_outcome(title: String, rows: Vec<Comparison>) -> Outcome {
    let mut text = title;
    let mut worst = 0.0f64;
    for r in &rows {
        let diff = (r.closed - r.generic).abs();
        worst = worst.max(diff);
        let _ = writeln!(
            text,
            "{}: closed = {} generic = {} diff = {:.3e}",
            r.label,
            format_value(r.closed),
            format_value(r.generic),
            diff
        );
    }
    let _ = writeln!(text, "max_abs_diff = {worst:.3e}");
    let agree = worst <= FAMILY_TOL;
    let _ = writeln!(
        text,
        "status: {} (tol {FAMILY_TOL:e})",
        if agree { "agree" } else { "MISMATCH" }
    );
    Outcome {
        text,
        out: None,
        code: if agree { EXIT_OK } else { EXIT_MISMATCH },
        diagnostic: (!agree).then(|| {
            format!("error: closed form and generic pipeline differ by {worst:e}")
        }),
    }
}

fn cmd_family(family: &FamilyCommand) -> Result<Outcome, CliError> {
    match family {
        FamilyCommand::ThreeQubit { coeffs } => {
            if coeffs.len() != 16 {
                return Err(CliError::request(format!(
                    "--coeffs needs 16 reals, got {}",
                    coeffs.len()
                )));
            }
            let mut c = [C64::new(0.0, 0.0); 8];
            for (slot, pair) in c.iter_mut().zip(coeffs.chunks_exact(2)) {
                *slot = C64::new(pair[0], pair[1]);
            }
            let closed = three_qubit_closed_form(&c)?;
            let psi = build_three_qubit_state(&c)?;
            let generic = free_entanglement(&psi.into(), MeasureKind::Concurrence)?;
            let mut rows: Vec<Comparison> = closed
                .per_cut
                .iter()
                .zip(&generic.per_cut)
                .map(|(a, b)| Comparison {
                    label: format!("cut {}", a.cut),
                    closed: a.value,
                    generic: b.value,
                })
                .collect();
            rows.push(Comparison {
                label: "E_bar".into(),
                closed: closed.e_bar,
                generic: generic.e_bar,
            });
            Ok(comparison_outcome(
                "family: three-qubit\nmeasure: concurrence\n".into(),
                rows,
            ))
        }
        FamilyCommand::Isotropic { n, x } => {
            let closed = isotropic_closed_form(*n, *x)?;
            let generic =
                free_entanglement(&isotropic_state(*n, *x)?.into(), MeasureKind::Negativity)?;
            Ok(comparison_outcome(
                format!("family: isotropic\nmeasure: negativity\nn = {n}, x = {x}\n"),
                vec![Comparison {
                    label: "E_bar".into(),
                    closed,
                    generic: generic.e_bar,
                }],
            ))
        }
    }
}

fn cmd_sweep(sweep: &SweepCommand) -> Result<Outcome, CliError> {
    let SweepCommand::Isotropic {
        n,
        x_min,
        x_max,
        steps,
        out,
    } = sweep;
    let rows = sweep_isotropic(*n, *x_min, *x_max, *steps)?;
    let worst = rows
        .iter()
        .map(|r| (r.e_bar_closed - r.e_bar_generic).abs())
        .fold(0.0, f64::max);
    let agree = worst <= FAMILY_TOL;
    Ok(Outcome {
        text: render_sweep_csv(&rows),
        out: out.clone(),
        code: if agree { EXIT_OK } else { EXIT_MISMATCH },
        diagnostic: (!agree).then(|| {
            format!("error: closed form and generic pipeline differ by {worst:e}")
        }),
    })
}
