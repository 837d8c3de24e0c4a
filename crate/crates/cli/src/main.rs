//! `anonaudit` command-line front-end.
//!
//! Exit codes: 0 success, 1 usage error, 2 input or parse error, 3 schema
//! error, 4 at least one `check` threshold not met.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anonaudit::{
    build_report, check, delimiter_for_path, load_delimited, render_text, split_name_list,
    write_json, AttributeSchema, Auditor, ColumnKind, Error, LoadOptions, SaMode, Thresholds,
    DEFAULT_MISSING_TOKEN,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_SCHEMA: u8 = 3;
const EXIT_CHECK_FAILED: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "anonaudit",
    version,
    about = "Audit the anonymity level of a tabular dataset"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute all nine anonymity models and print a report.
    Report(ReportArgs),
    /// Compare selected models against required thresholds.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    #[value(alias = "generalization")]
    Generalize,
    QiUpdate,
}

impl From<Mode> for SaMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Generalize => SaMode::Generalization,
            Mode::QiUpdate => SaMode::QiUpdate,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Delimited input file (.csv, .txt or .tsv).
    #[arg(long)]
    input: PathBuf,

    /// Quasi-identifier columns, comma separated or repeated.
    #[arg(long, required = true)]
    qi: Vec<String>,

    /// Multi-SA strategy.
    #[arg(long, value_enum, default_value = "generalize")]
    mode: Mode,

    /// Field delimiter; `tab` or `\t` for tabs. Defaults from the file extension.
    #[arg(long)]
    delimiter: Option<String>,

    /// Cell value treated as missing.
    #[arg(long, env = "ANONAUDIT_MISSING_TOKEN", default_value = DEFAULT_MISSING_TOKEN)]
    missing_token: String,

    /// Override the inferred kind of a column: `<col>=<numeric|categorical>`.
    #[arg(long = "kind", value_name = "COL=KIND")]
    kinds: Vec<String>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Sensitive attribute columns, comma separated or repeated.
    #[arg(long, required = true)]
    sa: Vec<String>,

    #[arg(long, value_enum, default_value = "json")]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Sensitive attribute columns, comma separated or repeated.
    #[arg(long)]
    sa: Vec<String>,

    #[arg(long)]
    check_k: Option<usize>,
    #[arg(long)]
    check_alpha: Option<f64>,
    #[arg(long)]
    check_l: Option<usize>,
    #[arg(long)]
    check_entropy_l: Option<usize>,
    #[arg(long)]
    check_beta: Option<f64>,
    #[arg(long)]
    check_enhanced_beta: Option<f64>,
    /// Must be strictly greater than the attained t.
    #[arg(long)]
    check_t: Option<f64>,
    /// Must be strictly greater than the attained delta.
    #[arg(long)]
    check_delta: Option<f64>,
}

impl CheckArgs {
    fn thresholds(&self) -> Thresholds {
        Thresholds {
            k: self.check_k,
            alpha: self.check_alpha,
            l: self.check_l,
            entropy_l: self.check_entropy_l,
            beta: self.check_beta,
            enhanced_beta: self.check_enhanced_beta,
            t: self.check_t,
            delta: self.check_delta,
        }
    }
}

/// A failure with its exit code; the message goes to standard error.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_schema_error() {
            EXIT_SCHEMA
        } else {
            EXIT_INPUT
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn parse_delimiter(raw: &str) -> Result<char, Failure> {
    match raw {
        "tab" | "\\t" | "\t" => Ok('\t'),
        "comma" => Ok(','),
        "semicolon" => Ok(';'),
        _ => {
            let mut chars = raw.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if c != '"' && c != '\n' && c != '\r' => Ok(c),
                _ => Err(Failure::usage(format!(
                    "invalid delimiter {raw:?}: expected a single character"
                ))),
            }
        }
    }
}

fn parse_names(values: &[String], flag: &str) -> Result<Vec<String>, Failure> {
    let mut names = Vec::new();
    for value in values {
        let parsed =
            split_name_list(value).map_err(|e| Failure::usage(format!("--{flag}: {e}")))?;
        names.extend(parsed.into_iter().filter(|n| !n.is_empty()));
    }
    Ok(names)
}

fn load_options(args: &InputArgs) -> Result<LoadOptions, Failure> {
    let delimiter = match &args.delimiter {
        Some(raw) => parse_delimiter(raw)?,
        None => delimiter_for_path(&args.input),
    };
    let mut options = LoadOptions::default()
        .with_delimiter(delimiter)
        .with_missing_token(args.missing_token.clone());
    for spec in &args.kinds {
        let (column, kind) = spec
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("--kind {spec:?}: expected <col>=<kind>")))?;
        let kind: ColumnKind = kind
            .parse()
            .map_err(|e: String| Failure::usage(format!("--kind {spec:?}: {e}")))?;
        options = options.with_kind(column, kind);
    }
    Ok(options)
}

fn schema(args: &InputArgs, sa: &[String]) -> Result<AttributeSchema, Failure> {
    Ok(
        AttributeSchema::new(parse_names(&args.qi, "qi")?, parse_names(sa, "sa")?)
            .with_mode(args.mode.into()),
    )
}

fn run_report(args: &ReportArgs) -> Result<u8, Failure> {
    let options = load_options(&args.input)?;
    let schema = schema(&args.input, &args.sa)?;
    if schema.sa.is_empty() {
        return Err(Error::EmptySa.into());
    }
    let data = load_delimited(&args.input.input, &options)?;
    let report = build_report(&data, &schema)?;
    let (mut sink, name): (Box<dyn Write>, String) = match &args.output {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| Failure {
                code: EXIT_INPUT,
                message: format!("{}: {e}", path.display()),
            })?;
            (Box::new(file), path.display().to_string())
        }
        None => (
            Box::new(std::io::stdout().lock()),
            "standard output".to_string(),
        ),
    };
    let mut out = std::io::BufWriter::new(&mut sink);
    match args.format {
        Format::Json => write_json(&report, &mut out),
        Format::Text => out.write_all(render_text(&report).as_bytes()),
    }
    .and_then(|_| out.flush())
    .map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{name}: {e}"),
    })?;
    Ok(0)
}

fn run_check(args: &CheckArgs) -> Result<u8, Failure> {
    let thresholds = args.thresholds();
    if thresholds.is_empty() {
        return Err(Failure::usage(
            "check needs at least one --check-* threshold",
        ));
    }
    let options = load_options(&args.input)?;
    let schema = schema(&args.input, &args.sa)?;
    let data = load_delimited(&args.input.input, &options)?;
    let mut auditor = Auditor::new(&data, &schema)?;
    let outcome = check(&mut auditor, &thresholds)?;
    print!("{outcome}");
    Ok(if outcome.passed() {
        0
    } else {
        EXIT_CHECK_FAILED
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Report(args) => run_report(args),
        Command::Check(args) => run_check(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("anonaudit: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
