use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wflow::cli::{
    generate_example, load_spec, run_suite, save_spec, tolerance_override, ExampleParams, Suite,
    EXAMPLE_NAMES,
};
use wflow::error::Error;

#[derive(Parser)]
#[command(
    name = "wflow",
    version,
    about = "Verification suites for periodic W*-dynamical systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite on a spec file or a named example.
    Verify(VerifyArgs),
    /// Write a named example spec.
    Example(ExampleArgs),
}

#[derive(Args)]
struct ExampleOptions {
    /// Block sizes for `nest`.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 1, 1])]
    blocks: Vec<usize>,
    /// Strictly decreasing block weights for `nest`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [3i64, 2, 1])]
    weights: Vec<i64>,
    /// Largest dimension for `random`.
    #[arg(long, default_value_t = 5)]
    max_dim: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, conflicts_with = "example", required_unless_present = "example")]
    spec: Option<PathBuf>,
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(EXAMPLE_NAMES))]
    example: Option<String>,
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
    suite: String,
    /// Overrides the seed stored in the spec.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Record wall time in the report.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    options: ExampleOptions,
}

#[derive(Args)]
struct ExampleArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(EXAMPLE_NAMES))]
    name: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    options: ExampleOptions,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn params(options: &ExampleOptions, seed: u64) -> ExampleParams {
    ExampleParams {
        seed,
        blocks: options.blocks.clone(),
        weights: options.weights.clone(),
        max_dim: options.max_dim,
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify(args: &VerifyArgs) -> Result<i32, Error> {
    let start = Instant::now();
    let residual_tol = tolerance_override()?;
    let suite: Suite = args.suite.parse()?;
    let (mut input, source) = match (&args.spec, &args.example) {
        (Some(path), _) => (load_spec(path)?, path.display().to_string()),
        (None, Some(name)) => (
            generate_example(name, &params(&args.options, args.seed.unwrap_or(0)))?,
            name.clone(),
        ),
        (None, None) => {
            return Err(Error::Input(
                "either --spec or --example is required".into(),
            ))
        }
    };
    if let Some(seed) = args.seed {
        input.set_seed(seed);
    }
    let mut report = run_suite(&input, suite, &source, residual_tol)?;
    if args.timing {
        report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    let text = match args.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    emit(&text, args.out.as_ref())?;
    Ok(report.exit_code())
}

fn example(args: &ExampleArgs) -> Result<i32, Error> {
    let spec = generate_example(&args.name, &params(&args.options, args.seed))?;
    match &args.out {
        Some(p) => save_spec(&spec, p)?,
        None => print!("{}", spec.to_canonical_json()),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Example(a) => example(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("wflow: {e}");
            ExitCode::from(match e {
                Error::Internal(_) => 1,
                _ => 2,
            })
        }
    }
}
