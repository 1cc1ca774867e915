use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twistor_cli::commands::{self, MetricArgs, Outcome, RationalSource, Timer, EXIT_FAIL};
use twistor_cli::document::{parse_literal, CurveDocument, DocumentError, RationalMapDocument};
use twistor_core::exact_algebra::GaussianRational;
use twistor_core::twistor_metric::default_sample_fibers;

/// Determinantal space curves, matrix pencils and twistor metrics.
///
/// Exit codes: 0 PASS, 1 verification FAIL, 2 parse error, 3 invalid input
/// object, 4 numeric extraction failure.
#[derive(Parser)]
#[command(name = "twistor", version)]
struct Cli {
    /// Include wall-clock timings in the report (makes it non-reproducible).
    #[arg(long, global = true)]
    timings: bool,
    /// Directory for generated files (curve documents, Gram CSVs).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce the pencil (A1, A2) of a curve or pencil document to (S, T).
    Kronecker { input: PathBuf },
    /// Determinantal curves.
    Acm {
        #[command(subcommand)]
        command: AcmCommand,
    },
    /// Normal-bundle splitting types of rational curves.
    Rational {
        /// Degree of the random curves.
        #[arg(long, required_unless_present = "input")]
        d: Option<u32>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// An explicit map document instead of random curves.
        #[arg(long, conflicts_with_all = ["d"])]
        input: Option<PathBuf>,
    },
    /// Extract the metric on random flat charts and test flatness.
    Metric {
        #[arg(long)]
        r: usize,
        /// Number of random charts.
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated sample fibers t as exact literals.
        #[arg(long, value_delimiter = ',')]
        fibers: Option<Vec<String>>,
        /// Negative control: use the scrambled gauge as if it were flat.
        #[arg(long)]
        skip_sigma_gauge: bool,
    },
    /// Sheaf cohomology.
    Cohomology {
        #[command(subcommand)]
        command: CohomologyCommand,
    },
}

#[derive(Subcommand)]
enum AcmCommand {
    /// Certify a curve document and run the full verification.
    Verify {
        input: PathBuf,
        /// Seed for the sample fibers.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate random certified σ-invariant curves.
    Random {
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CohomologyCommand {
    /// h^i(I_C(k)) and h^0(O_C(k)) over a range of twists.
    Table {
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        from: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        to: Option<i64>,
    },
}

fn read(command: &'static str, path: &Path) -> Result<String, Outcome> {
    fs::read_to_string(path).map_err(|e| {
        commands::document_failure(command, &DocumentError::Parse(format!("cannot read {}: {e}", path.display())))
    })
}

fn curve(command: &'static str, path: &Path) -> Result<CurveDocument, Outcome> {
    let text = read(command, path)?;
    CurveDocument::from_json(&text).map_err(|e| commands::document_failure(command, &e))
}

fn parse_fibers(list: Option<Vec<String>>) -> Result<Vec<GaussianRational>, Outcome> {
    match list {
        None => Ok(default_sample_fibers()),
        Some(items) => items
            .iter()
            .map(|s| parse_literal(s))
            .collect::<Result<_, _>>()
            .map_err(|e| commands::document_failure("metric", &e)),
    }
}

fn run(cli: Cli) -> Result<Outcome, Outcome> {
    let timer = Timer::new(cli.timings);
    Ok(match cli.command {
        Command::Kronecker { input } => commands::kronecker(&curve("kronecker", &input)?, timer),
        Command::Acm { command } => match command {
            AcmCommand::Verify { input, seed } => commands::acm_verify(&curve("acm verify", &input)?, seed, timer),
            AcmCommand::Random { r, count, seed } => commands::acm_random(r, count, seed, timer),
        },
        Command::Rational { d, count, seed, input } => {
            let source = match input {
                Some(path) => {
                    let text = read("rational", &path)?;
                    RationalSource::Explicit(
                        RationalMapDocument::from_json(&text).map_err(|e| commands::document_failure("rational", &e))?,
                    )
                }
                None => RationalSource::Random {
                    d: d.expect("required without --input"),
                    count,
                    seed,
                },
            };
            commands::rational(source, timer)
        }
        Command::Metric {
            r,
            count,
            seed,
            fibers,
            skip_sigma_gauge,
        } => commands::metric(
            MetricArgs {
                r,
                count,
                seed,
                fibers: parse_fibers(fibers)?,
                skip_sigma_gauge,
            },
            timer,
        ),
        Command::Cohomology {
            command: CohomologyCommand::Table { input, from, to },
        } => commands::cohomology_table(&curve("cohomology table", &input)?, from, to, timer),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let outcome = run(cli).unwrap_or_else(|o| o);
    if let Some(dir) = out {
        let written = fs::create_dir_all(&dir)
            .and_then(|_| outcome.files.iter().try_for_each(|(name, content)| fs::write(dir.join(name), content)));
        if let Err(e) = written {
            eprintln!("cannot write to {}: {e}", dir.display());
            return ExitCode::from(EXIT_FAIL);
        }
    }
    print!("{}", outcome.report);
    if outcome.exit != 0 {
        eprintln!("twistor: exit {}", outcome.exit);
    }
    ExitCode::from(outcome.exit)
}
