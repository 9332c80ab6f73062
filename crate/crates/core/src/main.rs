use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vissig::bench::{run_benchmark_with, BenchConfig, DEFAULT_PER_CLASS};
use vissig::pipeline::{self, FeatureKind, RunConfig};
use vissig::theorems::run_suite;
use vissig::{Error, TransformSpec};

#[derive(Parser)]
#[command(name = "vissig", version, about = "Signature features with visibility transformations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read JSONL streams and write signature features as CSV
    Extract {
        /// Input JSONL file, or - for stdin
        #[arg(long, default_value = "-")]
        input: String,
        /// Output CSV file, or - for stdout
        #[arg(long, default_value = "-")]
        output: String,
        /// Truncation level
        #[arg(long)]
        level: usize,
        /// Comma-separated transform chain, e.g. time,leadlag,vis_i
        #[arg(long, default_value = "")]
        transforms: String,
        /// sig or logsig
        #[arg(long, default_value = "sig")]
        feature: String,
        #[arg(long)]
        include_constant: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check every signature identity on random paths
    Verify {
        /// Random paths per (dimension, depth) configuration
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// One JSON object per check instead of a table
        #[arg(long)]
        json: bool,
    },
    /// Run the synthetic position-sensitivity benchmark
    Bench {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PER_CLASS)]
        per_class: usize,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include wall time in the report
        #[arg(long)]
        timing: bool,
    },
}

enum Failure {
    Check(String),
    Usage(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.into())
    }
}

fn open_input(path: &str) -> io::Result<Box<dyn io::BufRead>> {
    Ok(match path {
        "-" => Box::new(BufReader::new(io::stdin())),
        p => Box::new(BufReader::new(File::open(p)?)),
    })
}

fn open_output(path: &str) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        "-" => Box::new(BufWriter::new(io::stdout())),
        p => Box::new(BufWriter::new(File::create(p)?)),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Extract { input, output, level, transforms, feature, include_constant, seed } => {
            let chain = TransformSpec::parse_chain(&transforms)?;
            let kind: FeatureKind = feature.parse()?;
            let config = RunConfig { depth: level, chain, kind, include_constant, seed };
            config.validate()?;
            let mut sink = open_output(&output)?;
            pipeline::run(open_input(&input)?, &mut sink, &config)?;
            sink.flush()?;
        }
        Command::Verify { trials, seed, json } => {
            let reports = run_suite(trials, seed);
            let mut out = io::stdout().lock();
            for r in &reports {
                if json {
                    writeln!(out, "{}", serde_json::to_string(r).expect("report serialises"))?;
                } else {
                    let status = if r.passed { "PASS" } else { "FAIL" };
                    writeln!(
                        out,
                        "{status}  {:<22} max_abs_error={:.3e}  tolerance={:.0e}  coefficients={}",
                        r.name, r.max_abs_error, r.tolerance, r.num_coefficients
                    )?;
                }
            }
            let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
            if !failed.is_empty() {
                return Err(Failure::Check(format!("failed checks: {}", failed.join(", "))));
            }
        }
        Command::Bench { seed, per_class, out, timing } => {
            let config = BenchConfig { per_class, ..BenchConfig::new(seed) };
            let report = run_benchmark_with(&config)?;
            let json = report.to_json(timing);
            match out {
                Some(path) => std::fs::write(path, format!("{json}\n"))?,
                None => println!("{json}"),
            }
            if !report.passed {
                return Err(Failure::Check(format!(
                    "benchmark thresholds not met (plain {:.3}, visibility {:.3})",
                    report.accuracy_plain, report.accuracy_vis
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("vissig: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("vissig: {e}");
            ExitCode::from(2)
        }
    }
}
