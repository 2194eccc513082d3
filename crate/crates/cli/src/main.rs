use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dppq::harness::{
    aggregate, fit_rate, fit_semilog, read_records, run_experiment, run_oracles, write_aggregate, ExperimentConfig,
    OracleConfig,
};
use dppq::{Error, Result};

#[derive(Parser)]
#[command(name = "dppq", version, about = "Kernel quadrature experiments with DPP nodes")]
struct Cli {
    /// Overrides the seed in the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment sweep and write its CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the numerical oracle suites and print a JSON report.
    Oracles {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit log(mean squared error) against log N for one method.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        method: String,
        /// Fit against N instead of log N.
        #[arg(long)]
        semilog: bool,
    },
    /// Write the mean squared error over repetitions per method and N.
    Aggregate {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}


fn write_out(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => write(&mut File::create(p)?),
        None => write(&mut io::stdout().lock()),
    }
}

/// Returns whether every check passed.
fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config } => {
            let mut config = ExperimentConfig::from_json(&std::fs::read_to_string(config)?)?;
            if let Some(seed) = cli.seed {
                config.master_seed = seed;
            }
            let records = run_experiment(&config)?;
            let failed = records.iter().filter(|r| !r.is_ok()).count();
            eprintln!("{} records, {failed} failed", records.len());
            if config.output_path.is_none() {
                dppq::harness::write_records(io::stdout().lock(), &records)?;
            }
            Ok(true)
        }
        Command::Oracles { config } => {
            let mut config: OracleConfig = serde_json::from_str(&std::fs::read_to_string(config)?)?;
            if let Some(seed) = cli.seed {
                config.options.seed = seed;
            }
            let report = run_oracles(&config.spec, &config.options);
            write_out(config.output_path.as_deref(), |w| {
                serde_json::to_writer_pretty(&mut *w, &report)?;
                writeln!(w)?;
                Ok(())
            })?;
            for e in report.entries.iter().filter(|e| !e.pass) {
                eprintln!("FAIL {}: value {} bound {:?}", e.quantity, e.value, e.bound);
            }
            Ok(report.passed())
        }
        Command::Fit { input, method, semilog } => {
            let records = read_records(File::open(input)?)?;
            let fit = if semilog { fit_semilog(&records, &method)? } else { fit_rate(&records, &method)? };
            println!("{}", serde_json::to_string(&fit)?);
            Ok(true)
        }
        Command::Aggregate { input, output } => {
            let records = read_records(File::open(input)?)?;
            write_out(output.as_deref(), |w| write_aggregate(w, &aggregate(&records)))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e @ (Error::InvalidConfig(_) | Error::InvalidSpec(_) | Error::Json(_))) => {
            eprintln!("invalid config: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
