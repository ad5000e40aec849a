use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use noma_power::scenario::{
    fixtures::run_fixtures, run_scenario, summary_csv, summary_json, write_artifacts, Algorithm,
    OutputFormat, ScenarioConfig,
};
use noma_power::Error;

/// Downlink multi-cell NOMA power control.
#[derive(Parser)]
#[command(version, args_conflicts_with_subcommands = true)]
struct Cli {
    /// Run the built-in analytic fixtures and print PASS/FAIL per fixture.
    #[arg(long)]
    fixtures: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a TOML config.
    Run {
        config: PathBuf,
        /// First seed, replacing the config's.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; the summary goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = ["power-min", "rate-max"])]
        algo: Option<String>,
        #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
        format: String,
    },
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) => ExitCode::from(EXIT_CONFIG),
        _ => ExitCode::from(EXIT_VALIDATION),
    }
}

fn fixtures() -> ExitCode {
    match run_fixtures() {
        Ok(outcomes) => {
            let mut ok = true;
            for f in &outcomes {
                println!(
                    "{} {}: {}",
                    if f.passed { "PASS" } else { "FAIL" },
                    f.name,
                    f.detail
                );
                ok &= f.passed;
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VALIDATION)
            }
        }
        Err(e) => fail(&e),
    }
}

fn run(
    config: PathBuf,
    seed: Option<u64>,
    out: Option<PathBuf>,
    algo: Option<String>,
    format: &str,
) -> Result<bool, Error> {
    let mut cfg = ScenarioConfig::load(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(a) = algo {
        cfg.algorithm = a.parse::<Algorithm>()?;
    }
    let format: OutputFormat = format.parse()?;
    let artifacts = run_scenario(&cfg)?;
    match out {
        Some(dir) => write_artifacts(&artifacts, &dir, format)?,
        None => {
            let text = match format {
                OutputFormat::Json => summary_json(&artifacts)? + "\n",
                OutputFormat::Csv => summary_csv(&artifacts, format)?,
            };
            // a closed pipe (`| head`) is not an error
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
        }
    }
    for why in &artifacts.validation_failures {
        eprintln!("validation failed: {why}");
    }
    Ok(artifacts.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if cli.fixtures {
        return fixtures();
    }
    let Some(Command::Run {
        config,
        seed,
        out,
        algo,
        format,
    }) = cli.command
    else {
        eprintln!("nothing to do: pass `run <config>` or `--fixtures`");
        return ExitCode::from(EXIT_CONFIG);
    };
    match run(config, seed, out, algo, &format) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VALIDATION),
        Err(e) => fail(&e),
    }
}
