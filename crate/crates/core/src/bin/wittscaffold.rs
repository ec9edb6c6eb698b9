use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use wittscaffold::config::JobConfig;
use wittscaffold::galois::Fault;
use wittscaffold::pipeline::{self, RunOptions};
use wittscaffold::Error;

#[derive(Parser, Debug)]
#[command(
    name = "wittscaffold",
    version,
    about = "Galois scaffolds and module structure of degree-p² Witt extensions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// key = value parameter file (p, e0, a1, mu, unit, precision, sample, seed)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// target v2-precision, overriding the config file
    #[arg(long, global = true, value_name = "N")]
    precision: Option<i64>,

    /// number of random samples for the audit
    #[arg(long, global = true, value_name = "N")]
    sample: Option<usize>,

    /// seed for the audit sampler
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,

    /// deliberately corrupt a computed quantity (sigma1-x2, sigma1-truncate)
    #[arg(long = "fault-inject", global = true, value_name = "NAME")]
    fault_inject: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Check the parameter choices and the freeness bound
    Validate,
    /// Ramification data, scaffold tables, associated order and freeness
    Analyze,
    /// Run the invariant suites on seeded random samples
    Audit,
    /// Recompute the worked example and compare with the embedded tables
    ReproduceExample,
}

fn emit<T: Serialize>(json: bool, report: &T, text: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(report).expect("reports serialize"));
    } else {
        print!("{}", text());
    }
}

fn load(cli: &Cli) -> Result<JobConfig, Error> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config PATH is required for this command".into()))?;
    let mut cfg = JobConfig::load(path)?;
    if cli.precision.is_some() {
        cfg.precision = cli.precision;
    }
    if cli.sample.is_some() {
        cfg.sample = cli.sample;
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let fault = cli.fault_inject.as_deref().map(str::parse::<Fault>).transpose()?;
    match cli.command {
        Command::Validate => {
            let cfg = load(cli)?;
            let report = pipeline::validate(&cfg)?;
            emit(cli.json, &report, || report.render_text());
            Ok(if report.passed { 0 } else { 2 })
        }
        Command::Analyze => {
            let cfg = load(cli)?;
            let opts = RunOptions {
                sample: cfg.sample,
                seed: cfg.seed,
                fault,
            };
            let report = pipeline::analyze(&cfg, &opts)?;
            emit(cli.json, &report, || report.render_text());
            Ok(0)
        }
        Command::Audit => {
            let cfg = load(cli)?;
            let opts = RunOptions {
                sample: cfg.sample,
                seed: cfg.seed,
                fault,
            };
            let report = pipeline::audit(&cfg, &opts)?;
            emit(cli.json, &report, || report.render_text());
            let s = &report.summary;
            Ok(match (s.all_pass, s.failed == s.indeterminate) {
                (true, _) => 0,
                (false, true) => 4,
                (false, false) => 3,
            })
        }
        Command::ReproduceExample => {
            if cli.config.is_some() {
                return Err(Error::Config(
                    "reproduce-example uses fixed parameters; drop --config".into(),
                ));
            }
            let opts = RunOptions {
                sample: cli.sample,
                seed: cli.seed,
                fault,
            };
            let report = pipeline::reproduce_example(cli.precision, &opts)?;
            emit(cli.json, &report, || report.render_text());
            Ok(if report.all_match { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = e.exit_code();
            if cli.json {
                let details = match &e {
                    Error::Validation(v) => v.clone(),
                    _ => Vec::new(),
                };
                let body = json!({ "error": { "message": e.to_string(), "violations": details, "exit_code": code } });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&body).expect("json value serializes")
                );
            }
            eprintln!("error: {e}");
            ExitCode::from(code as u8)
        }
    }
}
