//! `psical` - run one verification experiment from a flat key=value config.
//!
//! Exit codes: 0 pass, 2 acceptance failure, 1 operational error (bad config,
//! I/O, numerics).

use clap::{Parser, ValueEnum};
use psical::config::ExperimentConfig;
use psical::experiments;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Experiment {
    Weights,
    Orders,
    #[value(name = "quantize-check")]
    QuantizeCheck,
    Compose,
    Parametrix,
    Resolvent,
    Interp,
    Power,
    Norms,
    All,
}

impl Experiment {
    fn name(self) -> &'static str {
        match self {
            Experiment::Weights => "weights",
            Experiment::Orders => "orders",
            Experiment::QuantizeCheck => "quantize-check",
            Experiment::Compose => "compose",
            Experiment::Parametrix => "parametrix",
            Experiment::Resolvent => "resolvent",
            Experiment::Interp => "interp",
            Experiment::Power => "power",
            Experiment::Norms => "norms",
            Experiment::All => "all",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "psical", version, about = "semiclassical-classical calculus experiments")]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: Experiment,

    /// Flat key=value config file.
    #[arg(long)]
    config: PathBuf,

    /// Output directory for CSV and JSON reports.
    #[arg(long)]
    out: PathBuf,

    /// Seed for experiments that draw random vectors.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Ok(threads) = std::env::var("PSICAL_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }

    let mut cfg = match ExperimentConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("psical: config error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(seed) = cli.seed {
        cfg = match ExperimentConfig::parse(&format!(
            "{}\nrun.seed = {seed}\n",
            cfg.entries()
                .iter()
                .map(|(k, v)| format!("{k} = {v}"))
                .collect::<Vec<_>>()
                .join("\n")
        )) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("psical: config error: {e}");
                return ExitCode::from(1);
            }
        };
    }

    match experiments::run(cli.experiment.name(), &cfg, &cli.out) {
        Ok(report) => {
            let verdict = if report.passed() { "pass" } else { "fail" };
            println!("psical {}: {verdict}", report.experiment);
            for (name, ok) in &report.checks {
                println!("  [{}] {}", if *ok { "ok" } else { "FAIL" }, name);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("psical: {e}");
            ExitCode::from(1)
        }
    }
}
