use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cellfree::harness::{emit_outputs, run_monte_carlo, run_trial_with_snapshots, summarize, ExperimentConfig};
use cellfree::oracle::{certify, CertificationParams};
use cellfree::rng::trial_seed;
use cellfree::{Error, Result};

#[derive(Parser)]
#[command(name = "cellfree", version, about = "Temporal-smoothed clustered cell-free networking simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Flat `key = value` configuration file; defaults apply when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set realizations=50`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (overrides `outputs`).
    #[arg(short, long)]
    outputs: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        for o in &self.overrides {
            cfg.apply_override(o)?;
        }
        if let Some(dir) = &self.outputs {
            cfg.outputs = dir.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full Monte Carlo run.
    Run(ConfigArgs),
    /// One seeded trial with per-instant snapshot dumps.
    Trial {
        #[command(flatten)]
        config: ConfigArgs,
        /// Trial index under `master_seed`.
        #[arg(long, default_value_t = 0)]
        index: u64,
    },
    /// Monte Carlo run over an evenly spaced alpha grid.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 0.0)]
        alpha_start: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha_stop: f64,
        #[arg(long, default_value_t = 5)]
        alpha_points: usize,
    },
    /// Small-instance certification against exhaustive enumeration.
    OracleCheck {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn print_summary(cfg: &ExperimentConfig, summary: &[cellfree::harness::AlphaSummary]) {
    println!("{}", cellfree::harness::summary_csv(summary).trim_end());
    eprintln!("wrote outputs to {}", cfg.outputs.display());
}

fn monte_carlo(cfg: &ExperimentConfig) -> Result<()> {
    let mc = run_monte_carlo(cfg)?;
    emit_outputs(&cfg.outputs, cfg, &mc.trials, &mc.summary)?;
    print_summary(cfg, &mc.summary);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => monte_carlo(&args.load()?),
        Command::Trial { config, index } => {
            let cfg = config.load()?;
            let trial = run_trial_with_snapshots(&cfg, trial_seed(cfg.master_seed, index))?;
            let summary = summarize(&cfg.alpha_grid, std::slice::from_ref(&trial));
            emit_outputs(&cfg.outputs, &cfg, std::slice::from_ref(&trial), &summary)?;
            print_summary(&cfg, &summary);
            Ok(())
        }
        Command::Sweep {
            config,
            alpha_start,
            alpha_stop,
            alpha_points,
        } => {
            let mut cfg = config.load()?;
            if alpha_points == 0 {
                return Err(Error::Config("alpha_points must be at least 1".into()));
            }
            cfg.alpha_grid = (0..alpha_points)
                .map(|i| {
                    if alpha_points == 1 {
                        alpha_start
                    } else {
                        alpha_start + (alpha_stop - alpha_start) * i as f64 / (alpha_points - 1) as f64
                    }
                })
                .collect();
            cfg.validate()?;
            monte_carlo(&cfg)
        }
        Command::OracleCheck { instances, seed } => {
            let report = certify(&CertificationParams {
                instances,
                seed,
                ..Default::default()
            })?;
            println!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err(Error::Numerical("oracle certification failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
