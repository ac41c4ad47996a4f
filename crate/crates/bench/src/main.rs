use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use orderopt_bench::{
    deviation_probability, read_trace_dir, run_experiment, run_experiment_with_jobs, summarize_oracle_complexity,
    ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "orderopt-bench", version, about = "Run order-oracle experiments and summarize their traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (solver, seed, noise level) cell of a JSON experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: one per core).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Median oracle calls to reach each target gap.
    Summarize {
        #[arg(long)]
        traces: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-4, 1e-6])]
        eps: Vec<f64>,
    },
    /// Fraction of runs whose terminal gap is at least `eps`.
    Deviation {
        #[arg(long)]
        traces: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        sigma: f64,
        /// Only use rows of this solver.
        #[arg(long)]
        solver: Option<String>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run { config, out, jobs } => {
            let cfg = ExperimentConfig::from_path(&config).with_context(|| format!("loading {}", config.display()))?;
            let dir = out
                .or_else(|| cfg.output_dir.clone())
                .context("no output directory: pass --out or set output_dir")?;
            let outcome = match jobs {
                Some(n) => run_experiment_with_jobs(&cfg, n)?,
                None => run_experiment(&cfg)?,
            };
            outcome.write(&dir)?;
            for f in &outcome.failures {
                eprintln!("cell failed: solver={} seed={} delta={}: {}", f.solver, f.seed, f.delta, f.reason);
            }
            println!(
                "wrote {} trace files to {} ({} failed cells)",
                outcome.files.len(),
                dir.display(),
                outcome.failures.len()
            );
            Ok(if outcome.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Summarize { traces, eps } => {
            let rows = read_trace_dir(&traces)?;
            print!("{}", summarize_oracle_complexity(&rows, &eps));
            Ok(ExitCode::SUCCESS)
        }
        Command::Deviation {
            traces,
            eps,
            sigma,
            solver,
        } => {
            let mut rows = read_trace_dir(&traces)?;
            if let Some(s) = &solver {
                rows.retain(|r| &r.solver == s);
            }
            let d = deviation_probability(&rows, eps, sigma)?;
            println!(
                "runs={} budget={} exceeding={} fraction={} sigma={} band={:.4}{}",
                d.runs,
                d.budget,
                d.exceeding,
                d.fraction,
                d.sigma,
                d.binomial_band(),
                if d.uninformative { " (uninformative: every run is above eps)" } else { "" }
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
