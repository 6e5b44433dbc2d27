use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chaos_extremes::extremes::{Rect, RegionSet};
use chaos_extremes::harness::{self, io, ExperimentConfig, Verdict};
use chaos_extremes::limits::{gev_cdf, lambda_weights, poisson_intensity, topk_joint_prob, TailParams};
use chaos_extremes::Result;

#[derive(Parser)]
#[command(version, about = "Extremes of interacting particle systems versus their i.i.d. limit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate both systems and write endpoint, pattern and weight CSVs.
    Simulate(RunArgs),
    /// Run the tests on data written by `simulate`.
    Analyze {
        #[command(flatten)]
        run: RunArgs,
        /// Directory holding the simulated data (defaults to the output directory).
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Print limit quantities for a given extreme value index and thresholds.
    Limits {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        gamma: f64,
        /// Decreasing thresholds, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,0.5,0")]
        thresholds: Vec<f64>,
        #[arg(long, default_value_t = chaos_extremes::limits::DEFAULT_TRUNCATION)]
        truncation: usize,
    },
    /// Simulate, persist, analyze and write the report.
    Run(RunArgs),
    /// Render a JSON report as a text table.
    Report {
        /// Path to report.json.
        input: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file; built-in Gaussian defaults when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Start from the built-in rank-based configuration instead.
    #[arg(long, conflicts_with = "config")]
    rank_based: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<u64>,
    #[arg(long)]
    particles: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    /// Worker threads (overrides the environment default).
    #[arg(long, env = harness::config::WORKERS_ENV)]
    workers: Option<usize>,
}

impl RunArgs {
    /// `saved` is a config file to fall back on when none is given.
    fn resolve_with(&self, saved: Option<PathBuf>) -> Result<ExperimentConfig> {
        let mut config = match (&self.config, self.rank_based) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, false) if saved.as_ref().is_some_and(|p| p.exists()) => {
                ExperimentConfig::load(&saved.expect("checked above"))?
            }
            (None, true) => ExperimentConfig::rank_based_default(),
            (None, false) => ExperimentConfig::default(),
        };
        if let Some(out) = &self.out {
            config.output.directory = out.clone();
        }
        if let Some(seed) = self.seed {
            config.simulation.seed = seed;
        }
        if let Some(r) = self.replications {
            config.simulation.replications = r;
        }
        if let Some(n) = self.particles {
            config.simulation.particles = n;
        }
        if let Some(steps) = self.steps {
            config.simulation.steps = steps;
        }
        if self.workers.is_some() {
            config.workers = self.workers;
        }
        config.validate()?;
        Ok(config)
    }

    fn resolve(&self) -> Result<ExperimentConfig> {
        self.resolve_with(None)
    }
}

fn print_limits(gamma: f64, thresholds: &[f64], truncation: usize) -> Result<()> {
    let tail = TailParams::new(gamma)?;
    println!("gamma {gamma}  support ({}, {})", tail.lower(), tail.upper());
    let lambdas = lambda_weights(thresholds, &tail)?;
    println!("{:>12}  {:>14}  {:>14}  {:>14}", "x", "Gamma(x)", "nu((0,1]x(x,inf))", "lambda");
    for (x, lambda) in thresholds.iter().zip(&lambdas) {
        let region = RegionSet::single(Rect::full_index(*x, f64::INFINITY)?);
        println!(
            "{:>12.6}  {:>14.10}  {:>14.10}  {:>14.10}",
            x,
            gev_cdf(*x, &tail),
            poisson_intensity(&region, &tail),
            lambda
        );
    }
    let top = topk_joint_prob(thresholds, &tail, truncation)?;
    println!(
        "top-{} joint exceedance limit {:.12}  (truncation {}, error bound {:.3e})",
        thresholds.len(),
        top.value,
        top.truncation,
        top.error_bound
    );
    Ok(())
}

fn finish(report: &harness::Report) -> ExitCode {
    print!("{}", report.render_table());
    match report.verdict {
        Verdict::Pass => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(2),
    }
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate(args) => {
            let config = args.resolve()?;
            let output = harness::simulate(&config)?;
            io::save_simulation(&config, &output)?;
            println!(
                "wrote {} replications to {}",
                output.data.interacting.len(),
                config.output.directory.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze { run, data } => {
            let dir = data
                .or_else(|| run.out.clone())
                .unwrap_or_else(|| ExperimentConfig::default().output.directory);
            let mut config = run.resolve_with(Some(dir.join(io::CONFIG)))?;
            config.output.directory = dir.clone();
            let loaded = io::load_experiment_data(&dir)?;
            let report = harness::analyze(&config, &loaded)?;
            io::write_report(&dir.join(io::REPORT), &report)?;
            Ok(finish(&report))
        }
        Command::Limits {
            gamma,
            thresholds,
            truncation,
        } => {
            print_limits(gamma, &thresholds, truncation)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(args) => {
            let config = args.resolve()?;
            let report = harness::run_experiment(&config)?;
            Ok(finish(&report))
        }
        Command::Report { input } => {
            let report = io::read_report(&input)?;
            print!("{}", report.render_table());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
