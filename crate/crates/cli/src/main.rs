//! `survest` — survey-sampling estimator toolkit.
//!
//! Subcommands: `summarize` (population parameters from CSV), `theory`
//! (first-order bias/MSE/PRE tables, including the built-in registry of
//! published tables), `simulate` (seeded Monte Carlo with theory
//! comparison) and `oracle` (exact moments by full enumeration).
//!
//! Exit codes: 0 success, 2 configuration/usage error, 3 runtime failure.

mod config;
mod render;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{CliError, FileConfig};

#[derive(Parser)]
#[command(
    name = "survest",
    version,
    about = "Finite-population survey-sampling estimators: evaluation, theory and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonOpts {
    /// TOML config file; command-line flags override its keys
    #[arg(long, global = true)]
    config: Option<String>,
    /// Output format
    #[arg(long, global = true, value_parser = ["table", "csv", "json"])]
    format: Option<String>,
    /// Write output to a file instead of stdout
    #[arg(long, global = true)]
    output: Option<String>,
}

#[derive(Args, Clone, Default)]
struct PopulationOpts {
    /// Population CSV path
    #[arg(long)]
    input: Option<String>,
    /// Synthesis targets, e.g. "n=5000,ybar=10,cy=0.6,cx=1.0,rho=0.9"
    #[arg(long)]
    synthesize: Option<String>,
    /// Column name of the study variable
    #[arg(long)]
    y_col: Option<String>,
    /// Column name of the auxiliary variable
    #[arg(long)]
    x_col: Option<String>,
    /// Column name of the 0/1 attribute
    #[arg(long)]
    phi_col: Option<String>,
    /// Seed for synthesis and simulation
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute every population parameter of a CSV or synthesized population
    Summarize {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        population: PopulationOpts,
    },
    /// First-order theory: registry tables, or ad-hoc estimator lists on
    /// published scalars or on a population's computed summary
    Theory {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        population: PopulationOpts,
        /// Registry table id (see --list)
        #[arg(long)]
        table: Option<String>,
        /// List registry table ids and exit
        #[arg(long)]
        list: bool,
        /// Summary scalars, e.g. "n=89,ybar=3.36,p=0.1236,rho-pb=0.766,cy=0.604,cp=2.19"
        #[arg(long)]
        scalars: Option<String>,
        /// Estimator list, comma separated
        #[arg(long)]
        estimators: Option<String>,
        /// Sample size n
        #[arg(long)]
        n: Option<usize>,
        /// First-phase size n' for two-phase designs
        #[arg(long)]
        n_prime: Option<usize>,
    },
    /// Replicated sampling with empirical-vs-theory verdicts
    Simulate {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        population: PopulationOpts,
        /// Sample size n
        #[arg(long)]
        n: Option<usize>,
        /// First-phase size n' for two-phase designs
        #[arg(long)]
        n_prime: Option<usize>,
        #[arg(long)]
        replications: Option<usize>,
        /// Estimator list, comma separated
        #[arg(long)]
        estimators: Option<String>,
        /// Undefined-draw policy
        #[arg(long, value_parser = ["skip-and-count", "abort"])]
        policy: Option<String>,
        /// Worker threads (reports do not depend on this)
        #[arg(long)]
        threads: Option<usize>,
        /// Relative MSE tolerance for the pass/fail column
        #[arg(long)]
        tolerance_rel: Option<f64>,
    },
    /// Exact bias/MSE over all C(N, n) samples
    Oracle {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        population: PopulationOpts,
        /// Sample size n
        #[arg(long)]
        n: Option<usize>,
        /// Estimator list, comma separated
        #[arg(long)]
        estimators: Option<String>,
        /// Enumeration cap on C(N, n)
        #[arg(long)]
        max_subsets: Option<u128>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Summarize { common, population } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let pop = config::build_population(&population, &file)?;
            let summary = survest::population::summarize(&pop)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            let text = render::render_summary(&summary, config::format_of(&common, &file)?)?;
            config::emit(&common, &file, &text)
        }
        Command::Theory {
            common,
            population,
            table,
            list,
            scalars,
            estimators,
            n,
            n_prime,
        } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let format = config::format_of(&common, &file)?;
            if list {
                let text = survest::tables::table_ids().join("\n") + "\n";
                return config::emit(&common, &file, &text);
            }
            if let Some(id) = table {
                let table = survest::tables::build_table(&id)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                let text = render::render_paper_table(&table, format)?;
                return config::emit(&common, &file, &text);
            }
            let summary = match scalars {
                Some(scalars) => config::parse_scalars(&scalars)?,
                None => {
                    let pop = config::build_population(&population, &file).map_err(|e| {
                        CliError::Config(format!(
                            "theory needs --table, --list, --scalars or a population source ({e})"
                        ))
                    })?;
                    survest::population::summarize(&pop)
                        .map_err(|e| CliError::Runtime(e.to_string()))?
                }
            };
            let design = config::design_from(&file, summary.n_units, n, n_prime)?;
            let specs = config::parse_estimator_list(
                estimators.as_deref(),
                &file,
            )?;
            let text = render::render_theory_rows(&summary, &design, &specs, format)?;
            config::emit(&common, &file, &text)
        }
        Command::Simulate {
            common,
            population,
            n,
            n_prime,
            replications,
            estimators,
            policy,
            threads,
            tolerance_rel,
        } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let pop = config::build_population(&population, &file)?;
            let design = config::design_from(&file, pop.len(), n, n_prime)?;
            let specs = config::parse_estimator_list(estimators.as_deref(), &file)?;
            let run_cfg = survest::montecarlo::SimulationConfig {
                replications: replications
                    .or(file.run.replications)
                    .ok_or_else(|| CliError::Config("missing --replications".into()))?,
                master_seed: population.seed.or(file.run.seed).unwrap_or(0),
                design,
                estimators: specs,
                policy: config::parse_policy(policy.as_deref(), &file)?,
                threads: threads.or(file.run.threads),
            };
            let report = survest::montecarlo::run_simulation(&pop, &run_cfg)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            let tolerance = tolerance_rel
                .or(file.run.tolerance_rel)
                .unwrap_or(0.10);
            let text =
                render::render_simulation(&report, tolerance, config::format_of(&common, &file)?)?;
            config::emit(&common, &file, &text)
        }
        Command::Oracle {
            common,
            population,
            n,
            estimators,
            max_subsets,
        } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let pop = config::build_population(&population, &file)?;
            let n = n
                .or(file.design.n)
                .ok_or_else(|| CliError::Config("missing --n".into()))?;
            let specs = config::parse_estimator_list(estimators.as_deref(), &file)?;
            let report = survest::montecarlo::exact_moments_enumeration(
                &pop,
                n,
                &specs,
                max_subsets.or(file.run.max_subsets),
            )
            .map_err(|e| CliError::Runtime(e.to_string()))?;
            let text = render::render_oracle(&report, config::format_of(&common, &file)?)?;
            config::emit(&common, &file, &text)
        }
    }
}
