//! Command-line front end: single runs, experiment plans, statistical
//! comparison, and the problem registry listing.
//!
//! Exit codes: 0 success, 1 usage error (bad flags, unknown names,
//! malformed plans), 2 runtime error (missing cells, unreadable files).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::engine::{self, RunConfig};
use crate::error::{Error, Result};
use crate::experiments::{self, ExperimentPlan, TrialResult};
use crate::problems;
use crate::stats::{self, ProblemSamples, SampleSet};

#[derive(Parser)]
#[command(
    name = "cde",
    version,
    about = "Differential evolution runs, experiments, and statistical comparison"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run one algorithm once on one problem and print the best point found
    Run {
        /// Problem name (see list-problems), e.g. cbd or sphere:30
        #[arg(long)]
        problem: String,
        /// Algorithm name: cde, de, de/best/1, de/cur/1
        #[arg(long)]
        algo: String,
        /// Seed for the run; reproducibility is mandatory, so this is required
        #[arg(long)]
        seed: u64,
        /// Fitness-evaluation budget
        #[arg(long)]
        budget: u64,
        /// Write the convergence trace (fe,best_objective) to this file
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Print a single machine-readable line instead of the block summary
        #[arg(long)]
        oneline: bool,
    },
    /// Execute every (problem, algorithm, trial) cell of a plan file
    Experiment {
        /// Plan file (TOML key/value tree)
        plan: PathBuf,
        /// Directory for results.csv, traces/, summary.csv
        #[arg(long)]
        out: PathBuf,
        /// Parallel workers for cells (0 = one per core)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Override the plan's base_seed
        #[arg(long)]
        seed: Option<u64>,
        /// Omit the timestamp header from derived files
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Build the comparison report (verdicts, ranks) from experiment results
    Compare {
        /// Directory holding results.csv from `experiment`
        results: PathBuf,
        /// Reference algorithm the verdicts are computed for
        #[arg(long)]
        reference: String,
        /// Significance level for the Holm-corrected rank-sum tests
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Directory for comparison.csv/.txt (default: the results directory)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Omit the timestamp header from report files
        #[arg(long)]
        no_timestamp: bool,
    },
    /// List the problem registry
    ListProblems,
}

/// Parse arguments and dispatch; returns the process exit code.
pub fn run_cli() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::UnknownProblem { .. }
        | Error::UnknownAlgorithm { .. }
        | Error::Plan(_)
        | Error::InvalidConfig(_)
        | Error::InvalidBounds(_)
        | Error::DimensionMismatch { .. }
        | Error::BudgetExhausted => 1,
        Error::MissingData(_) | Error::MalformedResults(_) | Error::Io(_) => 2,
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run {
            problem,
            algo,
            seed,
            budget,
            trace,
            oneline,
        } => cmd_run(&problem, &algo, seed, budget, trace.as_deref(), oneline),
        Command::Experiment {
            plan,
            out,
            jobs,
            seed,
            no_timestamp,
        } => cmd_experiment(&plan, &out, jobs, seed, no_timestamp),
        Command::Compare {
            results,
            reference,
            alpha,
            out,
            no_timestamp,
        } => cmd_compare(&results, &reference, alpha, out.as_deref(), no_timestamp),
        Command::ListProblems => {
            cmd_list_problems();
            Ok(())
        }
    }
}

fn timestamp(disabled: bool) -> Option<String> {
    if disabled {
        None
    } else {
        Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
    }
}

fn cmd_run(
    problem_name: &str,
    algo_name: &str,
    seed: u64,
    budget: u64,
    trace: Option<&Path>,
    oneline: bool,
) -> Result<()> {
    let problem = problems::lookup(problem_name)?;
    let algorithm = experiments::resolve_algorithm(algo_name)?;
    let cfg = RunConfig::new(algorithm.strategy, algorithm.params, seed, budget);
    let outcome = engine::run(&problem, &cfg)?;
    if let Some(path) = trace {
        experiments::write_trace(path, &outcome.trace)?;
    }
    let vector_joined = outcome
        .best
        .vector
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>();
    if oneline {
        println!(
            "{},{},{},{},{},{},{}",
            problem_name,
            algo_name,
            seed,
            outcome.fe_used,
            outcome.best.eval.objective,
            outcome.best.eval.violation,
            vector_joined.join(";")
        );
    } else {
        println!("problem: {problem_name}");
        println!("algorithm: {algo_name}");
        println!("seed: {seed}");
        println!("fe_used: {}", outcome.fe_used);
        println!("best_objective: {}", outcome.best.eval.objective);
        println!("best_violation: {}", outcome.best.eval.violation);
        println!("feasible: {}", outcome.best.eval.is_feasible());
        println!("best_vector: {}", vector_joined.join(" "));
    }
    Ok(())
}

fn cmd_experiment(
    plan_path: &Path,
    out_dir: &Path,
    jobs: usize,
    seed: Option<u64>,
    no_timestamp: bool,
) -> Result<()> {
    let plan = ExperimentPlan::load(plan_path, seed)?;
    let results = experiments::execute(&plan, out_dir, jobs)?;

    let mut summary = String::new();
    if let Some(ts) = timestamp(no_timestamp) {
        summary.push_str(&format!("# generated {ts}\n"));
    }
    summary.push_str("problem,algorithm,trials,mean,std,feasible_trials\n");
    for problem in &plan.problems {
        for s in experiments::summarize(&results, problem)? {
            summary.push_str(&format!(
                "{},{},{},{:.6e},{:.6e},{}\n",
                problem, s.algorithm, s.trials, s.mean, s.std_dev, s.feasible_trials
            ));
        }
    }
    fs::write(out_dir.join("summary.csv"), summary)?;

    println!(
        "{} cells in {}",
        results.len(),
        out_dir.display()
    );
    println!("results: {}", out_dir.join("results.csv").display());
    println!("summary: {}", out_dir.join("summary.csv").display());
    Ok(())
}

/// Group rows into per-problem sample sets, checking the grid is complete:
/// every (problem, algorithm) pair carries trials 0..T-1 where T is the
/// largest trial index seen plus one.
fn collect_samples(results: &[TrialResult]) -> Result<Vec<ProblemSamples>> {
    if results.is_empty() {
        return Err(Error::MissingData("results file has no rows".into()));
    }
    let trials = results.iter().map(|r| r.trial_index + 1).max().unwrap_or(0);
    let mut problem_order: Vec<&str> = Vec::new();
    let mut algorithm_order: Vec<&str> = Vec::new();
    let mut cells: BTreeMap<(&str, &str), Vec<&TrialResult>> = BTreeMap::new();
    for r in results {
        if !problem_order.contains(&r.problem.as_str()) {
            problem_order.push(&r.problem);
        }
        if !algorithm_order.contains(&r.algorithm.as_str()) {
            algorithm_order.push(&r.algorithm);
        }
        cells.entry((&r.problem, &r.algorithm)).or_default().push(r);
    }
    let mut missing = Vec::new();
    for problem in &problem_order {
        for algorithm in &algorithm_order {
            let have: Vec<u32> = cells
                .get(&(*problem, *algorithm))
                .map(|rs| rs.iter().map(|r| r.trial_index).collect())
                .unwrap_or_default();
            for trial in 0..trials {
                if !have.contains(&trial) {
                    missing.push(format!("{problem}/{algorithm}/trial {trial}"));
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingData(format!(
            "incomplete result grid; missing cells: {}",
            missing.join(", ")
        )));
    }
    problem_order
        .iter()
        .map(|problem| {
            let samples = algorithm_order
                .iter()
                .map(|algorithm| {
                    let mut rows = cells[&(*problem, *algorithm)].clone();
                    rows.sort_by_key(|r| r.trial_index);
                    SampleSet::new(
                        algorithm.to_string(),
                        rows.iter().map(|r| r.best_objective).collect(),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ProblemSamples {
                problem: problem.to_string(),
                samples,
            })
        })
        .collect()
}

fn cmd_compare(
    results_dir: &Path,
    reference: &str,
    alpha: f64,
    out_dir: Option<&Path>,
    no_timestamp: bool,
) -> Result<()> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let results = experiments::read_results(&results_dir.join("results.csv"))?;
    let blocks = collect_samples(&results)?;
    if !blocks
        .iter()
        .flat_map(|b| b.samples.iter())
        .any(|s| s.algorithm == reference)
    {
        let mut valid: Vec<String> = blocks
            .iter()
            .flat_map(|b| b.samples.iter().map(|s| s.algorithm.clone()))
            .collect();
        valid.sort();
        valid.dedup();
        return Err(Error::UnknownAlgorithm {
            name: reference.to_string(),
            valid: valid.join(", "),
        });
    }
    let report = stats::build_comparison(&blocks, reference, alpha)?;
    let ts = timestamp(no_timestamp);
    let out = out_dir.unwrap_or(results_dir);
    fs::create_dir_all(out)?;
    fs::write(out.join("comparison.csv"), report.to_csv(ts.as_deref()))?;
    let text = report.to_text(ts.as_deref());
    fs::write(out.join("comparison.txt"), &text)?;
    print!("{text}");
    Ok(())
}

fn cmd_list_problems() {
    println!(
        "{:<14} {:>4} {:>12}  {:<22} {}",
        "name", "dim", "constraints", "known_best", "description"
    );
    for entry in problems::catalog() {
        let dim = entry
            .dimension
            .map_or("D".to_string(), |d| d.to_string());
        let known_best = entry
            .dimension
            .map(|_| problems::lookup(entry.name).ok())
            .flatten()
            .and_then(|p| p.known_best())
            .map_or("-".to_string(), |v| format!("{v:.6e}"));
        println!(
            "{:<14} {:>4} {:>12}  {:<22} {}",
            entry.name, dim, entry.constraints, known_best, entry.description
        );
    }
    println!();
    println!("algorithms: {}", experiments::ALGORITHM_NAMES.join(", "));
}
