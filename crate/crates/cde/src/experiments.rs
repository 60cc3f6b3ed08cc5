//! Experiment runner: repeated seeded trials over a problem × algorithm
//! grid, persisted incrementally so a crashed batch resumes without
//! re-running finished cells.
//!
//! Trial seeds are `base_seed + trial_index`, so every (algorithm, problem,
//! trial) cell is independently reproducible. Cells are embarrassingly
//! parallel; appends to the results journal are serialized, and the final
//! results file is rewritten in canonical cell order so reruns produce
//! byte-identical output regardless of scheduling.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Deserialize;

use crate::engine::{
    self, ControlParams, ConvergenceTrace, MutationStrategy, RunConfig, TracePoint,
};
use crate::error::{Error, Result};
use crate::problems::{self, Problem};
use crate::types::DecisionVector;

/// Named algorithm preset: a mutation strategy plus control parameters.
#[derive(Debug, Clone)]
pub struct AlgorithmSpec {
    pub name: String,
    pub strategy: MutationStrategy,
    pub params: ControlParams,
}

/// Algorithm registry keys.
pub const ALGORITHM_NAMES: [&str; 4] = ["cde", "de", "de/best/1", "de/cur/1"];

/// Resolve an algorithm preset: `cde` (winner-to-best with sampled F1, F2,
/// Cr), `de` (DE/rand/1/bin with F = 0.5, Cr = 0.8), or the `de/best/1` and
/// `de/cur/1` variants with the same fixed parameters.
pub fn resolve_algorithm(name: &str) -> Result<AlgorithmSpec> {
    let (strategy, params) = match name {
        "cde" => (MutationStrategy::WinnerToBest1, ControlParams::competitive()),
        "de" | "de/rand/1" => (MutationStrategy::Rand1, ControlParams::classic_de()),
        "de/best/1" => (MutationStrategy::Best1, ControlParams::classic_de()),
        "de/cur/1" => (MutationStrategy::Cur1, ControlParams::classic_de()),
        _ => {
            return Err(Error::UnknownAlgorithm {
                name: name.to_string(),
                valid: ALGORITHM_NAMES.join(", "),
            })
        }
    };
    Ok(AlgorithmSpec {
        name: name.to_string(),
        strategy,
        params,
    })
}

/// FE budget per cell: a fixed count, or a multiplier on the problem
/// dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetRule {
    Fixed(u64),
    PerDimension(u64),
}

impl BudgetRule {
    pub fn for_problem(&self, problem: &Problem) -> u64 {
        match self {
            BudgetRule::Fixed(fe) => *fe,
            BudgetRule::PerDimension(mult) => mult * problem.dimension() as u64,
        }
    }
}

/// A fully resolved experiment: problems, algorithms, trial count, seeds,
/// and budget rule.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub problems: Vec<String>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub trials: u32,
    pub base_seed: u64,
    pub budget_rule: BudgetRule,
    pub population_size: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanFile {
    problems: Vec<String>,
    algorithms: Vec<String>,
    #[serde(default = "default_trials")]
    trials: u32,
    base_seed: Option<u64>,
    #[serde(default = "default_population")]
    population: usize,
    budget: BudgetSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BudgetSpec {
    fixed: Option<u64>,
    per_dimension: Option<u64>,
}

fn default_trials() -> u32 {
    30
}

fn default_population() -> usize {
    100
}

impl ExperimentPlan {
    /// Parse a plan from TOML. `seed_override` takes precedence over the
    /// file's `base_seed`; one of the two must be present, since every run
    /// must be seeded.
    pub fn from_toml(text: &str, seed_override: Option<u64>) -> Result<Self> {
        let file: PlanFile = toml::from_str(text).map_err(|e| Error::Plan(e.to_string()))?;
        let budget_rule = match (file.budget.fixed, file.budget.per_dimension) {
            (Some(fe), None) => BudgetRule::Fixed(fe),
            (None, Some(mult)) => BudgetRule::PerDimension(mult),
            _ => {
                return Err(Error::Plan(
                    "budget: set exactly one of 'fixed' or 'per_dimension'".into(),
                ))
            }
        };
        let base_seed = seed_override
            .or(file.base_seed)
            .ok_or_else(|| Error::Plan("base_seed: set it in the plan or pass --seed".into()))?;
        if file.problems.is_empty() {
            return Err(Error::Plan("problems: list at least one problem".into()));
        }
        if file.trials == 0 {
            return Err(Error::Plan("trials: must be at least 1".into()));
        }
        let algorithms = file
            .algorithms
            .iter()
            .map(|name| resolve_algorithm(name))
            .collect::<Result<Vec<_>>>()?;
        if algorithms.is_empty() {
            return Err(Error::Plan("algorithms: list at least one algorithm".into()));
        }
        Ok(Self {
            problems: file.problems,
            algorithms,
            trials: file.trials,
            base_seed,
            budget_rule,
            population_size: file.population,
        })
    }

    pub fn load(path: &Path, seed_override: Option<u64>) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Plan(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text, seed_override)
    }

    pub fn cell_count(&self) -> usize {
        self.problems.len() * self.algorithms.len() * self.trials as usize
    }
}

/// Outcome of one (problem, algorithm, trial) cell.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub problem: String,
    pub algorithm: String,
    pub trial_index: u32,
    pub best_objective: f64,
    pub best_violation: f64,
    pub best_vector: DecisionVector,
    pub fe_used: u64,
    pub trace: ConvergenceTrace,
    pub seed: u64,
}

pub const RESULTS_HEADER: &str =
    "problem,algorithm,trial,seed,fe_used,best_objective,best_violation,best_vector";

pub const TRACE_HEADER: &str = "fe,best_objective";

impl TrialResult {
    /// One results-file row. Floats use the shortest round-trip form, so
    /// parsing a row reproduces the exact values.
    pub fn csv_row(&self) -> String {
        let vector = self
            .best_vector
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{},{},{},{},{},{},{},{}",
            self.problem,
            self.algorithm,
            self.trial_index,
            self.seed,
            self.fe_used,
            self.best_objective,
            self.best_violation,
            vector
        )
    }
}

type CellKey = (String, String, u32);

fn parse_row(line: &str, context: &str) -> Result<TrialResult> {
    let bad = |detail: String| Error::MalformedResults(format!("{context}: {detail}"));
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 8 {
        return Err(bad(format!("expected 8 fields, got {}", fields.len())));
    }
    let trial_index: u32 = fields[2].parse().map_err(|_| bad("bad trial index".into()))?;
    let seed: u64 = fields[3].parse().map_err(|_| bad("bad seed".into()))?;
    let fe_used: u64 = fields[4].parse().map_err(|_| bad("bad fe_used".into()))?;
    let best_objective: f64 = fields[5].parse().map_err(|_| bad("bad best_objective".into()))?;
    let best_violation: f64 = fields[6].parse().map_err(|_| bad("bad best_violation".into()))?;
    let best_vector = fields[7]
        .split(';')
        .map(|s| s.parse::<f64>())
        .collect::<std::result::Result<Vec<f64>, _>>()
        .map_err(|_| bad("bad best_vector".into()))?;
    Ok(TrialResult {
        problem: fields[0].to_string(),
        algorithm: fields[1].to_string(),
        trial_index,
        seed,
        fe_used,
        best_objective,
        best_violation,
        best_vector: DecisionVector::new(best_vector),
        trace: ConvergenceTrace { points: Vec::new() },
    })
}

/// Parse a whole results file (header row first) in file order.
pub fn read_results(path: &Path) -> Result<Vec<TrialResult>> {
    let text = fs::read_to_string(path)?;
    let mut results = Vec::new();
    for (number, line) in text.lines().enumerate() {
        if number == 0 || line.is_empty() {
            continue;
        }
        results.push(parse_row(line, &format!("{}:{}", path.display(), number + 1))?);
    }
    Ok(results)
}

/// File-system safe token: registry names may carry `:` or `/`.
fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

pub fn trace_path(out_dir: &Path, problem: &str, algorithm: &str, trial: u32) -> PathBuf {
    out_dir
        .join("traces")
        .join(format!("{}__{}__t{trial}.csv", sanitize(problem), sanitize(algorithm)))
}

pub fn write_trace(path: &Path, trace: &ConvergenceTrace) -> Result<()> {
    let mut out = String::with_capacity(trace.points.len() * 24 + 24);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for pt in &trace.points {
        out.push_str(&format!("{},{}\n", pt.fe, pt.best_objective));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<ConvergenceTrace> {
    let text = fs::read_to_string(path)?;
    let mut points = Vec::new();
    for (number, line) in text.lines().enumerate() {
        if number == 0 {
            continue;
        }
        let bad = |detail: &str| {
            Error::MalformedResults(format!("{}:{}: {detail}", path.display(), number + 1))
        };
        let (fe, best) = line
            .split_once(',')
            .ok_or_else(|| bad("expected fe,best_objective"))?;
        let fe: u64 = fe.parse().map_err(|_| bad("bad fe"))?;
        let best_objective: f64 = best.parse().map_err(|_| bad("bad best_objective"))?;
        points.push(TracePoint { fe, best_objective });
    }
    Ok(ConvergenceTrace { points })
}

/// Read an existing results file into `(problem, algorithm, trial) → raw
/// row`. Rows are kept verbatim so finished cells survive a resume byte
/// for byte; later duplicates win, matching append order.
fn read_existing_rows(path: &Path) -> Result<BTreeMap<CellKey, String>> {
    let mut rows = BTreeMap::new();
    if !path.exists() {
        return Ok(rows);
    }
    let text = fs::read_to_string(path)?;
    for (number, line) in text.lines().enumerate() {
        if number == 0 || line.is_empty() {
            continue;
        }
        let parsed = parse_row(line, &format!("{}:{}", path.display(), number + 1))?;
        rows.insert(
            (parsed.problem, parsed.algorithm, parsed.trial_index),
            line.to_string(),
        );
    }
    Ok(rows)
}

struct Cell {
    problem_index: usize,
    algorithm_index: usize,
    trial: u32,
}

/// Run every (problem, algorithm, trial) cell of `plan`, skipping cells
/// whose row and trace file already exist under `out_dir`. Returns all
/// results in canonical order: plan problem order, then plan algorithm
/// order, then trial index.
///
/// `jobs` is the number of parallel workers; 0 means one per core.
pub fn execute(plan: &ExperimentPlan, out_dir: &Path, jobs: usize) -> Result<Vec<TrialResult>> {
    if plan.population_size < 4 {
        return Err(Error::InvalidConfig("population must be at least 4".into()));
    }
    let problems = plan
        .problems
        .iter()
        .map(|name| problems::lookup(name))
        .collect::<Result<Vec<Problem>>>()?;

    fs::create_dir_all(out_dir.join("traces"))?;
    let results_path = out_dir.join("results.csv");
    let existing = read_existing_rows(&results_path)?;

    let mut cells = Vec::new();
    for (problem_index, problem_name) in plan.problems.iter().enumerate() {
        for (algorithm_index, algorithm) in plan.algorithms.iter().enumerate() {
            for trial in 0..plan.trials {
                let key = (problem_name.clone(), algorithm.name.clone(), trial);
                let done = existing.contains_key(&key)
                    && trace_path(out_dir, problem_name, &algorithm.name, trial).exists();
                if !done {
                    cells.push(Cell {
                        problem_index,
                        algorithm_index,
                        trial,
                    });
                }
            }
        }
    }

    let journal = Mutex::new(BufWriter::new(open_journal(&results_path)?));
    let run_cell = |cell: &Cell| -> Result<(CellKey, TrialResult)> {
        let problem = &problems[cell.problem_index];
        let algorithm = &plan.algorithms[cell.algorithm_index];
        let cfg = RunConfig {
            population_size: plan.population_size,
            max_fe: plan.budget_rule.for_problem(problem),
            strategy: algorithm.strategy,
            params: algorithm.params,
            seed: plan.base_seed + cell.trial as u64,
            trace_checkpoints: Vec::new(),
            per_dimension_f: false,
        };
        let outcome = engine::run(problem, &cfg)?;
        let result = TrialResult {
            problem: plan.problems[cell.problem_index].clone(),
            algorithm: algorithm.name.clone(),
            trial_index: cell.trial,
            best_objective: outcome.best.eval.objective,
            best_violation: outcome.best.eval.violation,
            best_vector: outcome.best.vector,
            fe_used: outcome.fe_used,
            trace: outcome.trace,
            seed: outcome.seed,
        };
        write_trace(
            &trace_path(out_dir, &result.problem, &result.algorithm, cell.trial),
            &result.trace,
        )?;
        {
            let mut journal = journal.lock().expect("journal lock");
            writeln!(journal, "{}", result.csv_row())?;
            journal.flush()?;
        }
        let key = (result.problem.clone(), result.algorithm.clone(), cell.trial);
        Ok((key, result))
    };

    let computed: Vec<(CellKey, TrialResult)> = if jobs == 1 {
        cells.iter().map(run_cell).collect::<Result<_>>()?
    } else {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if jobs > 0 {
            builder = builder.num_threads(jobs);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| cells.par_iter().map(run_cell).collect::<Result<_>>())?
    };
    drop(journal);

    let computed: BTreeMap<CellKey, TrialResult> = computed.into_iter().collect();

    // Canonical rewrite plus the returned result list, both in plan order.
    let mut lines = Vec::with_capacity(plan.cell_count());
    let mut results = Vec::with_capacity(plan.cell_count());
    for problem_name in &plan.problems {
        for algorithm in &plan.algorithms {
            for trial in 0..plan.trials {
                let key = (problem_name.clone(), algorithm.name.clone(), trial);
                if let Some(result) = computed.get(&key) {
                    lines.push(result.csv_row());
                    results.push(result.clone());
                } else {
                    let line = existing.get(&key).expect("cell neither computed nor loaded");
                    let mut result = parse_row(line, "results.csv")?;
                    result.trace =
                        read_trace(&trace_path(out_dir, problem_name, &algorithm.name, trial))?;
                    lines.push(line.clone());
                    results.push(result);
                }
            }
        }
    }
    let mut content = String::with_capacity(lines.len() * 80 + 80);
    content.push_str(RESULTS_HEADER);
    content.push('\n');
    for line in &lines {
        content.push_str(line);
        content.push('\n');
    }
    let tmp = out_dir.join("results.csv.tmp");
    fs::write(&tmp, content)?;
    fs::rename(&tmp, &results_path)?;

    Ok(results)
}

fn open_journal(path: &Path) -> Result<File> {
    if path.exists() {
        Ok(OpenOptions::new().append(true).open(path)?)
    } else {
        let mut file = File::create(path)?;
        writeln!(file, "{RESULTS_HEADER}")?;
        Ok(file)
    }
}

/// Mean and spread of one algorithm's final best objectives on one problem.
#[derive(Debug, Clone)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub trials: usize,
    pub mean: f64,
    pub std_dev: f64,
    /// Trials whose final best satisfied every constraint. Infeasible
    /// finals still count toward mean and std at their objective value.
    pub feasible_trials: usize,
}

/// Per-algorithm sample mean and sample standard deviation (n − 1
/// denominator) of `best_objective` on `problem`, in first-seen algorithm
/// order. Every algorithm must have the same trial count.
pub fn summarize(results: &[TrialResult], problem: &str) -> Result<Vec<AlgorithmSummary>> {
    let mut order: Vec<&str> = Vec::new();
    let mut values: BTreeMap<&str, Vec<(u32, f64)>> = BTreeMap::new();
    let mut feasible: BTreeMap<&str, usize> = BTreeMap::new();
    for r in results.iter().filter(|r| r.problem == problem) {
        if !order.contains(&r.algorithm.as_str()) {
            order.push(&r.algorithm);
        }
        values
            .entry(&r.algorithm)
            .or_default()
            .push((r.trial_index, r.best_objective));
        *feasible.entry(&r.algorithm).or_default() += usize::from(r.best_violation == 0.0);
    }
    if order.is_empty() {
        return Err(Error::MissingData(format!("problem '{problem}' has no results")));
    }
    let expected = values[order[0]].len();
    for algorithm in &order {
        let n = values[*algorithm].len();
        if n != expected {
            return Err(Error::MissingData(format!(
                "problem '{problem}': algorithm '{algorithm}' has {n} trials, expected {expected}"
            )));
        }
    }
    Ok(order
        .into_iter()
        .map(|algorithm| {
            // Summation in trial order, so summaries are invariant to the
            // order trials arrive in.
            let mut pairs = values[algorithm].clone();
            pairs.sort_by_key(|&(trial, _)| trial);
            let vals: Vec<f64> = pairs.into_iter().map(|(_, v)| v).collect();
            AlgorithmSummary {
                algorithm: algorithm.to_string(),
                trials: vals.len(),
                mean: crate::stats::sample_mean(&vals),
                std_dev: crate::stats::sample_std(&vals),
                feasible_trials: feasible[algorithm],
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_registry_resolves_presets() {
        assert_eq!(
            resolve_algorithm("cde").unwrap().strategy,
            MutationStrategy::WinnerToBest1
        );
        assert_eq!(resolve_algorithm("de").unwrap().strategy, MutationStrategy::Rand1);
        assert_eq!(
            resolve_algorithm("de/best/1").unwrap().strategy,
            MutationStrategy::Best1
        );
        assert!(resolve_algorithm("nope").is_err());
    }

    #[test]
    fn budget_rule_scales_with_dimension() {
        let p = problems::sphere(30);
        assert_eq!(BudgetRule::Fixed(10_000).for_problem(&p), 10_000);
        assert_eq!(BudgetRule::PerDimension(500).for_problem(&p), 15_000);
    }

    #[test]
    fn plan_parses_and_validates() {
        let text = r#"
            problems = ["sphere:5", "cbd"]
            algorithms = ["de", "cde"]
            trials = 3
            base_seed = 9
            population = 10

            [budget]
            fixed = 200
        "#;
        let plan = ExperimentPlan::from_toml(text, None).unwrap();
        assert_eq!(plan.cell_count(), 12);
        assert_eq!(plan.base_seed, 9);
        assert_eq!(plan.budget_rule, BudgetRule::Fixed(200));
    }

    #[test]
    fn plan_seed_override_beats_file_value() {
        let text = r#"
            problems = ["sphere:5"]
            algorithms = ["de"]
            base_seed = 9
            [budget]
            per_dimension = 100
        "#;
        assert_eq!(ExperimentPlan::from_toml(text, Some(77)).unwrap().base_seed, 77);
    }

    #[test]
    fn plan_without_any_seed_is_rejected() {
        let text = r#"
            problems = ["sphere:5"]
            algorithms = ["de"]
            [budget]
            fixed = 100
        "#;
        let err = ExperimentPlan::from_toml(text, None).unwrap_err();
        assert!(err.to_string().contains("base_seed"));
    }

    #[test]
    fn plan_rejects_unknown_keys_and_bad_budget() {
        let unknown = r#"
            problems = ["sphere:5"]
            algorithms = ["de"]
            base_seed = 1
            trails = 30
            [budget]
            fixed = 100
        "#;
        let err = ExperimentPlan::from_toml(unknown, None).unwrap_err();
        assert!(err.to_string().contains("trails"), "{err}");

        let both = r#"
            problems = ["sphere:5"]
            algorithms = ["de"]
            base_seed = 1
            [budget]
            fixed = 100
            per_dimension = 5
        "#;
        assert!(ExperimentPlan::from_toml(both, None).is_err());
    }

    #[test]
    fn csv_rows_round_trip() {
        let result = TrialResult {
            problem: "sphere:3".into(),
            algorithm: "cde".into(),
            trial_index: 4,
            best_objective: 1.2345678901234e-7,
            best_violation: 0.0,
            best_vector: DecisionVector::new(vec![0.1, -2.5e-3, 7.0]),
            fe_used: 500,
            trace: ConvergenceTrace { points: Vec::new() },
            seed: 46,
        };
        let row = result.csv_row();
        let parsed = parse_row(&row, "test").unwrap();
        assert_eq!(parsed.problem, result.problem);
        assert_eq!(parsed.best_objective.to_bits(), result.best_objective.to_bits());
        assert_eq!(parsed.best_vector, result.best_vector);
        assert_eq!(parsed.csv_row(), row);
    }

    #[test]
    fn summarize_textbook_values() {
        let mk = |algorithm: &str, trial: u32, objective: f64| TrialResult {
            problem: "p".into(),
            algorithm: algorithm.into(),
            trial_index: trial,
            best_objective: objective,
            best_violation: 0.0,
            best_vector: DecisionVector::new(vec![0.0]),
            fe_used: 10,
            trace: ConvergenceTrace { points: Vec::new() },
            seed: trial as u64,
        };
        let results = vec![mk("a", 0, 1.0), mk("a", 1, 2.0), mk("a", 2, 3.0)];
        let summary = summarize(&results, "p").unwrap();
        assert_eq!(summary.len(), 1);
        assert_eq!(summary[0].mean, 2.0);
        assert_eq!(summary[0].std_dev, 1.0);
        assert_eq!(summary[0].feasible_trials, 3);

        let constant = vec![mk("a", 0, 5.0), mk("a", 1, 5.0), mk("a", 2, 5.0)];
        let summary = summarize(&constant, "p").unwrap();
        assert_eq!(summary[0].mean, 5.0);
        assert_eq!(summary[0].std_dev, 0.0);

        assert!(summarize(&results, "absent").is_err());
        let uneven = vec![mk("a", 0, 1.0), mk("a", 1, 2.0), mk("b", 0, 1.0)];
        assert!(summarize(&uneven, "p").is_err());
    }

    #[test]
    fn summarize_is_invariant_to_trial_order() {
        let mk = |trial: u32, objective: f64| TrialResult {
            problem: "p".into(),
            algorithm: "a".into(),
            trial_index: trial,
            best_objective: objective,
            best_violation: 0.0,
            best_vector: DecisionVector::new(vec![0.0]),
            fe_used: 10,
            trace: ConvergenceTrace { points: Vec::new() },
            seed: trial as u64,
        };
        let forward: Vec<TrialResult> = (0..9).map(|k| mk(k, 0.1 + (k as f64).sqrt())).collect();
        let mut shuffled = forward.clone();
        shuffled.reverse();
        shuffled.swap(0, 4);
        let a = summarize(&forward, "p").unwrap();
        let b = summarize(&shuffled, "p").unwrap();
        assert_eq!(a[0].mean.to_bits(), b[0].mean.to_bits());
        assert_eq!(a[0].std_dev.to_bits(), b[0].std_dev.to_bits());
    }
}
