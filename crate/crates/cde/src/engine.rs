//! Differential evolution engine.
//!
//! One generation works through the four classic phases: mutation,
//! binomial crossover, bounded repair of the mutant, and one-to-one greedy
//! selection. Next to the three classic mutation schemes sits the
//! competitive winner-to-best scheme: a random competitor and the current
//! individual compete, the winner becomes the base vector, and the base is
//! pulled toward the population best plus a scaled random differential.
//!
//! A run is strictly sequential and fully determined by its seed. The
//! population updates synchronously: every mutant of generation `t` is
//! built from the generation-`t` population, and the best individual is
//! refreshed once per generation.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::problems::{EvaluationBudget, Problem};
use crate::rng::{sample_truncated_normal, RngStream};
use crate::types::{
    compare_fitness, repair_to_bounds, DecisionVector, Individual, Population,
};

/// Mutation scheme selecting how the mutant vector is constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationStrategy {
    /// x_r1 + F·(x_r2 − x_r3)
    Rand1,
    /// x_i + F·(x_r1 − x_r2)
    Cur1,
    /// x_best + F·(x_r1 − x_r2)
    Best1,
    /// Competition between x_i and a random competitor picks the base
    /// vector, then base + F1·(x_best − base) + F2·(x_r2 − x_r3).
    WinnerToBest1,
}

impl std::fmt::Display for MutationStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            MutationStrategy::Rand1 => "de/rand/1",
            MutationStrategy::Cur1 => "de/cur/1",
            MutationStrategy::Best1 => "de/best/1",
            MutationStrategy::WinnerToBest1 => "de/winner-to-best/1",
        };
        f.write_str(name)
    }
}

/// How a control parameter is produced for each individual each generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamMode {
    Fixed(f64),
    Sampled { mean: f64, std_dev: f64 },
}

/// Scaling-factor and crossover-rate configuration.
///
/// Sampled draws are fresh per individual per generation. A sampled scaling
/// factor is truncated to `(0, 1]` by rejection (zero or negative F
/// degenerates the mutation); a sampled crossover rate is clamped to
/// `[0, 1]` since it is a probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlParams {
    pub f: ParamMode,
    pub cr: ParamMode,
}

impl ControlParams {
    pub fn fixed(f: f64, cr: f64) -> Self {
        Self {
            f: ParamMode::Fixed(f),
            cr: ParamMode::Fixed(cr),
        }
    }

    /// Both parameters drawn from normal distributions.
    pub fn sampled(mean_f: f64, std_dev_f: f64, mean_cr: f64, std_dev_cr: f64) -> Self {
        Self {
            f: ParamMode::Sampled {
                mean: mean_f,
                std_dev: std_dev_f,
            },
            cr: ParamMode::Sampled {
                mean: mean_cr,
                std_dev: std_dev_cr,
            },
        }
    }

    /// Baseline DE/rand/1/bin setting: F = 0.5, Cr = 0.8.
    pub fn classic_de() -> Self {
        Self::fixed(0.5, 0.8)
    }

    /// Competitive-DE setting: F1, F2, Cr all from N(0.5, 0.3).
    pub fn competitive() -> Self {
        Self::sampled(0.5, 0.3, 0.5, 0.3)
    }

    pub fn validate(&self) -> Result<()> {
        match self.f {
            ParamMode::Fixed(f) if !(f > 0.0 && f <= 2.0) => Err(Error::InvalidConfig(format!(
                "fixed F must lie in (0, 2], got {f}"
            ))),
            ParamMode::Sampled { std_dev, .. } if !(std_dev > 0.0) => Err(Error::InvalidConfig(
                format!("F std_dev must be positive, got {std_dev}"),
            )),
            _ => match self.cr {
                ParamMode::Fixed(cr) if !(0.0..=1.0).contains(&cr) => Err(Error::InvalidConfig(
                    format!("fixed Cr must lie in [0, 1], got {cr}"),
                )),
                ParamMode::Sampled { std_dev, .. } if !(std_dev > 0.0) => Err(
                    Error::InvalidConfig(format!("Cr std_dev must be positive, got {std_dev}")),
                ),
                _ => Ok(()),
            },
        }
    }

    /// One scaling-factor draw; sampled mode lands in `(0, 1]`.
    pub fn sample_f(&self, rng: &mut RngStream) -> f64 {
        match self.f {
            ParamMode::Fixed(f) => f,
            ParamMode::Sampled { mean, std_dev } => {
                sample_truncated_normal(rng, mean, std_dev, 0.0, 1.0)
            }
        }
    }

    /// One crossover-rate draw; sampled mode is clamped to `[0, 1]`.
    pub fn sample_cr(&self, rng: &mut RngStream) -> f64 {
        match self.cr {
            ParamMode::Fixed(cr) => cr,
            ParamMode::Sampled { mean, std_dev } => rng.normal(mean, std_dev).clamp(0.0, 1.0),
        }
    }
}

/// Configuration of a single optimization run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub population_size: usize,
    pub max_fe: u64,
    pub strategy: MutationStrategy,
    pub params: ControlParams,
    pub seed: u64,
    /// FE counts at which best-so-far is recorded. Empty means the default
    /// cadence: once per generation plus the final evaluation.
    pub trace_checkpoints: Vec<u64>,
    /// Sensitivity switch: draw a fresh scaling factor per dimension
    /// instead of per vector. Off by default.
    pub per_dimension_f: bool,
}

impl RunConfig {
    pub fn new(strategy: MutationStrategy, params: ControlParams, seed: u64, max_fe: u64) -> Self {
        Self {
            population_size: 100,
            max_fe,
            strategy,
            params,
            seed,
            trace_checkpoints: Vec::new(),
            per_dimension_f: false,
        }
    }

    /// Baseline DE/rand/1/bin with F = 0.5, Cr = 0.8.
    pub fn classic_de(seed: u64, max_fe: u64) -> Self {
        Self::new(MutationStrategy::Rand1, ControlParams::classic_de(), seed, max_fe)
    }

    /// Competitive DE: winner-to-best mutation with sampled F1, F2, Cr.
    pub fn competitive(seed: u64, max_fe: u64) -> Self {
        Self::new(
            MutationStrategy::WinnerToBest1,
            ControlParams::competitive(),
            seed,
            max_fe,
        )
    }

    pub fn with_population_size(mut self, n: usize) -> Self {
        self.population_size = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 {
            return Err(Error::InvalidConfig(format!(
                "population size {} is below the minimum of 4",
                self.population_size
            )));
        }
        if self.max_fe < self.population_size as u64 {
            return Err(Error::BudgetExhausted);
        }
        self.params.validate()
    }
}

/// Best-so-far history sampled at FE checkpoints, non-decreasing in FE.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    pub points: Vec<TracePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub fe: u64,
    pub best_objective: f64,
}

/// Outcome of one run: the best individual ever evaluated, the trace, the
/// exact FE count consumed, and the seed that reproduces it all.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub best: Individual,
    pub trace: ConvergenceTrace,
    pub fe_used: u64,
    pub seed: u64,
}

/// Draw `count` indices uniformly from `0..n`, mutually distinct and
/// distinct from everything in `exclude`.
///
/// Panics if fewer than `count` candidates remain; callers guarantee the
/// population is large enough (N ≥ 4).
pub fn draw_distinct_indices(
    rng: &mut RngStream,
    n: usize,
    exclude: &[usize],
    count: usize,
) -> Vec<usize> {
    assert!(
        n >= exclude.len() + count,
        "not enough distinct indices: n = {n}, excluded = {}, requested = {count}",
        exclude.len()
    );
    let mut drawn = Vec::with_capacity(count);
    while drawn.len() < count {
        let candidate = rng.index(n);
        if !exclude.contains(&candidate) && !drawn.contains(&candidate) {
            drawn.push(candidate);
        }
    }
    drawn
}

/// Sample the initial population uniformly inside the bounds and evaluate
/// every member.
pub fn initialize(
    problem: &Problem,
    cfg: &RunConfig,
    rng: &mut RngStream,
    budget: &mut EvaluationBudget,
) -> Result<Population> {
    let n = cfg.population_size;
    if budget.remaining() < n as u64 {
        return Err(Error::BudgetExhausted);
    }
    let bounds = problem.bounds();
    let d = bounds.dimension();
    let mut members = Vec::with_capacity(n);
    for _ in 0..n {
        let values: Vec<f64> = (0..d)
            .map(|j| rng.uniform_in(bounds.lower()[j], bounds.upper()[j]))
            .collect();
        let vector = DecisionVector::new(values);
        let eval = problem.evaluate(&vector, budget)?;
        members.push(Individual { vector, eval });
    }
    Population::new(members, 0)
}

/// Classic mutation (`Rand1`, `Cur1`, or `Best1`). The result is not yet
/// bound-repaired.
pub fn mutate_classic(
    pop: &Population,
    i: usize,
    kind: MutationStrategy,
    f: f64,
    rng: &mut RngStream,
) -> Result<DecisionVector> {
    mutate_classic_impl(pop, i, kind, &ScaleSource::Scalar(f), rng)
}

/// Winner-to-best mutation: the competitor `x_r1` replaces `x_i` as the
/// base vector only when it compares strictly better; ties keep the
/// incumbent. The result is not yet bound-repaired.
pub fn mutate_winner_to_best(
    pop: &Population,
    i: usize,
    f1: f64,
    f2: f64,
    rng: &mut RngStream,
) -> Result<DecisionVector> {
    mutate_winner_impl(pop, i, &ScaleSource::Scalar(f1), &ScaleSource::Scalar(f2), rng)
}

enum ScaleSource<'a> {
    Scalar(f64),
    PerDimension(&'a [f64]),
}

impl ScaleSource<'_> {
    fn at(&self, j: usize) -> f64 {
        match self {
            ScaleSource::Scalar(f) => *f,
            ScaleSource::PerDimension(fs) => fs[j],
        }
    }
}

fn check_mutation_preconditions(pop: &Population, i: usize) -> Result<usize> {
    let n = pop.size();
    if n < 4 {
        return Err(Error::InvalidConfig(format!(
            "mutation needs a population of at least 4, got {n}"
        )));
    }
    if i >= n {
        return Err(Error::InvalidConfig(format!(
            "individual index {i} out of range for population of {n}"
        )));
    }
    Ok(n)
}

fn mutate_classic_impl(
    pop: &Population,
    i: usize,
    kind: MutationStrategy,
    f: &ScaleSource,
    rng: &mut RngStream,
) -> Result<DecisionVector> {
    let n = check_mutation_preconditions(pop, i)?;
    let d = pop.members[i].vector.len();
    let member = |idx: usize| pop.members[idx].vector.values();
    let combine = |base: &[f64], plus: &[f64], minus: &[f64]| {
        DecisionVector::new(
            (0..d)
                .map(|j| base[j] + f.at(j) * (plus[j] - minus[j]))
                .collect(),
        )
    };
    match kind {
        MutationStrategy::Rand1 => {
            let r = draw_distinct_indices(rng, n, &[i], 3);
            Ok(combine(member(r[0]), member(r[1]), member(r[2])))
        }
        MutationStrategy::Cur1 => {
            let r = draw_distinct_indices(rng, n, &[i], 2);
            Ok(combine(member(i), member(r[0]), member(r[1])))
        }
        MutationStrategy::Best1 => {
            let best = pop.best_index();
            let r = draw_distinct_indices(rng, n, &[i], 2);
            Ok(combine(member(best), member(r[0]), member(r[1])))
        }
        MutationStrategy::WinnerToBest1 => Err(Error::InvalidConfig(
            "winner-to-best mutation has its own operation".into(),
        )),
    }
}

fn mutate_winner_impl(
    pop: &Population,
    i: usize,
    f1: &ScaleSource,
    f2: &ScaleSource,
    rng: &mut RngStream,
) -> Result<DecisionVector> {
    let n = check_mutation_preconditions(pop, i)?;
    let d = pop.members[i].vector.len();
    let r1 = draw_distinct_indices(rng, n, &[i], 1)[0];
    let base = if compare_fitness(&pop.members[r1].eval, &pop.members[i].eval) == Ordering::Less {
        r1
    } else {
        i
    };
    let best = pop.best_index();
    let r = draw_distinct_indices(rng, n, &[i, r1], 2);
    let base_v = pop.members[base].vector.values();
    let best_v = pop.members[best].vector.values();
    let r2_v = pop.members[r[0]].vector.values();
    let r3_v = pop.members[r[1]].vector.values();
    Ok(DecisionVector::new(
        (0..d)
            .map(|j| base_v[j] + f1.at(j) * (best_v[j] - base_v[j]) + f2.at(j) * (r2_v[j] - r3_v[j]))
            .collect(),
    ))
}

/// Binomial crossover: each trial component comes from the mutant with
/// probability `cr`, and the component at `j_rand` (drawn once) always
/// does, so at least one mutant gene is inherited.
pub fn crossover_binomial(
    target: &DecisionVector,
    mutant: &DecisionVector,
    cr: f64,
    rng: &mut RngStream,
) -> Result<DecisionVector> {
    if target.len() != mutant.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            actual: mutant.len(),
        });
    }
    let d = target.len();
    if d == 0 {
        return Err(Error::InvalidConfig("empty decision vector".into()));
    }
    let j_rand = rng.index(d);
    Ok(DecisionVector::new(
        (0..d)
            .map(|j| {
                if rng.uniform() <= cr || j == j_rand {
                    mutant[j]
                } else {
                    target[j]
                }
            })
            .collect(),
    ))
}

/// One-to-one greedy selection; the trial survives on ties.
pub fn select_greedy(parent: Individual, trial: Individual) -> Individual {
    if compare_fitness(&trial.eval, &parent.eval) != Ordering::Greater {
        trial
    } else {
        parent
    }
}

struct BestTracker {
    best: Option<Individual>,
    checkpoints: Vec<u64>,
    cursor: usize,
    points: Vec<TracePoint>,
}

impl BestTracker {
    fn new(checkpoints: Vec<u64>) -> Self {
        Self {
            best: None,
            checkpoints,
            cursor: 0,
            points: Vec::new(),
        }
    }

    /// Observe one evaluation; evaluations arrive in FE order.
    fn observe(&mut self, candidate: &Individual) {
        let improved = match &self.best {
            None => true,
            Some(best) => compare_fitness(&candidate.eval, &best.eval) == Ordering::Less,
        };
        if improved {
            self.best = Some(candidate.clone());
        }
        let fe = candidate.eval.fe_index;
        while self.cursor < self.checkpoints.len() && self.checkpoints[self.cursor] <= fe {
            let best_objective = self
                .best
                .as_ref()
                .expect("at least one evaluation observed")
                .eval
                .objective;
            self.points.push(TracePoint {
                fe: self.checkpoints[self.cursor],
                best_objective,
            });
            self.cursor += 1;
        }
    }
}

fn resolve_checkpoints(cfg: &RunConfig) -> Vec<u64> {
    if cfg.trace_checkpoints.is_empty() {
        // One checkpoint per generation boundary; the last one falls on the
        // final evaluation since the loop stops at a whole generation.
        let n = cfg.population_size as u64;
        (1..=cfg.max_fe / n).map(|g| g * n).collect()
    } else {
        let mut cps: Vec<u64> = cfg
            .trace_checkpoints
            .iter()
            .copied()
            .filter(|&c| c > 0)
            .collect();
        cps.sort_unstable();
        cps.dedup();
        cps
    }
}

/// Run the configured strategy on `problem` until the next full generation
/// would exceed the FE budget.
///
/// Per individual per generation the draw order is: scaling factor(s),
/// crossover rate, mutation indices, crossover. Two runs with the same
/// configuration and seed produce bitwise-identical results.
pub fn run(problem: &Problem, cfg: &RunConfig) -> Result<RunResult> {
    cfg.validate()?;
    let n = cfg.population_size;
    let d = problem.dimension();
    let mut rng = RngStream::new(cfg.seed);
    let mut budget = EvaluationBudget::new(cfg.max_fe);
    let mut tracker = BestTracker::new(resolve_checkpoints(cfg));

    let mut pop = initialize(problem, cfg, &mut rng, &mut budget)?;
    for member in &pop.members {
        tracker.observe(member);
    }

    let needs_f2 = cfg.strategy == MutationStrategy::WinnerToBest1;
    let mut f1_buf = Vec::with_capacity(d);
    let mut f2_buf = Vec::with_capacity(d);
    while budget.remaining() >= n as u64 {
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            f1_buf.clear();
            f2_buf.clear();
            let (f1, f2): (ScaleSource, ScaleSource) = if cfg.per_dimension_f {
                f1_buf.extend((0..d).map(|_| cfg.params.sample_f(&mut rng)));
                if needs_f2 {
                    f2_buf.extend((0..d).map(|_| cfg.params.sample_f(&mut rng)));
                }
                (
                    ScaleSource::PerDimension(&f1_buf),
                    ScaleSource::PerDimension(&f2_buf),
                )
            } else {
                let first = cfg.params.sample_f(&mut rng);
                let second = if needs_f2 {
                    cfg.params.sample_f(&mut rng)
                } else {
                    0.0
                };
                (ScaleSource::Scalar(first), ScaleSource::Scalar(second))
            };
            let cr = cfg.params.sample_cr(&mut rng);
            let raw = match cfg.strategy {
                MutationStrategy::WinnerToBest1 => {
                    mutate_winner_impl(&pop, i, &f1, &f2, &mut rng)?
                }
                kind => mutate_classic_impl(&pop, i, kind, &f1, &mut rng)?,
            };
            let mutant = repair_to_bounds(&raw, problem.bounds())?;
            let trial_vector =
                crossover_binomial(&pop.members[i].vector, &mutant, cr, &mut rng)?;
            let eval = problem.evaluate(&trial_vector, &mut budget)?;
            let trial = Individual {
                vector: trial_vector,
                eval,
            };
            tracker.observe(&trial);
            next.push(select_greedy(pop.members[i].clone(), trial));
        }
        pop = Population::new(next, pop.generation + 1)?;
    }

    let best = tracker.best.clone().expect("population was evaluated");
    Ok(RunResult {
        best,
        trace: ConvergenceTrace {
            points: tracker.points,
        },
        fe_used: budget.used(),
        seed: cfg.seed,
    })
}
