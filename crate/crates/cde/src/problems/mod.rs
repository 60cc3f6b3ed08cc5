//! Benchmark catalog: six constrained engineering design problems plus a
//! classical unconstrained function set, behind a single FE-counting
//! evaluation authority.

mod classical;
mod engineering;

pub use classical::{ackley, classical, griewank, rastrigin, rosenbrock, sphere};
pub use engineering::{
    cantilever_beam, corrugated_bulkhead, gear_train, three_bar_truss, tubular_column, welded_beam,
    GEAR_TRAIN_OPTIMUM, TUBULAR_COLUMN_REFERENCE,
};

use crate::error::{Error, Result};
use crate::types::{Bounds, DecisionVector, Evaluation, FEASIBILITY_TOLERANCE};

pub type ObjectiveFn = fn(&[f64]) -> f64;
pub type ConstraintFn = fn(&[f64]) -> f64;

/// A minimization problem: objective, inequality constraints (`g_i(x) ≤ 0`
/// when satisfied), box bounds, and an optional per-dimension integrality
/// mask applied at evaluation time.
#[derive(Debug, Clone)]
pub struct Problem {
    name: String,
    bounds: Bounds,
    integrality: Vec<bool>,
    objective: ObjectiveFn,
    constraints: Vec<ConstraintFn>,
    known_best: Option<f64>,
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        bounds: Bounds,
        integrality: Vec<bool>,
        objective: ObjectiveFn,
        constraints: Vec<ConstraintFn>,
        known_best: Option<f64>,
    ) -> Result<Self> {
        if integrality.len() != bounds.dimension() {
            return Err(Error::InvalidConfig(format!(
                "integrality mask has {} entries for a {}-dimensional problem",
                integrality.len(),
                bounds.dimension()
            )));
        }
        Ok(Self {
            name: name.into(),
            bounds,
            integrality,
            objective,
            constraints,
            known_best,
        })
    }

    fn unconstrained(
        name: impl Into<String>,
        bounds: Bounds,
        objective: ObjectiveFn,
        known_best: Option<f64>,
    ) -> Self {
        let d = bounds.dimension();
        Self::new(name, bounds, vec![false; d], objective, Vec::new(), known_best)
            .expect("mask length matches bounds")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dimension()
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn integrality(&self) -> &[bool] {
        &self.integrality
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    /// Registry reference value used by acceptance checks, when one exists.
    pub fn known_best(&self) -> Option<f64> {
        self.known_best
    }

    /// Integer dimensions rounded to the nearest integer, ties toward +∞,
    /// then re-clamped to the bounds. Continuous dimensions pass through.
    pub fn apply_integrality(&self, v: &DecisionVector) -> DecisionVector {
        if !self.integrality.iter().any(|&m| m) {
            return v.clone();
        }
        DecisionVector::new(
            v.iter()
                .enumerate()
                .map(|(j, &x)| {
                    if self.integrality[j] {
                        self.bounds.clamp_component(j, (x + 0.5).floor())
                    } else {
                        x
                    }
                })
                .collect(),
        )
    }

    /// Evaluate `v`, consuming one fitness evaluation from `budget`.
    ///
    /// The aggregate violation is `Σ max(0, g_i)` with each `g_i` below
    /// [`FEASIBILITY_TOLERANCE`] counting as satisfied; a non-finite
    /// constraint value contributes an infinite violation.
    pub fn evaluate(
        &self,
        v: &DecisionVector,
        budget: &mut EvaluationBudget,
    ) -> Result<Evaluation> {
        if v.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: v.len(),
            });
        }
        let fe_index = budget.take()?;
        let masked = self.apply_integrality(v);
        let x = masked.values();
        let objective = (self.objective)(x);
        let mut violation = 0.0;
        for g in &self.constraints {
            let gx = g(x);
            if gx.is_nan() {
                violation = f64::INFINITY;
            } else if gx > FEASIBILITY_TOLERANCE {
                violation += gx;
            }
        }
        Ok(Evaluation::new(objective, violation, fe_index))
    }
}

/// Counter enforcing the maximum number of fitness evaluations per trial.
#[derive(Debug, Clone)]
pub struct EvaluationBudget {
    max_fe: u64,
    used_fe: u64,
}

impl EvaluationBudget {
    pub fn new(max_fe: u64) -> Self {
        Self { max_fe, used_fe: 0 }
    }

    /// Consume one evaluation; returns its 1-based index, or
    /// [`Error::BudgetExhausted`] once `max_fe` draws have been used.
    pub fn take(&mut self) -> Result<u64> {
        if self.used_fe >= self.max_fe {
            return Err(Error::BudgetExhausted);
        }
        self.used_fe += 1;
        Ok(self.used_fe)
    }

    pub fn used(&self) -> u64 {
        self.used_fe
    }

    pub fn max(&self) -> u64 {
        self.max_fe
    }

    pub fn remaining(&self) -> u64 {
        self.max_fe - self.used_fe
    }
}

/// Engineering problem registry keys, in catalog order.
pub const ENGINEERING_NAMES: [&str; 6] = ["cbd", "cbhd", "gtd", "tbtd", "tcd", "wbd"];

/// Classical function registry keys; addressed as `name:D`, e.g. `sphere:30`.
pub const CLASSICAL_NAMES: [&str; 5] = ["sphere", "rosenbrock", "rastrigin", "ackley", "griewank"];

fn valid_names() -> String {
    let mut names: Vec<String> = ENGINEERING_NAMES.iter().map(|s| s.to_string()).collect();
    names.extend(CLASSICAL_NAMES.iter().map(|s| format!("{s}:D")));
    names.join(", ")
}

/// Resolve a problem by registry name: `cbd`, `cbhd`, `gtd`, `tbtd`, `tcd`,
/// `wbd`, or a classical function with an explicit dimension (`sphere:30`).
pub fn lookup(name: &str) -> Result<Problem> {
    let unknown = || Error::UnknownProblem {
        name: name.to_string(),
        valid: valid_names(),
    };
    match name {
        "cbd" => return Ok(cantilever_beam()),
        "cbhd" => return Ok(corrugated_bulkhead()),
        "gtd" => return Ok(gear_train()),
        "tbtd" => return Ok(three_bar_truss()),
        "tcd" => return Ok(tubular_column()),
        "wbd" => return Ok(welded_beam()),
        _ => {}
    }
    let (base, dim) = name.split_once(':').ok_or_else(unknown)?;
    let dimension: usize = dim.parse().map_err(|_| unknown())?;
    if dimension == 0 {
        return Err(unknown());
    }
    classical(base, dimension).map_err(|_| unknown())
}

/// One registry row for `list-problems` style output.
pub struct CatalogEntry {
    pub name: &'static str,
    pub dimension: Option<usize>,
    pub constraints: usize,
    pub description: &'static str,
}

pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry { name: "cbd", dimension: Some(5), constraints: 1, description: "cantilever beam design, minimize beam mass" },
        CatalogEntry { name: "cbhd", dimension: Some(4), constraints: 6, description: "corrugated bulkhead design, minimize hull weight" },
        CatalogEntry { name: "gtd", dimension: Some(4), constraints: 0, description: "gear train design, integer tooth counts" },
        CatalogEntry { name: "tbtd", dimension: Some(2), constraints: 3, description: "three-bar truss design, minimize truss volume" },
        CatalogEntry { name: "tcd", dimension: Some(2), constraints: 2, description: "tubular column design, minimize column cost" },
        CatalogEntry { name: "wbd", dimension: Some(4), constraints: 7, description: "welded beam design, minimize fabrication cost" },
        CatalogEntry { name: "sphere:D", dimension: None, constraints: 0, description: "sum of squares, unimodal" },
        CatalogEntry { name: "rosenbrock:D", dimension: None, constraints: 0, description: "banana valley, ill-conditioned" },
        CatalogEntry { name: "rastrigin:D", dimension: None, constraints: 0, description: "cosine-modulated multimodal" },
        CatalogEntry { name: "ackley:D", dimension: None, constraints: 0, description: "exponential multimodal" },
        CatalogEntry { name: "griewank:D", dimension: None, constraints: 0, description: "product-coupled multimodal" },
    ]
}
