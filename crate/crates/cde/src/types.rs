//! Core domain types: decision vectors, bounds, evaluations, individuals,
//! populations, and the constrained fitness ordering shared by every module.

use std::cmp::Ordering;
use std::ops::Index;

use crate::error::{Error, Result};

/// Per-constraint absolute tolerance: a constraint value at or below this
/// counts as satisfied, absorbing floating-point noise at active constraints.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// A candidate solution: one real value per problem dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionVector(Vec<f64>);

impl DecisionVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }
}

impl From<Vec<f64>> for DecisionVector {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

impl Index<usize> for DecisionVector {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

/// Box constraints: one `[lower, upper]` interval per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    /// Requires `lower[j] < upper[j]` for every dimension.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidBounds(format!(
                "lower has {} dimensions, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for (j, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) {
                return Err(Error::InvalidBounds(format!(
                    "dimension {j}: lower {lo} is not below upper {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval in every one of `dimension` dimensions.
    pub fn uniform(dimension: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dimension], vec![upper; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn clamp_component(&self, j: usize, x: f64) -> f64 {
        x.clamp(self.lower[j], self.upper[j])
    }
}

/// Clamp every component of `v` into its bound interval. In-bounds
/// components pass through unchanged; the operation is idempotent.
pub fn repair_to_bounds(v: &DecisionVector, bounds: &Bounds) -> Result<DecisionVector> {
    if v.len() != bounds.dimension() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dimension(),
            actual: v.len(),
        });
    }
    Ok(DecisionVector::new(
        v.iter()
            .enumerate()
            .map(|(j, &x)| bounds.clamp_component(j, x))
            .collect(),
    ))
}

/// The cached result of one fitness evaluation.
///
/// `violation` is the aggregate constraint violation (zero exactly when all
/// constraints are satisfied within [`FEASIBILITY_TOLERANCE`]); `fe_index`
/// records which budgeted evaluation produced this value (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub violation: f64,
    pub fe_index: u64,
}

impl Evaluation {
    pub fn new(objective: f64, violation: f64, fe_index: u64) -> Self {
        debug_assert!(violation >= 0.0 || violation.is_nan());
        Self {
            objective,
            violation,
            fe_index,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.violation == 0.0
    }
}

/// A decision vector together with its evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub vector: DecisionVector,
    pub eval: Evaluation,
}

/// The population at one generation.
#[derive(Debug, Clone)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: u32,
}

impl Population {
    /// Requires at least four members (mutation needs four mutually
    /// distinct indices).
    pub fn new(members: Vec<Individual>, generation: u32) -> Result<Self> {
        if members.len() < 4 {
            return Err(Error::InvalidConfig(format!(
                "population size {} is below the minimum of 4",
                members.len()
            )));
        }
        Ok(Self {
            members,
            generation,
        })
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Index of the best member under [`compare_fitness`]; the earliest
    /// index wins ties.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for i in 1..self.members.len() {
            if compare_fitness(&self.members[i].eval, &self.members[best].eval) == Ordering::Less {
                best = i;
            }
        }
        best
    }

    pub fn best(&self) -> &Individual {
        &self.members[self.best_index()]
    }
}

/// Constrained fitness ordering (feasibility rules). `Less` means `a` is
/// better:
///
/// 1. a feasible evaluation beats an infeasible one;
/// 2. two feasible evaluations compare by objective, smaller better;
/// 3. two infeasible evaluations compare by violation, smaller better.
///
/// Non-finite values order worse than any finite value and tie with each
/// other, so the ordering is total over everything a run can produce.
pub fn compare_fitness(a: &Evaluation, b: &Evaluation) -> Ordering {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => compare_metric(a.objective, b.objective),
        (false, false) => compare_metric(a.violation, b.violation),
    }
}

fn compare_metric(x: f64, y: f64) -> Ordering {
    match (x.is_finite(), y.is_finite()) {
        (true, true) => x.partial_cmp(&y).expect("finite values are ordered"),
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => Ordering::Equal,
    }
}
