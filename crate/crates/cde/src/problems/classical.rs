//! Classical unconstrained test functions with their standard bounds.

use super::Problem;
use crate::error::{Error, Result};
use crate::types::Bounds;

use std::f64::consts::{E, PI};

pub fn sphere(dimension: usize) -> Problem {
    fn f(x: &[f64]) -> f64 {
        x.iter().map(|&v| v * v).sum()
    }
    unconstrained("sphere", dimension, 5.12, f)
}

pub fn rosenbrock(dimension: usize) -> Problem {
    fn f(x: &[f64]) -> f64 {
        x.windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum()
    }
    let bounds = Bounds::new(vec![-5.0; dimension], vec![10.0; dimension]).unwrap();
    Problem::unconstrained(format!("rosenbrock:{dimension}"), bounds, f, Some(0.0))
}

pub fn rastrigin(dimension: usize) -> Problem {
    fn f(x: &[f64]) -> f64 {
        10.0 * x.len() as f64
            + x.iter()
                .map(|&v| v * v - 10.0 * (2.0 * PI * v).cos())
                .sum::<f64>()
    }
    unconstrained("rastrigin", dimension, 5.12, f)
}

pub fn ackley(dimension: usize) -> Problem {
    fn f(x: &[f64]) -> f64 {
        let n = x.len() as f64;
        let sum_sq: f64 = x.iter().map(|&v| v * v).sum();
        let sum_cos: f64 = x.iter().map(|&v| (2.0 * PI * v).cos()).sum();
        -20.0 * (-0.2 * (sum_sq / n).sqrt()).exp() - (sum_cos / n).exp() + 20.0 + E
    }
    unconstrained("ackley", dimension, 32.768, f)
}

pub fn griewank(dimension: usize) -> Problem {
    fn f(x: &[f64]) -> f64 {
        let sum: f64 = x.iter().map(|&v| v * v).sum::<f64>() / 4000.0;
        let prod: f64 = x
            .iter()
            .enumerate()
            .map(|(i, &v)| (v / ((i + 1) as f64).sqrt()).cos())
            .product();
        1.0 + sum - prod
    }
    unconstrained("griewank", dimension, 600.0, f)
}

fn unconstrained(name: &str, dimension: usize, half_width: f64, f: super::ObjectiveFn) -> Problem {
    let bounds = Bounds::uniform(dimension, -half_width, half_width).unwrap();
    Problem::unconstrained(format!("{name}:{dimension}"), bounds, f, Some(0.0))
}

/// Dispatch by base name; dimension must be at least 1.
pub fn classical(name: &str, dimension: usize) -> Result<Problem> {
    if dimension == 0 {
        return Err(Error::InvalidConfig(
            "classical functions need dimension >= 1".into(),
        ));
    }
    match name {
        "sphere" => Ok(sphere(dimension)),
        "rosenbrock" => Ok(rosenbrock(dimension)),
        "rastrigin" => Ok(rastrigin(dimension)),
        "ackley" => Ok(ackley(dimension)),
        "griewank" => Ok(griewank(dimension)),
        _ => Err(Error::UnknownProblem {
            name: name.to_string(),
            valid: super::CLASSICAL_NAMES.join(", "),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::EvaluationBudget;
    use crate::types::DecisionVector;

    fn value(p: &Problem, x: Vec<f64>) -> f64 {
        let mut budget = EvaluationBudget::new(1);
        p.evaluate(&DecisionVector::new(x), &mut budget)
            .unwrap()
            .objective
    }

    #[test]
    fn optima_at_standard_points() {
        assert_eq!(value(&sphere(30), vec![0.0; 30]), 0.0);
        assert_eq!(value(&rastrigin(10), vec![0.0; 10]), 0.0);
        assert_eq!(value(&rosenbrock(6), vec![1.0; 6]), 0.0);
        assert!(value(&ackley(4), vec![0.0; 4]).abs() < 1e-12);
        assert_eq!(value(&griewank(5), vec![0.0; 5]), 0.0);
    }

    #[test]
    fn sphere_sums_squares() {
        assert_eq!(value(&sphere(2), vec![1.0, 1.0]), 2.0);
    }

    #[test]
    fn standard_bounds() {
        assert_eq!(sphere(3).bounds().lower(), &[-5.12; 3]);
        assert_eq!(rosenbrock(2).bounds().upper(), &[10.0; 2]);
        assert_eq!(ackley(2).bounds().upper(), &[32.768; 2]);
        assert_eq!(griewank(2).bounds().lower(), &[-600.0; 2]);
    }
}
