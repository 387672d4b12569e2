//! Derivative-free maximization via Nelder-Mead.

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;

use crate::error::{Error, Result};

struct Negated<'a, F: Fn(&[f64]) -> f64> {
    f: &'a F,
}

impl<F: Fn(&[f64]) -> f64> CostFunction for Negated<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok(-(self.f)(p))
    }
}

#[derive(Clone, Debug)]
pub struct Maximum {
    pub point: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: u64,
}

/// Maximize `f` starting from an axis simplex of the given edge lengths.
pub fn maximize<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], edges: &[f64], max_iters: u64) -> Result<Maximum> {
    let mut simplex = vec![start.to_vec()];
    for (i, e) in edges.iter().enumerate() {
        let mut v = start.to_vec();
        v[i] += e;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-15)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let res = Executor::new(Negated { f }, solver)
        .configure(|s| s.max_iters(max_iters))
        .run()
        .map_err(|e| Error::Integration(format!("optimizer failed: {e}")))?;
    let state = res.state();
    let point = state.get_best_param().cloned().unwrap_or_else(|| start.to_vec());
    let converged = matches!(
        state.get_termination_status(),
        TerminationStatus::Terminated(TerminationReason::SolverConverged)
    );
    Ok(Maximum {
        value: -state.get_best_cost(),
        point,
        converged,
        iterations: state.get_iter(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_peak() {
        let f = |p: &[f64]| 3.0 - (p[0] - 1.0).powi(2) - 2.0 * (p[1] + 0.5).powi(2);
        let m = maximize(&f, &[0.0, 0.0], &[0.5, 0.5], 2000).unwrap();
        assert!((m.point[0] - 1.0).abs() < 1e-6 && (m.point[1] + 0.5).abs() < 1e-6);
        assert!((m.value - 3.0).abs() < 1e-12);
    }
}
