//! Variational loop: sampled objective, simplex optimization and grid scans.

pub mod ansatz;
pub mod optimizer;
pub mod scan;

pub use ansatz::{
    estimate_cost, AnsatzConfig, AnsatzKind, DualMixerMode, Evaluation, FinalState, QaoaRunner,
};
pub use optimizer::{Minimum, NelderMead, SimplexCoefficients};
pub use scan::{grid_scan, GridCell, GridScan};

use crate::error::{Error, Result};
use crate::experiments::report::{fmt_f64, fmt_opt, CsvTable};
use crate::model::AllocationBits;
use crate::rng::{derive_seed, rng_from_seed};
use crate::sampling::SampleHistogram;
use crate::scalar::Scalar;
use rand::Rng as _;
use std::f64::consts::PI;

pub const MAX_BUDGET: usize = 10_000;

/// Angles `[gamma_1, beta_1, ..]` drawn uniformly from `[0, pi)`.
pub fn initial_params(seed: u64, depth: usize) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..2 * depth).map(|_| rng.gen_range(0.0..PI)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub params: Vec<f64>,
    pub mean_cost: f64,
    pub feasibility_ratio: f64,
    /// Lowest feasible conflict count sampled in this or any earlier step.
    pub best_feasible_so_far: Option<usize>,
}

impl TraceStep {
    pub fn gammas(&self) -> impl Iterator<Item = f64> + '_ {
        self.params.iter().step_by(2).copied()
    }

    pub fn betas(&self) -> impl Iterator<Item = f64> + '_ {
        self.params.iter().skip(1).step_by(2).copied()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OptimizationTrace {
    pub steps: Vec<TraceStep>,
}

impl OptimizationTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// One row per objective evaluation; angles are space separated.
    pub fn table(&self, seed: u64) -> CsvTable {
        let mut t = CsvTable::new(
            seed,
            &["step", "gammas", "betas", "mean_cost", "feasibility_ratio", "best_feasible_so_far"],
        );
        let join = |v: Vec<f64>| v.iter().map(|x| format!("{x:.9}")).collect::<Vec<_>>().join(" ");
        for (i, s) in self.steps.iter().enumerate() {
            t.push(vec![
                i.to_string(),
                join(s.gammas().collect()),
                join(s.betas().collect()),
                fmt_f64(s.mean_cost),
                fmt_f64(s.feasibility_ratio),
                fmt_opt(s.best_feasible_so_far),
            ]);
        }
        t
    }
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub initial_params: Vec<f64>,
    pub best_params: Vec<f64>,
    pub best_cost: f64,
    pub trace: OptimizationTrace,
    /// Best feasible sample seen during the whole run.
    pub best_feasible: Option<(usize, AllocationBits)>,
    /// Histogram re-sampled at `best_params`.
    pub final_histogram: SampleHistogram,
    pub final_feasibility_ratio: f64,
}

/// Minimizes the sampled objective from `x0`. Evaluation `t` samples with
/// `derive_seed(config.seed, t)`.
pub fn optimize_from<T: Scalar>(
    runner: &QaoaRunner<'_, T>,
    optimizer: &NelderMead,
    x0: &[f64],
) -> Result<OptimizationResult> {
    if optimizer.budget == 0 || optimizer.budget > MAX_BUDGET {
        return Err(Error::Config(format!(
            "budget {} outside [1, {MAX_BUDGET}]",
            optimizer.budget
        )));
    }
    let seed = runner.config().seed;
    let mut steps = Vec::new();
    let mut best_feasible: Option<(usize, AllocationBits)> = None;
    let mut failure = None;
    let minimum = optimizer.minimize(
        |x| {
            if failure.is_some() {
                return f64::INFINITY;
            }
            match runner.evaluate(x, derive_seed(seed, steps.len() as u64)) {
                Ok(ev) => {
                    if let Some(cand) = ev.best_feasible {
                        if best_feasible.as_ref().is_none_or(|b| cand < *b) {
                            best_feasible = Some(cand);
                        }
                    }
                    steps.push(TraceStep {
                        params: x.to_vec(),
                        mean_cost: ev.mean_cost,
                        feasibility_ratio: ev.feasibility_ratio,
                        best_feasible_so_far: best_feasible.as_ref().map(|b| b.0),
                    });
                    ev.mean_cost
                }
                Err(e) => {
                    failure = Some(e);
                    f64::INFINITY
                }
            }
        },
        x0,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let best_step = steps
        .iter()
        .position(|s| s.params == minimum.x)
        .expect("minimum comes from an evaluated step");
    let final_eval = runner.evaluate(&minimum.x, derive_seed(seed, best_step as u64))?;
    Ok(OptimizationResult {
        initial_params: x0.to_vec(),
        best_params: minimum.x,
        best_cost: minimum.value,
        trace: OptimizationTrace { steps },
        best_feasible,
        final_feasibility_ratio: final_eval.feasibility_ratio,
        final_histogram: final_eval.histogram,
    })
}

/// [`optimize_from`] starting at [`initial_params`] of the run seed.
pub fn optimize<T: Scalar>(
    runner: &QaoaRunner<'_, T>,
    optimizer: &NelderMead,
) -> Result<OptimizationResult> {
    let config = runner.config();
    let x0 = initial_params(config.seed, config.depth);
    optimize_from(runner, optimizer, &x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ProblemInstance;

    fn inst() -> ProblemInstance {
        ProblemInstance::new("t", 3, &[(0, 1), (1, 2), (0, 2)], vec![2, 1, 2], None).unwrap()
    }

    #[test]
    fn initial_params_in_range_and_seeded() {
        let a = initial_params(5, 3);
        assert_eq!(a.len(), 6);
        assert!(a.iter().all(|v| (0.0..PI).contains(v)));
        assert_eq!(a, initial_params(5, 3));
        assert_ne!(a, initial_params(6, 3));
    }

    #[test]
    fn budget_one_gives_single_step() {
        let inst = inst();
        let runner = QaoaRunner::<f64>::new(&inst, AnsatzConfig::new(AnsatzKind::DickeXy)).unwrap();
        let r = optimize(&runner, &NelderMead::with_budget(1)).unwrap();
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.best_params, r.initial_params);
    }

    #[test]
    fn rejects_out_of_range_budget() {
        let inst = inst();
        let runner = QaoaRunner::<f64>::new(&inst, AnsatzConfig::new(AnsatzKind::DickeXy)).unwrap();
        assert!(optimize(&runner, &NelderMead::with_budget(0)).is_err());
        assert!(optimize(&runner, &NelderMead::with_budget(MAX_BUDGET + 1)).is_err());
    }

    #[test]
    fn trace_is_monotone_and_reproducible() {
        let inst = inst();
        let cfg = AnsatzConfig::new(AnsatzKind::DickeXy).with_shots(64).with_seed(9);
        let runner = QaoaRunner::<f64>::new(&inst, cfg).unwrap();
        let a = optimize(&runner, &NelderMead::with_budget(25)).unwrap();
        let b = optimize(&runner, &NelderMead::with_budget(25)).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.trace.len(), 25);
        let bests: Vec<usize> = a.trace.steps.iter().filter_map(|s| s.best_feasible_so_far).collect();
        assert!(bests.windows(2).all(|w| w[1] <= w[0]));
        assert!(a.trace.steps.iter().all(|s| s.feasibility_ratio == 1.0));
        assert_eq!(a.trace.table(9).rows.len(), 25);
    }
}
