//! Uniform `(gamma, beta)` grid scans at depth one.

use super::ansatz::QaoaRunner;
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::scalar::Scalar;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub gamma: f64,
    pub beta: f64,
    pub mean_conflict: f64,
    pub node_feasibility: f64,
    pub channel_feasibility: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridScan {
    pub steps: usize,
    /// Row-major, gamma outer.
    pub cells: Vec<GridCell>,
}

impl GridScan {
    pub fn cell(&self, gamma_index: usize, beta_index: usize) -> &GridCell {
        &self.cells[gamma_index * self.steps + beta_index]
    }

    pub fn min_mean_conflict(&self) -> &GridCell {
        self.cells
            .iter()
            .min_by(|a, b| a.mean_conflict.total_cmp(&b.mean_conflict))
            .expect("non-empty grid")
    }
}

fn linspace(range: (f64, f64), steps: usize, i: usize) -> f64 {
    range.0 + (range.1 - range.0) * i as f64 / (steps - 1) as f64
}

/// Samples the depth-one ansatz on a `steps x steps` grid with inclusive
/// endpoints. Cell `t` in row-major order samples with `derive_seed(seed, t)`.
pub fn grid_scan<T: Scalar>(
    runner: &QaoaRunner<'_, T>,
    gamma_range: (f64, f64),
    beta_range: (f64, f64),
    steps: usize,
) -> Result<GridScan> {
    if steps < 2 {
        return Err(Error::Config(format!("grid needs at least 2 steps, got {steps}")));
    }
    if runner.config().depth != 1 {
        return Err(Error::Config("grid scans use depth 1".into()));
    }
    let inst = runner.instance();
    let seed = runner.config().seed;
    let has_caps = inst.capacities().is_some();
    let cells = (0..steps * steps)
        .into_par_iter()
        .map(|t| {
            let gamma = linspace(gamma_range, steps, t / steps);
            let beta = linspace(beta_range, steps, t % steps);
            let h = runner.sample(&[gamma, beta], derive_seed(seed, t as u64))?;
            Ok(GridCell {
                gamma,
                beta,
                mean_conflict: h.mean_conflicts(inst),
                node_feasibility: h.node_feasibility_ratio(inst),
                channel_feasibility: if has_caps {
                    h.channel_feasibility_ratio(inst)
                } else {
                    f64::NAN
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridScan { steps, cells })
}
