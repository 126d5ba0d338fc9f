//! Depth-one landscape of the dual (row and column sum preserving) ansatz.

use super::family::CanonicalFamily;
use super::report::{fmt_f64, heatmap_svg, CsvTable};
use super::{Check, ExperimentReport};
use crate::baselines::{exact_optimum, greedy_multicolor, TieBreak};
use crate::combinatorics::plaquette_component;
use crate::error::Result;
use crate::model::{conflict_count, AllocationBits};
use crate::qaoa::{grid_scan, AnsatzConfig, AnsatzKind, GridCell, GridScan, QaoaRunner};
use crate::rng::DEFAULT_SEED;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapConfig {
    pub seed: u64,
    pub steps: usize,
    pub shots: usize,
}

impl Default for HeatmapConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            steps: 9,
            shots: 2048,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapResult {
    pub config: HeatmapConfig,
    pub scan: GridScan,
    pub start: AllocationBits,
    pub start_conflicts: usize,
    pub dual_basis_size: usize,
    pub reachable_size: usize,
    /// Optimum over node-feasible allocations, ignoring capacities.
    pub exact_optimum: usize,
    /// Optimum over allocations meeting the capacities too.
    pub dual_optimum: usize,
    pub greedy_conflicts: usize,
}

pub fn run_dual_heatmap(family: &CanonicalFamily, cfg: &HeatmapConfig) -> Result<HeatmapResult> {
    let inst = family.dual_instance()?;
    let config = AnsatzConfig::new(AnsatzKind::DualPlaquette)
        .with_shots(cfg.shots)
        .with_seed(cfg.seed);
    let runner = QaoaRunner::<f64>::new(&inst, config)?;
    let scan = grid_scan(&runner, (0.0, PI), (0.0, PI), cfg.steps)?;
    let start = runner.dual_start().expect("dual ansatz").clone();
    let basis = runner.dual_basis().expect("dual ansatz");
    let dual_optimum = basis
        .states()
        .iter()
        .map(|x| conflict_count(&inst, x))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .expect("non-empty dual basis");
    let exact = exact_optimum(&inst)?;
    let greedy = greedy_multicolor(&inst, TieBreak::Deterministic)?;
    Ok(HeatmapResult {
        config: cfg.clone(),
        start_conflicts: conflict_count(&inst, &start)?,
        reachable_size: plaquette_component(basis, &start)?.len(),
        dual_basis_size: basis.size(),
        start,
        exact_optimum: conflict_count(&inst, &exact.witness)?,
        dual_optimum,
        greedy_conflicts: conflict_count(&inst, &greedy.allocation)?,
        scan,
    })
}

pub const HEATMAP_HEADER: [&str; 5] = ["gamma", "beta", "mean_conflict", "node_feas", "channel_feas"];

impl HeatmapResult {
    pub fn table(&self) -> CsvTable {
        let mut t = CsvTable::new(self.config.seed, &HEATMAP_HEADER);
        t.comment(format!(
            "shots={} steps={} start={} start_conflicts={}",
            self.config.shots, self.config.steps, self.start, self.start_conflicts
        ));
        for c in &self.scan.cells {
            t.push(vec![
                fmt_f64(c.gamma),
                fmt_f64(c.beta),
                fmt_f64(c.mean_conflict),
                fmt_f64(c.node_feasibility),
                fmt_f64(c.channel_feasibility),
            ]);
        }
        t
    }

    pub fn parse_cells(text: &str) -> Result<(u64, Vec<GridCell>)> {
        let t = CsvTable::parse(text)?;
        let cells = (0..t.rows.len())
            .map(|r| {
                Ok(GridCell {
                    gamma: t.get(r, "gamma")?,
                    beta: t.get(r, "beta")?,
                    mean_conflict: t.get(r, "mean_conflict")?,
                    node_feasibility: t.get(r, "node_feas")?,
                    channel_feasibility: t.get(r, "channel_feas")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((t.seed, cells))
    }

    pub fn summary_table(&self) -> CsvTable {
        let best = self.scan.min_mean_conflict();
        let mut t = CsvTable::new(self.config.seed, &["quantity", "value"]);
        let rows = [
            ("dual_basis_size", self.dual_basis_size.to_string()),
            ("reachable_from_start", self.reachable_size.to_string()),
            ("start_conflicts", self.start_conflicts.to_string()),
            ("min_cell_mean_conflict", fmt_f64(best.mean_conflict)),
            ("min_cell_gamma", fmt_f64(best.gamma)),
            ("min_cell_beta", fmt_f64(best.beta)),
            ("exact_optimum", self.exact_optimum.to_string()),
            ("dual_optimum", self.dual_optimum.to_string()),
            ("greedy_conflicts", self.greedy_conflicts.to_string()),
        ];
        for (k, v) in rows {
            t.push(vec![k.to_string(), v]);
        }
        t
    }

    pub fn svg(&self) -> String {
        let steps = self.scan.steps;
        let ticks: Vec<f64> = (0..steps).map(|i| self.scan.cell(i, 0).gamma).collect();
        let values: Vec<f64> = self.scan.cells.iter().map(|c| c.mean_conflict).collect();
        heatmap_svg("Mean conflict, dual ansatz p=1", "beta", "gamma", &ticks, &ticks, &values)
    }

    pub fn checks(&self) -> Vec<Check> {
        let all_feasible = self
            .scan
            .cells
            .iter()
            .all(|c| c.node_feasibility == 1.0 && c.channel_feasibility == 1.0);
        let origin = self.scan.cell(0, 0).mean_conflict;
        let best = self.scan.min_mean_conflict();
        vec![
            Check::new(
                "dual feasibility in every cell",
                all_feasible,
                format!("{} cells, node and channel ratios all 1.0: {all_feasible}", self.scan.cells.len()),
            ),
            Check::new(
                "identity cell",
                origin == self.start_conflicts as f64,
                format!("cell (0,0) mean {origin} vs start conflicts {}", self.start_conflicts),
            ),
            Check::new(
                "min cell beats greedy",
                best.mean_conflict < self.greedy_conflicts as f64,
                format!(
                    "min mean conflict {:.4} at (gamma {:.3}, beta {:.3}) vs greedy {}; exact {}, dual optimum {}",
                    best.mean_conflict, best.gamma, best.beta, self.greedy_conflicts, self.exact_optimum, self.dual_optimum
                ),
            ),
        ]
    }

    pub fn report(&self) -> Result<ExperimentReport> {
        let mut r = ExperimentReport::new("dual-heatmap", self.config.seed);
        r.csv("heatmap.csv", &self.table())?;
        r.csv("heatmap_summary.csv", &self.summary_table())?;
        r.artifact("heatmap.svg", self.svg());
        r.checks = self.checks();
        Ok(r)
    }
}
