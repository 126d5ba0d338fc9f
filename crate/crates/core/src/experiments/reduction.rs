//! Search-space dimensions of the full encoding versus the feasible subspace.

use super::family::{CanonicalFamily, RING_NODES};
use super::report::{fmt_f64, CsvTable};
use super::{Check, ExperimentReport};
use crate::error::Result;
use crate::model::search_space_stats;

/// Previously published feasible-state count, reported next to ours.
pub const PUBLISHED_FEASIBLE_COUNT: u64 = 2916;

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult {
    pub full_dim: u64,
    pub feasible_count: u64,
    pub published_count: u64,
    pub reduction_factor: f64,
    pub published_reduction_factor: f64,
    pub discrepancy: bool,
}

pub fn run_reduction_table(family: &CanonicalFamily) -> Result<ReductionResult> {
    let stats = search_space_stats(&family.instance(RING_NODES)?);
    let full_dim = stats.full_dim.expect("24 qubits fit in u64");
    let feasible_count = stats.feasible_count.expect("small product of binomials");
    Ok(ReductionResult {
        full_dim,
        feasible_count,
        published_count: PUBLISHED_FEASIBLE_COUNT,
        reduction_factor: full_dim as f64 / feasible_count as f64,
        published_reduction_factor: full_dim as f64 / PUBLISHED_FEASIBLE_COUNT as f64,
        discrepancy: feasible_count != PUBLISHED_FEASIBLE_COUNT,
    })
}

impl ReductionResult {
    pub fn table(&self, seed: u64) -> CsvTable {
        let mut t = CsvTable::new(seed, &["quantity", "value"]);
        t.comment("instance=8-node ring, m=3, k=[2,1,2,1,1,2,1,1]");
        let rows = [
            ("full_dim", self.full_dim.to_string()),
            ("feasible_count", self.feasible_count.to_string()),
            ("published_feasible_count", self.published_count.to_string()),
            ("reduction_factor", fmt_f64(self.reduction_factor)),
            ("published_reduction_factor", fmt_f64(self.published_reduction_factor)),
            ("count_discrepancy", self.discrepancy.to_string()),
        ];
        for (k, v) in rows {
            t.push(vec![k.to_string(), v]);
        }
        t
    }

    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::new(
                "full dimension",
                self.full_dim == 16_777_216,
                format!("2^24 = {}", self.full_dim),
            ),
            Check::new(
                "feasible count",
                self.feasible_count == 6561,
                format!(
                    "product of binomials = {}; published value {} flagged: {}",
                    self.feasible_count, self.published_count, self.discrepancy
                ),
            ),
        ]
    }

    pub fn report(&self, seed: u64) -> Result<ExperimentReport> {
        let mut r = ExperimentReport::new("reduction", seed);
        r.csv("reduction.csv", &self.table(seed))?;
        r.checks = self.checks();
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::calibrated_family;

    #[test]
    fn canonical_numbers() {
        let r = run_reduction_table(&calibrated_family()).unwrap();
        assert_eq!((r.full_dim, r.feasible_count), (16_777_216, 6561));
        assert!(r.discrepancy);
        assert!((r.reduction_factor - 2557.1).abs() < 0.1);
        let t = CsvTable::parse(&r.table(42).to_csv_string().unwrap()).unwrap();
        assert_eq!(t.get::<u64>(2, "value").unwrap(), 2916);
    }
}
