//! Seeded experiment drivers with CSV and SVG artifacts.

pub mod family;
pub mod heatmap;
pub mod noise;
pub mod reduction;
pub mod report;
pub mod tables;

pub use family::{calibrate_topology, Calibration, CanonicalFamily, Truncation};
pub use heatmap::{run_dual_heatmap, HeatmapConfig, HeatmapResult};
pub use noise::{run_noise_scan, NoiseConfig, NoiseResult, NoiseRow};
pub use reduction::{run_reduction_table, ReductionResult, PUBLISHED_FEASIBLE_COUNT};
pub use report::CsvTable;
pub use tables::{run_comparison_tables, ComparisonRow, ComparisonTables, Method, TablesConfig};

use crate::error::Result;
use std::fmt;
use std::path::Path;

/// Chords selected by [`calibrate_topology`] under the default truncation.
pub const CALIBRATED_CHORDS: [(usize, usize); 2] = [(0, 2), (1, 3)];

/// The calibrated family without rerunning the search.
pub fn calibrated_family() -> CanonicalFamily {
    CanonicalFamily::new(CALIBRATED_CHORDS, Truncation::ClosedRing)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    pub artifacts: Vec<Artifact>,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>, seed: u64) -> Self {
        Self {
            name: name.into(),
            seed,
            artifacts: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn artifact(&mut self, file_name: impl Into<String>, contents: String) {
        self.artifacts.push(Artifact {
            file_name: file_name.into(),
            contents,
        });
    }

    pub fn csv(&mut self, file_name: impl Into<String>, table: &CsvTable) -> Result<()> {
        let text = table.to_csv_string()?;
        self.artifact(file_name, text);
        Ok(())
    }

    pub fn get(&self, file_name: &str) -> Option<&str> {
        self.artifacts
            .iter()
            .find(|a| a.file_name == file_name)
            .map(|a| a.contents.as_str())
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        for a in &self.artifacts {
            std::fs::write(dir.join(&a.file_name), &a.contents)?;
        }
        Ok(())
    }
}
