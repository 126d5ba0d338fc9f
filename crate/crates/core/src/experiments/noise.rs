//! Constraint deviation under depolarizing noise for both ansätze.

use super::family::CanonicalFamily;
use super::report::{fmt_f64, line_plot_svg, CsvTable, Series};
use super::{Check, ExperimentReport};
use crate::engine::noise::{proposed_circuit, run_trajectories, standard_circuit, NoiseModel};
use crate::engine::subspace::MixerTopology;
use crate::error::{Error, Result};
use crate::model::{node_deviation, DEFAULT_LAMBDA};
use crate::qaoa::{initial_params, optimize_from, AnsatzConfig, AnsatzKind, NelderMead, QaoaRunner};
use crate::rng::{derive_seed, DEFAULT_SEED};

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub seed: u64,
    pub nodes: usize,
    pub levels: Vec<f64>,
    pub trajectories: usize,
    pub budget: usize,
    pub shots: usize,
    pub depth: usize,
    pub lambda: f64,
    pub topology: MixerTopology,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            nodes: 5,
            levels: vec![0.0, 0.01, 0.02, 0.03, 0.04, 0.05],
            trajectories: 2000,
            budget: 80,
            shots: 1024,
            depth: 1,
            lambda: DEFAULT_LAMBDA,
            topology: MixerTopology::Complete,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRow {
    pub p_err: f64,
    pub ansatz: String,
    pub mean_deviation: f64,
    pub stderr: f64,
    pub trajectories: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseResult {
    pub config: NoiseConfig,
    pub standard_params: Vec<f64>,
    pub proposed_params: Vec<f64>,
    pub rows: Vec<NoiseRow>,
}

pub const STANDARD: &str = "standard";
pub const PROPOSED: &str = "proposed";
pub const NOISE_HEADER: [&str; 5] = ["p_err", "ansatz", "mean_deviation", "stderr", "trajectories"];

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Angles come from a noiseless optimization of each ansatz started at
/// the same random point; the circuits are then rerun under noise.
pub fn run_noise_scan(family: &CanonicalFamily, cfg: &NoiseConfig) -> Result<NoiseResult> {
    if cfg.trajectories == 0 {
        return Err(Error::Config("at least one trajectory per level is required".into()));
    }
    let inst = family.instance(cfg.nodes)?;
    let x0 = initial_params(cfg.seed, cfg.depth);
    let optimizer = NelderMead::with_budget(cfg.budget);
    let tuned = |kind: AnsatzKind| -> Result<Vec<f64>> {
        let mut config = AnsatzConfig::new(kind)
            .with_depth(cfg.depth)
            .with_shots(cfg.shots)
            .with_seed(cfg.seed);
        config.lambda = cfg.lambda;
        config.topology = cfg.topology;
        let runner = QaoaRunner::<f64>::new(&inst, config)?;
        Ok(optimize_from(&runner, &optimizer, &x0)?.best_params)
    };
    let standard_params = tuned(AnsatzKind::StandardPenalty)?;
    let proposed_params = tuned(AnsatzKind::DickeXy)?;
    let circuits = [
        (STANDARD, standard_circuit(&inst, &standard_params, cfg.lambda)?),
        (PROPOSED, proposed_circuit(&inst, &proposed_params, cfg.topology)?),
    ];
    let mut rows = Vec::new();
    for (li, &p) in cfg.levels.iter().enumerate() {
        let noise = NoiseModel::new(p)?;
        for (ai, (label, circuit)) in circuits.iter().enumerate() {
            let seed = derive_seed(cfg.seed, (li * circuits.len() + ai) as u64);
            let shots = run_trajectories(circuit, inst.n(), inst.m(), noise, cfg.trajectories, seed)?;
            let deviations = shots
                .iter()
                .map(|x| node_deviation(&inst, x).map(|d| d as f64))
                .collect::<Result<Vec<_>>>()?;
            let (mean_deviation, stderr) = mean_and_stderr(&deviations);
            rows.push(NoiseRow {
                p_err: p,
                ansatz: label.to_string(),
                mean_deviation,
                stderr,
                trajectories: cfg.trajectories,
            });
        }
    }
    Ok(NoiseResult {
        config: cfg.clone(),
        standard_params,
        proposed_params,
        rows,
    })
}

impl NoiseResult {
    pub fn series(&self, ansatz: &str) -> Vec<&NoiseRow> {
        self.rows.iter().filter(|r| r.ansatz == ansatz).collect()
    }

    pub fn table(&self) -> CsvTable {
        let mut t = CsvTable::new(self.config.seed, &NOISE_HEADER);
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ");
        t.comment(format!(
            "nodes={} standard_params={} proposed_params={} lambda={}",
            self.config.nodes,
            fmt(&self.standard_params),
            fmt(&self.proposed_params),
            self.config.lambda
        ));
        for r in &self.rows {
            t.push(vec![
                format!("{:.2}", r.p_err),
                r.ansatz.clone(),
                fmt_f64(r.mean_deviation),
                fmt_f64(r.stderr),
                r.trajectories.to_string(),
            ]);
        }
        t
    }

    pub fn parse_rows(text: &str) -> Result<(u64, Vec<NoiseRow>)> {
        let t = CsvTable::parse(text)?;
        let rows = (0..t.rows.len())
            .map(|r| {
                Ok(NoiseRow {
                    p_err: t.get(r, "p_err")?,
                    ansatz: t.get(r, "ansatz")?,
                    mean_deviation: t.get(r, "mean_deviation")?,
                    stderr: t.get(r, "stderr")?,
                    trajectories: t.get(r, "trajectories")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((t.seed, rows))
    }

    pub fn svg(&self) -> String {
        let series = [STANDARD, PROPOSED]
            .iter()
            .map(|&a| Series {
                label: a.to_string(),
                points: self
                    .series(a)
                    .iter()
                    .map(|r| (r.p_err, r.mean_deviation, r.stderr))
                    .collect(),
            })
            .collect::<Vec<_>>();
        line_plot_svg(
            "Constraint deviation under depolarizing noise",
            "error rate p_err",
            "mean deviation",
            &series,
        )
    }

    pub fn checks(&self) -> Vec<Check> {
        let proposed = self.series(PROPOSED);
        let standard = self.series(STANDARD);
        let mut checks = Vec::new();
        if let Some(first) = proposed.iter().find(|r| r.p_err == 0.0) {
            checks.push(Check::new(
                "proposed deviation at p=0",
                first.mean_deviation == 0.0,
                format!("{:.4}", first.mean_deviation),
            ));
        }
        if let Some(last) = proposed.iter().find(|r| (r.p_err - 0.05).abs() < 1e-12) {
            checks.push(Check::new(
                "proposed deviation at p=0.05 below 1.0",
                last.mean_deviation < 1.0,
                format!("{:.4} +- {:.4}", last.mean_deviation, last.stderr),
            ));
        }
        let monotone = proposed.windows(2).all(|w| {
            let tol = 2.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
            w[1].mean_deviation >= w[0].mean_deviation - tol
        });
        checks.push(Check::new(
            "proposed deviation nondecreasing within 2 stderr",
            monotone,
            proposed
                .iter()
                .map(|r| format!("{:.3}", r.mean_deviation))
                .collect::<Vec<_>>()
                .join(", "),
        ));
        let std_desc = standard
            .iter()
            .map(|r| format!("{:.3}", r.mean_deviation))
            .collect::<Vec<_>>()
            .join(", ");
        checks.push(Check::new(
            "standard deviation at least 1.0 everywhere",
            standard.iter().all(|r| r.mean_deviation >= 1.0),
            std_desc.clone(),
        ));
        checks.push(Check::new(
            "standard deviation within [1.0, 2.5]",
            standard.iter().all(|r| (1.0..=2.5).contains(&r.mean_deviation)),
            std_desc,
        ));
        let enough = self.rows.iter().all(|r| r.trajectories >= 2000);
        checks.push(Check::new(
            "trajectories per point",
            enough,
            format!("{} per point", self.config.trajectories),
        ));
        checks
    }

    pub fn report(&self) -> Result<ExperimentReport> {
        let mut r = ExperimentReport::new("noise", self.config.seed);
        r.csv("noise.csv", &self.table())?;
        r.artifact("noise.svg", self.svg());
        r.checks = self.checks();
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::calibrated_family;

    #[test]
    fn small_scan_round_trips() {
        let cfg = NoiseConfig {
            nodes: 3,
            levels: vec![0.0, 0.05],
            trajectories: 50,
            budget: 5,
            shots: 64,
            ..NoiseConfig::default()
        };
        let r = run_noise_scan(&calibrated_family(), &cfg).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert_eq!(r.series(PROPOSED)[0].mean_deviation, 0.0);
        let text = r.table().to_csv_string().unwrap();
        let (seed, rows) = NoiseResult::parse_rows(&text).unwrap();
        assert_eq!(seed, 42);
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[3].ansatz, PROPOSED);
        assert_eq!(run_noise_scan(&calibrated_family(), &cfg).unwrap(), r);
    }

    #[test]
    fn stderr_of_constant_is_zero() {
        assert_eq!(mean_and_stderr(&[2.0, 2.0, 2.0]), (2.0, 0.0));
    }
}
