//! Shot sampling and measurement histograms.

use crate::error::{Error, Result};
use crate::model::{
    channel_feasible, conflict_count, node_deviation, penalty_cost, AllocationBits,
    ProblemInstance,
};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;
use num_complex::Complex;
use rand::Rng as _;
use std::collections::BTreeMap;

/// Draws `shots` i.i.d. outcomes from `|amplitude|^2` and returns counts per
/// basis index. Uniforms are drawn in one seeded stream, sorted, and matched
/// against a single sequential sweep of the cumulative distribution.
pub fn sample_indices<T: Scalar>(
    amplitudes: &[Complex<T>],
    shots: usize,
    seed: u64,
) -> Result<BTreeMap<usize, u64>> {
    if shots == 0 {
        return Err(Error::Domain("shots must be positive".into()));
    }
    let total: f64 = amplitudes.iter().map(|a| a.norm_sqr().to_f64_lossy()).sum();
    if !(total > 0.0) {
        return Err(Error::Domain("cannot sample from a zero state".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut targets: Vec<f64> = (0..shots).map(|_| rng.gen::<f64>() * total).collect();
    targets.sort_by(|a, b| a.partial_cmp(b).expect("finite uniforms"));

    let mut counts = BTreeMap::new();
    let mut cumulative = 0.0;
    let mut t = 0;
    let mut last_nonzero = 0;
    for (idx, a) in amplitudes.iter().enumerate() {
        let p = a.norm_sqr().to_f64_lossy();
        if p <= 0.0 {
            continue;
        }
        last_nonzero = idx;
        cumulative += p;
        let start = t;
        while t < shots && targets[t] < cumulative {
            t += 1;
        }
        if t > start {
            *counts.entry(idx).or_insert(0) += (t - start) as u64;
        }
        if t == shots {
            break;
        }
    }
    // rounding leftovers land on the last outcome with support
    if t < shots {
        *counts.entry(last_nonzero).or_insert(0) += (shots - t) as u64;
    }
    Ok(counts)
}

/// Measured bitstrings with their shot counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SampleHistogram {
    counts: BTreeMap<AllocationBits, u64>,
    shots: u64,
}

impl SampleHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: AllocationBits, count: u64) {
        *self.counts.entry(x).or_insert(0) += count;
        self.shots += count;
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AllocationBits, u64)> {
        self.counts.iter().map(|(k, &v)| (k, v))
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, x: &AllocationBits) -> u64 {
        self.counts.get(x).copied().unwrap_or(0)
    }

    fn is_feasible(inst: &ProblemInstance, x: &AllocationBits, with_channels: bool) -> bool {
        node_deviation(inst, x).map(|d| d == 0).unwrap_or(false)
            && (!with_channels || channel_feasible(inst, x).unwrap_or(false))
    }

    /// Shot fraction with zero node deviation.
    pub fn node_feasibility_ratio(&self, inst: &ProblemInstance) -> f64 {
        self.ratio(|x| Self::is_feasible(inst, x, false))
    }

    /// Shot fraction meeting the channel capacities (0 without capacities).
    pub fn channel_feasibility_ratio(&self, inst: &ProblemInstance) -> f64 {
        self.ratio(|x| channel_feasible(inst, x).unwrap_or(false))
    }

    /// Shot fraction meeting demands and, when `with_channels`, capacities.
    pub fn feasibility_ratio(&self, inst: &ProblemInstance, with_channels: bool) -> f64 {
        self.ratio(|x| Self::is_feasible(inst, x, with_channels))
    }

    fn ratio(&self, pred: impl Fn(&AllocationBits) -> bool) -> f64 {
        if self.shots == 0 {
            return 0.0;
        }
        let hits: u64 = self.iter().filter(|(x, _)| pred(x)).map(|(_, c)| c).sum();
        hits as f64 / self.shots as f64
    }

    /// Lowest conflict count among feasible samples, with its bitstring.
    /// Ties resolve to the smallest bitstring.
    pub fn best_feasible(
        &self,
        inst: &ProblemInstance,
        with_channels: bool,
    ) -> Option<(usize, AllocationBits)> {
        self.counts
            .keys()
            .filter(|x| Self::is_feasible(inst, x, with_channels))
            .filter_map(|x| conflict_count(inst, x).ok().map(|c| (c, x.clone())))
            .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
    }

    pub fn mean_conflicts(&self, inst: &ProblemInstance) -> f64 {
        self.mean(|x| conflict_count(inst, x).map(|c| c as f64).unwrap_or(f64::NAN))
    }

    pub fn mean_penalty_cost(&self, inst: &ProblemInstance, lambda: f64) -> f64 {
        self.mean(|x| penalty_cost(inst, x, lambda).unwrap_or(f64::NAN))
    }

    pub fn mean_deviation(&self, inst: &ProblemInstance) -> f64 {
        self.mean(|x| node_deviation(inst, x).map(|d| d as f64).unwrap_or(f64::NAN))
    }

    /// Shot mean of an arbitrary per-sample value.
    pub fn mean(&self, f: impl Fn(&AllocationBits) -> f64) -> f64 {
        if self.shots == 0 {
            return f64::NAN;
        }
        let sum: f64 = self.iter().map(|(x, c)| f(x) * c as f64).sum();
        sum / self.shots as f64
    }
}

impl FromIterator<(AllocationBits, u64)> for SampleHistogram {
    fn from_iter<I: IntoIterator<Item = (AllocationBits, u64)>>(iter: I) -> Self {
        let mut h = Self::new();
        for (x, c) in iter {
            h.add(x, c);
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_hot_takes_every_shot() {
        let mut amps = vec![Complex::new(0.0f64, 0.0); 8];
        amps[5] = Complex::new(0.0, -1.0);
        let counts = sample_indices(&amps, 1000, 3).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts[&5], 1000);
    }

    #[test]
    fn zero_shots_rejected() {
        let amps = vec![Complex::new(1.0f64, 0.0)];
        assert!(matches!(sample_indices(&amps, 0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn same_seed_same_counts() {
        let amps: Vec<Complex<f64>> = (0..16).map(|i| Complex::new(0.25, 0.01 * i as f64)).collect();
        let a = sample_indices(&amps, 500, 9).unwrap();
        let b = sample_indices(&amps, 500, 9).unwrap();
        let c = sample_indices(&amps, 500, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.values().sum::<u64>(), 500);
    }

    #[test]
    fn frequencies_track_probabilities() {
        let amps = vec![
            Complex::new(0.5f64.sqrt(), 0.0),
            Complex::new(0.0, 0.3f64.sqrt()),
            Complex::new(0.2f64.sqrt(), 0.0),
        ];
        let n = 40_000;
        let counts = sample_indices(&amps, n, 11).unwrap();
        for (i, p) in [0.5, 0.3, 0.2].iter().enumerate() {
            let f = counts[&i] as f64 / n as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((f - p).abs() < 4.0 * sigma, "index {i}: {f} vs {p}");
        }
    }

    #[test]
    fn histogram_metrics() {
        let inst = ProblemInstance::new("t", 3, &[(0, 1)], vec![1, 1], None).unwrap();
        let h: SampleHistogram = [
            ("100|100".parse().unwrap(), 3),
            ("100|010".parse().unwrap(), 1),
            ("110|000".parse().unwrap(), 4),
        ]
        .into_iter()
        .collect();
        assert_eq!(h.shots(), 8);
        assert!((h.node_feasibility_ratio(&inst) - 0.5).abs() < 1e-12);
        assert_eq!(h.best_feasible(&inst, false).unwrap().0, 0);
        assert!((h.mean_conflicts(&inst) - 3.0 / 8.0).abs() < 1e-12);
        assert!((h.mean_deviation(&inst) - 1.0).abs() < 1e-12);
    }
}
