//! Problem instances, the node-major bit layout, the conflict objective and
//! the constraint metrics.
//!
//! An allocation is an `n x m` binary matrix flattened node-major: qubit
//! `i * m + c` is set when channel `c` is assigned to node `i`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Penalty weight used by the standard QAOA baseline unless overridden.
pub const DEFAULT_LAMBDA: f64 = 5.0;

/// Largest `n * m` for which search-space sizes are reported exactly.
pub const EXACT_COUNT_MAX_QUBITS: usize = 63;

/// Multi-channel coloring instance on an interference graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    name: String,
    n: usize,
    m: usize,
    edges: Vec<(usize, usize)>,
    demands: Vec<usize>,
    capacities: Option<Vec<usize>>,
}

impl ProblemInstance {
    /// Validates and builds an instance. Edges are normalized to `(lo, hi)`
    /// and sorted.
    pub fn new(
        name: impl Into<String>,
        m: usize,
        edges: &[(usize, usize)],
        demands: Vec<usize>,
        capacities: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = demands.len();
        if m == 0 {
            return Err(invalid("m", "channel count must be at least 1"));
        }
        if m > 64 {
            return Err(invalid("m", "channel count above 64 is not supported"));
        }
        for (i, &k) in demands.iter().enumerate() {
            if k == 0 || k > m {
                return Err(invalid(
                    &format!("demands[{i}]"),
                    &format!("demand {k} outside 1..={m}"),
                ));
            }
        }
        let mut norm = Vec::with_capacity(edges.len());
        for (e, &(a, b)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return Err(invalid(
                    &format!("edges[{e}]"),
                    &format!("endpoint out of range for n={n}"),
                ));
            }
            if a == b {
                return Err(invalid(&format!("edges[{e}]"), "self-loop"));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        for w in norm.windows(2) {
            if w[0] == w[1] {
                return Err(invalid(
                    "edges",
                    &format!("duplicate edge ({}, {})", w[0].0, w[0].1),
                ));
            }
        }
        if let Some(caps) = &capacities {
            if caps.len() != m {
                return Err(invalid(
                    "capacities",
                    &format!("expected {m} entries, got {}", caps.len()),
                ));
            }
            for (c, &l) in caps.iter().enumerate() {
                if l > n {
                    return Err(invalid(
                        &format!("capacities[{c}]"),
                        &format!("capacity {l} exceeds node count {n}"),
                    ));
                }
            }
            let sk: usize = demands.iter().sum();
            let sl: usize = caps.iter().sum();
            if sk != sl {
                return Err(invalid(
                    "capacities",
                    &format!("sum of capacities {sl} differs from sum of demands {sk}"),
                ));
            }
        }
        Ok(Self {
            name: name.into(),
            n,
            m,
            edges: norm,
            demands,
            capacities,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
    pub fn demands(&self) -> &[usize] {
        &self.demands
    }
    pub fn capacities(&self) -> Option<&[usize]> {
        self.capacities.as_deref()
    }
    pub fn num_qubits(&self) -> usize {
        self.n * self.m
    }

    /// Qubit position of `x_{i,c}`.
    #[inline]
    pub fn qubit(&self, node: usize, channel: usize) -> usize {
        node * self.m + channel
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == node || b == node)
            .count()
    }

    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == node {
                    Some(b)
                } else if b == node {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Same graph and demands with the given capacities attached.
    pub fn with_capacities(&self, capacities: Vec<usize>) -> Result<Self> {
        Self::new(
            self.name.clone(),
            self.m,
            &self.edges,
            self.demands.clone(),
            Some(capacities),
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn check_len(&self, x: &AllocationBits) -> Result<()> {
        if x.n() != self.n || x.m() != self.m {
            return Err(Error::Dimension {
                expected: self.num_qubits(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Loads an instance from its JSON file.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        raw.into_instance()
    }

    pub fn to_json_string(&self) -> String {
        let file = InstanceFile {
            name: self.name.clone(),
            n: self.n,
            m: self.m,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            demands: self.demands.clone(),
            capacities: self.capacities.clone(),
        };
        serde_json::to_string_pretty(&file).expect("instance serializes")
    }
}

fn invalid(field: &str, reason: &str) -> Error {
    Error::InvalidField {
        field: field.to_string(),
        reason: reason.to_string(),
    }
}

/// On-disk instance schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub edges: Vec<[usize; 2]>,
    pub demands: Vec<usize>,
    #[serde(default)]
    pub capacities: Option<Vec<usize>>,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<ProblemInstance> {
        if self.demands.len() != self.n {
            return Err(invalid(
                "demands",
                &format!("expected {} entries (n), got {}", self.n, self.demands.len()),
            ));
        }
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        ProblemInstance::new(self.name, self.m, &edges, self.demands, self.capacities)
    }
}

/// Length-`n*m` bitstring in node-major layout.
///
/// Text form lists each node's register as `x_{i,0} .. x_{i,m-1}` left to
/// right, registers separated by `|`, e.g. `110|010`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AllocationBits {
    n: usize,
    m: usize,
    words: Vec<u64>,
}

impl AllocationBits {
    pub fn zeros(n: usize, m: usize) -> Self {
        let words = vec![0u64; (n * m).div_ceil(64).max(1)];
        Self { n, m, words }
    }

    /// Builds from per-node channel masks (bit `c` of `masks[i]` is `x_{i,c}`).
    pub fn from_node_masks(m: usize, masks: &[u64]) -> Self {
        let mut x = Self::zeros(masks.len(), m);
        for (i, &mask) in masks.iter().enumerate() {
            x.set_node_mask(i, mask);
        }
        x
    }

    /// Builds from a full-space basis index (`n * m <= 64`).
    pub fn from_index(n: usize, m: usize, index: u64) -> Self {
        assert!(n * m <= 64, "index form needs n*m <= 64");
        let mut x = Self::zeros(n, m);
        x.words[0] = index;
        x
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn len(&self) -> usize {
        self.n * self.m
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, node: usize, channel: usize) -> bool {
        let q = node * self.m + channel;
        (self.words[q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, node: usize, channel: usize, value: bool) {
        let q = node * self.m + channel;
        if value {
            self.words[q / 64] |= 1 << (q % 64);
        } else {
            self.words[q / 64] &= !(1 << (q % 64));
        }
    }

    /// Channel mask of one node's register.
    #[inline]
    pub fn node_mask(&self, node: usize) -> u64 {
        if self.m == 64 {
            return self.words[node];
        }
        let start = node * self.m;
        let (w, off) = (start / 64, start % 64);
        let low = self.words[w] >> off;
        let combined = if off + self.m > 64 {
            low | (self.words[w + 1] << (64 - off))
        } else {
            low
        };
        combined & ((1u64 << self.m) - 1)
    }

    pub fn set_node_mask(&mut self, node: usize, mask: u64) {
        for c in 0..self.m {
            self.set(node, c, (mask >> c) & 1 == 1);
        }
    }

    pub fn node_weight(&self, node: usize) -> usize {
        self.node_mask(node).count_ones() as usize
    }

    /// Full-space basis index; `None` when `n * m > 64`.
    pub fn to_index(&self) -> Option<u64> {
        (self.len() <= 64).then(|| self.words[0])
    }

    pub fn ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl fmt::Display for AllocationBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            if i > 0 {
                f.write_str("|")?;
            }
            for c in 0..self.m {
                f.write_str(if self.get(i, c) { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for AllocationBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AllocationBits({self})")
    }
}

impl FromStr for AllocationBits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let groups: Vec<&str> = s.trim().split('|').collect();
        let m = groups[0].len();
        if m == 0 || groups.iter().any(|g| g.len() != m) {
            return Err(Error::Domain(format!(
                "bitstring `{s}` must have equal-width registers"
            )));
        }
        let mut x = Self::zeros(groups.len(), m);
        for (i, g) in groups.iter().enumerate() {
            for (c, ch) in g.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => x.set(i, c, true),
                    _ => return Err(Error::Domain(format!("bad bit `{ch}` in `{s}`"))),
                }
            }
        }
        Ok(x)
    }
}

/// Scalar metrics of one allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub conflicts: usize,
    pub node_feasible: bool,
    pub channel_feasible: bool,
    pub deviation: usize,
    pub penalty_cost: f64,
}

/// `sum_{(i,j) in E} sum_c x_{i,c} x_{j,c}`.
pub fn conflict_count(inst: &ProblemInstance, x: &AllocationBits) -> Result<usize> {
    inst.check_len(x)?;
    Ok(inst
        .edges
        .iter()
        .map(|&(a, b)| (x.node_mask(a) & x.node_mask(b)).count_ones() as usize)
        .sum())
}

/// `sum_i |sum_c x_{i,c} - k_i|`.
pub fn node_deviation(inst: &ProblemInstance, x: &AllocationBits) -> Result<usize> {
    inst.check_len(x)?;
    Ok(inst
        .demands
        .iter()
        .enumerate()
        .map(|(i, &k)| x.node_weight(i).abs_diff(k))
        .sum())
}

pub fn node_feasible(inst: &ProblemInstance, x: &AllocationBits) -> Result<bool> {
    Ok(node_deviation(inst, x)? == 0)
}

/// Column sums of the allocation matrix.
pub fn channel_loads(inst: &ProblemInstance, x: &AllocationBits) -> Result<Vec<usize>> {
    inst.check_len(x)?;
    Ok((0..inst.m)
        .map(|c| (0..inst.n).filter(|&i| x.get(i, c)).count())
        .collect())
}

pub fn channel_feasible(inst: &ProblemInstance, x: &AllocationBits) -> Result<bool> {
    let caps = inst
        .capacities()
        .ok_or_else(|| Error::Config("instance has no channel capacities".into()))?;
    Ok(channel_loads(inst, x)? == caps)
}

/// `C(x) + lambda * sum_i (sum_c x_{i,c} - k_i)^2`.
pub fn penalty_cost<T: Scalar>(inst: &ProblemInstance, x: &AllocationBits, lambda: T) -> Result<T> {
    let conflicts = conflict_count(inst, x)?;
    let quad: usize = inst
        .demands
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let d = x.node_weight(i).abs_diff(k);
            d * d
        })
        .sum();
    Ok(T::of(conflicts as f64) + lambda * T::of(quad as f64))
}

pub fn metrics(inst: &ProblemInstance, x: &AllocationBits, lambda: f64) -> Result<MetricsReport> {
    let deviation = node_deviation(inst, x)?;
    Ok(MetricsReport {
        conflicts: conflict_count(inst, x)?,
        node_feasible: deviation == 0,
        channel_feasible: match inst.capacities() {
            Some(_) => channel_feasible(inst, x)?,
            None => false,
        },
        deviation,
        penalty_cost: penalty_cost(inst, x, lambda)?,
    })
}

/// Search-space sizes of the full register versus the node-feasible set.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpaceStats {
    /// `2^(n m)` when `n m <= 63`.
    pub full_dim: Option<u64>,
    /// `prod_i C(m, k_i)` when it fits in 64 bits.
    pub feasible_count: Option<u64>,
    pub log2_full_dim: f64,
    pub log2_feasible_count: f64,
    pub reduction_factor: f64,
    pub feasible_fraction: f64,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    acc
}

pub fn search_space_stats(inst: &ProblemInstance) -> SearchSpaceStats {
    let q = inst.num_qubits();
    let log2_full = q as f64;
    let log2_feas: f64 = inst
        .demands
        .iter()
        .map(|&k| (binomial(inst.m, k) as f64).log2())
        .sum();
    let full_dim = (q <= EXACT_COUNT_MAX_QUBITS).then(|| 1u64 << q);
    let feasible_count = inst
        .demands
        .iter()
        .try_fold(1u128, |acc, &k| acc.checked_mul(binomial(inst.m, k)))
        .and_then(|v| u64::try_from(v).ok());
    let (reduction_factor, feasible_fraction) = match (full_dim, feasible_count) {
        (Some(f), Some(c)) => (f as f64 / c as f64, c as f64 / f as f64),
        _ => (
            (log2_full - log2_feas).exp2(),
            (log2_feas - log2_full).exp2(),
        ),
    };
    SearchSpaceStats {
        full_dim,
        feasible_count,
        log2_full_dim: log2_full,
        log2_feasible_count: log2_feas,
        reduction_factor,
        feasible_fraction,
    }
}

/// Evaluates the objective directly on full-space basis indices
/// (`n * m <= 64`). Used by the full statevector engine.
#[derive(Debug, Clone)]
pub struct IndexEvaluator {
    m: usize,
    register: u64,
    edges: Vec<(u32, u32)>,
    demands: Vec<u32>,
}

impl IndexEvaluator {
    pub fn new(inst: &ProblemInstance) -> Self {
        assert!(inst.num_qubits() <= 64);
        let register = if inst.m == 64 {
            u64::MAX
        } else {
            (1u64 << inst.m) - 1
        };
        Self {
            m: inst.m,
            register,
            edges: inst
                .edges
                .iter()
                .map(|&(a, b)| (a as u32, b as u32))
                .collect(),
            demands: inst.demands.iter().map(|&k| k as u32).collect(),
        }
    }

    #[inline]
    fn node(&self, z: u64, i: u32) -> u64 {
        (z >> (i as usize * self.m)) & self.register
    }

    #[inline]
    pub fn conflicts(&self, z: u64) -> u32 {
        self.edges
            .iter()
            .map(|&(a, b)| (self.node(z, a) & self.node(z, b)).count_ones())
            .sum()
    }

    /// `sum_i (w_i - k_i)^2`.
    #[inline]
    pub fn squared_violation(&self, z: u64) -> u32 {
        self.demands
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let d = self.node(z, i as u32).count_ones().abs_diff(k);
                d * d
            })
            .sum()
    }

    #[inline]
    pub fn deviation(&self, z: u64) -> u32 {
        self.demands
            .iter()
            .enumerate()
            .map(|(i, &k)| self.node(z, i as u32).count_ones().abs_diff(k))
            .sum()
    }

    pub fn max_conflicts(&self) -> u32 {
        self.edges.len() as u32 * self.m as u32
    }

    pub fn max_squared_violation(&self) -> u32 {
        self.demands
            .iter()
            .map(|&k| {
                let d = k.max(self.m as u32 - k);
                d * d
            })
            .sum()
    }
}
