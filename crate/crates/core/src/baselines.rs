//! Classical references: exact optimum by enumeration and a greedy heuristic.

use crate::combinatorics::{enumerate_johnson, product_basis, JohnsonBasis};
use crate::error::{Error, Result};
use crate::model::{conflict_count, node_deviation, AllocationBits, ProblemInstance};
use crate::rng::rng_from_seed;
use rand::seq::SliceRandom;
use rayon::prelude::*;

/// Largest feasible subspace either exact solver will walk.
pub const EXACT_MAX_STATES: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub optimum_conflicts: usize,
    /// Lowest-rank optimal allocation.
    pub witness: AllocationBits,
    pub optimal_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyResult {
    pub allocation: AllocationBits,
    pub conflicts: usize,
    pub unmet_demand: usize,
}

fn guard(inst: &ProblemInstance) -> Result<Vec<JohnsonBasis>> {
    let mut size: u128 = 1;
    for &k in inst.demands() {
        size = size.saturating_mul(crate::model::binomial(inst.m(), k));
    }
    if size > EXACT_MAX_STATES {
        return Err(Error::SizeGuard(format!(
            "{size} feasible allocations exceeds the exact-search limit of {EXACT_MAX_STATES}; \
             use --method greedy or a QAOA method instead"
        )));
    }
    inst.demands()
        .iter()
        .map(|&k| enumerate_johnson(inst.m(), k))
        .collect()
}

/// Exhaustive minimum of the conflict count over all node-feasible allocations.
pub fn exact_optimum(inst: &ProblemInstance) -> Result<ExactResult> {
    guard(inst)?;
    let basis = product_basis(inst)?;
    let n = inst.n();
    let edges = inst.edges();
    let conflicts_of = |r: usize| -> (u32, usize) {
        let masks: Vec<u64> = (0..n)
            .map(|i| basis.per_node()[i].state(basis.digit(r, i)))
            .collect();
        let c = edges
            .iter()
            .map(|&(a, b)| (masks[a] & masks[b]).count_ones())
            .sum();
        (c, r)
    };
    let (best, count, rank) = (0..basis.size())
        .into_par_iter()
        .map(conflicts_of)
        .fold(
            || (u32::MAX, 0u64, usize::MAX),
            |acc, (c, r)| merge(acc, (c, 1, r)),
        )
        .reduce(|| (u32::MAX, 0u64, usize::MAX), merge);
    let witness = basis.unrank(rank);
    Ok(ExactResult {
        optimum_conflicts: best as usize,
        witness,
        optimal_count: count,
    })
}

fn merge(a: (u32, u64, usize), b: (u32, u64, usize)) -> (u32, u64, usize) {
    match a.0.cmp(&b.0) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => (a.0, a.1 + b.1, a.2.min(b.2)),
    }
}

struct Search<'a> {
    johnson: &'a [JohnsonBasis],
    earlier: Vec<Vec<usize>>,
    masks: Vec<u64>,
    best: u32,
    count: u64,
    witness: Vec<u64>,
}

impl Search<'_> {
    fn visit(&mut self, node: usize, partial: u32) {
        if partial > self.best {
            return;
        }
        if node == self.masks.len() {
            if partial < self.best {
                self.best = partial;
                self.count = 0;
                self.witness = self.masks.clone();
            }
            self.count += 1;
            return;
        }
        for r in 0..self.johnson[node].size() {
            let mask = self.johnson[node].state(r);
            let added: u32 = self.earlier[node]
                .iter()
                .map(|&j| (self.masks[j] & mask).count_ones())
                .sum();
            self.masks[node] = mask;
            self.visit(node + 1, partial + added);
        }
    }
}

/// Depth-first branch and bound over nodes in index order. The partial
/// conflict count of assigned nodes is a lower bound on any completion.
pub fn exact_optimum_dfs(inst: &ProblemInstance) -> Result<ExactResult> {
    let johnson = guard(inst)?;
    let n = inst.n();
    let mut earlier = vec![Vec::new(); n];
    for &(a, b) in inst.edges() {
        earlier[b].push(a);
    }
    let mut search = Search {
        johnson: &johnson,
        earlier,
        masks: vec![0; n],
        best: u32::MAX,
        count: 0,
        witness: Vec::new(),
    };
    search.visit(0, 0);
    Ok(ExactResult {
        optimum_conflicts: search.best as usize,
        witness: AllocationBits::from_node_masks(inst.m(), &search.witness),
        optimal_count: search.count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Lowest node and channel index win remaining ties.
    #[default]
    Deterministic,
    /// Remaining ties are broken uniformly at random.
    Random(u64),
}

/// Greedy multi-coloring that accepts conflicts when no clean channel is left.
pub fn greedy_multicolor(inst: &ProblemInstance, tie_break: TieBreak) -> Result<GreedyResult> {
    let (n, m) = (inst.n(), inst.m());
    let neighbors: Vec<Vec<usize>> = (0..n).map(|i| inst.neighbors(i)).collect();
    let degree: Vec<usize> = neighbors.iter().map(Vec::len).collect();
    let second: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut s: Vec<usize> = neighbors[i]
                .iter()
                .flat_map(|&j| neighbors[j].iter().copied())
                .filter(|&j| j != i && !neighbors[i].contains(&j))
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let mut rng = match tie_break {
        TieBreak::Random(seed) => Some(rng_from_seed(seed)),
        TieBreak::Deterministic => None,
    };
    let mut x = AllocationBits::zeros(n, m);
    let mut residual = inst.demands().to_vec();
    let uses = |x: &AllocationBits, nodes: &[usize], c: usize| nodes.iter().filter(|&&j| x.get(j, c)).count();
    loop {
        let top = residual.iter().copied().max().unwrap_or(0);
        if top == 0 {
            break;
        }
        let mut nodes: Vec<usize> = (0..n).filter(|&i| residual[i] == top).collect();
        let max_deg = nodes.iter().map(|&i| degree[i]).max().unwrap_or(0);
        nodes.retain(|&i| degree[i] == max_deg);
        let node = pick(&nodes, rng.as_mut());

        let free: Vec<usize> = (0..m).filter(|&c| !x.get(node, c)).collect();
        let keyed: Vec<(usize, usize, usize)> = free
            .iter()
            .map(|&c| (uses(&x, &neighbors[node], c), uses(&x, &second[node], c), c))
            .collect();
        let best = keyed.iter().map(|&(a, b, _)| (a, b)).min().expect("m >= k leaves a free channel");
        let channels: Vec<usize> = keyed
            .iter()
            .filter(|&&(a, b, _)| (a, b) == best)
            .map(|&(_, _, c)| c)
            .collect();
        let channel = pick(&channels, rng.as_mut());
        x.set(node, channel, true);
        residual[node] -= 1;
    }
    Ok(GreedyResult {
        conflicts: conflict_count(inst, &x)?,
        unmet_demand: node_deviation(inst, &x)?,
        allocation: x,
    })
}

fn pick(sorted: &[usize], rng: Option<&mut crate::rng::Rng>) -> usize {
    match rng {
        Some(r) => *sorted.choose(r).expect("non-empty"),
        None => sorted[0],
    }
}
