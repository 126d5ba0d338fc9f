//! Feasible bases: per-node Johnson spaces, their tensor product, Dicke
//! amplitudes, and the dual basis of allocation matrices with prescribed
//! row and column sums.

use crate::error::{Error, Result};
use crate::model::{binomial, AllocationBits, ProblemInstance};
use crate::scalar::Scalar;
use std::collections::{HashMap, VecDeque};

/// Largest register width accepted by [`enumerate_johnson`].
pub const MAX_REGISTER_WIDTH: usize = 30;

/// All `m`-bit masks of popcount `k` in colexicographic (increasing) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JohnsonBasis {
    m: usize,
    k: usize,
    states: Vec<u64>,
}

pub fn enumerate_johnson(m: usize, k: usize) -> Result<JohnsonBasis> {
    if k > m {
        return Err(Error::Domain(format!("weight {k} exceeds register width {m}")));
    }
    if m > MAX_REGISTER_WIDTH {
        return Err(Error::Domain(format!(
            "register width {m} exceeds {MAX_REGISTER_WIDTH}"
        )));
    }
    let size = binomial(m, k) as usize;
    let mut states = Vec::with_capacity(size);
    if k == 0 {
        states.push(0);
    } else {
        // Gosper's hack walks same-popcount masks in increasing order.
        let limit = 1u64 << m;
        let mut v: u64 = (1u64 << k) - 1;
        while v < limit {
            states.push(v);
            let t = v | (v - 1);
            let w = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
            v = w;
        }
    }
    debug_assert_eq!(states.len(), size);
    Ok(JohnsonBasis { m, k, states })
}

impl JohnsonBasis {
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn size(&self) -> usize {
        self.states.len()
    }
    pub fn states(&self) -> &[u64] {
        &self.states
    }
    pub fn state(&self, r: usize) -> u64 {
        self.states[r]
    }

    /// Colex rank through the combinatorial number system.
    pub fn rank(&self, mask: u64) -> Option<usize> {
        if mask >> self.m != 0 || mask.count_ones() as usize != self.k {
            return None;
        }
        let mut r = 0u128;
        let mut rest = mask;
        let mut j = 0;
        while rest != 0 {
            let pos = rest.trailing_zeros() as usize;
            r += binomial(pos, j + 1);
            j += 1;
            rest &= rest - 1;
        }
        Some(r as usize)
    }
}

/// Tensor product of the per-node Johnson spaces, indexed in mixed radix
/// with node 0 as the most significant digit.
#[derive(Debug, Clone)]
pub struct ProductBasis {
    n: usize,
    m: usize,
    per_node: Vec<JohnsonBasis>,
    strides: Vec<usize>,
    size: usize,
}

pub fn product_basis(inst: &ProblemInstance) -> Result<ProductBasis> {
    let per_node = inst
        .demands()
        .iter()
        .map(|&k| enumerate_johnson(inst.m(), k))
        .collect::<Result<Vec<_>>>()?;
    let mut strides = vec![0usize; per_node.len()];
    let mut acc: usize = 1;
    for i in (0..per_node.len()).rev() {
        strides[i] = acc;
        acc = acc.checked_mul(per_node[i].size()).ok_or_else(|| {
            Error::SizeGuard("feasible subspace does not fit in memory".into())
        })?;
    }
    Ok(ProductBasis {
        n: inst.n(),
        m: inst.m(),
        per_node,
        strides,
        size: acc,
    })
}

impl ProductBasis {
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn size(&self) -> usize {
        self.size
    }
    pub fn per_node(&self) -> &[JohnsonBasis] {
        &self.per_node
    }
    pub fn stride(&self, node: usize) -> usize {
        self.strides[node]
    }

    /// Local Johnson index of `node` inside product index `r`.
    #[inline]
    pub fn digit(&self, r: usize, node: usize) -> usize {
        (r / self.strides[node]) % self.per_node[node].size()
    }

    pub fn unrank(&self, r: usize) -> AllocationBits {
        assert!(r < self.size, "rank {r} out of range {}", self.size);
        let masks: Vec<u64> = (0..self.n)
            .map(|i| self.per_node[i].state(self.digit(r, i)))
            .collect();
        AllocationBits::from_node_masks(self.m, &masks)
    }

    pub fn rank(&self, x: &AllocationBits) -> Result<usize> {
        if x.n() != self.n || x.m() != self.m {
            return Err(Error::Dimension {
                expected: self.n * self.m,
                actual: x.len(),
            });
        }
        let mut r = 0;
        for i in 0..self.n {
            let local = self.per_node[i]
                .rank(x.node_mask(i))
                .ok_or_else(|| Error::NotInBasis(x.to_string()))?;
            r += local * self.strides[i];
        }
        Ok(r)
    }
}

/// Allocation matrices meeting both row sums `k_i` and column sums `L_c`,
/// sorted by node masks (node 0 first).
#[derive(Debug, Clone)]
pub struct DualBasis {
    n: usize,
    m: usize,
    states: Vec<AllocationBits>,
    index: HashMap<AllocationBits, usize>,
}

fn balanced_capacities(inst: &ProblemInstance) -> Result<&[usize]> {
    let caps = inst
        .capacities()
        .ok_or_else(|| Error::Config("dual basis needs channel capacities".into()))?;
    let sk: usize = inst.demands().iter().sum();
    let sl: usize = caps.iter().sum();
    if sk != sl {
        return Err(Error::Config(format!(
            "unbalanced sums: demands {sk}, capacities {sl}"
        )));
    }
    Ok(caps)
}

pub fn enumerate_dual_basis(inst: &ProblemInstance) -> Result<DualBasis> {
    let caps = balanced_capacities(inst)?;
    let rows: Vec<JohnsonBasis> = inst
        .demands()
        .iter()
        .map(|&k| enumerate_johnson(inst.m(), k))
        .collect::<Result<_>>()?;
    let mut remaining = caps.to_vec();
    let mut chosen = vec![0u64; inst.n()];
    let mut states = Vec::new();
    backtrack(0, &rows, &mut remaining, &mut chosen, inst.m(), &mut states);
    let index = states
        .iter()
        .enumerate()
        .map(|(r, x)| (x.clone(), r))
        .collect();
    Ok(DualBasis {
        n: inst.n(),
        m: inst.m(),
        states,
        index,
    })
}

fn backtrack(
    row: usize,
    rows: &[JohnsonBasis],
    remaining: &mut [usize],
    chosen: &mut [u64],
    m: usize,
    out: &mut Vec<AllocationBits>,
) {
    let n = rows.len();
    if row == n {
        if remaining.iter().all(|&l| l == 0) {
            out.push(AllocationBits::from_node_masks(m, chosen));
        }
        return;
    }
    let rows_left_after = n - row - 1;
    'masks: for &mask in rows[row].states() {
        for (c, &cap) in remaining.iter().enumerate() {
            let used = ((mask >> c) & 1) as usize;
            // capacity left after this row must fit in the remaining rows
            if used > cap || cap - used > rows_left_after {
                continue 'masks;
            }
        }
        for (c, cap) in remaining.iter_mut().enumerate() {
            *cap -= ((mask >> c) & 1) as usize;
        }
        chosen[row] = mask;
        backtrack(row + 1, rows, remaining, chosen, m, out);
        for (c, cap) in remaining.iter_mut().enumerate() {
            *cap += ((mask >> c) & 1) as usize;
        }
    }
}

impl DualBasis {
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn size(&self) -> usize {
        self.states.len()
    }
    pub fn states(&self) -> &[AllocationBits] {
        &self.states
    }
    pub fn state(&self, r: usize) -> &AllocationBits {
        &self.states[r]
    }
    pub fn rank(&self, x: &AllocationBits) -> Result<usize> {
        self.index
            .get(x)
            .copied()
            .ok_or_else(|| Error::NotInBasis(x.to_string()))
    }
}

/// Row-major greedy fill on raw demand/capacity vectors: nodes ascending,
/// channels ascending, a one is placed whenever both residuals are positive.
pub fn greedy_fill(demands: &[usize], capacities: &[usize]) -> Result<AllocationBits> {
    let m = capacities.len();
    let mut x = AllocationBits::zeros(demands.len(), m);
    let mut rows = demands.to_vec();
    let mut cols = capacities.to_vec();
    for (i, row) in rows.iter_mut().enumerate() {
        for (c, col) in cols.iter_mut().enumerate() {
            if *row > 0 && *col > 0 {
                x.set(i, c, true);
                *row -= 1;
                *col -= 1;
            }
        }
    }
    if rows.iter().any(|&r| r > 0) || cols.iter().any(|&c| c > 0) {
        return Err(Error::InfeasibleFill { rows, cols });
    }
    Ok(x)
}

/// Canonical dual-feasible start `X0`. Falls back to the first member of the
/// dual basis when the greedy traversal strands demand.
pub fn greedy_dual_fill(inst: &ProblemInstance) -> Result<AllocationBits> {
    let caps = balanced_capacities(inst)?;
    match greedy_fill(inst.demands(), caps) {
        Ok(x) => Ok(x),
        Err(Error::InfeasibleFill { .. }) => {
            let basis = enumerate_dual_basis(inst)?;
            basis.states.first().cloned().ok_or_else(|| {
                Error::Config("no allocation satisfies both demands and capacities".into())
            })
        }
        Err(e) => Err(e),
    }
}

/// The 2x2 swap move on nodes `(i, j)` and channels `(c, c2)`: returns the
/// partner allocation when the block reads `[1 0; 0 1]` or `[0 1; 1 0]`.
pub fn plaquette_partner(
    x: &AllocationBits,
    i: usize,
    j: usize,
    c: usize,
    c2: usize,
) -> Option<AllocationBits> {
    let (a, b, d, e) = (x.get(i, c), x.get(i, c2), x.get(j, c), x.get(j, c2));
    let diagonal = a && !b && !d && e;
    let anti = !a && b && d && !e;
    if !(diagonal || anti) {
        return None;
    }
    let mut y = x.clone();
    y.set(i, c, !a);
    y.set(i, c2, !b);
    y.set(j, c, !d);
    y.set(j, c2, !e);
    Some(y)
}

/// All plaquettes `(i < j, c < c2)` in lexicographic order.
pub fn plaquettes(n: usize, m: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for c in 0..m {
                for c2 in c + 1..m {
                    out.push((i, j, c, c2));
                }
            }
        }
    }
    out
}

/// Dual-basis ranks reachable from `start` through plaquette moves, sorted.
pub fn plaquette_component(basis: &DualBasis, start: &AllocationBits) -> Result<Vec<usize>> {
    let s = basis.rank(start)?;
    let moves = plaquettes(basis.n, basis.m);
    let mut seen = vec![false; basis.size()];
    let mut queue = VecDeque::from([s]);
    seen[s] = true;
    while let Some(r) = queue.pop_front() {
        for &(i, j, c, c2) in &moves {
            if let Some(y) = plaquette_partner(&basis.states[r], i, j, c, c2) {
                let t = basis.rank(&y)?;
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
    }
    Ok((0..basis.size()).filter(|&r| seen[r]).collect())
}

/// Equal superposition over the weight-`k` masks of an `m`-qubit register.
#[derive(Debug, Clone)]
pub struct DickeVector<T> {
    support: JohnsonBasis,
    amplitude: T,
}

pub fn dicke<T: Scalar>(m: usize, k: usize) -> Result<DickeVector<T>> {
    if k == 0 || k > m {
        return Err(Error::Domain(format!("Dicke weight {k} outside 1..={m}")));
    }
    let support = enumerate_johnson(m, k)?;
    let amplitude = T::one() / T::of(support.size() as f64).sqrt();
    Ok(DickeVector { support, amplitude })
}

impl<T: Scalar> DickeVector<T> {
    pub fn m(&self) -> usize {
        self.support.m()
    }
    pub fn k(&self) -> usize {
        self.support.k()
    }
    pub fn amplitude(&self) -> T {
        self.amplitude
    }
    pub fn support(&self) -> &JohnsonBasis {
        &self.support
    }

    /// Dense `2^m` real amplitude vector.
    pub fn to_dense(&self) -> Vec<T> {
        let mut v = vec![T::zero(); 1usize << self.m()];
        for &s in self.support.states() {
            v[s as usize] = self.amplitude;
        }
        v
    }
}
