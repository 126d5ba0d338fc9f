//! Statevector engine restricted to an enumerated feasible basis.
//!
//! Amplitudes live only on basis members, so support outside the feasible
//! set is zero by construction. Mixers are applied as exact unitaries on
//! that space: per-node XY propagators for the Johnson product basis, and
//! ordered plaquette rotations for the dual basis.

use crate::combinatorics::{
    dicke, plaquette_partner, plaquettes, DualBasis, JohnsonBasis, ProductBasis,
};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, SymmetricEigen};
use crate::model::{conflict_count, AllocationBits, ProblemInstance};
use crate::sampling::{sample_indices, SampleHistogram};
use crate::scalar::Scalar;
use num_complex::Complex;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::Arc;

/// Enumerated basis a [`SubspaceState`] is expressed in.
pub trait SubspaceBasis: Sync {
    fn n(&self) -> usize;
    fn m(&self) -> usize;
    fn size(&self) -> usize;
    fn allocation(&self, r: usize) -> AllocationBits;
    fn rank_of(&self, x: &AllocationBits) -> Result<usize>;
}

impl SubspaceBasis for ProductBasis {
    fn n(&self) -> usize {
        ProductBasis::n(self)
    }
    fn m(&self) -> usize {
        ProductBasis::m(self)
    }
    fn size(&self) -> usize {
        ProductBasis::size(self)
    }
    fn allocation(&self, r: usize) -> AllocationBits {
        self.unrank(r)
    }
    fn rank_of(&self, x: &AllocationBits) -> Result<usize> {
        self.rank(x)
    }
}

impl SubspaceBasis for DualBasis {
    fn n(&self) -> usize {
        DualBasis::n(self)
    }
    fn m(&self) -> usize {
        DualBasis::m(self)
    }
    fn size(&self) -> usize {
        DualBasis::size(self)
    }
    fn allocation(&self, r: usize) -> AllocationBits {
        self.state(r).clone()
    }
    fn rank_of(&self, x: &AllocationBits) -> Result<usize> {
        self.rank(x)
    }
}

/// Amplitudes over the members of `basis`.
#[derive(Debug, Clone)]
pub struct SubspaceState<'b, T, B> {
    basis: &'b B,
    amplitudes: Vec<Complex<T>>,
}

impl<'b, T: Scalar, B: SubspaceBasis> SubspaceState<'b, T, B> {
    pub fn from_amplitudes(basis: &'b B, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.len() != basis.size() {
            return Err(Error::Dimension {
                expected: basis.size(),
                actual: amplitudes.len(),
            });
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn basis(&self) -> &'b B {
        self.basis
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    /// Sequential sum so the value is independent of thread count.
    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability(&self, r: usize) -> T {
        self.amplitudes[r].norm_sqr()
    }

    /// Embeds into the full `2^(n m)` register (`n m <= 26`).
    pub fn to_full(&self) -> Result<Vec<Complex<T>>> {
        let q = self.basis.n() * self.basis.m();
        if q > 26 {
            return Err(Error::SizeGuard(format!("{q} qubits exceeds the 26-qubit guard")));
        }
        let mut full = vec![Complex::new(T::zero(), T::zero()); 1usize << q];
        for (r, a) in self.amplitudes.iter().enumerate() {
            let idx = self.basis.allocation(r).to_index().expect("n*m <= 26");
            full[idx as usize] = *a;
        }
        Ok(full)
    }

    /// Multinomial shot draw from `|amplitude|^2`.
    pub fn sample(&self, shots: usize, seed: u64) -> Result<SampleHistogram> {
        let counts = sample_indices(&self.amplitudes, shots, seed)?;
        Ok(counts
            .into_iter()
            .map(|(r, c)| (self.basis.allocation(r), c))
            .collect())
    }

    /// `<H_P>` from the amplitudes.
    pub fn expected_cost(&self, costs: &CostTable) -> T {
        self.amplitudes
            .iter()
            .zip(&costs.conflicts)
            .map(|(a, &c)| a.norm_sqr() * T::of(c as f64))
            .sum()
    }
}

/// Uniform superposition `prod_i |D^m_{k_i}>` over the product basis.
pub fn init_dicke_product<'b, T: Scalar>(
    inst: &ProblemInstance,
    basis: &'b ProductBasis,
) -> Result<SubspaceState<'b, T, ProductBasis>> {
    if inst.n() != basis.n() || inst.m() != basis.m() {
        return Err(Error::Dimension {
            expected: inst.num_qubits(),
            actual: basis.n() * basis.m(),
        });
    }
    let mut amp = T::one();
    for &k in inst.demands() {
        amp = amp * dicke::<T>(inst.m(), k)?.amplitude();
    }
    Ok(SubspaceState {
        basis,
        amplitudes: vec![Complex::new(amp, T::zero()); basis.size()],
    })
}

/// Computational basis state `|x0>`.
pub fn init_basis_state<'b, T: Scalar, B: SubspaceBasis>(
    basis: &'b B,
    x0: &AllocationBits,
) -> Result<SubspaceState<'b, T, B>> {
    let r = basis.rank_of(x0)?;
    let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); basis.size()];
    amplitudes[r] = Complex::new(T::one(), T::zero());
    Ok(SubspaceState { basis, amplitudes })
}

/// Conflict count of every basis member, computed once per basis.
#[derive(Debug, Clone)]
pub struct CostTable {
    conflicts: Vec<u32>,
    max: u32,
}

impl CostTable {
    pub fn new<B: SubspaceBasis>(inst: &ProblemInstance, basis: &B) -> Result<Self> {
        let conflicts = (0..basis.size())
            .into_par_iter()
            .map(|r| conflict_count(inst, &basis.allocation(r)).map(|c| c as u32))
            .collect::<Result<Vec<u32>>>()?;
        let max = conflicts.iter().copied().max().unwrap_or(0);
        Ok(Self { conflicts, max })
    }

    pub fn conflicts(&self) -> &[u32] {
        &self.conflicts
    }

    pub fn get(&self, r: usize) -> u32 {
        self.conflicts[r]
    }

    pub fn mean(&self) -> f64 {
        let s: u64 = self.conflicts.iter().map(|&c| c as u64).sum();
        s as f64 / self.conflicts.len() as f64
    }
}

/// `amplitude[r] *= exp(-i gamma C(r))`.
pub fn apply_cost_phase<T: Scalar, B: SubspaceBasis>(
    state: &mut SubspaceState<'_, T, B>,
    costs: &CostTable,
    gamma: T,
) -> Result<()> {
    if costs.conflicts.len() != state.amplitudes.len() {
        return Err(Error::Dimension {
            expected: state.amplitudes.len(),
            actual: costs.conflicts.len(),
        });
    }
    let table: Vec<Complex<T>> = (0..=costs.max)
        .map(|c| Complex::from_polar(T::one(), -gamma * T::of(c as f64)))
        .collect();
    state
        .amplitudes
        .par_iter_mut()
        .zip(costs.conflicts.par_iter())
        .for_each(|(a, &c)| *a = *a * table[c as usize]);
    Ok(())
}

/// Intra-register qubit pairs the XY mixer couples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MixerTopology {
    /// Every pair of channels in a register.
    #[default]
    Complete,
    /// Cyclically adjacent channels only.
    Ring,
}

impl MixerTopology {
    pub fn pairs(self, m: usize) -> Vec<(usize, usize)> {
        match self {
            MixerTopology::Complete => (0..m)
                .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
                .collect(),
            MixerTopology::Ring => match m {
                0 | 1 => Vec::new(),
                2 => vec![(0, 1)],
                _ => (0..m).map(|a| (a.min((a + 1) % m), a.max((a + 1) % m))).collect(),
            },
        }
    }
}

/// Restriction of `H_XY` to one node's weight-`k` masks: entry `(r, s)` is 1
/// when the masks differ by moving one excitation along a mixing pair.
pub fn restricted_xy_hamiltonian<T: Scalar>(
    johnson: &JohnsonBasis,
    topology: MixerTopology,
) -> Vec<T> {
    let pairs = topology.pairs(johnson.m());
    let d = johnson.size();
    let mut h = vec![T::zero(); d * d];
    for r in 0..d {
        for s in 0..d {
            let diff = johnson.state(r) ^ johnson.state(s);
            if diff.count_ones() != 2 {
                continue;
            }
            let a = diff.trailing_zeros() as usize;
            let b = 63 - diff.leading_zeros() as usize;
            if pairs.contains(&(a, b)) {
                h[r * d + s] = T::one();
            }
        }
    }
    h
}

/// Per-node XY mixer over a product basis, with cached eigendecompositions
/// of each distinct restricted Hamiltonian.
#[derive(Debug, Clone)]
pub struct XyMixerSpec<T> {
    topology: MixerTopology,
    dims: Vec<usize>,
    per_node: Vec<Arc<SymmetricEigen<T>>>,
}

impl<T: Scalar> XyMixerSpec<T> {
    pub fn new(basis: &ProductBasis, topology: MixerTopology) -> Self {
        let mut cache: HashMap<usize, Arc<SymmetricEigen<T>>> = HashMap::new();
        let per_node = basis
            .per_node()
            .iter()
            .map(|j| {
                cache
                    .entry(j.k())
                    .or_insert_with(|| {
                        let h = restricted_xy_hamiltonian::<T>(j, topology);
                        Arc::new(symmetric_eigen(&h, j.size()))
                    })
                    .clone()
            })
            .collect();
        Self {
            topology,
            dims: basis.per_node().iter().map(|j| j.size()).collect(),
            per_node,
        }
    }

    pub fn topology(&self) -> MixerTopology {
        self.topology
    }

    /// `exp(-i beta H_XY^(i))` on node `i`'s Johnson space.
    pub fn node_propagator(&self, node: usize, beta: T) -> Vec<Complex<T>> {
        self.per_node[node].propagator(beta)
    }
}

/// Exact `prod_i exp(-i beta H_XY^(i))` (the node terms commute).
pub fn apply_xy_mixer<T: Scalar>(
    state: &mut SubspaceState<'_, T, ProductBasis>,
    spec: &XyMixerSpec<T>,
    beta: T,
) -> Result<()> {
    let basis = state.basis;
    let dims: Vec<usize> = basis.per_node().iter().map(|j| j.size()).collect();
    if dims != spec.dims {
        return Err(Error::Config("XY mixer spec does not match the basis".into()));
    }
    let mut cache: HashMap<usize, Vec<Complex<T>>> = HashMap::new();
    for node in 0..basis.n() {
        let d = dims[node];
        if d == 1 {
            continue;
        }
        let key = Arc::as_ptr(&spec.per_node[node]) as usize;
        let u = cache
            .entry(key)
            .or_insert_with(|| spec.node_propagator(node, beta))
            .clone();
        apply_register_unitary(&mut state.amplitudes, &u, d, basis.stride(node));
    }
    Ok(())
}

/// Applies a `d x d` unitary along one mixed-radix digit of stride `s`.
fn apply_register_unitary<T: Scalar>(amps: &mut [Complex<T>], u: &[Complex<T>], d: usize, s: usize) {
    let zero = Complex::new(T::zero(), T::zero());
    amps.par_chunks_mut(d * s).for_each(|block| {
        let mut gathered = vec![zero; d];
        for t in 0..s {
            for (r, g) in gathered.iter_mut().enumerate() {
                *g = block[r * s + t];
            }
            for r in 0..d {
                let mut acc = zero;
                for (c, g) in gathered.iter().enumerate() {
                    acc += u[r * d + c] * *g;
                }
                block[r * s + t] = acc;
            }
        }
    });
}

/// Plaquettes in lexicographic `(i, j, c, c')` order with their partner
/// tables over a dual basis.
#[derive(Debug, Clone)]
pub struct PlaquetteSpec {
    plaquettes: Vec<(usize, usize, usize, usize)>,
    pairs: Vec<Vec<(u32, u32)>>,
    size: usize,
}

impl PlaquetteSpec {
    pub fn new(basis: &DualBasis) -> Result<Self> {
        let plaquettes = plaquettes(basis.n(), basis.m());
        let pairs = plaquettes
            .par_iter()
            .map(|&(i, j, c, c2)| {
                let mut out = Vec::new();
                for (r, x) in basis.states().iter().enumerate() {
                    // keep the member holding the [1 0; 0 1] block as `a`
                    if x.get(i, c) && x.get(j, c2) {
                        if let Some(y) = plaquette_partner(x, i, j, c, c2) {
                            out.push((r as u32, basis.rank(&y)? as u32));
                        }
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            plaquettes,
            pairs,
            size: basis.size(),
        })
    }

    pub fn plaquettes(&self) -> &[(usize, usize, usize, usize)] {
        &self.plaquettes
    }

    /// Partner pairs `(a, b)` of plaquette `p`.
    pub fn pairs(&self, p: usize) -> &[(u32, u32)] {
        &self.pairs[p]
    }

    /// Dense `H_mix^dual` over the basis (row-major).
    pub fn dense_hamiltonian<T: Scalar>(&self) -> Vec<T> {
        let d = self.size;
        let mut h = vec![T::zero(); d * d];
        for pairs in &self.pairs {
            for &(a, b) in pairs {
                h[a as usize * d + b as usize] += T::one();
                h[b as usize * d + a as usize] += T::one();
            }
        }
        h
    }
}

/// Ordered product of plaquette rotations `exp(-i beta H_box)`:
/// `(a, b) -> (cos b a - i sin b b, cos b b - i sin b a)` per partner pair.
pub fn apply_plaquette_layer<T: Scalar>(
    state: &mut SubspaceState<'_, T, DualBasis>,
    spec: &PlaquetteSpec,
    beta: T,
) -> Result<()> {
    if spec.size != state.amplitudes.len() {
        return Err(Error::Config("plaquette spec does not match the basis".into()));
    }
    let (s, c) = beta.sin_cos();
    let minus_is = Complex::new(T::zero(), -s);
    for pairs in &spec.pairs {
        for &(a, b) in pairs {
            let (a, b) = (a as usize, b as usize);
            let (xa, xb) = (state.amplitudes[a], state.amplitudes[b]);
            state.amplitudes[a] = xa * c + minus_is * xb;
            state.amplitudes[b] = xb * c + minus_is * xa;
        }
    }
    Ok(())
}

/// Eigendecomposition of the full dual mixer for the exact
/// `exp(-i beta H_mix^dual)` cross-check on small bases.
#[derive(Debug, Clone)]
pub struct DualMixerExact<T> {
    eigen: SymmetricEigen<T>,
}

/// Largest dual basis accepted by [`DualMixerExact`].
pub const EXACT_DUAL_MAX: usize = 2048;

impl<T: Scalar> DualMixerExact<T> {
    pub fn new(spec: &PlaquetteSpec) -> Result<Self> {
        if spec.size > EXACT_DUAL_MAX {
            return Err(Error::SizeGuard(format!(
                "dual basis of {} exceeds the exact-mixer limit {EXACT_DUAL_MAX}",
                spec.size
            )));
        }
        let h = spec.dense_hamiltonian::<T>();
        Ok(Self {
            eigen: symmetric_eigen(&h, spec.size),
        })
    }

    pub fn apply(&self, state: &mut SubspaceState<'_, T, DualBasis>, beta: T) -> Result<()> {
        let d = self.eigen.dim;
        if d != state.amplitudes.len() {
            return Err(Error::Config("exact dual mixer does not match the basis".into()));
        }
        let u = self.eigen.propagator(beta);
        let old = state.amplitudes.clone();
        for r in 0..d {
            state.amplitudes[r] = (0..d).map(|c| u[r * d + c] * old[c]).sum();
        }
        Ok(())
    }
}
