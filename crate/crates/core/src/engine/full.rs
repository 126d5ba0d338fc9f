//! Full `2^(n m)` statevector for the penalty-based baseline.
//!
//! Basis index bit `i * m + c` holds qubit `x_{i,c}`.

use crate::error::{Error, Result};
use crate::model::{AllocationBits, IndexEvaluator, ProblemInstance};
use crate::sampling::{sample_indices, SampleHistogram};
use crate::scalar::Scalar;
use num_complex::Complex;
use rayon::prelude::*;

/// Memory guard: `2^26` amplitudes is 1 GiB at double precision.
pub const MAX_FULL_QUBITS: usize = 26;

/// Qubits rotated together inside one cache-resident block by the X mixer.
const BLOCK_QUBITS: usize = 12;

#[derive(Debug, Clone)]
pub struct FullState<T> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Scalar> FullState<T> {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        guard(n_qubits)?;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1usize << n_qubits];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::Domain(format!("{len} amplitudes is not a power of two")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        guard(n_qubits)?;
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn sample_indices(&self, shots: usize, seed: u64) -> Result<std::collections::BTreeMap<usize, u64>> {
        sample_indices(&self.amplitudes, shots, seed)
    }

    /// Histogram over allocations of an `n x m` layout.
    pub fn sample(&self, n: usize, m: usize, shots: usize, seed: u64) -> Result<SampleHistogram> {
        if n * m != self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                actual: n * m,
            });
        }
        Ok(self
            .sample_indices(shots, seed)?
            .into_iter()
            .map(|(z, c)| (AllocationBits::from_index(n, m, z as u64), c))
            .collect())
    }

    /// Probability mass on indices satisfying `pred`.
    pub fn probability_where(&self, pred: impl Fn(u64) -> bool + Sync) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(z, _)| pred(*z as u64))
            .map(|(_, a)| a.norm_sqr().to_f64_lossy())
            .sum()
    }
}

fn guard(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_FULL_QUBITS {
        return Err(Error::SizeGuard(format!(
            "{n_qubits} qubits exceeds the {MAX_FULL_QUBITS}-qubit statevector guard"
        )));
    }
    Ok(())
}

/// `|+>^N`.
pub fn init_plus<T: Scalar>(n_qubits: usize) -> Result<FullState<T>> {
    guard(n_qubits)?;
    let amp = T::of(2f64.powf(-(n_qubits as f64) / 2.0));
    Ok(FullState {
        n_qubits,
        amplitudes: vec![Complex::new(amp, T::zero()); 1usize << n_qubits],
    })
}

/// Per-index `(conflicts, squared violation)` key, precomputed once so that
/// repeated penalty phases are a table lookup.
#[derive(Debug, Clone)]
pub struct PenaltyTable {
    n_qubits: usize,
    levels: usize,
    max_conflicts: usize,
    keys: Vec<u16>,
}

impl PenaltyTable {
    pub fn new(inst: &ProblemInstance) -> Result<Self> {
        let n_qubits = inst.num_qubits();
        guard(n_qubits)?;
        let ev = IndexEvaluator::new(inst);
        let levels = ev.max_squared_violation() as usize + 1;
        let max_conflicts = ev.max_conflicts() as usize;
        if (max_conflicts + 1) * levels > u16::MAX as usize {
            return Err(Error::SizeGuard("penalty key space exceeds 16 bits".into()));
        }
        let mut keys = vec![0u16; 1usize << n_qubits];
        keys.par_chunks_mut(1 << 12).enumerate().for_each(|(chunk, out)| {
            let base = (chunk as u64) << 12;
            for (off, k) in out.iter_mut().enumerate() {
                let z = base + off as u64;
                *k = (ev.conflicts(z) as usize * levels + ev.squared_violation(z) as usize) as u16;
            }
        });
        Ok(Self {
            n_qubits,
            levels,
            max_conflicts,
            keys,
        })
    }

    pub fn conflicts(&self, z: usize) -> usize {
        self.keys[z] as usize / self.levels
    }

    pub fn squared_violation(&self, z: usize) -> usize {
        self.keys[z] as usize % self.levels
    }

    pub fn penalty_cost(&self, z: usize, lambda: f64) -> f64 {
        self.conflicts(z) as f64 + lambda * self.squared_violation(z) as f64
    }

    fn phases<T: Scalar>(&self, gamma: T, lambda: T) -> Vec<Complex<T>> {
        (0..=self.max_conflicts)
            .flat_map(|c| {
                (0..self.levels).map(move |p| {
                    let cost = T::of(c as f64) + lambda * T::of(p as f64);
                    Complex::from_polar(T::one(), -gamma * cost)
                })
            })
            .collect()
    }
}

/// `exp(-i gamma (C(z) + lambda * pen(z)))` on every basis state.
pub fn apply_penalty_phase<T: Scalar>(
    state: &mut FullState<T>,
    inst: &ProblemInstance,
    gamma: T,
    lambda: T,
) -> Result<()> {
    if inst.num_qubits() != state.n_qubits {
        return Err(Error::Dimension {
            expected: state.n_qubits,
            actual: inst.num_qubits(),
        });
    }
    apply_penalty_phase_table(state, &PenaltyTable::new(inst)?, gamma, lambda)
}

/// [`apply_penalty_phase`] with precomputed keys.
pub fn apply_penalty_phase_table<T: Scalar>(
    state: &mut FullState<T>,
    table: &PenaltyTable,
    gamma: T,
    lambda: T,
) -> Result<()> {
    if table.n_qubits != state.n_qubits {
        return Err(Error::Dimension {
            expected: state.n_qubits,
            actual: table.n_qubits,
        });
    }
    let phases = table.phases(gamma, lambda);
    state
        .amplitudes
        .par_chunks_mut(1 << 12)
        .zip(table.keys.par_chunks(1 << 12))
        .for_each(|(amps, keys)| {
            for (a, &k) in amps.iter_mut().zip(keys) {
                *a = *a * phases[k as usize];
            }
        });
    Ok(())
}

#[inline(always)]
fn rotate_pair<T: Scalar>(a: &mut Complex<T>, b: &mut Complex<T>, c: T, s: T) {
    let (x, y) = (*a, *b);
    *a = Complex::new(c * x.re + s * y.im, c * x.im - s * y.re);
    *b = Complex::new(c * y.re + s * x.im, c * y.im - s * x.re);
}

/// `exp(-i beta X)` on one qubit.
pub fn apply_x_rotation<T: Scalar>(state: &mut FullState<T>, qubit: usize, beta: T) {
    let (s, c) = beta.sin_cos();
        let half = 1usize << qubit;
    state.amplitudes.par_chunks_mut(half << 1).for_each(|block| {
        let (lo, hi) = block.split_at_mut(half);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            rotate_pair(a, b, c, s);
        }
    });
}

/// High qubits rotated together per tile in [`apply_x_mixer`].
const GROUP_QUBITS: usize = 6;
/// Contiguous amplitudes per tile row.
const TILE: usize = 256;

fn rotate_slices<T: Scalar>(lo: &mut [Complex<T>], hi: &mut [Complex<T>], c: T, s: T) {
    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
        rotate_pair(a, b, c, s);
    }
}

/// Rotates qubits `q0..q0 + g` of one `2^(q0 + g)` chunk, tile by tile so
/// that the `2^g` partner rows of a tile stay in cache across the `g` qubits.
fn rotate_high_group<T: Scalar>(chunk: &mut [Complex<T>], q0: usize, g: usize, c: T, s: T) {
    let stride = 1usize << q0;
    let tile = stride.min(TILE);
    for t in (0..stride).step_by(tile) {
        for q in 0..g {
            let half = 1usize << q;
            for base in (0..1usize << g).step_by(half << 1) {
                for j in base..base + half {
                    let lo_start = t + (j << q0);
                    let hi_start = t + ((j + half) << q0);
                    let (head, tail) = chunk.split_at_mut(hi_start);
                    rotate_slices(&mut head[lo_start..lo_start + tile], &mut tail[..tile], c, s);
                }
            }
        }
    }
}

fn rotate_low<T: Scalar>(block: &mut [Complex<T>], low: usize, c: T, s: T) {
    for q in 0..low {
        let half = 1usize << q;
        for pair in block.chunks_mut(half << 1) {
            let (lo, hi) = pair.split_at_mut(half);
            rotate_slices(lo, hi, c, s);
        }
    }
}

fn rotate_high<T: Scalar>(amps: &mut [Complex<T>], low: usize, n: usize, c: T, s: T) {
    let mut q0 = low;
    while q0 < n {
        let g = (n - q0).min(GROUP_QUBITS);
        amps.par_chunks_mut(1 << (q0 + g))
            .for_each(|chunk| rotate_high_group(chunk, q0, g, c, s));
        q0 += g;
    }
}

/// `prod_j exp(-i beta X_j)`. Low qubits are rotated block-wise in cache,
/// high qubits in tiled passes of several qubits each.
pub fn apply_x_mixer<T: Scalar>(state: &mut FullState<T>, beta: T) {
    let n = state.n_qubits;
    let low = n.min(BLOCK_QUBITS);
    let (s, c) = beta.sin_cos();
    state
        .amplitudes
        .par_chunks_mut(1 << low)
        .for_each(|block| rotate_low(block, low, c, s));
    rotate_high(&mut state.amplitudes, low, n, c, s);
}

/// One standard QAOA layer: penalty phase then X mixer.
pub fn apply_standard_layer<T: Scalar>(
    state: &mut FullState<T>,
    inst: &ProblemInstance,
    gamma: T,
    beta: T,
    lambda: T,
) -> Result<()> {
    apply_penalty_phase(state, inst, gamma, lambda)?;
    apply_x_mixer(state, beta);
    Ok(())
}

/// [`apply_standard_layer`] with precomputed keys. The phase is fused into
/// the cache-resident part of the mixer.
pub fn apply_standard_layer_table<T: Scalar>(
    state: &mut FullState<T>,
    table: &PenaltyTable,
    gamma: T,
    beta: T,
    lambda: T,
) -> Result<()> {
    layer_from(state, table, gamma, beta, lambda, None)
}

fn layer_from<T: Scalar>(
    state: &mut FullState<T>,
    table: &PenaltyTable,
    gamma: T,
    beta: T,
    lambda: T,
    uniform: Option<T>,
) -> Result<()> {
    if table.n_qubits != state.n_qubits {
        return Err(Error::Dimension {
            expected: state.n_qubits,
            actual: table.n_qubits,
        });
    }
    let n = state.n_qubits;
    let low = n.min(BLOCK_QUBITS);
    let phases = table.phases(gamma, lambda);
    let (s, c) = beta.sin_cos();
    state
        .amplitudes
        .par_chunks_mut(1 << low)
        .zip(table.keys.par_chunks(1 << low))
        .for_each(|(block, keys)| {
            match uniform {
                Some(amp) => {
                    for (a, &k) in block.iter_mut().zip(keys) {
                        *a = phases[k as usize] * amp;
                    }
                }
                None => {
                    for (a, &k) in block.iter_mut().zip(keys) {
                        *a = *a * phases[k as usize];
                    }
                }
            }
            rotate_low(block, low, c, s);
        });
    rotate_high(&mut state.amplitudes, low, n, c, s);
    Ok(())
}

/// Depth-`p` standard ansatz state from `|+>^N`, one `(gamma, beta)` per layer.
pub fn standard_state<T: Scalar>(
    table: &PenaltyTable,
    layers: &[(T, T)],
    lambda: T,
) -> Result<FullState<T>> {
    let n = table.n_qubits;
    let Some((&(g0, b0), rest)) = layers.split_first() else {
        return init_plus(n);
    };
    let mut state = FullState {
        n_qubits: n,
        amplitudes: vec![Complex::new(T::zero(), T::zero()); 1usize << n],
    };
    let amp = T::of(2f64.powf(-(n as f64) / 2.0));
    layer_from(&mut state, table, g0, b0, lambda, Some(amp))?;
    for &(g, b) in rest {
        layer_from(&mut state, table, g, b, lambda, None)?;
    }
    Ok(state)
}
