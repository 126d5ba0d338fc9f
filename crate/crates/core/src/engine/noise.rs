//! Gate-level circuits and depolarizing noise by Pauli trajectories.
//!
//! After every gate, with probability `p_err`, a uniformly random
//! non-identity Pauli is applied on the gate's support (3 choices for one
//! qubit, 15 for two). Averaging trajectories reproduces the depolarizing
//! channel for Pauli-twirled errors.
//!
//! Gate census per layer:
//! - standard ansatz: `H` on every qubit, then per layer one phase gate per
//!   qubit, one controlled phase per intra-node qubit pair (penalty
//!   cross terms) and per edge-channel (conflicts), then `RX` on every qubit;
//! - proposed ansatz: each register's Dicke state is prepared at amplitude
//!   level and charged `m - 1` two-qubit noise sites on adjacent qubits; per
//!   layer one controlled phase per edge-channel and one `XX+YY` rotation per
//!   mixing pair.

use crate::combinatorics::dicke;
use crate::engine::full::FullState;
use crate::engine::subspace::MixerTopology;
use crate::error::{Error, Result};
use crate::model::{AllocationBits, ProblemInstance};
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::scalar::Scalar;
use num_complex::Complex;
use rand::Rng as _;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
    const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
}

/// Elementary operations of a trajectory circuit.
#[derive(Debug, Clone)]
pub enum Gate<T> {
    Hadamard(usize),
    /// `exp(-i theta X)`.
    XRotation(usize, T),
    /// `exp(-i phi n)`: phase `e^{-i phi}` on `|1>`.
    Phase(usize, T),
    /// `exp(-i phi n_a n_b)`.
    ControlledPhase(usize, usize, T),
    /// `exp(-i theta (XX + YY) / 2)`: rotation between `|01>` and `|10>`.
    XyRotation(usize, usize, T),
    /// Amplitude-level Dicke state on a register that is still `|0..0>`.
    PrepareDicke { qubits: Vec<usize>, weight: usize },
    Pauli(usize, Pauli),
}

/// Where depolarizing errors can strike after an instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseSite {
    One(usize),
    Two(usize, usize),
}

#[derive(Debug, Clone)]
pub struct Instruction<T> {
    pub gate: Gate<T>,
    pub sites: Vec<NoiseSite>,
}

impl<T> Instruction<T> {
    fn noiseless(gate: Gate<T>) -> Self {
        Self {
            gate,
            sites: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Circuit<T> {
    pub n_qubits: usize,
    pub instructions: Vec<Instruction<T>>,
}

impl<T: Scalar> Circuit<T> {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            instructions: Vec::new(),
        }
    }

    /// Appends a gate whose noise site is its own support.
    pub fn push(&mut self, gate: Gate<T>) {
        let sites = match &gate {
            Gate::Hadamard(q) | Gate::XRotation(q, _) | Gate::Phase(q, _) => vec![NoiseSite::One(*q)],
            Gate::ControlledPhase(a, b, _) | Gate::XyRotation(a, b, _) => {
                vec![NoiseSite::Two(*a, *b)]
            }
            Gate::PrepareDicke { qubits, .. } => qubits
                .windows(2)
                .map(|w| NoiseSite::Two(w[0], w[1]))
                .collect(),
            Gate::Pauli(..) => Vec::new(),
        };
        self.instructions.push(Instruction { gate, sites });
    }

    pub fn push_noiseless(&mut self, gate: Gate<T>) {
        self.instructions.push(Instruction::noiseless(gate));
    }

    pub fn noise_site_count(&self) -> (usize, usize) {
        let mut one = 0;
        let mut two = 0;
        for site in self.instructions.iter().flat_map(|i| &i.sites) {
            match site {
                NoiseSite::One(_) => one += 1,
                NoiseSite::Two(..) => two += 1,
            }
        }
        (one, two)
    }
}

/// Depolarizing error rate applied after every gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    p_err: f64,
}

impl NoiseModel {
    pub fn new(p_err: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_err) {
            return Err(Error::Domain(format!("error rate {p_err} outside [0, 1]")));
        }
        Ok(Self { p_err })
    }

    pub fn noiseless() -> Self {
        Self { p_err: 0.0 }
    }

    pub fn p_err(&self) -> f64 {
        self.p_err
    }
}

pub fn apply_gate<T: Scalar>(state: &mut FullState<T>, gate: &Gate<T>) -> Result<()> {
    let zero = Complex::new(T::zero(), T::zero());
    let amps = state.amplitudes_mut();
    match gate {
        Gate::Hadamard(q) => {
            let h = T::FRAC_1_SQRT_2();
            for_pairs(amps, *q, |a, b| {
                let (x, y) = (*a, *b);
                *a = (x + y) * h;
                *b = (x - y) * h;
            });
        }
        Gate::XRotation(q, theta) => {
            let (s, c) = theta.sin_cos();
            let mis = Complex::new(T::zero(), -s);
            for_pairs(amps, *q, |a, b| {
                let (x, y) = (*a, *b);
                *a = x * c + mis * y;
                *b = y * c + mis * x;
            });
        }
        Gate::Phase(q, phi) => {
            let ph = Complex::from_polar(T::one(), -*phi);
            for_pairs(amps, *q, |_, b| *b = *b * ph);
        }
        Gate::ControlledPhase(a, b, phi) => {
            let ph = Complex::from_polar(T::one(), -*phi);
            let mask = (1usize << a) | (1usize << b);
            amps.par_iter_mut()
                .enumerate()
                .filter(|(z, _)| z & mask == mask)
                .for_each(|(_, x)| *x = *x * ph);
        }
        Gate::XyRotation(a, b, theta) => {
            let (s, c) = theta.sin_cos();
            let mis = Complex::new(T::zero(), -s);
            let (ma, mb) = (1usize << a, 1usize << b);
            for z in 0..amps.len() {
                // visit each |..1_a..0_b..> once and pair it with |..0_a..1_b..>
                if z & ma != 0 && z & mb == 0 {
                    let w = (z & !ma) | mb;
                    let (x, y) = (amps[z], amps[w]);
                    amps[z] = x * c + mis * y;
                    amps[w] = y * c + mis * x;
                }
            }
        }
        Gate::PrepareDicke { qubits, weight } => {
            let d = dicke::<T>(qubits.len(), *weight)?;
            let reg_mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
            let spread = |local: u64| -> usize {
                qubits
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| (local >> j) & 1 == 1)
                    .map(|(_, &q)| 1usize << q)
                    .sum()
            };
            let offsets: Vec<usize> = d.support().states().iter().map(|&s| spread(s)).collect();
            let old = amps.to_vec();
            for (z, a) in old.iter().enumerate() {
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                if z & reg_mask != 0 {
                    return Err(Error::Domain(
                        "Dicke preparation needs the register in |0..0>".into(),
                    ));
                }
            }
            amps.iter_mut().for_each(|x| *x = zero);
            for (z, a) in old.iter().enumerate() {
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for &off in &offsets {
                    amps[z | off] = *a * d.amplitude();
                }
            }
        }
        Gate::Pauli(q, p) => apply_pauli(amps, *q, *p),
    }
    Ok(())
}

fn for_pairs<T: Scalar>(
    amps: &mut [Complex<T>],
    q: usize,
    f: impl Fn(&mut Complex<T>, &mut Complex<T>) + Sync,
) {
    let half = 1usize << q;
    amps.par_chunks_mut(half << 1).for_each(|block| {
        let (lo, hi) = block.split_at_mut(half);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            f(a, b);
        }
    });
}

fn apply_pauli<T: Scalar>(amps: &mut [Complex<T>], q: usize, p: Pauli) {
    let i = Complex::new(T::zero(), T::one());
    match p {
        Pauli::I => {}
        Pauli::X => for_pairs(amps, q, |a, b| std::mem::swap(a, b)),
        Pauli::Y => for_pairs(amps, q, |a, b| {
            let (x, y) = (*a, *b);
            *a = -i * y;
            *b = i * x;
        }),
        Pauli::Z => for_pairs(amps, q, |_, b| *b = -*b),
    }
}

fn inject<T: Scalar>(state: &mut FullState<T>, site: NoiseSite, rng: &mut Rng) {
    match site {
        NoiseSite::One(q) => {
            let p = Pauli::NON_IDENTITY[rng.gen_range(0..3)];
            apply_pauli(state.amplitudes_mut(), q, p);
        }
        NoiseSite::Two(a, b) => {
            // 15 non-identity two-qubit Paulis, index 1..16 over (P_a, P_b)
            let k = rng.gen_range(1..16);
            apply_pauli(state.amplitudes_mut(), a, Pauli::ALL[k / 4]);
            apply_pauli(state.amplitudes_mut(), b, Pauli::ALL[k % 4]);
        }
    }
}

/// Runs the circuit from `|0..0>` with stochastic Pauli injection and
/// returns the final state (before measurement).
pub fn evolve_trajectory<T: Scalar>(
    circuit: &Circuit<T>,
    noise: NoiseModel,
    rng: &mut Rng,
) -> Result<FullState<T>> {
    let mut state = FullState::<T>::zero(circuit.n_qubits)?;
    for ins in &circuit.instructions {
        apply_gate(&mut state, &ins.gate)?;
        if noise.p_err > 0.0 {
            for &site in &ins.sites {
                if rng.gen::<f64>() < noise.p_err {
                    inject(&mut state, site, rng);
                }
            }
        }
    }
    Ok(state)
}

/// One noisy trajectory followed by a single computational-basis shot.
pub fn run_noisy_trajectory<T: Scalar>(
    circuit: &Circuit<T>,
    n: usize,
    m: usize,
    noise: NoiseModel,
    seed: u64,
) -> Result<AllocationBits> {
    let mut rng = rng_from_seed(seed);
    let state = evolve_trajectory(circuit, noise, &mut rng)?;
    let shot_seed = rng.gen::<u64>();
    let counts = state.sample_indices(1, shot_seed)?;
    let (&z, _) = counts.iter().next().expect("one shot");
    Ok(AllocationBits::from_index(n, m, z as u64))
}

/// `trajectories` independent shots with seeds derived from `seed`.
pub fn run_trajectories<T: Scalar>(
    circuit: &Circuit<T>,
    n: usize,
    m: usize,
    noise: NoiseModel,
    trajectories: usize,
    seed: u64,
) -> Result<Vec<AllocationBits>> {
    (0..trajectories)
        .into_par_iter()
        .map(|t| run_noisy_trajectory(circuit, n, m, noise, derive_seed(seed, t as u64)))
        .collect()
}

fn check_params<T>(params: &[T]) -> Result<()> {
    if params.is_empty() || params.len() % 2 != 0 {
        return Err(Error::Domain(format!(
            "expected 2p parameters, got {}",
            params.len()
        )));
    }
    Ok(())
}

/// Penalty QAOA: `|+>^N`, then per layer the quadratic-form expansion of
/// `C + lambda * pen` and an `RX` layer. Parameters are `[g1, b1, g2, b2, ..]`.
pub fn standard_circuit<T: Scalar>(
    inst: &ProblemInstance,
    params: &[T],
    lambda: T,
) -> Result<Circuit<T>> {
    check_params(params)?;
    let (n, m) = (inst.n(), inst.m());
    let mut circ = Circuit::new(n * m);
    for q in 0..n * m {
        circ.push(Gate::Hadamard(q));
    }
    let two = T::of(2.0);
    for layer in params.chunks(2) {
        let (gamma, beta) = (layer[0], layer[1]);
        for (i, &k) in inst.demands().iter().enumerate() {
            let linear = lambda * (T::one() - two * T::of(k as f64));
            for c in 0..m {
                circ.push(Gate::Phase(inst.qubit(i, c), gamma * linear));
            }
            for c in 0..m {
                for c2 in c + 1..m {
                    circ.push(Gate::ControlledPhase(
                        inst.qubit(i, c),
                        inst.qubit(i, c2),
                        gamma * two * lambda,
                    ));
                }
            }
        }
        push_conflict_gates(&mut circ, inst, gamma);
        for q in 0..n * m {
            circ.push(Gate::XRotation(q, beta));
        }
    }
    Ok(circ)
}

fn push_conflict_gates<T: Scalar>(circ: &mut Circuit<T>, inst: &ProblemInstance, gamma: T) {
    for &(a, b) in inst.edges() {
        for c in 0..inst.m() {
            circ.push(Gate::ControlledPhase(inst.qubit(a, c), inst.qubit(b, c), gamma));
        }
    }
}

/// Dicke + XY QAOA with one `XX+YY` rotation per mixing pair.
pub fn proposed_circuit<T: Scalar>(
    inst: &ProblemInstance,
    params: &[T],
    topology: MixerTopology,
) -> Result<Circuit<T>> {
    check_params(params)?;
    let (n, m) = (inst.n(), inst.m());
    let mut circ = Circuit::new(n * m);
    for (i, &k) in inst.demands().iter().enumerate() {
        circ.push(Gate::PrepareDicke {
            qubits: (0..m).map(|c| inst.qubit(i, c)).collect(),
            weight: k,
        });
    }
    let pairs = topology.pairs(m);
    for layer in params.chunks(2) {
        let (gamma, beta) = (layer[0], layer[1]);
        push_conflict_gates(&mut circ, inst, gamma);
        for i in 0..n {
            for &(c, c2) in &pairs {
                circ.push(Gate::XyRotation(inst.qubit(i, c), inst.qubit(i, c2), beta));
            }
        }
    }
    Ok(circ)
}
