//! Dense reference simulators built straight from the operator definitions.
//! Nothing here calls into the engines they are compared against.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use sqaoa_core::engine::noise::{Circuit, Gate, NoiseSite, Pauli};
use sqaoa_core::ProblemInstance;

pub const ZERO: C = C::new(0.0, 0.0);
pub const ONE: C = C::new(1.0, 0.0);
pub const I: C = C::new(0.0, 1.0);

pub fn pauli(p: Pauli) -> DMatrix<C> {
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    }
}

/// Kronecker product where `ops[j]` acts on local bit `j` (bit 0 least significant).
pub fn kron_local(ops: &[DMatrix<C>]) -> DMatrix<C> {
    let mut out = DMatrix::from_element(1, 1, ONE);
    for op in ops.iter().rev() {
        out = out.kronecker(op);
    }
    out
}

fn single(p: Pauli, j: usize, width: usize) -> DMatrix<C> {
    let ops: Vec<_> = (0..width).map(|q| pauli(if q == j { p } else { Pauli::I })).collect();
    kron_local(&ops)
}

/// `sum_{(a,b)} (X_a X_b + Y_a Y_b) / 2` on `width` qubits.
pub fn xy_hamiltonian(width: usize, pairs: &[(usize, usize)]) -> DMatrix<C> {
    let d = 1 << width;
    let mut h = DMatrix::from_element(d, d, ZERO);
    for &(a, b) in pairs {
        for p in [Pauli::X, Pauli::Y] {
            h += single(p, a, width) * single(p, b, width) * C::new(0.5, 0.0);
        }
    }
    h
}

/// `exp(-i t H)` by the matrix exponential.
pub fn propagator(h: &DMatrix<C>, t: f64) -> DMatrix<C> {
    (h * C::new(0.0, -t)).exp()
}

/// Applies a `2^w x 2^w` operator to `qubits` of a full register, local bit
/// `j` being `qubits[j]`.
pub fn apply_local(state: &mut [C], qubits: &[usize], u: &DMatrix<C>) {
    let w = qubits.len();
    let mask: usize = qubits.iter().map(|q| 1 << q).sum();
    let spread = |local: usize| -> usize {
        (0..w).filter(|j| local >> j & 1 == 1).map(|j| 1 << qubits[j]).sum()
    };
    let offsets: Vec<usize> = (0..1 << w).map(spread).collect();
    let mut buf = vec![ZERO; 1 << w];
    for base in 0..state.len() {
        if base & mask != 0 {
            continue;
        }
        for (l, &o) in offsets.iter().enumerate() {
            buf[l] = state[base | o];
        }
        for (r, &o) in offsets.iter().enumerate() {
            state[base | o] = (0..1 << w).map(|c| u[(r, c)] * buf[c]).sum();
        }
    }
}

pub fn bit(z: usize, node: usize, channel: usize, m: usize) -> usize {
    z >> (node * m + channel) & 1
}

pub fn weight(z: usize, node: usize, m: usize) -> usize {
    (0..m).map(|c| bit(z, node, c, m)).sum()
}

pub fn brute_conflicts(inst: &ProblemInstance, z: usize) -> usize {
    let m = inst.m();
    inst.edges()
        .iter()
        .map(|&(a, b)| (0..m).filter(|&c| bit(z, a, c, m) == 1 && bit(z, b, c, m) == 1).count())
        .sum()
}

pub fn brute_deviation(inst: &ProblemInstance, z: usize) -> usize {
    (0..inst.n())
        .map(|i| weight(z, i, inst.m()).abs_diff(inst.demands()[i]))
        .sum()
}

pub fn brute_penalty(inst: &ProblemInstance, z: usize, lambda: f64) -> f64 {
    let sq: usize = (0..inst.n())
        .map(|i| weight(z, i, inst.m()).abs_diff(inst.demands()[i]).pow(2))
        .sum();
    brute_conflicts(inst, z) as f64 + lambda * sq as f64
}

fn node_qubits(node: usize, m: usize) -> Vec<usize> {
    (0..m).map(|c| node * m + c).collect()
}

/// Noiseless statevector of the penalty ansatz from `|+>^N`.
pub fn standard_reference(inst: &ProblemInstance, params: &[f64], lambda: f64) -> Vec<C> {
    let q = inst.num_qubits();
    let dim = 1usize << q;
    let mut psi = vec![C::new((dim as f64).powf(-0.5), 0.0); dim];
    let cost: Vec<f64> = (0..dim).map(|z| brute_penalty(inst, z, lambda)).collect();
    for layer in params.chunks(2) {
        for (a, c) in psi.iter_mut().zip(&cost) {
            *a *= C::from_polar(1.0, -layer[0] * c);
        }
        let rx = propagator(&pauli(Pauli::X), layer[1]);
        for qubit in 0..q {
            apply_local(&mut psi, &[qubit], &rx);
        }
    }
    psi
}

/// Statevector of the Dicke-initialized XY ansatz in the full register.
pub fn dicke_xy_reference(inst: &ProblemInstance, params: &[f64], pairs: &[(usize, usize)]) -> Vec<C> {
    let (n, m) = (inst.n(), inst.m());
    let dim = 1usize << (n * m);
    let feasible = |z: usize| (0..n).all(|i| weight(z, i, m) == inst.demands()[i]);
    let count = (0..dim).filter(|&z| feasible(z)).count();
    let mut psi: Vec<C> = (0..dim)
        .map(|z| if feasible(z) { C::new((count as f64).powf(-0.5), 0.0) } else { ZERO })
        .collect();
    let h = xy_hamiltonian(m, pairs);
    for layer in params.chunks(2) {
        for (z, a) in psi.iter_mut().enumerate() {
            *a *= C::from_polar(1.0, -layer[0] * brute_conflicts(inst, z) as f64);
        }
        let u = propagator(&h, layer[1]);
        for i in 0..n {
            apply_local(&mut psi, &node_qubits(i, m), &u);
        }
    }
    psi
}

fn gate_matrix(gate: &Gate<f64>) -> (Vec<usize>, DMatrix<C>) {
    let cphase = |phi: f64| {
        let mut u = DMatrix::identity(4, 4);
        u[(3, 3)] = C::from_polar(1.0, -phi);
        u
    };
    match gate {
        Gate::Hadamard(q) => {
            let s = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            (vec![*q], DMatrix::from_row_slice(2, 2, &[s, s, s, -s]))
        }
        Gate::XRotation(q, t) => (vec![*q], propagator(&pauli(Pauli::X), *t)),
        Gate::Phase(q, phi) => {
            let mut u = DMatrix::identity(2, 2);
            u[(1, 1)] = C::from_polar(1.0, -phi);
            (vec![*q], u)
        }
        Gate::ControlledPhase(a, b, phi) => (vec![*a, *b], cphase(*phi)),
        Gate::XyRotation(a, b, t) => (vec![*a, *b], propagator(&xy_hamiltonian(2, &[(0, 1)]), *t)),
        Gate::Pauli(q, p) => (vec![*q], pauli(*p)),
        Gate::PrepareDicke { qubits, weight } => {
            let w = qubits.len();
            let hits: Vec<usize> = (0..1usize << w).filter(|l| l.count_ones() as usize == *weight).collect();
            let amp = C::new((hits.len() as f64).powf(-0.5), 0.0);
            // maps |0..0> to the Dicke state; other inputs never occur
            let mut u = DMatrix::from_element(1 << w, 1 << w, ZERO);
            for &l in &hits {
                u[(l, 0)] = amp;
            }
            (qubits.clone(), u)
        }
    }
}

/// `dim x dim` matrix of a local operator.
pub fn full_operator(n_qubits: usize, qubits: &[usize], u: &DMatrix<C>) -> DMatrix<C> {
    let dim = 1usize << n_qubits;
    let mut out = DMatrix::from_element(dim, dim, ZERO);
    for col in 0..dim {
        let mut v = vec![ZERO; dim];
        v[col] = ONE;
        apply_local(&mut v, qubits, u);
        for (row, a) in v.into_iter().enumerate() {
            out[(row, col)] = a;
        }
    }
    out
}

fn depolarize(rho: &DMatrix<C>, n_qubits: usize, qubits: &[usize], p: f64) -> DMatrix<C> {
    let w = qubits.len();
    let strings = 1usize << (2 * w);
    let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let mut out = rho * C::new(1.0 - p, 0.0);
    let each = C::new(p / (strings - 1) as f64, 0.0);
    for s in 1..strings {
        let ops: Vec<_> = (0..w).map(|j| pauli(all[s >> (2 * j) & 3])).collect();
        let op = full_operator(n_qubits, qubits, &kron_local(&ops));
        out += &op * rho * op.adjoint() * each;
    }
    out
}

/// Exact output distribution of a circuit under the depolarizing channel
/// after every noise site.
pub fn noisy_distribution(circuit: &Circuit<f64>, p: f64) -> Vec<f64> {
    let q = circuit.n_qubits;
    let dim = 1usize << q;
    let mut rho = DMatrix::from_element(dim, dim, ZERO);
    rho[(0, 0)] = ONE;
    for ins in &circuit.instructions {
        let (qubits, u) = gate_matrix(&ins.gate);
        let full = full_operator(q, &qubits, &u);
        rho = &full * rho * full.adjoint();
        for site in &ins.sites {
            let support = match *site {
                NoiseSite::One(a) => vec![a],
                NoiseSite::Two(a, b) => vec![a, b],
            };
            rho = depolarize(&rho, q, &support, p);
        }
    }
    (0..dim).map(|z| rho[(z, z)].re).collect()
}
