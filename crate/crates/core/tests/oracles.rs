mod common;

use common::*;
use num_complex::Complex64;
use rand::Rng;
use sqaoa_core::engine::noise::{proposed_circuit, run_trajectories, standard_circuit, NoiseModel};
use sqaoa_core::engine::subspace::MixerTopology;
use sqaoa_core::experiments::calibrated_family;
use sqaoa_core::model::node_deviation;
use sqaoa_core::qaoa::{AnsatzConfig, AnsatzKind, DualMixerMode, FinalState};
use sqaoa_core::rng::rng_from_seed;
use sqaoa_core::{ProblemInstance, QaoaRunner64};

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn full_amplitudes(state: FinalState<'_, f64>) -> Vec<Complex64> {
    match state {
        FinalState::Full(s) => s.amplitudes().to_vec(),
        FinalState::Product(s) => s.to_full().unwrap(),
        FinalState::Dual(s) => s.to_full().unwrap(),
    }
}

fn random_params(seed: u64, depth: usize) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..2 * depth).map(|_| rng.gen_range(-3.0..3.0)).collect()
}

fn path3() -> ProblemInstance {
    ProblemInstance::new("path3", 3, &[(0, 1), (1, 2)], vec![2, 1, 2], None).unwrap()
}

#[test]
fn standard_ansatz_matches_dense_reference() {
    let inst = path3();
    for (seed, depth, lambda) in [(1, 1, 5.0), (2, 2, 1.5), (3, 3, 0.0)] {
        let params = random_params(seed, depth);
        let mut cfg = AnsatzConfig::new(AnsatzKind::StandardPenalty).with_depth(depth);
        cfg.lambda = lambda;
        let runner = QaoaRunner64::new(&inst, cfg).unwrap();
        let got = full_amplitudes(runner.evolve(&params).unwrap());
        let want = standard_reference(&inst, &params, lambda);
        assert!(max_diff(&got, &want) < 1e-10, "seed {seed}");
    }
}

#[test]
fn standard_ansatz_twelve_qubits() {
    let inst = calibrated_family().instance(4).unwrap();
    let params = random_params(11, 1);
    let runner = QaoaRunner64::new(&inst, AnsatzConfig::new(AnsatzKind::StandardPenalty)).unwrap();
    let got = full_amplitudes(runner.evolve(&params).unwrap());
    assert!(max_diff(&got, &standard_reference(&inst, &params, 5.0)) < 1e-10);
}

#[test]
fn dicke_xy_embedded_matches_dense_reference() {
    let inst = calibrated_family().instance(4).unwrap();
    for topology in [MixerTopology::Complete, MixerTopology::Ring] {
        for (seed, depth) in [(4, 1), (5, 2)] {
            let params = random_params(seed, depth);
            let mut cfg = AnsatzConfig::new(AnsatzKind::DickeXy).with_depth(depth);
            cfg.topology = topology;
            let runner = QaoaRunner64::new(&inst, cfg).unwrap();
            let got = full_amplitudes(runner.evolve(&params).unwrap());
            let want = dicke_xy_reference(&inst, &params, &topology.pairs(inst.m()));
            assert!(max_diff(&got, &want) < 1e-9, "{topology:?} seed {seed}");
        }
    }
}

#[test]
fn dual_ansatz_matches_sequential_plaquette_product() {
    let inst = ProblemInstance::new("dual3", 3, &[(0, 1), (1, 2), (0, 2)], vec![2, 1, 1], Some(vec![2, 1, 1]))
        .unwrap();
    let params = random_params(8, 2);
    let runner = QaoaRunner64::new(&inst, AnsatzConfig::new(AnsatzKind::DualPlaquette).with_depth(2)).unwrap();
    let got = full_amplitudes(runner.evolve(&params).unwrap());

    let (n, m) = (inst.n(), inst.m());
    let dim = 1usize << (n * m);
    let mut psi = vec![ZERO; dim];
    psi[runner.dual_start().unwrap().to_index().unwrap() as usize] = ONE;
    // 1001 <-> 0110 over (i,c) (i,c') (j,c) (j,c')
    let mut h_box = nalgebra::DMatrix::from_element(16, 16, ZERO);
    h_box[(9, 6)] = ONE;
    h_box[(6, 9)] = ONE;
    for layer in params.chunks(2) {
        for (z, a) in psi.iter_mut().enumerate() {
            *a *= Complex64::from_polar(1.0, -layer[0] * brute_conflicts(&inst, z) as f64);
        }
        let u = propagator(&h_box, layer[1]);
        for i in 0..n {
            for j in i + 1..n {
                for c in 0..m {
                    for d in c + 1..m {
                        apply_local(&mut psi, &[i * m + c, i * m + d, j * m + c, j * m + d], &u);
                    }
                }
            }
        }
    }
    assert!(max_diff(&got, &psi) < 1e-10);
}

#[test]
fn exact_dual_mixer_is_a_different_but_closed_evolution() {
    let inst = calibrated_family().dual_instance().unwrap();
    let params = random_params(9, 1);
    let mut cfg = AnsatzConfig::new(AnsatzKind::DualPlaquette);
    cfg.dual_mixer = DualMixerMode::Exact;
    let runner = QaoaRunner64::new(&inst, cfg).unwrap();
    match runner.evolve(&params).unwrap() {
        FinalState::Dual(s) => assert!((s.norm_sqr() - 1.0).abs() < 1e-10),
        _ => unreachable!(),
    }
}

fn trajectory_mean_matches_density_matrix(circuit: &sqaoa_core::engine::noise::Circuit<f64>, inst: &ProblemInstance, p: f64) {
    let dist = noisy_distribution(circuit, p);
    assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    let dev: Vec<f64> = (0..dist.len()).map(|z| brute_deviation(inst, z) as f64).collect();
    let mean: f64 = dist.iter().zip(&dev).map(|(q, d)| q * d).sum();
    let var: f64 = dist.iter().zip(&dev).map(|(q, d)| q * (d - mean).powi(2)).sum();
    let trajectories = 4000;
    let shots = run_trajectories(circuit, inst.n(), inst.m(), NoiseModel::new(p).unwrap(), trajectories, 77).unwrap();
    let sampled = shots.iter().map(|x| node_deviation(inst, x).unwrap() as f64).sum::<f64>() / trajectories as f64;
    let sigma = (var / trajectories as f64).sqrt();
    assert!(
        (sampled - mean).abs() <= 4.0 * sigma + 1e-12,
        "p={p}: trajectories {sampled} vs density matrix {mean} (sigma {sigma})"
    );
}

#[test]
fn trajectories_reproduce_depolarizing_channel() {
    let inst = ProblemInstance::new("pair", 3, &[(0, 1)], vec![2, 1], None).unwrap();
    let params = [0.7, 0.4];
    let std = standard_circuit(&inst, &params, 2.0).unwrap();
    let prop = proposed_circuit(&inst, &params, MixerTopology::Complete).unwrap();
    for p in [0.0, 0.05, 0.2] {
        trajectory_mean_matches_density_matrix(&std, &inst, p);
        trajectory_mean_matches_density_matrix(&prop, &inst, p);
    }
    let clean = noisy_distribution(&prop, 0.0);
    let leaked: f64 = (0..clean.len()).filter(|&z| brute_deviation(&inst, z) > 0).map(|z| clean[z]).sum();
    assert!(leaked < 1e-12);
}
