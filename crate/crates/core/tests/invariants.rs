mod common;

use common::{brute_conflicts, brute_penalty, weight};
use proptest::prelude::*;
use sqaoa_core::baselines::{exact_optimum, exact_optimum_dfs, greedy_multicolor, TieBreak};
use sqaoa_core::combinatorics::{enumerate_dual_basis, enumerate_johnson, product_basis};
use sqaoa_core::engine::subspace::{
    apply_cost_phase, apply_plaquette_layer, apply_xy_mixer, init_basis_state, init_dicke_product, CostTable,
    MixerTopology, PlaquetteSpec, XyMixerSpec,
};
use sqaoa_core::experiments::CsvTable;
use sqaoa_core::model::{conflict_count, node_feasible, penalty_cost};
use sqaoa_core::{AllocationBits, ProblemInstance};

fn instance() -> impl Strategy<Value = ProblemInstance> {
    (1usize..=5, 1usize..=4).prop_flat_map(|(n, m)| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let count = pairs.len();
        (
            prop::collection::vec(1usize..=m, n),
            prop::collection::vec(any::<bool>(), count),
        )
            .prop_map(move |(demands, keep)| {
                let edges: Vec<(usize, usize)> =
                    pairs.iter().zip(&keep).filter(|(_, k)| **k).map(|(e, _)| *e).collect();
                ProblemInstance::new("prop", m, &edges, demands, None).unwrap()
            })
    })
}

/// Instance with capacities taken from the column sums of a random allocation,
/// so the dual basis is never empty.
fn dual_instance() -> impl Strategy<Value = ProblemInstance> {
    (2usize..=4, 2usize..=3).prop_flat_map(|(n, m)| {
        prop::collection::vec(1u64..(1 << m) as u64, n).prop_map(move |masks| {
            let x = AllocationBits::from_node_masks(m, &masks);
            let demands: Vec<usize> = (0..n).map(|i| x.node_weight(i)).collect();
            let caps: Vec<usize> = (0..m).map(|c| (0..n).filter(|&i| x.get(i, c)).count()).collect();
            let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
            ProblemInstance::new("dual-prop", m, &edges, demands, Some(caps)).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn johnson_rank_inverts_unrank(m in 1usize..=12, k_frac in 0.0f64..1.0) {
        let k = 1 + ((m - 1) as f64 * k_frac) as usize;
        let basis = enumerate_johnson(m, k).unwrap();
        let mut prev = None;
        for (r, &mask) in basis.states().iter().enumerate() {
            prop_assert_eq!(mask.count_ones() as usize, k);
            prop_assert_eq!(basis.rank(mask), Some(r));
            prop_assert!(prev.is_none_or(|p| p < mask));
            prev = Some(mask);
        }
        let c: u64 = (0..k as u64).fold(1, |acc, i| acc * (m as u64 - i) / (i + 1));
        prop_assert_eq!(basis.size() as u64, c);
    }

    #[test]
    fn product_basis_is_exactly_the_node_feasible_set(inst in instance()) {
        let basis = product_basis(&inst).unwrap();
        let dim = 1usize << inst.num_qubits();
        let expected = (0..dim)
            .filter(|&z| (0..inst.n()).all(|i| weight(z, i, inst.m()) == inst.demands()[i]))
            .count();
        prop_assert_eq!(basis.size(), expected);
        for r in 0..basis.size() {
            let x = basis.unrank(r);
            prop_assert!(node_feasible(&inst, &x).unwrap());
            prop_assert_eq!(basis.rank(&x).unwrap(), r);
        }
    }

    #[test]
    fn dual_basis_equals_filtered_enumeration(inst in dual_instance()) {
        let basis = enumerate_dual_basis(&inst).unwrap();
        let (n, m) = (inst.n(), inst.m());
        let caps = inst.capacities().unwrap();
        let mut filtered: Vec<u64> = (0..1u64 << (n * m))
            .filter(|&z| {
                let z = z as usize;
                (0..n).all(|i| weight(z, i, m) == inst.demands()[i])
                    && (0..m).all(|c| (0..n).filter(|&i| common::bit(z, i, c, m) == 1).count() == caps[c])
            })
            .collect();
        let mut got: Vec<u64> = basis.states().iter().map(|x| x.to_index().unwrap()).collect();
        filtered.sort_unstable();
        got.sort_unstable();
        prop_assert_eq!(got, filtered);
    }

    #[test]
    fn objective_matches_brute_force(inst in instance(), seed in any::<u64>(), lambda in 0.0f64..10.0) {
        let z = (seed % (1u64 << inst.num_qubits())) as usize;
        let x = AllocationBits::from_index(inst.n(), inst.m(), z as u64);
        prop_assert_eq!(conflict_count(&inst, &x).unwrap(), brute_conflicts(&inst, z));
        let pen: f64 = penalty_cost(&inst, &x, lambda).unwrap();
        prop_assert!((pen - brute_penalty(&inst, z, lambda)).abs() < 1e-9);
    }

    #[test]
    fn xy_layers_are_unitary_on_the_subspace(
        inst in instance(),
        angles in prop::collection::vec(-4.0f64..4.0, 2..=6),
        ring in any::<bool>(),
    ) {
        let basis = product_basis(&inst).unwrap();
        let costs = CostTable::new(&inst, &basis).unwrap();
        let topology = if ring { MixerTopology::Ring } else { MixerTopology::Complete };
        let mixer = XyMixerSpec::<f64>::new(&basis, topology);
        let mut s = init_dicke_product::<f64>(&inst, &basis).unwrap();
        for layer in angles.chunks_exact(2) {
            apply_cost_phase(&mut s, &costs, layer[0]).unwrap();
            apply_xy_mixer(&mut s, &mixer, layer[1]).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn plaquette_layers_are_unitary(inst in dual_instance(), angles in prop::collection::vec(-4.0f64..4.0, 1..=3)) {
        let basis = enumerate_dual_basis(&inst).unwrap();
        let spec = PlaquetteSpec::new(&basis).unwrap();
        let mut s = init_basis_state::<f64, _>(&basis, basis.state(0)).unwrap();
        for &b in &angles {
            apply_plaquette_layer(&mut s, &spec, b).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn solvers_agree_and_bound_greedy(inst in instance(), seed in any::<u64>()) {
        let exact = exact_optimum(&inst).unwrap();
        let dfs = exact_optimum_dfs(&inst).unwrap();
        prop_assert_eq!(exact.optimum_conflicts, dfs.optimum_conflicts);
        prop_assert_eq!(conflict_count(&inst, &dfs.witness).unwrap(), dfs.optimum_conflicts);
        prop_assert!(node_feasible(&inst, &exact.witness).unwrap());
        let greedy = greedy_multicolor(&inst, TieBreak::Random(seed)).unwrap();
        prop_assert!(node_feasible(&inst, &greedy.allocation).unwrap());
        prop_assert!(greedy.conflicts >= exact.optimum_conflicts);
    }

    #[test]
    fn csv_tables_round_trip(
        seed in any::<u64>(),
        cells in prop::collection::vec(prop::collection::vec("[a-z0-9 ,\"|.-]{0,8}", 3), 0..6),
    ) {
        let mut t = CsvTable::new(seed, &["a", "b", "c"]);
        for row in &cells {
            t.push(row.clone());
        }
        let parsed = CsvTable::parse(&t.to_csv_string().unwrap()).unwrap();
        prop_assert_eq!(parsed.seed, seed);
        prop_assert_eq!(parsed.rows, t.rows);
    }
}
