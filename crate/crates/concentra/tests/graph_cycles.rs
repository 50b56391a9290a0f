//! Cross-module checks: cycle counts against brute-force subset enumeration,
//! the local-variance equivalence between the cycle statistics and the cube
//! polynomial, shared-edge identities, partition expectations, and
//! relabeling invariance.

use concentra::cube::CubePoint;
use concentra::cycles::{
    count_cycles, count_partitioned_injections, count_shared_edge_injections, cycle_polynomial,
    cycle_statistics, enumerate_cycles, partial_injection_counts, random_partition,
    VertexPartition,
};
use concentra::experiments::expected_cycle_count;
use concentra::graph::{degree_buckets, degree_regularity, edge_index, Graph};
use concentra::oracles;
use concentra::rng::draw;

#[test]
fn dfs_count_matches_subset_enumeration() {
    for seed in 0..25 {
        let n = 6 + (seed as usize % 5); // 6..=10
        let g = Graph::sample(n, 0.45, seed).unwrap();
        for k in 3..=5usize.min(n) {
            let dfs = count_cycles(&g, k).unwrap();
            let brute = oracles::count_cycles_by_subsets(&g, k);
            assert_eq!(dfs, brute, "seed {seed} n {n} k {k}");
        }
    }
}

#[test]
fn per_edge_scan_matches_all_pairs_for_w() {
    for seed in 0..20 {
        let n = 7 + (seed as usize % 3);
        let g = Graph::sample(n, 0.5, seed).unwrap();
        for k in [3usize, 4] {
            let scan = cycle_statistics(&g, k).unwrap().shared_edge_pairs;
            let brute = oracles::shared_edge_pairs_by_all_pairs(&g, k);
            assert_eq!(scan, brute, "seed {seed} k {k}");
        }
    }
}

#[test]
fn local_variance_equals_the_cube_polynomial_route() {
    // Exact integer agreement between the graph-side V and the discrete
    // derivative norm of the cycle polynomial, over random graphs and the
    // complete graph.
    for n in 5..=8usize {
        for k in [3usize, 4] {
            let polynomial = cycle_polynomial(n, k).unwrap();
            for seed in 0..25u64 {
                let g = if seed == 0 {
                    Graph::complete(n).unwrap()
                } else {
                    Graph::sample(n, 0.5, draw(500, 1, seed * 100 + n as u64)).unwrap()
                };
                let stats = cycle_statistics(&g, k).unwrap();
                let x: CubePoint = g.to_cube_point().unwrap();
                let z_cube = polynomial.evaluate(&x).unwrap();
                let v_cube = polynomial.local_variance(&x).unwrap();
                assert_eq!(z_cube as u64, stats.count, "n {n} k {k} seed {seed}");
                assert_eq!(v_cube as u64, stats.local_variance, "n {n} k {k} seed {seed}");
            }
        }
    }
}

#[test]
fn injection_count_is_four_times_the_pair_count() {
    for seed in 0..30 {
        let n = 6 + (seed as usize % 7); // 6..=12
        let g = Graph::sample(n, 0.45, seed).unwrap();
        for k in [3usize, 4] {
            let stats = cycle_statistics(&g, k).unwrap();
            let injections = count_shared_edge_injections(&g, k).unwrap();
            assert_eq!(injections, 4 * stats.shared_edge_pairs, "seed {seed} k {k}");
        }
    }
}

#[test]
fn injection_enumeration_matches_raw_tuple_filtering() {
    for seed in 0..12 {
        let n = 6 + (seed as usize % 3);
        let g = Graph::sample(n, 0.5, seed).unwrap();
        let by_chain = count_shared_edge_injections(&g, 3).unwrap();
        let by_tuples = oracles::injections_by_tuples(&g, 3, None);
        assert_eq!(by_chain, by_tuples, "seed {seed}");

        let partition = random_partition(n, 3, seed + 50).unwrap();
        let constrained = count_partitioned_injections(&g, 3, &partition).unwrap();
        let constrained_tuples = oracles::injections_by_tuples(&g, 3, Some(&partition));
        assert_eq!(constrained, constrained_tuples, "seed {seed} constrained");
    }
}

#[test]
fn partial_counts_match_tuple_filtering() {
    for seed in 0..10 {
        let n = 8;
        let g = Graph::sample(n, 0.6, seed).unwrap();
        let k = 3;
        let partition = random_partition(n, k, seed + 9).unwrap();
        let profile = degree_buckets(&g, 0.6).unwrap();
        for &v in partition.class(0) {
            let counts = partial_injection_counts(&g, k, &partition, &profile, v).unwrap();
            for l in 1..=2 * k - 2 {
                let brute = oracles::partial_injections_by_tuples(&g, k, &partition, v, l);
                assert_eq!(counts.per_level[l - 1], brute, "seed {seed} v {v} l {l}");
            }
            // The bucket breakdown refines each level's total.
            for l in 2..=2 * k - 2 {
                let split: u64 = counts.per_level_by_bucket[l - 1].values().sum();
                assert_eq!(split, counts.per_level[l - 1]);
            }
        }
    }
}

#[test]
fn relabeling_leaves_all_statistics_unchanged() {
    for seed in 0..15u64 {
        let n = 9;
        let g = Graph::sample(n, 0.5, seed).unwrap();
        // Deterministic pseudo-random permutation by sorting hashed labels.
        let mut relabel: Vec<usize> = (0..n).collect();
        relabel.sort_by_key(|&v| draw(seed, 77, v as u64));
        let mut edges = Vec::new();
        for (_, u, v) in g.present_edges() {
            edges.push((relabel[u], relabel[v]));
        }
        let h = Graph::from_edges(n, &edges).unwrap();
        for k in [3usize, 4] {
            let a = cycle_statistics(&g, k).unwrap();
            let b = cycle_statistics(&h, k).unwrap();
            assert_eq!(a.count, b.count);
            assert_eq!(a.local_variance, b.local_variance);
            assert_eq!(a.shared_edge_pairs, b.shared_edge_pairs);
            let mut multiset_a: Vec<u64> = a.per_edge.values().copied().collect();
            let mut multiset_b: Vec<u64> = b.per_edge.values().copied().collect();
            multiset_a.sort_unstable();
            multiset_b.sort_unstable();
            assert_eq!(multiset_a, multiset_b);
        }
    }
}

#[test]
fn partition_survival_expectation_is_exact_on_average() {
    // E[card Sigma] over i.i.d. partitions equals sigma_0 / (2k-2)^(2k-2).
    // Fixed graph, fixed seed stream, 10_000 partitions, three standard
    // errors of slack.
    let g = Graph::sample(12, 0.5, 2024).unwrap();
    let k = 3usize;
    let sigma0 = count_shared_edge_injections(&g, k).unwrap();
    assert!(sigma0 > 0, "fixture graph must carry shared-edge pairs");
    let classes = 2 * k - 2;
    let exact_mean = sigma0 as f64 / (classes as f64).powi(classes as i32);

    let trials = 10_000u64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for t in 0..trials {
        let partition = random_partition(12, k, draw(31415, 9, t)).unwrap();
        let count = count_partitioned_injections(&g, k, &partition).unwrap() as f64;
        sum += count;
        sum_sq += count * count;
    }
    let mean = sum / trials as f64;
    let variance = (sum_sq / trials as f64 - mean * mean).max(0.0);
    let stderr = (variance / trials as f64).sqrt();
    assert!(
        (mean - exact_mean).abs() <= 3.0 * stderr,
        "mean {mean} vs exact {exact_mean} (sigma0 {sigma0}, stderr {stderr})"
    );
}

#[test]
fn closed_form_mean_matches_full_graph_enumeration() {
    // Exhaustive enumeration over all graphs at tiny n weights every cycle
    // count by its product probability.
    for n in 4..=6usize {
        for p in [0.3, 0.7] {
            let enumerated = oracles::expected_cycles_by_enumeration(n, 3, p).unwrap();
            let closed = expected_cycle_count(n, p, 3).unwrap();
            assert!(
                (enumerated - closed).abs() <= 1e-9 * (1.0 + closed),
                "n {n} p {p}: enumerated {enumerated} closed {closed}"
            );
        }
    }
}

#[test]
fn regularity_event_survives_desk_scale_edge_deletion() {
    // Monotone under deletion across this regime; the dyadic thresholds only
    // interact with migration between buckets far above desk-scale degrees.
    for seed in 0..10u64 {
        let mut g = Graph::sample(120, 0.2, seed).unwrap();
        let p = 0.2;
        let before = degree_regularity(&g, p).unwrap();
        if !before.holds {
            continue;
        }
        let edges = g.present_edges();
        for (index, &(_, u, v)) in edges.iter().enumerate().take(60) {
            if index % 2 == 0 {
                g.remove_edge(u, v).unwrap();
            }
        }
        let after = degree_regularity(&g, p).unwrap();
        assert!(after.holds, "seed {seed}");
    }
}

#[test]
fn degree_tail_estimators_at_regime_scale() {
    // np = 40 at n = 500: no degree can reach the dyadic slabs (16 np = 640
    // exceeds n - 1), so both tail events stay silent.
    let tail = concentra::graph::estimate_max_degree_tail(500, 0.08, 100, 5).unwrap();
    assert_eq!(tail.occurrences, 0);
    assert!(tail.bound < 1e-300); // exp(-800) underflows to zero
    let overflow = concentra::graph::estimate_bucket_overflow(500, 0.08, 100, 5, 1.0).unwrap();
    assert_eq!(overflow.occurrences, 0);
    assert!(overflow.wilson_low <= overflow.frequency);
    assert!(overflow.frequency <= overflow.wilson_high);
}

#[test]
fn enumeration_guard_trips_on_oversized_graphs() {
    let g = Graph::empty(70).unwrap();
    // k = 8 halves the ceiling five times: 2000 >> 5 = 62 < 70.
    assert!(matches!(
        enumerate_cycles(&g, 8),
        Err(concentra::Error::GraphTooLarge { .. })
    ));
}

#[test]
fn edge_indexing_is_consistent_with_cycle_edges() {
    let g = Graph::complete(5).unwrap();
    let cycles = enumerate_cycles(&g, 3).unwrap();
    for (index, cycle) in cycles.cycles.iter().enumerate() {
        let slots = cycles.edge_slots(index);
        for window in 0..3 {
            let u = cycle[window] as usize;
            let v = cycle[(window + 1) % 3] as usize;
            assert!(slots.binary_search(&(edge_index(u, v).unwrap() as u32)).is_ok());
        }
    }
}

#[test]
fn forced_singletons_at_minimum_partition_size() {
    // n = 2k - 2 leaves every class a singleton whenever the assignment is a
    // bijection; scan seeds until one shows up.
    let k = 3;
    let mut found = false;
    for seed in 0..200 {
        let partition = random_partition(4, k, seed).unwrap();
        if (0..4).all(|c| partition.class(c).len() == 1) {
            found = true;
            break;
        }
    }
    assert!(found, "no bijective assignment among 200 seeds");
    let _ = VertexPartition::from_class_assignment(vec![0, 1, 2, 3], 4).unwrap();
}
