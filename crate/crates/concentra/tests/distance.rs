//! Convex-hull distance properties and solver-versus-oracle agreement, plus
//! spot checks of the deviation verifiers against hand enumerations.

use concentra::cube::{CubePoint, MultilinearFunction, ProductMeasure};
use concentra::oracles::{min_norm_faces, min_norm_grid};
use concentra::rng::draw;
use concentra::sampling;
use concentra::talagrand::{
    convex_distance, generators, verify_distance_concentration, verify_local_norm_deviation,
    verify_telescoping, verify_weighted_disagreement, VertexSet,
};

fn random_set_and_point(m: usize, max_size: usize, seed: u64) -> (VertexSet, CubePoint) {
    let set = sampling::random_vertex_set(m, max_size, seed);
    let x = sampling::random_point(m, seed.wrapping_add(0x5bd1e995));
    (set, x)
}

#[test]
fn distance_is_zero_exactly_on_members() {
    for seed in 0..60u64 {
        let m = 2 + (seed as usize % 5);
        let (set, x) = random_set_and_point(m, 10, seed);
        let d = convex_distance(&set, &x).unwrap();
        if set.contains(&x) {
            assert_eq!(d.value, 0.0, "seed {seed}");
        } else {
            assert!(d.value > 0.0, "seed {seed}");
            // Any nonzero distance on the cube is at least 1/sqrt(m).
            assert!(d.value >= 1.0 / (m as f64).sqrt() - 1e-9);
        }
    }
}

#[test]
fn growing_the_set_never_grows_the_distance() {
    for seed in 0..40u64 {
        let m = 3 + (seed as usize % 3);
        let (small, x) = random_set_and_point(m, 6, seed);
        let extra = sampling::random_vertex_set(m, 6, seed.wrapping_add(777));
        let grown = VertexSet::from_masks(
            m,
            small.masks().iter().chain(extra.masks()).copied(),
        )
        .unwrap();
        let d_small = convex_distance(&small, &x).unwrap().value;
        let d_grown = convex_distance(&grown, &x).unwrap().value;
        assert!(d_grown <= d_small + 1e-9, "seed {seed}");
    }
}

#[test]
fn hamming_radius_caps_the_distance() {
    for seed in 0..40u64 {
        let m = 2 + (seed as usize % 5);
        let (set, x) = random_set_and_point(m, 10, seed);
        let closest = set
            .points()
            .map(|y| f64::from(x.hamming(&y)).sqrt())
            .fold(f64::INFINITY, f64::min);
        let d = convex_distance(&set, &x).unwrap().value;
        assert!(d <= closest + 1e-9, "seed {seed}");
    }
}

#[test]
fn witness_reproduces_the_distance() {
    for seed in 0..40u64 {
        let m = 2 + (seed as usize % 5);
        let (set, x) = random_set_and_point(m, 12, seed);
        let d = convex_distance(&set, &x).unwrap();
        let total: f64 = d.witness.iter().map(|&(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let mut combination = vec![0.0f64; m];
        for &(pattern, w) in &d.witness {
            assert!(w >= 0.0);
            for (i, slot) in combination.iter_mut().enumerate() {
                if pattern >> i & 1 == 1 {
                    *slot += w;
                }
            }
        }
        let norm = combination.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - d.value).abs() < 1e-9, "seed {seed}");
    }
}

#[test]
fn solver_matches_the_face_enumeration_oracle() {
    for seed in 0..200u64 {
        let m = 2 + (seed as usize % 4); // up to dimension 5
        let (set, x) = random_set_and_point(m, 10, seed);
        let gens = generators(&set, &x).unwrap();
        let solved = convex_distance(&set, &x).unwrap();
        assert!(!solved.used_fallback, "seed {seed} fell back");
        let oracle = min_norm_faces(&gens.to_vectors());
        assert!(
            (solved.value - oracle).abs() < 1e-9,
            "seed {seed}: solver {} faces {}",
            solved.value,
            oracle
        );
    }
}

#[test]
fn solver_matches_the_dense_grid_oracle_on_a_sample() {
    // A slice of the acceptance sweep at unit-test scale.
    for seed in 0..60u64 {
        let m = 2 + (seed as usize % 5); // up to dimension 6
        let (set, x) = random_set_and_point(m, 12, seed);
        let gens = generators(&set, &x).unwrap();
        let solved = convex_distance(&set, &x).unwrap();
        let grid = min_norm_grid(&gens.to_vectors(), 4, 30);
        assert!(
            (solved.value - grid).abs() < 1e-6,
            "seed {seed}: solver {} grid {}",
            solved.value,
            grid
        );
    }
}

#[test]
fn weighted_disagreement_finds_witnesses_on_random_instances() {
    for seed in 0..60u64 {
        let m = 2 + (seed as usize % 5);
        let (set, x) = random_set_and_point(m, 10, seed);
        for draw_index in 0..5 {
            let lambda = sampling::random_weights(m, seed.wrapping_mul(31).wrapping_add(draw_index));
            let check = verify_weighted_disagreement(&set, &x, &lambda).unwrap();
            assert!(check.ok, "seed {seed} draw {draw_index}");
        }
    }
}

#[test]
fn weighted_disagreement_with_derivative_weights() {
    // The proof's weight choice: lambda_i = V_i(x) for a monotone function,
    // with the target set a sublevel set of that function.
    for seed in 0..30u64 {
        let m = 2 + (seed as usize % 4);
        let f = sampling::random_multilinear_f64(m, seed);
        let table = f.to_table().unwrap();
        let measure = ProductMeasure::new(0.5, m).unwrap();
        let level = table.median(&measure).unwrap();
        let members = (0..1u64 << m).filter(|&bits| table.value_bits(bits) <= level);
        let set = VertexSet::from_masks(m, members).unwrap();
        let x = sampling::random_point(m, seed.wrapping_add(404));
        let lambda: Vec<f64> =
            (0..m).map(|i| table.derivative_bits(x.bits(), i)).collect();
        let check = verify_weighted_disagreement(&set, &x, &lambda).unwrap();
        assert!(check.ok, "seed {seed}");
        // The aggregate telescoping bound feeds exactly this inequality.
        let telescoped = verify_telescoping(&table, &x, &check.witness, level).unwrap();
        assert!(telescoped.ok, "seed {seed}");
    }
}

#[test]
fn local_norm_deviation_clean_on_random_monotone_functions() {
    for seed in 0..25u64 {
        let m = 2 + (seed as usize % 5);
        let f = sampling::random_multilinear_f64(m, seed.wrapping_add(9000));
        let table = f.to_table().unwrap();
        for p in [0.2, 0.5, 0.8] {
            let measure = ProductMeasure::new(p, m).unwrap();
            let report = verify_local_norm_deviation(&table, &measure, None).unwrap();
            assert!(report.ok(), "seed {seed} p {p}: {:?}", report.violations.first());
        }
    }
}

#[test]
fn distance_concentration_clean_on_random_sets() {
    for seed in 0..40u64 {
        let m = 2 + (seed as usize % 4);
        let set = sampling::random_vertex_set(m, 12, seed.wrapping_add(31337));
        for p in [0.1, 0.5, 0.9] {
            let measure = ProductMeasure::new(p, m).unwrap();
            let report = verify_distance_concentration(&set, &measure, None).unwrap();
            assert!(report.ok(), "seed {seed} p {p}");
        }
    }
}

#[test]
fn telescoping_clean_on_random_monotone_instances() {
    for seed in 0..40u64 {
        let m = 2 + (seed as usize % 4);
        let f = sampling::random_multilinear_i64(m, 5, seed.wrapping_add(101));
        let table = f.to_table().unwrap();
        let x = sampling::random_point(m, seed.wrapping_add(202));
        // Pick the level as Z(y) for a random y, so the precondition holds.
        let y = sampling::random_point(m, seed.wrapping_add(303));
        let a = table.value(&y).unwrap();
        let report = verify_telescoping(&table, &x, &y, a).unwrap();
        assert!(report.ok, "seed {seed}");
        for step in &report.steps {
            assert!(step.ok, "seed {seed} coordinate {}", step.coordinate);
        }
        // The steps telescope: their sum is exactly Z(x) - Z(y).
        let sum: f64 = report.steps.iter().map(|s| s.step).sum();
        let difference = (table.value(&x).unwrap() - table.value(&y).unwrap()) as f64;
        assert_eq!(sum, difference, "seed {seed}");
    }
}

#[test]
fn solver_handles_larger_generator_sets() {
    // Beyond the acceptance regime: up to 14 members in dimension 7,
    // checked against exhaustive face enumeration.
    for seed in 0..20u64 {
        let m = 5 + (seed as usize % 3);
        let (set, x) = random_set_and_point(m, 14, seed.wrapping_add(60_000));
        let gens = generators(&set, &x).unwrap();
        let solved = convex_distance(&set, &x).unwrap();
        let oracle = min_norm_faces(&gens.to_vectors());
        assert!(
            (solved.value - oracle).abs() < 1e-9,
            "seed {seed}: solver {} faces {}",
            solved.value,
            oracle
        );
    }
}

#[test]
fn distance_concentration_holds_on_popcount_slices() {
    // Sublevel sets of the popcount are the near-extremal family for the
    // concentration bound; every threshold stays clean and the full-cube
    // slice touches equality at t = 0.
    for m in [4usize, 6, 8] {
        for p in [0.3, 0.7] {
            let measure = ProductMeasure::new(p, m).unwrap();
            for threshold in 0..=m as u32 {
                let members =
                    (0..1u64 << m).filter(|bits| bits.count_ones() <= threshold);
                let set = VertexSet::from_masks(m, members).unwrap();
                let report = verify_distance_concentration(&set, &measure, None).unwrap();
                assert!(
                    report.ok(),
                    "m {m} p {p} threshold {threshold}: {:?}",
                    report.violations.first()
                );
                assert!(report.max_lhs_over_bound <= 1.0 + 1e-9);
                if threshold == m as u32 {
                    assert!((report.max_lhs_over_bound - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn local_norm_deviation_holds_on_threshold_counters() {
    // Scaled coordinate sums: integer tables whose deviation events sit
    // exactly on attained levels.
    for m in [3usize, 5, 7] {
        let f = MultilinearFunction::new(m, (0..m).map(|i| (1u64 << i, 2i64))).unwrap();
        let table = f.to_table().unwrap();
        for p in [0.25, 0.5, 0.75] {
            let measure = ProductMeasure::new(p, m).unwrap();
            let report = verify_local_norm_deviation(&table, &measure, None).unwrap();
            assert!(report.ok(), "m {m} p {p}");
        }
    }
}

#[test]
fn deviation_verifier_matches_brute_force_cell_values() {
    // The production verifier uses sorted prefix/suffix masses; recompute
    // every (a, t) cell by a direct double loop and compare the worst ratio,
    // so an indexing slip cannot hide behind "zero violations".
    use concentra::cube::FunctionTable;
    let t_grid = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
    for seed in 0..20u64 {
        let m = 2 + (seed as usize % 5);
        let f = sampling::random_multilinear_f64(m, seed.wrapping_add(77_000));
        let table: FunctionTable<f64> = f.to_table().unwrap();
        let measure = ProductMeasure::new(0.3 + 0.05 * (seed % 9) as f64, m).unwrap();
        let report = verify_local_norm_deviation(&table, &measure, Some(&t_grid)).unwrap();

        let size = 1u64 << m;
        let mut worst: f64 = 0.0;
        let attained = table.distinct_values();
        for &a in &attained {
            for &t in &t_grid {
                let mut above = 0.0;
                let mut below = 0.0;
                for bits in 0..size {
                    let z = table.value_bits(bits);
                    let v = table.local_variance_bits(bits);
                    let w = measure.vertex_probability_bits(bits);
                    if z <= a {
                        below += w;
                    }
                    let in_event = if t > 0.0 {
                        v > 0.0 && z >= a + (v * t).sqrt()
                    } else {
                        z >= a
                    };
                    if in_event {
                        above += w;
                    }
                }
                worst = worst.max(above * below / (-t / 2.0).exp());
            }
        }
        assert!(
            (worst - report.max_lhs_over_bound).abs() < 1e-12,
            "seed {seed}: brute {worst} vs report {}",
            report.max_lhs_over_bound
        );
    }
}

#[test]
fn concentration_verifier_matches_brute_force_cell_values() {
    use concentra::talagrand::all_distances;
    for seed in 0..20u64 {
        let m = 2 + (seed as usize % 4);
        let set = sampling::random_vertex_set(m, 10, seed.wrapping_add(88_000));
        let measure = ProductMeasure::new(0.4, m).unwrap();
        let report = verify_distance_concentration(&set, &measure, None).unwrap();

        let distances = all_distances(&set, m).unwrap();
        let p_set = set.probability(&measure).unwrap();
        let mut worst: f64 = 0.0;
        for &t in &report.grid {
            let tail: f64 = (0..1u64 << m)
                .filter(|&bits| {
                    let d = distances[bits as usize];
                    d * d >= t
                })
                .map(|bits| measure.vertex_probability_bits(bits))
                .sum();
            worst = worst.max(p_set * tail / (-t / 2.0).exp());
        }
        assert!(
            (worst - report.max_lhs_over_bound).abs() < 1e-12,
            "seed {seed}: brute {worst} vs report {}",
            report.max_lhs_over_bound
        );
    }
}

#[test]
fn grid_oracle_agrees_with_faces_on_pattern_hulls() {
    for instance in 0..60u64 {
        let dim = 2 + (draw(11, 900, instance) % 5) as usize;
        let count = 1 + (draw(11, 901, instance) % 10) as usize;
        let gens: Vec<Vec<f64>> = (0..count)
            .map(|i| {
                let mask = draw(11, 902, instance * 64 + i as u64) % (1 << dim);
                (0..dim).map(|d| f64::from((mask >> d & 1) as u32)).collect()
            })
            .collect();
        let grid = min_norm_grid(&gens, 4, 30);
        let faces = min_norm_faces(&gens);
        assert!(
            (grid - faces).abs() < 5e-8,
            "instance {instance}: grid {grid} faces {faces}"
        );
    }
}
