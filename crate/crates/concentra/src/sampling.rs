//! Deterministic random instances for sweeps and tests, driven entirely by
//! the counter-based streams so every sweep is reproducible from one seed.

use crate::cube::{CubePoint, FunctionTable, MultilinearFunction};
use crate::rng::{draw, streams, unit};
use crate::talagrand::VertexSet;

fn mask_below(m: usize, bits: u64) -> u64 {
    if m == 64 {
        bits
    } else {
        bits & ((1u64 << m) - 1)
    }
}

/// Random nonnegative-coefficient function on `{0,1}^m` with between `m` and
/// `3m` monomials. Weights are dyadic multiples of 2^-20 in `(0, 1]`, so
/// every subset sum the tables form stays exact in `f64` and the monotone
/// checks compare without roundoff dust.
pub fn random_multilinear_f64(m: usize, seed: u64) -> MultilinearFunction<f64> {
    let count = m.max(1) + (draw(seed, streams::FUNCTIONS, 0) % (2 * m.max(1) + 1) as u64) as usize;
    let scale = f64::from(1 << 20);
    let terms = (0..count).map(|i| {
        let mask = mask_below(m, draw(seed, streams::FUNCTIONS, 1 + 2 * i as u64));
        let quantized = 1 + draw(seed, streams::FUNCTIONS, 2 + 2 * i as u64) % (1 << 20);
        (mask, quantized as f64 / scale)
    });
    MultilinearFunction::new(m, terms).expect("nonnegative weights by construction")
}

/// Random integer-coefficient function, weights in `1..=max_weight`.
pub fn random_multilinear_i64(m: usize, max_weight: i64, seed: u64) -> MultilinearFunction<i64> {
    let count = m.max(1) + (draw(seed, streams::FUNCTIONS, 0) % (2 * m.max(1) + 1) as u64) as usize;
    let terms = (0..count).map(|i| {
        let mask = mask_below(m, draw(seed, streams::FUNCTIONS, 1 + 2 * i as u64));
        let weight = 1 + (draw(seed, streams::FUNCTIONS, 2 + 2 * i as u64) % max_weight as u64) as i64;
        (mask, weight)
    });
    MultilinearFunction::new(m, terms).expect("positive weights by construction")
}

/// Arbitrary table with values uniform in `[0, 1)`; generally neither
/// multilinear nor monotone.
pub fn random_table_f64(m: usize, seed: u64) -> FunctionTable<f64> {
    FunctionTable::from_fn(m, |bits| unit(draw(seed, streams::TABLES, bits)))
        .expect("m within the table guard")
}

/// Random subset of the cube with between 1 and `max_size` distinct vertices.
pub fn random_vertex_set(m: usize, max_size: usize, seed: u64) -> VertexSet {
    let span = 1u64 << m;
    let size = 1 + (draw(seed, streams::SETS, 0) % max_size.min(span as usize) as u64) as usize;
    let mut members = std::collections::BTreeSet::new();
    let mut counter = 1u64;
    while members.len() < size {
        members.insert(draw(seed, streams::SETS, counter) % span);
        counter += 1;
    }
    VertexSet::from_masks(m, members).expect("nonempty by construction")
}

pub fn random_point(m: usize, seed: u64) -> CubePoint {
    CubePoint::new(mask_below(m, draw(seed, streams::POINTS, 0)), m).expect("masked to dimension")
}

/// Nonnegative weight vector with entries uniform in `[0, 1)`.
pub fn random_weights(m: usize, seed: u64) -> Vec<f64> {
    (0..m).map(|i| unit(draw(seed, streams::LAMBDAS, i as u64))).collect()
}
