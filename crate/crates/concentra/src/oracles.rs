//! Self-contained reference implementations used as independent checks by the
//! test suites. Each is deliberately naive and shares no code with the main
//! paths it is held against.

use crate::error::Result;
use crate::graph::{edge_endpoints, edge_index, Graph};
use crate::cycles::VertexPartition;

/// Minimum norm over the convex hull by dense grid search on the weight
/// simplex, in two stages that share nothing with the active-set solver.
///
/// Stage one evaluates every lattice mixture of a corner set that shrinks
/// toward the incumbent each round. Stage two polishes with dense 1-D grid
/// line searches along the pairwise exchange directions `e_j - e_i`; those
/// directions positively span the feasible cone at every point of the
/// simplex, so for a convex objective the polish cannot stall short of the
/// optimum.
pub fn min_norm_grid(generators: &[Vec<f64>], subdivisions: usize, rounds: usize) -> f64 {
    assert!(!generators.is_empty());
    let n = generators.len();
    let dim = generators[0].len();
    let norm_sq = |weights: &[f64]| -> f64 {
        let mut point = vec![0.0; dim];
        for (w, g) in weights.iter().zip(generators) {
            for (slot, &coord) in point.iter_mut().zip(g) {
                *slot += w * coord;
            }
        }
        point.iter().map(|v| v * v).sum()
    };

    let mut corners: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut corner = vec![0.0; n];
            corner[i] = 1.0;
            corner
        })
        .collect();
    let mut best_w = corners[0].clone();
    let mut best_f = norm_sq(&best_w);

    let mut counts = vec![0usize; n];
    for _ in 0..rounds {
        let mut improved: Option<(f64, Vec<f64>)> = None;
        enumerate_compositions(subdivisions, n, 0, &mut counts, &mut |counts| {
            let mut weights = vec![0.0; n];
            for (i, &c) in counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let share = c as f64 / subdivisions as f64;
                for (slot, &corner_w) in weights.iter_mut().zip(&corners[i]) {
                    *slot += share * corner_w;
                }
            }
            let f = norm_sq(&weights);
            let current_best = improved.as_ref().map_or(best_f, |(b, _)| *b);
            if f < current_best {
                improved = Some((f, weights));
            }
        });
        if let Some((f, w)) = improved {
            best_f = f;
            best_w = w;
        }
        for corner in &mut corners {
            for (c, b) in corner.iter_mut().zip(&best_w) {
                *c = b + (*c - b) * 0.5;
            }
        }
    }

    exchange_polish(generators, &mut best_w, &mut best_f, norm_sq);
    best_f.max(0.0).sqrt()
}

/// Repeated passes of 1-D grid line searches along every exchange direction
/// (mass moved from slot `i` to slot `j`), refining the best grid cell until
/// a full pass yields no improvement.
fn exchange_polish(
    generators: &[Vec<f64>],
    weights: &mut [f64],
    best_f: &mut f64,
    norm_sq: impl Fn(&[f64]) -> f64,
) {
    let n = generators.len();
    for _ in 0..2000 {
        let mut improved = false;
        for i in 0..n {
            if weights[i] <= 0.0 {
                continue;
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let budget = weights[i];
                let eval = |t: f64| {
                    let mut w = weights.to_vec();
                    w[i] -= t;
                    w[j] += t;
                    norm_sq(&w)
                };
                let t = line_grid_min(&eval, budget);
                let candidate = eval(t);
                if candidate < *best_f - 1e-16 {
                    weights[i] -= t;
                    weights[j] += t;
                    *best_f = candidate;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Dense 1-D grid minimization of a convex function on `[0, upper]`: the best
/// grid point's neighbors bracket a global minimizer, so refining into that
/// bracket converges.
fn line_grid_min(eval: &impl Fn(f64) -> f64, upper: f64) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = upper;
    let mut best_t = 0.0;
    let mut best_value = f64::INFINITY;
    for _ in 0..14 {
        let step = (hi - lo) / 32.0;
        if step <= 0.0 {
            break;
        }
        let mut level_index = 0usize;
        let mut level_value = f64::INFINITY;
        for index in 0..=32usize {
            let value = eval(lo + step * index as f64);
            if value < level_value {
                level_value = value;
                level_index = index;
            }
        }
        if level_value < best_value {
            best_value = level_value;
            best_t = lo + step * level_index as f64;
        }
        let new_lo = lo + step * level_index.saturating_sub(1) as f64;
        let new_hi = (lo + step * (level_index + 1) as f64).min(upper);
        lo = new_lo;
        hi = new_hi;
    }
    best_t
}

fn enumerate_compositions(
    remaining: usize,
    slots: usize,
    slot: usize,
    counts: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if slot == slots - 1 {
        counts[slot] = remaining;
        visit(counts);
        return;
    }
    for take in 0..=remaining {
        counts[slot] = take;
        enumerate_compositions(remaining - take, slots, slot + 1, counts, visit);
    }
}

/// Minimum norm over the convex hull by exhaustive face enumeration: the
/// optimum lies on some face, so solve the equality-constrained least-norm
/// problem on every generator subset and keep the best one whose barycentric
/// coordinates are nonnegative. Exact up to linear-algebra roundoff.
pub fn min_norm_faces(generators: &[Vec<f64>]) -> f64 {
    assert!(!generators.is_empty());
    assert!(generators.len() <= 20, "face enumeration is exponential in the generator count");
    let n = generators.len();
    let dim = generators[0].len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size > dim + 1 {
            continue;
        }
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let coords = if size == 1 {
            vec![1.0]
        } else {
            match solve_equality_kkt(generators, &subset) {
                Some(c) => c,
                None => continue,
            }
        };
        if coords.iter().any(|&c| c < -1e-9) {
            continue;
        }
        let mut point = vec![0.0; dim];
        for (idx, &g) in subset.iter().enumerate() {
            for (slot, &coord) in point.iter_mut().zip(&generators[g]) {
                *slot += coords[idx] * coord;
            }
        }
        let norm_sq: f64 = point.iter().map(|v| v * v).sum();
        best = best.min(norm_sq);
    }
    best.max(0.0).sqrt()
}

/// Solves `min |sum v_i g_i|` over `sum v_i = 1` through the KKT normal
/// equations with plain partial-pivot elimination; `None` when singular.
#[allow(clippy::needless_range_loop)]
fn solve_equality_kkt(generators: &[Vec<f64>], subset: &[usize]) -> Option<Vec<f64>> {
    let s = subset.len();
    let n = s + 1;
    let mut matrix = vec![vec![0.0f64; n + 1]; n];
    for j in 0..s {
        matrix[0][j + 1] = 1.0;
        matrix[j + 1][0] = 1.0;
    }
    for i in 0..s {
        for j in 0..s {
            matrix[i + 1][j + 1] = generators[subset[i]]
                .iter()
                .zip(&generators[subset[j]])
                .map(|(a, b)| a * b)
                .sum();
        }
    }
    matrix[0][n] = 1.0;
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| {
            matrix[a][col].abs().partial_cmp(&matrix[b][col].abs()).expect("finite")
        })?;
        if matrix[pivot][col].abs() < 1e-12 {
            return None;
        }
        matrix.swap(col, pivot);
        for row in col + 1..n {
            let factor = matrix[row][col] / matrix[col][col];
            for k in col..=n {
                matrix[row][k] -= factor * matrix[col][k];
            }
        }
    }
    let mut solution = vec![0.0; n];
    for row in (0..n).rev() {
        let mut value = matrix[row][n];
        for k in row + 1..n {
            value -= matrix[row][k] * solution[k];
        }
        solution[row] = value / matrix[row][row];
    }
    Some(solution[1..].to_vec())
}

/// Every k-cycle of the graph as a sorted edge-slot set, found by brute force
/// over vertex subsets and cyclic orders rather than DFS.
pub fn cycles_by_subsets(g: &Graph, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut subset = Vec::with_capacity(k);
    subsets_rec(g, k, 0, &mut subset, &mut out);
    out.sort();
    out
}

fn subsets_rec(g: &Graph, k: usize, from: usize, subset: &mut Vec<usize>, out: &mut Vec<Vec<u32>>) {
    if subset.len() == k {
        let anchor = subset[0];
        let rest: Vec<usize> = subset[1..].to_vec();
        let mut order = rest.clone();
        permute_orders(g, anchor, &mut order, 0, out);
        return;
    }
    for v in from..g.n() {
        subset.push(v);
        subsets_rec(g, k, v + 1, subset, out);
        subset.pop();
    }
}

fn permute_orders(
    g: &Graph,
    anchor: usize,
    order: &mut Vec<usize>,
    depth: usize,
    out: &mut Vec<Vec<u32>>,
) {
    let k_minus_1 = order.len();
    if depth == k_minus_1 {
        if order[0] > order[k_minus_1 - 1] {
            return; // reflection: count each cyclic order once
        }
        if !g.has_edge(anchor, order[0]) || !g.has_edge(order[k_minus_1 - 1], anchor) {
            return;
        }
        for pair in order.windows(2) {
            if !g.has_edge(pair[0], pair[1]) {
                return;
            }
        }
        let mut edges: Vec<u32> = Vec::with_capacity(k_minus_1 + 1);
        edges.push(edge_index(anchor, order[0]).expect("distinct") as u32);
        for pair in order.windows(2) {
            edges.push(edge_index(pair[0], pair[1]).expect("distinct") as u32);
        }
        edges.push(edge_index(order[k_minus_1 - 1], anchor).expect("distinct") as u32);
        edges.sort_unstable();
        out.push(edges);
        return;
    }
    for i in depth..k_minus_1 {
        order.swap(depth, i);
        permute_orders(g, anchor, order, depth + 1, out);
        order.swap(depth, i);
    }
}

pub fn count_cycles_by_subsets(g: &Graph, k: usize) -> u64 {
    cycles_by_subsets(g, k).len() as u64
}

/// W by materializing every cycle pair globally, the thing the production
/// path avoids. A pair qualifies when the cycles share exactly one edge and
/// no vertices beyond its endpoints.
pub fn shared_edge_pairs_by_all_pairs(g: &Graph, k: usize) -> u64 {
    let cycles = cycles_by_subsets(g, k);
    let vertex_sets: Vec<Vec<usize>> = cycles
        .iter()
        .map(|edges| {
            let mut vertices: Vec<usize> = edges
                .iter()
                .flat_map(|&e| {
                    let (u, v) = edge_endpoints(e as usize);
                    [u, v]
                })
                .collect();
            vertices.sort_unstable();
            vertices.dedup();
            vertices
        })
        .collect();
    let mut count = 0u64;
    for i in 0..cycles.len() {
        for j in i + 1..cycles.len() {
            let shared_edges =
                cycles[i].iter().filter(|e| cycles[j].binary_search(e).is_ok()).count();
            let shared_vertices = vertex_sets[i]
                .iter()
                .filter(|v| vertex_sets[j].binary_search(v).is_ok())
                .count();
            if shared_edges == 1 && shared_vertices == 2 {
                count += 1;
            }
        }
    }
    count
}

fn cycle_edge_set(vertices: &[usize]) -> Vec<u32> {
    let k = vertices.len();
    let mut edges: Vec<u32> = (0..k)
        .map(|i| edge_index(vertices[i], vertices[(i + 1) % k]).expect("distinct") as u32)
        .collect();
    edges.sort_unstable();
    edges
}

/// Cardinality of the injection set by raw tuple enumeration with the
/// exactly-one-common-edge condition spelled out, rather than derived from
/// the chain structure. With a partition, positions are confined to classes.
pub fn injections_by_tuples(g: &Graph, k: usize, partition: Option<&VertexPartition>) -> u64 {
    let len = 2 * k - 2;
    let mut tuple = Vec::with_capacity(len);
    let mut used = vec![false; g.n()];
    let mut count = 0u64;
    tuples_rec(g, len, partition, &mut tuple, &mut used, &mut |tuple| {
        let cycle_one: Vec<usize> = tuple[..k].to_vec();
        let mut cycle_two: Vec<usize> = tuple[k - 1..].to_vec();
        cycle_two.push(tuple[0]);
        let edges_one = cycle_edge_set(&cycle_one);
        let edges_two = cycle_edge_set(&cycle_two);
        if edges_one.iter().any(|&e| !g.edge_present(e as usize))
            || edges_two.iter().any(|&e| !g.edge_present(e as usize))
        {
            return;
        }
        let shared: Vec<u32> = edges_one
            .iter()
            .copied()
            .filter(|e| edges_two.binary_search(e).is_ok())
            .collect();
        let pivot = edge_index(tuple[0], tuple[k - 1]).expect("distinct") as u32;
        if shared == [pivot] {
            count += 1;
        }
    });
    count
}

fn tuples_rec(
    g: &Graph,
    len: usize,
    partition: Option<&VertexPartition>,
    tuple: &mut Vec<usize>,
    used: &mut Vec<bool>,
    visit: &mut impl FnMut(&[usize]),
) {
    if tuple.len() == len {
        visit(tuple);
        return;
    }
    let slot = tuple.len();
    for v in 0..g.n() {
        if used[v] {
            continue;
        }
        if let Some(p) = partition {
            if p.class_of(v) as usize != slot {
                continue;
            }
        }
        tuple.push(v);
        used[v] = true;
        tuples_rec(g, len, partition, tuple, used, visit);
        used[v] = false;
        tuple.pop();
    }
}

/// Partial-injection counts by filtering every l-tuple of distinct vertices
/// against the constraints among placed positions.
pub fn partial_injections_by_tuples(
    g: &Graph,
    k: usize,
    partition: &VertexPartition,
    v: usize,
    l: usize,
) -> u64 {
    assert!(l >= 1 && l <= 2 * k - 2);
    let len = 2 * k - 2;
    let mut count = 0u64;
    let mut tuple = vec![v];
    let mut used = vec![false; g.n()];
    used[v] = true;
    partial_tuples_rec(g, k, len, partition, l, &mut tuple, &mut used, &mut count);
    count
}

#[allow(clippy::too_many_arguments)]
fn partial_tuples_rec(
    g: &Graph,
    k: usize,
    len: usize,
    partition: &VertexPartition,
    l: usize,
    tuple: &mut Vec<usize>,
    used: &mut Vec<bool>,
    count: &mut u64,
) {
    if tuple.len() == l {
        if valid_partial(g, k, len, partition, tuple) {
            *count += 1;
        }
        return;
    }
    for w in 0..g.n() {
        if used[w] {
            continue;
        }
        tuple.push(w);
        used[w] = true;
        partial_tuples_rec(g, k, len, partition, l, tuple, used, count);
        used[w] = false;
        tuple.pop();
    }
}

fn valid_partial(g: &Graph, k: usize, len: usize, partition: &VertexPartition, tuple: &[usize]) -> bool {
    for (slot, &v) in tuple.iter().enumerate() {
        if partition.class_of(v) as usize != slot {
            return false;
        }
        if slot >= 1 && !g.has_edge(tuple[slot - 1], v) {
            return false;
        }
        if slot == k - 1 && !g.has_edge(tuple[0], v) {
            return false;
        }
        if slot == len - 1 && !g.has_edge(tuple[0], v) {
            return false;
        }
    }
    true
}

/// Exact expectation of the k-cycle count by enumerating every graph on `n`
/// vertices and weighting by the product measure. Feasible for n <= 6.
pub fn expected_cycles_by_enumeration(n: usize, k: usize, p: f64) -> Result<f64> {
    let m = n * (n - 1) / 2;
    assert!(m <= 20, "graph enumeration is 2^(n(n-1)/2)");
    let mut total = 0.0;
    for mask in 0..1u64 << m {
        let edges: Vec<(usize, usize)> =
            (0..m).filter(|&e| mask >> e & 1 == 1).map(edge_endpoints).collect();
        let g = Graph::from_edges(n, &edges)?;
        let count = crate::cycles::count_cycles(&g, k)? as f64;
        let ones = mask.count_ones() as i32;
        total += count * p.powi(ones) * (1.0 - p).powi(m as i32 - ones);
    }
    Ok(total)
}
