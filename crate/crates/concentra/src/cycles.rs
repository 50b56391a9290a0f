//! k-cycle enumeration in canonical form, per-edge cycle statistics, the
//! local variance of the cycle count, shared-edge pair counts, and the
//! injection sets that encode ordered pairs of cycles sharing exactly one
//! edge, with and without a vertex-partition constraint.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::cube::MultilinearFunction;
use crate::error::{Error, Result};
use crate::graph::{edge_index, DegreeProfile, Graph};
use crate::rng::{draw, streams};

/// Desk-scale guard on the vertex count for cycle enumeration; halves with
/// each unit of `k` beyond triangles.
pub fn default_n_limit(k: usize) -> usize {
    if k <= 3 {
        2000
    } else {
        (2000usize >> (k - 3)).max(64)
    }
}

fn check_cycle_args(g: &Graph, k: usize, n_limit: usize) -> Result<()> {
    if k < 3 || k > g.n() {
        return Err(Error::InvalidParameter(format!(
            "cycle length k = {k} outside 3..={}",
            g.n()
        )));
    }
    if g.n() > n_limit {
        return Err(Error::GraphTooLarge { n: g.n(), k, max: n_limit });
    }
    Ok(())
}

/// All k-cycles of the graph in canonical form: minimal vertex first, then
/// the smaller of its two cycle neighbors, which pins down rotation and
/// reflection so each cycle appears exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSet {
    pub k: usize,
    pub cycles: Vec<Vec<u32>>,
}

impl CycleSet {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Sorted edge slots of one cycle.
    pub fn edge_slots(&self, index: usize) -> Vec<u32> {
        cycle_edges(&self.cycles[index])
    }

    /// One cycle per line, vertices space-separated.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for cycle in &self.cycles {
            let words: Vec<String> = cycle.iter().map(u32::to_string).collect();
            out.push_str(&words.join(" "));
            out.push('\n');
        }
        out
    }
}

fn cycle_edges(cycle: &[u32]) -> Vec<u32> {
    let k = cycle.len();
    let mut edges: Vec<u32> = (0..k)
        .map(|i| {
            edge_index(cycle[i] as usize, cycle[(i + 1) % k] as usize).expect("distinct") as u32
        })
        .collect();
    edges.sort_unstable();
    edges
}

fn cycles_from_start(g: &Graph, k: usize, start: usize) -> Vec<Vec<u32>> {
    let mut found = Vec::new();
    let mut path = vec![start as u32];
    let mut used = vec![false; g.n()];
    used[start] = true;
    dfs_extend(g, k, start, &mut path, &mut used, &mut found);
    found
}

fn dfs_extend(
    g: &Graph,
    k: usize,
    start: usize,
    path: &mut Vec<u32>,
    used: &mut Vec<bool>,
    found: &mut Vec<Vec<u32>>,
) {
    let last = *path.last().expect("nonempty path") as usize;
    if path.len() == k {
        if g.has_edge(last, start) && path[1] < path[k - 1] {
            found.push(path.clone());
        }
        return;
    }
    // Only vertices above the start can extend, so the minimal vertex leads.
    for w in start + 1..g.n() {
        if !used[w] && g.has_edge(last, w) {
            path.push(w as u32);
            used[w] = true;
            dfs_extend(g, k, start, path, used, found);
            used[w] = false;
            path.pop();
        }
    }
}

/// Enumerates every present k-cycle once, in canonical form, deterministically
/// ordered (start vertex ascending, then lexicographic DFS order).
pub fn enumerate_cycles(g: &Graph, k: usize) -> Result<CycleSet> {
    enumerate_cycles_with_limit(g, k, default_n_limit(k))
}

pub fn enumerate_cycles_with_limit(g: &Graph, k: usize, n_limit: usize) -> Result<CycleSet> {
    check_cycle_args(g, k, n_limit)?;
    let per_start: Vec<Vec<Vec<u32>>> = (0..g.n())
        .into_par_iter()
        .map(|start| cycles_from_start(g, k, start))
        .collect();
    Ok(CycleSet { k, cycles: per_start.into_iter().flatten().collect() })
}

/// Triangle count from adjacency bitsets; the fast path behind
/// [`count_cycles`] for `k = 3`.
pub fn triangle_count_bitset(g: &Graph) -> u64 {
    let mut total = 0u64;
    for (_, u, v) in g.present_edges() {
        total += crate::bits::and_count_above(g.adjacency_row(u), g.adjacency_row(v), v) as u64;
    }
    total
}

/// Number of present k-cycles. Triangles go through the bitset fast path;
/// the generic DFS covers the rest and the two are held to agree by tests.
pub fn count_cycles(g: &Graph, k: usize) -> Result<u64> {
    check_cycle_args(g, k, default_n_limit(k))?;
    if k == 3 {
        return Ok(triangle_count_bitset(g));
    }
    let counts: Vec<u64> = (0..g.n())
        .into_par_iter()
        .map(|start| cycles_from_start(g, k, start).len() as u64)
        .collect();
    Ok(counts.iter().sum())
}

/// Closed form `n! / (2k (n-k)!)` for the number of k-cycles in the complete
/// graph, computed as a falling factorial.
pub fn complete_graph_cycles(n: usize, k: usize) -> Result<u64> {
    if k < 3 || k > n {
        return Err(Error::InvalidParameter(format!("k = {k} outside 3..={n}")));
    }
    let mut product = 1u64;
    for i in 0..k {
        product *= (n - i) as u64;
    }
    Ok(product / (2 * k as u64))
}

/// Cycle-count statistics of one graph at one `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleStatistics {
    pub k: usize,
    /// Z: number of present k-cycles.
    pub count: u64,
    /// N_e: cycles through each present edge; absent keys mean zero.
    pub per_edge: BTreeMap<usize, u64>,
    /// V = sum over present edges of N_e^2, the local variance of the cycle
    /// count at this graph.
    pub local_variance: u64,
    /// W: unordered pairs of distinct cycles whose intersection is exactly
    /// one edge: one common edge and no common vertices beyond its
    /// endpoints. That is the configuration the injection encoding below
    /// captures; for triangles it coincides with plain one-shared-edge
    /// counting.
    pub shared_edge_pairs: u64,
}

impl CycleStatistics {
    /// `sum_e N_e = k Z`.
    pub fn handshake_ok(&self) -> bool {
        self.per_edge.values().sum::<u64>() == self.k as u64 * self.count
    }

    /// Histogram of N_e over edges that carry at least one cycle, as sorted
    /// `[value, edges]` pairs.
    pub fn per_edge_histogram(&self) -> Vec<(u64, u64)> {
        let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
        for &n_e in self.per_edge.values() {
            *histogram.entry(n_e).or_insert(0) += 1;
        }
        histogram.into_iter().collect()
    }

    /// Wire schema: `{"k", "Z", "V", "W", "per_edge_histogram"}`.
    pub fn to_json(&self) -> String {
        let histogram: Vec<[u64; 2]> =
            self.per_edge_histogram().into_iter().map(|(value, edges)| [value, edges]).collect();
        serde_json::json!({
            "k": self.k,
            "Z": self.count,
            "V": self.local_variance,
            "W": self.shared_edge_pairs,
            "per_edge_histogram": histogram,
        })
        .to_string()
    }
}

/// Full cycle statistics: Z, per-edge counts, V, and W. W is found by
/// per-edge pairwise scans over the cycles through each edge, never by
/// materializing all pairs globally, which keeps memory at the size of the
/// largest per-edge list.
pub fn cycle_statistics(g: &Graph, k: usize) -> Result<CycleStatistics> {
    let cycles = enumerate_cycles(g, k)?;
    let edge_sets: Vec<Vec<u32>> = cycles.cycles.iter().map(|c| cycle_edges(c)).collect();
    let vertex_sets: Vec<Vec<u32>> = cycles
        .cycles
        .iter()
        .map(|c| {
            let mut vertices = c.clone();
            vertices.sort_unstable();
            vertices
        })
        .collect();

    let mut per_edge: BTreeMap<usize, u64> = BTreeMap::new();
    let mut through: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for (id, edges) in edge_sets.iter().enumerate() {
        for &e in edges {
            *per_edge.entry(e as usize).or_insert(0) += 1;
            through.entry(e as usize).or_default().push(id as u32);
        }
    }
    let local_variance = per_edge.values().map(|&n| n * n).sum();

    // A qualifying pair shares one edge and only its two endpoints, so it is
    // counted exactly once: at that edge.
    let shared_edge_pairs = through
        .values()
        .map(|ids| {
            let mut pairs = 0u64;
            for i in 0..ids.len() {
                for j in i + 1..ids.len() {
                    let (a, b) = (ids[i] as usize, ids[j] as usize);
                    if sorted_intersection_count(&edge_sets[a], &edge_sets[b]) == 1
                        && sorted_intersection_count(&vertex_sets[a], &vertex_sets[b]) == 2
                    {
                        pairs += 1;
                    }
                }
            }
            pairs
        })
        .sum();

    Ok(CycleStatistics {
        k,
        count: cycles.len() as u64,
        per_edge,
        local_variance,
        shared_edge_pairs,
    })
}

fn sorted_intersection_count(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut shared) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    shared
}

/// W alone, via the same per-edge scan as [`cycle_statistics`].
pub fn count_shared_edge_pairs(g: &Graph, k: usize) -> Result<u64> {
    Ok(cycle_statistics(g, k)?.shared_edge_pairs)
}

/// The cycle-count polynomial of the complete graph on `n` vertices: one
/// unit-weight monomial per k-cycle over the `n(n-1)/2` edge coordinates.
/// Evaluating it at a presence vector counts the present cycles.
pub fn cycle_polynomial(n: usize, k: usize) -> Result<MultilinearFunction<i64>> {
    let m = n * (n - 1) / 2;
    if m > 64 {
        return Err(Error::InvalidParameter(format!(
            "edge space of n = {n} does not fit packed cube coordinates"
        )));
    }
    let complete = Graph::complete(n)?;
    let cycles = enumerate_cycles(&complete, k)?;
    let terms = cycles.cycles.iter().map(|c| {
        let mask = cycle_edges(c).iter().fold(0u64, |acc, &e| acc | 1 << e);
        (mask, 1i64)
    });
    MultilinearFunction::new(m, terms)
}

/// Disjoint classes `F_1 ... F_{2k-2}` covering every vertex; class `c`
/// (0-based) holds position `c + 1` of the injections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    class_of: Vec<u32>,
    classes: Vec<Vec<usize>>,
}

impl VertexPartition {
    pub fn from_class_assignment(class_of: Vec<u32>, num_classes: usize) -> Result<Self> {
        if class_of.iter().any(|&c| c as usize >= num_classes) {
            return Err(Error::InvalidParameter("class index out of range".into()));
        }
        let mut classes = vec![Vec::new(); num_classes];
        for (v, &c) in class_of.iter().enumerate() {
            classes[c as usize].push(v);
        }
        Ok(VertexPartition { class_of, classes })
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, v: usize) -> u32 {
        self.class_of[v]
    }

    pub fn class(&self, c: usize) -> &[usize] {
        &self.classes[c]
    }
}

/// Uniform i.i.d. assignment of each vertex to one of `2k - 2` classes.
/// Independence makes the survival probability of any fixed injection exactly
/// `(2k-2)^-(2k-2)`, which the tests lean on.
pub fn random_partition(n: usize, k: usize, seed: u64) -> Result<VertexPartition> {
    let classes = 2 * k - 2;
    if k < 3 {
        return Err(Error::InvalidParameter(format!("k = {k} must be at least 3")));
    }
    if n < classes {
        return Err(Error::InvalidParameter(format!(
            "n = {n} is smaller than the {classes} partition classes"
        )));
    }
    let class_of = (0..n)
        .map(|v| (draw(seed, streams::PARTITION, v as u64) % classes as u64) as u32)
        .collect();
    VertexPartition::from_class_assignment(class_of, classes)
}

/// Walks every injection encoding an ordered pair of cycles whose only common
/// edge joins position 1 to position k. With a partition, position `i` is
/// further confined to class `F_i`.
///
/// The slice passed to the callback holds the 2k-2 images in position order.
fn for_each_injection(
    g: &Graph,
    k: usize,
    partition: Option<&VertexPartition>,
    mut visit: impl FnMut(&[usize]),
) -> Result<()> {
    check_cycle_args(g, k, default_n_limit(k))?;
    if let Some(p) = partition {
        if p.num_classes() != 2 * k - 2 {
            return Err(Error::InvalidParameter(format!(
                "partition has {} classes, expected {}",
                p.num_classes(),
                2 * k - 2
            )));
        }
        if p.class_of.len() != g.n() {
            return Err(Error::DimensionMismatch { expected: g.n(), found: p.class_of.len() });
        }
    }
    let len = 2 * k - 2;
    let class_ok =
        |slot: usize, v: usize| partition.is_none_or(|p| p.class_of(v) as usize == slot);

    let mut sigma = vec![0usize; len];
    let mut used = vec![false; g.n()];
    for (_, u, v) in g.present_edges() {
        for (a, b) in [(u, v), (v, u)] {
            if !class_ok(0, a) || !class_ok(k - 1, b) {
                continue;
            }
            sigma[0] = a;
            sigma[k - 1] = b;
            used[a] = true;
            used[b] = true;
            fill_positions(g, k, &mut sigma, &mut used, 1, &class_ok, &mut visit);
            used[a] = false;
            used[b] = false;
        }
    }
    Ok(())
}

/// Extends the injection at slice slot `slot`, skipping the pre-placed slot
/// `k - 1`. Chain edges bind consecutive slots; the closing edge back to
/// position 1 binds the last slot.
fn fill_positions(
    g: &Graph,
    k: usize,
    sigma: &mut Vec<usize>,
    used: &mut Vec<bool>,
    slot: usize,
    class_ok: &impl Fn(usize, usize) -> bool,
    visit: &mut impl FnMut(&[usize]),
) {
    let len = 2 * k - 2;
    if slot == len {
        visit(sigma);
        return;
    }
    if slot == k - 1 {
        // Shared-edge endpoint is already placed; the chain edge to it was
        // enforced when the previous slot was filled.
        fill_positions(g, k, sigma, used, slot + 1, class_ok, visit);
        return;
    }
    let prev = sigma[slot - 1];
    for w in 0..g.n() {
        if used[w] || !class_ok(slot, w) || !g.has_edge(prev, w) {
            continue;
        }
        // Entering the slot before the shared endpoint closes cycle one;
        // the final slot closes cycle two back at position 1.
        if slot + 1 == k - 1 && !g.has_edge(w, sigma[k - 1]) {
            continue;
        }
        if slot == len - 1 && !g.has_edge(w, sigma[0]) {
            continue;
        }
        sigma[slot] = w;
        used[w] = true;
        fill_positions(g, k, sigma, used, slot + 1, class_ok, visit);
        used[w] = false;
    }
}

/// Cardinality of the unconstrained injection set: ordered pairs of present
/// cycles sharing exactly the edge from position 1 to position k. Counted by
/// direct enumeration, independently of the pair scan behind W.
pub fn count_shared_edge_injections(g: &Graph, k: usize) -> Result<u64> {
    let mut count = 0u64;
    for_each_injection(g, k, None, |_| count += 1)?;
    Ok(count)
}

/// Cardinality of the partition-constrained injection set.
pub fn count_partitioned_injections(
    g: &Graph,
    k: usize,
    partition: &VertexPartition,
) -> Result<u64> {
    let mut count = 0u64;
    for_each_injection(g, k, Some(partition), |_| count += 1)?;
    Ok(count)
}

/// Counts of partial injections from one first-class vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialInjectionCounts {
    /// `per_level[l - 1]`: partial injections `(sigma(1)..sigma(l))` passing
    /// every constraint among the placed positions. The final level equals
    /// the number of full injections starting at the vertex.
    pub per_level: Vec<u64>,
    /// For `l >= 2`: the same counts keyed by the degree bucket of
    /// `sigma(l - 1)`.
    pub per_level_by_bucket: Vec<BTreeMap<u32, u64>>,
}

/// Counts locally valid partial injections of each length `1..=2k-2` starting
/// at `v`, with the per-level breakdown by the degree bucket of the
/// next-to-last image. `v` must lie in the first partition class.
pub fn partial_injection_counts(
    g: &Graph,
    k: usize,
    partition: &VertexPartition,
    profile: &DegreeProfile,
    v: usize,
) -> Result<PartialInjectionCounts> {
    check_cycle_args(g, k, default_n_limit(k))?;
    if v >= g.n() {
        return Err(Error::InvalidParameter(format!("vertex {v} outside 0..{}", g.n())));
    }
    if partition.class_of(v) != 0 {
        return Err(Error::InvalidParameter(format!(
            "vertex {v} is not in the first partition class"
        )));
    }
    let len = 2 * k - 2;
    let mut per_level = vec![0u64; len];
    let mut per_level_by_bucket = vec![BTreeMap::new(); len];
    let mut prefix = vec![v];
    let mut used = vec![false; g.n()];
    used[v] = true;
    count_partials(
        g,
        k,
        partition,
        profile,
        &mut prefix,
        &mut used,
        &mut per_level,
        &mut per_level_by_bucket,
    );
    Ok(PartialInjectionCounts { per_level, per_level_by_bucket })
}

#[allow(clippy::too_many_arguments)]
fn count_partials(
    g: &Graph,
    k: usize,
    partition: &VertexPartition,
    profile: &DegreeProfile,
    prefix: &mut Vec<usize>,
    used: &mut Vec<bool>,
    per_level: &mut [u64],
    per_level_by_bucket: &mut [BTreeMap<u32, u64>],
) {
    let len = 2 * k - 2;
    let level = prefix.len();
    per_level[level - 1] += 1;
    if level >= 2 {
        let bucket = profile.bucket_of(prefix[level - 2]);
        *per_level_by_bucket[level - 1].entry(bucket).or_insert(0) += 1;
    }
    if level == len {
        return;
    }
    let slot = level; // next 0-based slot to fill
    let prev = prefix[level - 1];
    for w in 0..g.n() {
        if used[w] || partition.class_of(w) as usize != slot || !g.has_edge(prev, w) {
            continue;
        }
        // Constraints among placed positions only: the shared edge once
        // position k is placed, the closing edge at the last position.
        if slot == k - 1 && !g.has_edge(w, prefix[0]) {
            continue;
        }
        if slot == len - 1 && !g.has_edge(w, prefix[0]) {
            continue;
        }
        prefix.push(w);
        used[w] = true;
        count_partials(g, k, partition, profile, prefix, used, per_level, per_level_by_bucket);
        used[w] = false;
        prefix.pop();
    }
}

/// The empirical constant of the path bound: the worst ratio
/// `card S_l(v) / (max(d_v, np) (np)^(l-2))` over first-class vertices and
/// levels `l >= 2`. Reported as a diagnostic, not asserted against anything.
pub fn partial_injection_bound_ratio(
    g: &Graph,
    k: usize,
    p: f64,
    partition: &VertexPartition,
) -> Result<f64> {
    let np = g.n() as f64 * p;
    if np <= 0.0 {
        return Err(Error::InvalidParameter(format!("np = {np} must be positive")));
    }
    let profile = crate::graph::degree_buckets(g, p)?;
    let mut worst: f64 = 0.0;
    for &v in partition.class(0) {
        let counts = partial_injection_counts(g, k, partition, &profile, v)?;
        let d_plus = (g.degree(v) as f64).max(np);
        for l in 2..=2 * k - 2 {
            let ratio = counts.per_level[l - 1] as f64 / (d_plus * np.powi(l as i32 - 2));
            worst = worst.max(ratio);
        }
    }
    Ok(worst)
}

/// Split of the constrained injections by the degree bucket of position 1,
/// plus the distinct traces of the low-bucket part on the positions that spell
/// out the second cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectionDecomposition {
    /// Injections whose first image lies in the low degree bucket.
    pub low_bucket: u64,
    /// The rest.
    pub high_bucket: u64,
    /// Distinct traces `(sigma(1), sigma(k), ..., sigma(2k-2))` over the
    /// low-bucket injections; each trace reads off one present cycle.
    pub distinct_traces: u64,
    /// Present cycle count, the cap the traces are checked against.
    pub cycle_count: u64,
    pub traces_bounded: bool,
}

pub fn injection_decomposition(
    g: &Graph,
    k: usize,
    partition: &VertexPartition,
    p: f64,
) -> Result<InjectionDecomposition> {
    let profile = crate::graph::degree_buckets(g, p)?;
    let mut low_bucket = 0u64;
    let mut high_bucket = 0u64;
    let mut traces: std::collections::BTreeSet<Vec<usize>> = std::collections::BTreeSet::new();
    for_each_injection(g, k, Some(partition), |sigma| {
        if profile.bucket_of(sigma[0]) == 1 {
            low_bucket += 1;
            let mut trace = Vec::with_capacity(k);
            trace.push(sigma[0]);
            trace.extend_from_slice(&sigma[k - 1..]);
            traces.insert(trace);
        } else {
            high_bucket += 1;
        }
    })?;
    let cycle_count = count_cycles(g, k)?;
    let distinct_traces = traces.len() as u64;
    Ok(InjectionDecomposition {
        low_bucket,
        high_bucket,
        distinct_traces,
        cycle_count,
        traces_bounded: distinct_traces <= cycle_count,
    })
}

/// Which polynomial in `np` caps the local variance in the ratio diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum VarianceBudgetForm {
    /// `(np)^(k-2) Z + (np)^(2k-2)`, the stated bound.
    Standard,
    /// `(np)^k Z + (np)^(2k)`, the variant that appears mid-derivation;
    /// exposed for comparison.
    Alternate,
}

/// `V / ((np)^(k-2) Z + (np)^(2(k-1)))` (or the alternate exponents).
/// Zero for an empty edge budget (`np = 0`).
pub fn variance_ratio(stats: &CycleStatistics, np: f64, form: VarianceBudgetForm) -> f64 {
    if np <= 0.0 {
        return 0.0;
    }
    let k = stats.k as i32;
    let (z_exp, const_exp) = match form {
        VarianceBudgetForm::Standard => (k - 2, 2 * (k - 1)),
        VarianceBudgetForm::Alternate => (k, 2 * k),
    };
    let denominator = np.powi(z_exp) * stats.count as f64 + np.powi(const_exp);
    stats.local_variance as f64 / denominator
}
