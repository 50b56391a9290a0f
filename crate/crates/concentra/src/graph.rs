//! Erdos-Renyi sampling over a fixed edge indexing, degree statistics, the
//! dyadic degree-bucket decomposition, and Monte Carlo estimators for the two
//! degree-tail events.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::cube::CubePoint;
use crate::error::{Error, Result};
use crate::rng::{draw, streams, unit};
use crate::stats::{wilson_interval, Z95};

/// Colexicographic index of the undirected edge `{u, v}`:
/// `max(u,v) * (max(u,v) - 1) / 2 + min(u,v)`. Symmetric and bijective onto
/// `[0, n(n-1)/2)` for vertices below `n`.
pub fn edge_index(u: usize, v: usize) -> Result<usize> {
    if u == v {
        return Err(Error::SelfLoop(u));
    }
    let (lo, hi) = if u < v { (u, v) } else { (v, u) };
    Ok(hi * (hi - 1) / 2 + lo)
}

/// Inverse of [`edge_index`]: the endpoints `(lo, hi)` of edge slot `e`.
pub fn edge_endpoints(e: usize) -> (usize, usize) {
    // hi is the largest vertex with hi(hi-1)/2 <= e.
    let mut hi = ((2.0 * e as f64 + 0.25).sqrt() + 0.5) as usize;
    while hi * (hi - 1) / 2 > e {
        hi -= 1;
    }
    while (hi + 1) * hi / 2 <= e {
        hi += 1;
    }
    (e - hi * (hi - 1) / 2, hi)
}

/// Undirected graph on `n` vertices with a presence bit per edge slot and a
/// dense adjacency bit matrix. Presence and adjacency are kept consistent by
/// construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words_per_row: usize,
    presence: Vec<u64>,
    adjacency: Vec<u64>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n = {n} must be at least 2")));
        }
        let words_per_row = bits::words_for(n);
        Ok(Graph {
            n,
            words_per_row,
            presence: vec![0; bits::words_for(n * (n - 1) / 2)],
            adjacency: vec![0; n * words_per_row],
            edge_count: 0,
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for v in 1..n {
            for u in 0..v {
                g.add_edge(u, v)?;
            }
        }
        Ok(g)
    }

    /// G(n, p) draw: each edge slot present independently with probability
    /// `p`, decided by the counter-based stream keyed on `(seed, slot)`.
    /// Identical `(n, p, seed)` produce bit-identical graphs everywhere.
    pub fn sample(n: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("p = {p} is not in [0, 1]")));
        }
        let mut g = Graph::empty(n)?;
        let mut e = 0usize;
        for v in 1..n {
            for u in 0..v {
                if unit(draw(seed, streams::EDGES, e as u64)) < p {
                    g.insert(u, v, e);
                }
                e += 1;
            }
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    fn insert(&mut self, u: usize, v: usize, e: usize) {
        if !bits::get(&self.presence, e) {
            bits::set(&mut self.presence, e, true);
            bits::set(&mut self.adjacency[u * self.words_per_row..(u + 1) * self.words_per_row], v, true);
            bits::set(&mut self.adjacency[v * self.words_per_row..(v + 1) * self.words_per_row], u, true);
            self.edge_count += 1;
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let e = self.checked_index(u, v)?;
        self.insert(u, v, e);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let e = self.checked_index(u, v)?;
        if bits::get(&self.presence, e) {
            bits::set(&mut self.presence, e, false);
            bits::set(&mut self.adjacency[u * self.words_per_row..(u + 1) * self.words_per_row], v, false);
            bits::set(&mut self.adjacency[v * self.words_per_row..(v + 1) * self.words_per_row], u, false);
            self.edge_count -= 1;
        }
        Ok(())
    }

    fn checked_index(&self, u: usize, v: usize) -> Result<usize> {
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidParameter(format!(
                "vertex pair ({u}, {v}) outside 0..{}",
                self.n
            )));
        }
        edge_index(u, v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edge slots, `n(n-1)/2`.
    pub fn edge_slots(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v
            && u < self.n
            && v < self.n
            && bits::get(&self.presence, edge_index(u, v).expect("distinct"))
    }

    pub fn edge_present(&self, e: usize) -> bool {
        bits::get(&self.presence, e)
    }

    /// Raw presence words; bit `e` is edge slot `e`. Used by determinism
    /// checks and the cube interop.
    pub fn presence_words(&self) -> &[u64] {
        &self.presence
    }

    pub fn adjacency_row(&self, v: usize) -> &[u64] {
        &self.adjacency[v * self.words_per_row..(v + 1) * self.words_per_row]
    }

    pub fn degree(&self, v: usize) -> usize {
        bits::count_ones(self.adjacency_row(v))
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let row = self.adjacency_row(v);
        (0..self.n).filter(|&u| bits::get(row, u)).collect()
    }

    /// Present edges as `(slot, u, v)` with `u < v`, ascending by slot.
    pub fn present_edges(&self) -> Vec<(usize, usize, usize)> {
        let mut edges = Vec::with_capacity(self.edge_count);
        let mut e = 0usize;
        for v in 1..self.n {
            for u in 0..v {
                if bits::get(&self.presence, e) {
                    edges.push((e, u, v));
                }
                e += 1;
            }
        }
        edges
    }

    /// The presence vector as a cube vertex; requires at most 64 edge slots
    /// (n <= 11).
    pub fn to_cube_point(&self) -> Result<CubePoint> {
        let m = self.edge_slots();
        if m > 64 {
            return Err(Error::InvalidParameter(format!(
                "edge space of n = {} does not fit a packed cube point",
                self.n
            )));
        }
        let mut bits_packed = 0u64;
        for e in 0..m {
            if bits::get(&self.presence, e) {
                bits_packed |= 1 << e;
            }
        }
        CubePoint::new(bits_packed, m)
    }

    /// Plain-text edge list: a JSON header line `{"n": int}` followed by one
    /// `u v` pair per line (0-based).
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{{\"n\": {}}}\n", self.n);
        for (_, u, v) in self.present_edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty edge list".into()))?;
        #[derive(Deserialize)]
        struct Header {
            n: usize,
        }
        let header: Header = serde_json::from_str(header.trim())
            .map_err(|e| Error::Parse(format!("bad header: {e}")))?;
        let mut g = Graph::empty(header.n)?;
        for line in lines {
            let mut parts = line.split_whitespace();
            let u: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line: {line:?}")))?;
            let v: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line: {line:?}")))?;
            g.add_edge(u, v)?;
        }
        Ok(g)
    }
}

/// Base conventions for the unstated logarithms in the bucket thresholds:
/// the bucket-index ceiling reads `j <= log2(np)` and the iterated logarithm
/// reads `ln(ln(np))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogConventions {
    pub ceiling_base: f64,
    pub loglog_base: f64,
}

impl Default for LogConventions {
    fn default() -> Self {
        LogConventions { ceiling_base: 2.0, loglog_base: std::f64::consts::E }
    }
}

impl LogConventions {
    pub fn bucket_ceiling(&self, np: f64) -> u32 {
        let value = np.ln() / self.ceiling_base.ln();
        if value < 2.0 {
            1
        } else {
            value.floor() as u32
        }
    }

    pub fn loglog(&self, np: f64) -> f64 {
        let inner = np.ln() / self.loglog_base.ln();
        inner.ln() / self.loglog_base.ln()
    }
}

/// Index of the degree bucket holding degree `d` at density `np`: bucket 1 is
/// `d < 16 np`, bucket `j >= 2` is the dyadic slab `[2^(j+2) np, 2^(j+3) np)`.
/// Degrees below `16 np` always land in bucket 1.
pub fn bucket_index(degree: usize, np: f64) -> u32 {
    let d = degree as f64;
    if d < 16.0 * np {
        return 1;
    }
    // Seed from the logarithm, then settle the boundary by containment; the
    // clamp keeps pathological densities out of exponent overflow.
    let estimate = ((d / np).log2() - 2.0).floor();
    let mut j = if estimate.is_finite() { estimate.clamp(2.0, 1050.0) as u32 } else { 1050 };
    while j > 2 && 2f64.powi(j as i32 + 2) * np > d {
        j -= 1;
    }
    while 2f64.powi(j as i32 + 3) * np <= d {
        j += 1;
    }
    j
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeBucket {
    /// 1 for the low bucket, j >= 2 for the dyadic slabs.
    pub index: u32,
    pub vertices: Vec<usize>,
}

/// Per-vertex degrees and the bucket partition of the vertex set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub degrees: Vec<usize>,
    /// Nonempty buckets, ascending by index; together they partition the
    /// vertex set.
    pub buckets: Vec<DegreeBucket>,
}

impl DegreeProfile {
    pub fn bucket_of(&self, v: usize) -> u32 {
        self.buckets
            .iter()
            .find(|b| b.vertices.binary_search(&v).is_ok())
            .map(|b| b.index)
            .expect("buckets partition the vertex set")
    }

    pub fn cardinality(&self, index: u32) -> usize {
        self.buckets
            .iter()
            .find(|b| b.index == index)
            .map_or(0, |b| b.vertices.len())
    }
}

pub fn degree_buckets(g: &Graph, p: f64) -> Result<DegreeProfile> {
    let np = g.n() as f64 * p;
    if np <= 0.0 {
        return Err(Error::InvalidParameter(format!("np = {np} must be positive")));
    }
    let degrees = g.degrees();
    let mut by_index: std::collections::BTreeMap<u32, Vec<usize>> = std::collections::BTreeMap::new();
    for (v, &d) in degrees.iter().enumerate() {
        by_index.entry(bucket_index(d, np)).or_default().push(v);
    }
    let buckets = by_index
        .into_iter()
        .map(|(index, vertices)| DegreeBucket { index, vertices })
        .collect();
    Ok(DegreeProfile { degrees, buckets })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BucketCheck {
    pub index: u32,
    pub cardinality: usize,
    /// `np / (j 2^j loglog(np))`.
    pub threshold: f64,
}

/// The degree-regularity event: the maximum degree stays at or below `(np)^2`
/// and every dyadic bucket up to the ceiling stays below its cardinality
/// threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeRegularity {
    pub holds: bool,
    pub max_degree: usize,
    pub max_degree_bound: f64,
    pub bucket_checks: Vec<BucketCheck>,
}

/// Evaluates the regularity event. Requires `np > e^e` so the iterated
/// logarithm in the thresholds exceeds 1.
pub fn degree_regularity(g: &Graph, p: f64) -> Result<DegreeRegularity> {
    degree_regularity_with(g, p, LogConventions::default())
}

pub fn degree_regularity_with(
    g: &Graph,
    p: f64,
    conventions: LogConventions,
) -> Result<DegreeRegularity> {
    let np = g.n() as f64 * p;
    let guard = std::f64::consts::E.exp();
    if np <= guard {
        return Err(Error::NpBelowGuard { np });
    }
    let profile = degree_buckets(g, p)?;
    let max_degree = profile.degrees.iter().copied().max().unwrap_or(0);
    let max_degree_bound = np * np;
    let loglog = conventions.loglog(np);
    let ceiling = conventions.bucket_ceiling(np);

    let mut holds = (max_degree as f64) <= max_degree_bound;
    let mut bucket_checks = Vec::new();
    for j in 2..=ceiling {
        let threshold = np / (f64::from(j) * 2f64.powi(j as i32) * loglog);
        let cardinality = profile.cardinality(j);
        if cardinality as f64 > threshold {
            holds = false;
        }
        bucket_checks.push(BucketCheck { index: j, cardinality, threshold });
    }
    Ok(DegreeRegularity { holds, max_degree, max_degree_bound, bucket_checks })
}

/// Empirical frequency of a seeded event with its Wilson interval and the
/// theoretical bound it is compared against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub trials: usize,
    pub occurrences: usize,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub bound: f64,
}

fn estimate_event(
    n: usize,
    p: f64,
    trials: usize,
    seed: u64,
    bound: f64,
    event: impl Fn(&Graph) -> bool + Sync,
) -> Result<TailEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let occurrences = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let g = Graph::sample(n, p, draw(seed, streams::TRIAL, t)).expect("validated inputs");
            usize::from(event(&g))
        })
        .sum();
    let frequency = occurrences as f64 / trials as f64;
    let (wilson_low, wilson_high) = wilson_interval(occurrences, trials, Z95);
    Ok(TailEstimate { trials, occurrences, frequency, wilson_low, wilson_high, bound })
}

/// Frequency of `{exists v : d_v >= (np)^2}` across seeded samples, reported
/// against the bound `exp(-(np)^2 / 2)`.
pub fn estimate_max_degree_tail(
    n: usize,
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<TailEstimate> {
    if n < 2 || !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("invalid (n, p) = ({n}, {p})")));
    }
    let np = n as f64 * p;
    let threshold = np * np;
    // An empty edge budget has no degree tail; the literal comparison would
    // fire vacuously at 0 >= 0.
    estimate_event(n, p, trials, seed, (-threshold / 2.0).exp(), move |g| {
        threshold > 0.0 && g.max_degree() as f64 >= threshold
    })
}

/// Frequency of `{exists 2 <= j <= log2(np) : card V_j >= np / (j 2^j
/// loglog np)}`, reported against the bound shape
/// `exp(-(np)^2 / (c loglog np))` for a caller-supplied `c`. The constant in
/// the source analysis is existential, so no pass/fail is asserted here.
pub fn estimate_bucket_overflow(
    n: usize,
    p: f64,
    trials: usize,
    seed: u64,
    c: f64,
) -> Result<TailEstimate> {
    if n < 2 || !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("invalid (n, p) = ({n}, {p})")));
    }
    let np = n as f64 * p;
    let conventions = LogConventions::default();
    let loglog = conventions.loglog(np);
    let ceiling = conventions.bucket_ceiling(np);
    let bound = if loglog > 0.0 { (-(np * np) / (c * loglog)).exp() } else { 1.0 };
    estimate_event(n, p, trials, seed, bound, move |g| {
        if np <= 0.0 || ceiling < 2 {
            return false;
        }
        let profile = degree_buckets(g, p).expect("np > 0");
        (2..=ceiling).any(|j| {
            let threshold = np / (f64::from(j) * 2f64.powi(j as i32) * loglog);
            profile.cardinality(j) as f64 >= threshold
        })
    })
}
