//! Talagrand's convex-hull distance on the cube and exhaustive verifiers for
//! the deviation inequalities built on it.
//!
//! All verifiers enumerate the full cube (guarded at dimension
//! [`VERIFY_DIM_LIMIT`]), so a clean report is a proof for that instance up to
//! floating-point roundoff.

use rayon::prelude::*;

use crate::cube::{CubePoint, FunctionTable, MonotoneCheck, MonotoneKind, ProductMeasure, VERIFY_DIM_LIMIT};
use crate::error::{Error, Result};
use crate::minnorm::{min_norm_point, MinNormPoint};
use crate::report::{VerifierReport, DEFAULT_T_GRID};
use crate::scalar::{to_f64, Scalar};

/// A nonempty subset of the cube, deduplicated and sorted by packed bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    dim: usize,
    members: Vec<u64>,
}

impl VertexSet {
    /// Rejects the empty set: the inequalities are vacuous there and an
    /// explicit error beats a silent infinity.
    pub fn new(dim: usize, points: impl IntoIterator<Item = CubePoint>) -> Result<Self> {
        let mut members = Vec::new();
        for point in points {
            if point.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: point.dim() });
            }
            members.push(point.bits());
        }
        VertexSet::from_masks(dim, members)
    }

    pub fn from_masks(dim: usize, masks: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut members: Vec<u64> = masks.into_iter().collect();
        if members.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        members.sort_unstable();
        members.dedup();
        if dim < 64 {
            if let Some(&bad) = members.iter().find(|&&m| m >> dim != 0) {
                return Err(Error::InvalidParameter(format!(
                    "member 0x{bad:x} falls outside dimension {dim}"
                )));
            }
        }
        Ok(VertexSet { dim, members })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn masks(&self) -> &[u64] {
        &self.members
    }

    pub fn contains(&self, x: &CubePoint) -> bool {
        x.dim() == self.dim && self.members.binary_search(&x.bits()).is_ok()
    }

    pub fn points(&self) -> impl Iterator<Item = CubePoint> + '_ {
        self.members.iter().map(|&bits| CubePoint::new(bits, self.dim).expect("validated"))
    }

    pub fn probability(&self, measure: &ProductMeasure) -> Result<f64> {
        if measure.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: measure.dim() });
        }
        Ok(self.members.iter().map(|&bits| measure.vertex_probability_bits(bits)).sum())
    }
}

/// Coordinatewise disagreement patterns `(1{y_i != x_i})_i` for `y` in the
/// target set, deduplicated. Contains the zero pattern iff `x` is a member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    dim: usize,
    patterns: Vec<u64>,
}

impl GeneratorSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> &[u64] {
        &self.patterns
    }

    pub fn contains_zero(&self) -> bool {
        self.patterns.first() == Some(&0)
    }

    pub fn to_vectors(&self) -> Vec<Vec<f64>> {
        self.patterns
            .iter()
            .map(|&mask| (0..self.dim).map(|i| f64::from((mask >> i & 1) as u32)).collect())
            .collect()
    }
}

/// Disagreement patterns of the set relative to `x`.
///
/// Minimizing the norm over the convex hull of these patterns gives the
/// convex-hull distance itself: every admissible pattern dominates the exact
/// disagreement pattern of some member coordinatewise, and domination between
/// nonnegative vectors cannot decrease the Euclidean norm, so dropping the
/// upward closure loses nothing.
pub fn generators(set: &VertexSet, x: &CubePoint) -> Result<GeneratorSet> {
    if x.dim() != set.dim {
        return Err(Error::DimensionMismatch { expected: set.dim, found: x.dim() });
    }
    let mut patterns: Vec<u64> = set.members.iter().map(|&y| y ^ x.bits()).collect();
    patterns.sort_unstable();
    patterns.dedup();
    Ok(GeneratorSet { dim: set.dim, patterns })
}

/// Convex-hull distance together with the optimal convex combination.
#[derive(Clone, Debug)]
pub struct DistanceResult {
    /// `f_c(A, x)`: the minimum Euclidean norm over the hull of the patterns.
    pub value: f64,
    /// `(pattern, weight)` pairs; weights are nonnegative and sum to 1, and
    /// the combination they describe attains `value`.
    pub witness: Vec<(u64, f64)>,
    pub iterations: usize,
    pub used_fallback: bool,
}

/// Exact minimum over the generator hull. Zero iff `x` is a member.
pub fn convex_distance(set: &VertexSet, x: &CubePoint) -> Result<DistanceResult> {
    let gens = generators(set, x)?;
    if gens.contains_zero() {
        return Ok(DistanceResult {
            value: 0.0,
            witness: vec![(0, 1.0)],
            iterations: 0,
            used_fallback: false,
        });
    }
    let solved: MinNormPoint<f64> = min_norm_point(&gens.to_vectors())?;
    let witness = gens
        .patterns()
        .iter()
        .copied()
        .zip(solved.weights.iter().copied())
        .collect();
    Ok(DistanceResult {
        value: solved.norm,
        witness,
        iterations: solved.iterations,
        used_fallback: solved.used_fallback,
    })
}

fn check_verifiable(dim: usize) -> Result<()> {
    if dim > VERIFY_DIM_LIMIT {
        return Err(Error::EnumerationTooLarge { dim, max: VERIFY_DIM_LIMIT });
    }
    Ok(())
}

/// Distances from every cube vertex to the set, indexed by packed bits.
pub fn all_distances(set: &VertexSet, measure_dim: usize) -> Result<Vec<f64>> {
    check_verifiable(measure_dim)?;
    if measure_dim != set.dim {
        return Err(Error::DimensionMismatch { expected: set.dim, found: measure_dim });
    }
    (0..1u64 << set.dim)
        .into_par_iter()
        .map(|bits| {
            let x = CubePoint::new(bits, set.dim).expect("in range");
            convex_distance(set, &x).map(|d| d.value)
        })
        .collect()
}

/// Checks `P(A) * P(f_c^2 >= t) <= exp(-t/2)` for every `t` in the grid
/// (defaults: the standard grid plus every attained squared distance).
pub fn verify_distance_concentration(
    set: &VertexSet,
    measure: &ProductMeasure,
    t_grid: Option<&[f64]>,
) -> Result<VerifierReport> {
    let distances = all_distances(set, measure.dim())?;
    let weights = measure.weights()?;
    let p_set = set.probability(measure)?;

    let mut squared: Vec<(f64, f64)> =
        distances.iter().map(|d| d * d).zip(weights.iter().copied()).collect();
    squared.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances"));

    let grid = match t_grid {
        Some(grid) => grid.to_vec(),
        None => {
            let mut grid: Vec<f64> = DEFAULT_T_GRID.to_vec();
            grid.extend(squared.iter().map(|&(t, _)| t));
            grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
            grid.dedup();
            grid
        }
    };

    // Suffix mass of {f_c^2 >= t} over the sorted squared distances.
    let mut report = VerifierReport::new("distance_concentration", grid.clone());
    for &t in &grid {
        let position = squared.partition_point(|&(sq, _)| sq < t);
        let tail: f64 = squared[position..].iter().map(|&(_, w)| w).sum();
        report.record(t, None, p_set * tail, (-t / 2.0).exp());
    }
    Ok(report)
}

/// Outcome of one weighted-disagreement witness search.
#[derive(Clone, Debug)]
pub struct WitnessCheck {
    pub ok: bool,
    /// Member attaining the smallest weighted disagreement.
    pub witness: CubePoint,
    pub weighted_disagreement: f64,
    pub bound: f64,
}

/// Searches the set for a member `y` with
/// `sum_i lambda_i 1{y_i != x_i} <= f_c(A, x) * |lambda|`. The weights must be
/// nonnegative; absence of a witness is reported, not asserted.
pub fn verify_weighted_disagreement(
    set: &VertexSet,
    x: &CubePoint,
    lambda: &[f64],
) -> Result<WitnessCheck> {
    if lambda.len() != set.dim {
        return Err(Error::DimensionMismatch { expected: set.dim, found: lambda.len() });
    }
    if lambda.iter().any(|&l| l < 0.0 || !l.is_finite()) {
        return Err(Error::InvalidParameter("weights must be nonnegative and finite".into()));
    }
    let distance = convex_distance(set, x)?;
    let norm = lambda.iter().map(|l| l * l).sum::<f64>().sqrt();
    let bound = distance.value * norm;

    let mut best_mask = set.members[0];
    let mut best = f64::INFINITY;
    for &y in &set.members {
        let mut diff = y ^ x.bits();
        let mut total = 0.0;
        while diff != 0 {
            let i = diff.trailing_zeros() as usize;
            diff &= diff - 1;
            total += lambda[i];
        }
        if total < best {
            best = total;
            best_mask = y;
        }
    }
    Ok(WitnessCheck {
        ok: best <= bound + 1e-9,
        witness: CubePoint::new(best_mask, set.dim)?,
        weighted_disagreement: best,
        bound,
    })
}

/// Per-vertex data for the local-norm verifier.
fn table_profiles<T: Scalar>(table: &FunctionTable<T>) -> (Vec<f64>, Vec<f64>) {
    let size = table.len() as u64;
    let z: Vec<f64> = (0..size).map(|bits| to_f64(table.value_bits(bits))).collect();
    let v: Vec<f64> = (0..size).map(|bits| to_f64(table.local_variance_bits(bits))).collect();
    (z, v)
}

fn describe_violation<T: Scalar>(check: &MonotoneCheck<T>) -> String {
    match check {
        MonotoneCheck::Ok => "monotone".into(),
        MonotoneCheck::Violation { point, coordinate, kind, below, above } => {
            let which = match kind {
                MonotoneKind::Value => "Z".into(),
                MonotoneKind::Derivative(i) => format!("V_{}", i + 1),
            };
            format!(
                "{which} drops from {below} to {above} when raising coordinate {} at vertex 0x{:x}",
                coordinate + 1,
                point.bits()
            )
        }
    }
}

/// Checks the self-normalized deviation inequality
/// `P(Z >= a + sqrt(V(x) t)) * P(Z <= a) <= exp(-t/2)` over every attained
/// level `a` and every `t` in the grid, refusing inputs that fail the
/// monotonicity hypotheses.
///
/// For `t > 0` the deviation event ranges over vertices with a positive local
/// norm. Under the hypotheses, `V(x) = 0` forces `Z(x)` down to its global
/// minimum, so this drops exactly the vertices where the self-normalized
/// event degenerates to the level comparison already accounted by `a`. At
/// `t = 0` the event is the plain comparison `Z(x) >= a`.
pub fn verify_local_norm_deviation<T: Scalar>(
    table: &FunctionTable<T>,
    measure: &ProductMeasure,
    t_grid: Option<&[f64]>,
) -> Result<VerifierReport> {
    verify_local_norm_deviation_on_grids(table, measure, None, t_grid, true)
}

/// Same sweep without the monotonicity gate, for probing what the hypotheses
/// buy; violations are expected on non-monotone inputs.
pub fn verify_local_norm_deviation_unchecked<T: Scalar>(
    table: &FunctionTable<T>,
    measure: &ProductMeasure,
    t_grid: Option<&[f64]>,
) -> Result<VerifierReport> {
    verify_local_norm_deviation_on_grids(table, measure, None, t_grid, false)
}

/// Full-control variant: explicit level grid (default: every attained value)
/// and optional monotonicity gate.
pub fn verify_local_norm_deviation_on_grids<T: Scalar>(
    table: &FunctionTable<T>,
    measure: &ProductMeasure,
    a_grid: Option<&[f64]>,
    t_grid: Option<&[f64]>,
    gate_monotone: bool,
) -> Result<VerifierReport> {
    if gate_monotone {
        let check = table.check_monotone();
        if !check.is_ok() {
            return Err(Error::NotMonotone(describe_violation(&check)));
        }
    }
    check_verifiable(table.dim())?;
    if table.dim() != measure.dim() {
        return Err(Error::DimensionMismatch { expected: table.dim(), found: measure.dim() });
    }
    let (z, v) = table_profiles(table);
    let weights = measure.weights()?;
    let grid: Vec<f64> = t_grid.map_or_else(|| DEFAULT_T_GRID.to_vec(), <[f64]>::to_vec);

    // Prefix mass of {Z <= a} over sorted values. The attained values of Z
    // are exactly the corner points of both step functions, so the default
    // grid certifies every real level.
    let mut z_sorted: Vec<(f64, f64)> = z.iter().copied().zip(weights.iter().copied()).collect();
    z_sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
    let mut below_mass = Vec::with_capacity(z_sorted.len());
    let mut acc = 0.0;
    for &(_, w) in &z_sorted {
        acc += w;
        below_mass.push(acc);
    }
    let levels: Vec<f64> = match a_grid {
        Some(levels) => levels.to_vec(),
        None => {
            let mut levels: Vec<f64> = z_sorted.iter().map(|&(value, _)| value).collect();
            levels.dedup();
            levels
        }
    };

    let mut report = VerifierReport::new("local_norm_deviation", grid.clone());
    for &t in &grid {
        // Deviation margins D(x) = Z(x) - sqrt(V(x) t); a vertex is in the
        // event for level a iff D(x) >= a (and V(x) > 0 when t > 0).
        let mut margins: Vec<(f64, f64)> = z
            .iter()
            .zip(&v)
            .zip(&weights)
            .filter_map(|((&z_x, &v_x), &w)| {
                if t > 0.0 && v_x <= 0.0 {
                    None
                } else {
                    Some((z_x - (v_x * t).sqrt(), w))
                }
            })
            .collect();
        margins.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite margins"));
        let mut suffix = vec![0.0; margins.len() + 1];
        for (i, &(_, w)) in margins.iter().enumerate().rev() {
            suffix[i] = suffix[i + 1] + w;
        }
        let bound = (-t / 2.0).exp();
        for &a in &levels {
            let at_most = z_sorted.partition_point(|&(value, _)| value <= a);
            let below = if at_most == 0 { 0.0 } else { below_mass[at_most - 1] };
            let above = suffix[margins.partition_point(|&(d, _)| d < a)];
            report.record(t, Some(a), above * below, bound);
        }
    }
    Ok(report)
}

/// Checks the global-norm deviation inequality
/// `P(f > E f + |f|_d sqrt(t)) <= exp(-t/4)` on an arbitrary table. The
/// comparison is strict so the bound degenerates gracefully when the norm
/// vanishes.
pub fn verify_global_norm_deviation<T: Scalar>(
    table: &FunctionTable<T>,
    measure: &ProductMeasure,
    t_grid: Option<&[f64]>,
) -> Result<VerifierReport> {
    check_verifiable(table.dim())?;
    let mean = table.expectation(measure)?;
    let norm = table.global_discrete_norm();
    let weights = measure.weights()?;
    let grid: Vec<f64> = t_grid.map_or_else(|| DEFAULT_T_GRID.to_vec(), <[f64]>::to_vec);

    let mut report = VerifierReport::new("global_norm_deviation", grid.clone());
    for &t in &grid {
        let threshold = mean + norm * t.sqrt();
        let lhs: f64 = (0..table.len() as u64)
            .filter(|&bits| to_f64(table.value_bits(bits)) > threshold)
            .map(|bits| weights[bits as usize])
            .sum();
        report.record(t, None, lhs, (-t / 4.0).exp());
    }
    Ok(report)
}

/// Classification of one telescoping step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepClass {
    /// Coordinate set in `x`, cleared in `y`: the step equals the derivative
    /// at the intermediate point and is capped by the derivative at `x`.
    LoweredTowardY,
    /// Coordinate cleared in `x`, set in `y`: the step is nonpositive.
    RaisedTowardY,
    /// Coordinates agree: the step is zero.
    Matched,
}

#[derive(Clone, Debug)]
pub struct StepCheck {
    /// 0-based coordinate.
    pub coordinate: usize,
    pub class: StepClass,
    /// `Z(z^{i-1}) - Z(z^i)`.
    pub step: f64,
    /// `V_i(x)`, the cap the proof compares against.
    pub cap: f64,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct TelescopeReport {
    pub steps: Vec<StepCheck>,
    /// `Z(x) - a`.
    pub aggregate_lhs: f64,
    /// `sum_i V_i(x) 1{x_i != y_i}`.
    pub aggregate_rhs: f64,
    pub ok: bool,
}

/// Walks the telescoping sequence from `x` to `y`, switching one coordinate
/// per step, and checks every per-step inequality of the monotone
/// decomposition plus the aggregate
/// `Z(x) - a <= sum_i V_i(x) 1{x_i != y_i}`.
///
/// Coordinates are processed with the lowered set first (where `x_i = 1`,
/// `y_i = 0`), then the raised set, then the matched rest: along that order
/// every intermediate point of a lowering step sits coordinatewise below
/// `x`, which is what caps the step by the derivative at `x`.
///
/// Preconditions: the table passes the monotonicity check and `Z(y) <= a`.
pub fn verify_telescoping<T: Scalar>(
    table: &FunctionTable<T>,
    x: &CubePoint,
    y: &CubePoint,
    a: T,
) -> Result<TelescopeReport> {
    if x.dim() != table.dim() || y.dim() != table.dim() {
        return Err(Error::DimensionMismatch {
            expected: table.dim(),
            found: if x.dim() != table.dim() { x.dim() } else { y.dim() },
        });
    }
    let gate = table.check_monotone();
    if !gate.is_ok() {
        return Err(Error::NotMonotone(describe_violation(&gate)));
    }
    if table.value_bits(y.bits()) > a {
        return Err(Error::InvalidParameter(format!(
            "Z(y) = {} exceeds the level a = {}",
            table.value_bits(y.bits()),
            a
        )));
    }

    let m = table.dim();
    let classify = |i: usize| -> StepClass {
        match (x.bits() >> i & 1 == 1, y.bits() >> i & 1 == 1) {
            (true, false) => StepClass::LoweredTowardY,
            (false, true) => StepClass::RaisedTowardY,
            _ => StepClass::Matched,
        }
    };
    let mut order: Vec<usize> = (0..m).filter(|&i| classify(i) == StepClass::LoweredTowardY).collect();
    order.extend((0..m).filter(|&i| classify(i) == StepClass::RaisedTowardY));
    order.extend((0..m).filter(|&i| classify(i) == StepClass::Matched));

    let mut steps = Vec::with_capacity(m);
    let mut ok = true;
    let mut current = x.bits();
    for &i in &order {
        let prev = current;
        let bit = 1u64 << i;
        let next = (prev & !bit) | (y.bits() & bit);
        current = next;
        let step_t = table.value_bits(prev) - table.value_bits(next);
        let cap_t = table.derivative_bits(x.bits(), i);
        let class = classify(i);
        let step_ok = match class {
            StepClass::Matched => step_t == T::zero(),
            StepClass::LoweredTowardY => {
                // The step equals the derivative at the intermediate point,
                // which sits below x, so the monotone derivative caps it.
                let at_prev = table.derivative_bits(prev, i);
                step_t == at_prev && at_prev <= cap_t
            }
            StepClass::RaisedTowardY => step_t <= T::zero() && cap_t >= T::zero(),
        };
        ok &= step_ok;
        steps.push(StepCheck {
            coordinate: i,
            class,
            step: to_f64(step_t),
            cap: to_f64(cap_t),
            ok: step_ok,
        });
    }
    debug_assert_eq!(current, y.bits());

    let mut rhs = T::zero();
    let mut diff = x.bits() ^ y.bits();
    while diff != 0 {
        let i = diff.trailing_zeros() as usize;
        diff &= diff - 1;
        let d = table.derivative_bits(x.bits(), i);
        rhs = rhs + d;
    }
    let lhs = table.value_bits(x.bits()) - a;
    let aggregate_ok = lhs <= rhs;
    Ok(TelescopeReport {
        steps,
        aggregate_lhs: to_f64(lhs),
        aggregate_rhs: to_f64(rhs),
        ok: ok && aggregate_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::MultilinearFunction;

    fn point(bits: u64, dim: usize) -> CubePoint {
        CubePoint::new(bits, dim).unwrap()
    }

    #[test]
    fn generators_collapse_duplicates_and_track_membership() {
        let set = VertexSet::from_masks(3, [0b101, 0b101, 0b000]).unwrap();
        let x = point(0b101, 3);
        let gens = generators(&set, &x).unwrap();
        assert_eq!(gens.patterns(), &[0b000, 0b101]);
        assert!(gens.contains_zero());
    }

    #[test]
    fn empty_set_is_rejected() {
        assert!(matches!(
            VertexSet::from_masks(3, std::iter::empty::<u64>()),
            Err(Error::EmptyVertexSet)
        ));
    }

    #[test]
    fn distance_zero_iff_member() {
        let set = VertexSet::from_masks(3, [0b011]).unwrap();
        let inside = convex_distance(&set, &point(0b011, 3)).unwrap();
        assert_eq!(inside.value, 0.0);
        let outside = convex_distance(&set, &point(0b010, 3)).unwrap();
        assert!(outside.value > 0.0);
    }

    #[test]
    fn full_disagreement_reaches_sqrt_m() {
        for m in 1..=6usize {
            let x = CubePoint::ones(m).unwrap();
            let set = VertexSet::new(m, [x.complement()]).unwrap();
            let d = convex_distance(&set, &x).unwrap();
            assert!((d.value - (m as f64).sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn two_point_example_meets_dense_lambda_grid() {
        // Distance from (1,1) to {(0,1), (1,0)}: generators (1,0) and (0,1).
        let set = VertexSet::from_masks(2, [0b10, 0b01]).unwrap();
        let x = point(0b11, 2);
        let solved = convex_distance(&set, &x).unwrap();
        let mut grid_best = f64::INFINITY;
        for step in 0..=100_000 {
            let lambda = step as f64 / 100_000.0;
            let norm = (lambda * lambda + (1.0 - lambda) * (1.0 - lambda)).sqrt();
            grid_best = grid_best.min(norm);
        }
        assert!((solved.value - grid_best).abs() < 1e-6);
        assert!((solved.value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn witness_attains_the_reported_value() {
        let set = VertexSet::from_masks(4, [0b0011, 0b1100, 0b0110]).unwrap();
        let x = point(0b1111, 4);
        let d = convex_distance(&set, &x).unwrap();
        let total: f64 = d.witness.iter().map(|&(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let mut combo = [0.0f64; 4];
        for &(mask, w) in &d.witness {
            assert!(w >= 0.0);
            for (i, slot) in combo.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    *slot += w;
                }
            }
        }
        let norm = combo.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - d.value).abs() < 1e-9);
    }

    #[test]
    fn concentration_on_full_cube_holds_with_equality_at_zero() {
        let set = VertexSet::from_masks(2, 0..4).unwrap();
        let measure = ProductMeasure::new(0.5, 2).unwrap();
        let report = verify_distance_concentration(&set, &measure, None).unwrap();
        assert!(report.ok());
        assert!((report.max_lhs_over_bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concentration_single_origin_m2_by_direct_enumeration() {
        // Distances from the four vertices to {(0,0)} are 0, 1, 1, sqrt(2).
        let set = VertexSet::from_masks(2, [0b00]).unwrap();
        let measure = ProductMeasure::new(0.5, 2).unwrap();
        let report = verify_distance_concentration(&set, &measure, None).unwrap();
        assert!(report.ok());
        // Worst ratio over attained t: t=1 gives (1/4)(3/4) / e^{-1/2}.
        let expected = (0.25 * 0.75) / (-0.5f64).exp();
        assert!((report.max_lhs_over_bound - expected).abs() < 1e-12);
    }

    #[test]
    fn weighted_disagreement_equality_case() {
        let set = VertexSet::from_masks(2, [0b10, 0b01]).unwrap();
        let x = point(0b11, 2);
        let check = verify_weighted_disagreement(&set, &x, &[1.0, 1.0]).unwrap();
        assert!(check.ok);
        assert!((check.weighted_disagreement - 1.0).abs() < 1e-12);
        assert!((check.bound - 1.0).abs() < 1e-9);
    }

    #[test]
    fn weighted_disagreement_trivial_cases() {
        let set = VertexSet::from_masks(3, [0b001, 0b110]).unwrap();
        // Zero weights: any member is a witness.
        let check = verify_weighted_disagreement(&set, &point(0b111, 3), &[0.0; 3]).unwrap();
        assert!(check.ok);
        assert_eq!(check.weighted_disagreement, 0.0);
        // Membership: y = x gives a zero left side.
        let check = verify_weighted_disagreement(&set, &point(0b001, 3), &[1.0, 2.0, 3.0]).unwrap();
        assert!(check.ok);
        assert_eq!(check.weighted_disagreement, 0.0);
        assert_eq!(check.witness.bits(), 0b001);
        // Negative weights are refused.
        assert!(verify_weighted_disagreement(&set, &point(0b111, 3), &[1.0, -1.0, 0.0]).is_err());
    }

    #[test]
    fn local_norm_deviation_coordinate_function() {
        // m=1, Z = x_1, p = 1/2, t = 1: worst cell is a = 0 with lhs 1/4.
        let table = MultilinearFunction::from_subsets(1, &[(&[0], 1.0)])
            .unwrap()
            .to_table()
            .unwrap();
        let measure = ProductMeasure::new(0.5, 1).unwrap();
        let report = verify_local_norm_deviation(&table, &measure, Some(&[1.0])).unwrap();
        assert!(report.ok());
        let expected = 0.25 / (-0.5f64).exp();
        assert!((report.max_lhs_over_bound - expected).abs() < 1e-12);
    }

    #[test]
    fn local_norm_deviation_constant_function_at_t_zero() {
        let table = FunctionTable::new(2, vec![7.0; 4]).unwrap();
        let measure = ProductMeasure::new(0.3, 2).unwrap();
        let report = verify_local_norm_deviation(&table, &measure, Some(&[0.0, 1.0, 4.0])).unwrap();
        assert!(report.ok());
        // At t = 0 and a = 7 both factors are 1 and the bound is 1: equality.
        assert!((report.max_lhs_over_bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_level_grids_handle_out_of_range_levels() {
        let table = MultilinearFunction::from_subsets(2, &[(&[0], 1.0), (&[1], 1.0)])
            .unwrap()
            .to_table()
            .unwrap();
        let measure = ProductMeasure::new(0.5, 2).unwrap();
        let report = super::verify_local_norm_deviation_on_grids(
            &table,
            &measure,
            Some(&[-5.0, 0.5, 10.0]),
            Some(&[1.0]),
            true,
        )
        .unwrap();
        // Below the minimum the level factor is zero; above the maximum the
        // event is empty. Both stay comfortably inside the bound.
        assert!(report.ok());
    }

    #[test]
    fn local_norm_deviation_refuses_non_monotone_input() {
        let table = FunctionTable::new(1, vec![1.0, 0.0]).unwrap();
        let measure = ProductMeasure::new(0.5, 1).unwrap();
        assert!(matches!(
            verify_local_norm_deviation(&table, &measure, None),
            Err(Error::NotMonotone(_))
        ));
    }

    #[test]
    fn global_norm_deviation_examples() {
        let measure = ProductMeasure::new(0.5, 1).unwrap();
        let constant = FunctionTable::new(1, vec![2.0, 2.0]).unwrap();
        let report = verify_global_norm_deviation(&constant, &measure, None).unwrap();
        assert!(report.ok());
        assert_eq!(report.max_lhs_over_bound, 0.0);

        let coordinate = FunctionTable::new(1, vec![0.0, 1.0]).unwrap();
        let report = verify_global_norm_deviation(&coordinate, &measure, Some(&[1.0])).unwrap();
        assert!(report.ok());
        assert_eq!(report.max_lhs_over_bound, 0.0); // threshold 1.5 exceeds the max
    }

    #[test]
    fn telescoping_hand_example() {
        // m=2, single monomial on both coordinates, x = (1,1), y = (0,0), a=0.
        let table = MultilinearFunction::from_subsets(2, &[(&[0, 1], 1i64)])
            .unwrap()
            .to_table()
            .unwrap();
        let report =
            verify_telescoping(&table, &point(0b11, 2), &point(0b00, 2), 0).unwrap();
        assert!(report.ok);
        assert_eq!(report.aggregate_lhs, 1.0);
        assert_eq!(report.aggregate_rhs, 2.0); // V_1 + V_2 at the top vertex
    }

    #[test]
    fn telescoping_same_point_needs_level_at_or_above_z() {
        let table = MultilinearFunction::from_subsets(2, &[(&[0], 1i64)])
            .unwrap()
            .to_table()
            .unwrap();
        let x = point(0b01, 2);
        let report = verify_telescoping(&table, &x, &x, 1).unwrap();
        assert!(report.ok);
        assert!(report.steps.iter().all(|s| s.step == 0.0));
        assert!(matches!(
            verify_telescoping(&table, &x, &x, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn verifier_guard_rejects_large_dimension() {
        let set = VertexSet::from_masks(20, [0u64]).unwrap();
        let measure = ProductMeasure::new(0.5, 20).unwrap();
        assert!(matches!(
            verify_distance_concentration(&set, &measure, None),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }
}
