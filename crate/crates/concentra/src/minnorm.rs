//! Minimum-norm point in the convex hull of finitely many generators, via
//! Wolfe's active-set method, generic over the float type.
//!
//! Ties in the linear minimization step break toward the lowest index, so a
//! given input always produces the same run. A face-enumeration fallback
//! covers small inputs should the active-set iteration ever stall.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Duality-gap tolerance for declaring optimality.
pub const OPTIMALITY_TOL: f64 = 1e-9;

/// Fallback by exhaustive face enumeration is available up to this many
/// generators.
pub const FALLBACK_GENERATOR_LIMIT: usize = 12;

/// Solution of a min-norm-point problem.
#[derive(Clone, Debug)]
pub struct MinNormPoint<R> {
    /// The minimizing point of the hull.
    pub point: Vec<R>,
    /// Euclidean norm of `point`.
    pub norm: R,
    /// Convex-combination weights over the input generators (sum 1, all >= 0).
    pub weights: Vec<R>,
    /// Major iterations of the active-set loop.
    pub iterations: usize,
    /// True when the face-enumeration fallback produced the answer.
    pub used_fallback: bool,
}

fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter().zip(b).fold(R::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Solves the KKT system of `min |sum_i v_i s_i|^2 subject to sum_i v_i = 1`
/// over the affine hull of the active generators. Returns the barycentric
/// coordinates, or None when the system is numerically singular.
#[allow(clippy::needless_range_loop)]
fn affine_minimizer<R: Real>(gens: &[Vec<R>], active: &[usize]) -> Option<Vec<R>> {
    let s = active.len();
    let n = s + 1;
    let mut a = vec![vec![R::zero(); n + 1]; n];
    a[0][0] = R::zero();
    for j in 0..s {
        a[0][j + 1] = R::one();
        a[j + 1][0] = R::one();
    }
    for i in 0..s {
        for j in 0..s {
            a[i + 1][j + 1] = dot(&gens[active[i]], &gens[active[j]]);
        }
    }
    a[0][n] = R::one();

    // Gaussian elimination with partial pivoting.
    let tiny = R::from(1e-12).unwrap();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < tiny {
            return None;
        }
        a.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..=n {
                let update = a[col][k] * factor;
                a[row][k] = a[row][k] - update;
            }
        }
    }
    let mut solution = vec![R::zero(); n];
    for row in (0..n).rev() {
        let mut value = a[row][n];
        for k in row + 1..n {
            value = value - a[row][k] * solution[k];
        }
        solution[row] = value / a[row][row];
    }
    Some(solution[1..].to_vec())
}

fn combine<R: Real>(gens: &[Vec<R>], active: &[usize], weights: &[R]) -> Vec<R> {
    let dim = gens[0].len();
    let mut point = vec![R::zero(); dim];
    for (idx, &g) in active.iter().enumerate() {
        for d in 0..dim {
            point[d] = point[d] + weights[idx] * gens[g][d];
        }
    }
    point
}

/// Exhaustive fallback: the optimum lies on some face, so enumerate affine
/// minimizers of all generator subsets and keep the best one with nonnegative
/// barycentric coordinates.
fn min_norm_by_faces<R: Real>(gens: &[Vec<R>]) -> Result<MinNormPoint<R>> {
    let n = gens.len();
    if n > FALLBACK_GENERATOR_LIMIT {
        return Err(Error::SolverStalled { iterations: 0 });
    }
    let dim = gens[0].len();
    let feas = R::from(-1e-9).unwrap();
    let mut best: Option<(R, Vec<usize>, Vec<R>)> = None;
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size > dim + 1 {
            continue;
        }
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let coords = if size == 1 {
            vec![R::one()]
        } else {
            match affine_minimizer(gens, &subset) {
                Some(c) => c,
                None => continue,
            }
        };
        if coords.iter().any(|&c| c < feas) {
            continue;
        }
        let point = combine(gens, &subset, &coords);
        let norm_sq = dot(&point, &point);
        if best.as_ref().is_none_or(|(b, _, _)| norm_sq < *b) {
            best = Some((norm_sq, subset, coords));
        }
    }
    let (norm_sq, subset, coords) = best.expect("singletons are always feasible");
    let mut weights = vec![R::zero(); n];
    for (idx, &g) in subset.iter().enumerate() {
        weights[g] = coords[idx].max(R::zero());
    }
    let point = combine(gens, &subset, &coords);
    Ok(MinNormPoint {
        norm: norm_sq.max(R::zero()).sqrt(),
        point,
        weights,
        iterations: 0,
        used_fallback: true,
    })
}

/// Minimum-norm point of `conv(generators)`.
///
/// All generators must share one dimension; the list must be nonempty. The
/// iteration cap is `10 * generators * dimension`; an overrun falls back to
/// face enumeration when the instance is small enough and errors otherwise.
pub fn min_norm_point<R: Real>(generators: &[Vec<R>]) -> Result<MinNormPoint<R>> {
    if generators.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    let dim = generators[0].len();
    if generators.iter().any(|g| g.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: generators.iter().map(Vec::len).find(|&l| l != dim).unwrap_or(dim),
        });
    }
    let n = generators.len();
    let tol = R::from(OPTIMALITY_TOL).unwrap();
    let zero_eps = R::from(1e-14).unwrap();
    let cap = (10 * n * dim.max(1)).max(32);

    let norms: Vec<R> = generators.iter().map(|g| dot(g, g)).collect();
    let mut start = 0;
    for (i, &sq) in norms.iter().enumerate() {
        if sq < norms[start] {
            start = i;
        }
    }
    let mut active = vec![start];
    let mut weights = vec![R::one()];
    let mut x = generators[start].clone();
    let mut iterations = 0usize;

    loop {
        iterations += 1;
        if iterations > cap {
            return match min_norm_by_faces(generators) {
                Ok(result) => Ok(result),
                Err(_) => Err(Error::SolverStalled { iterations: cap }),
            };
        }

        let x_sq = dot(&x, &x);
        let mut best = 0usize;
        let mut best_ip = dot(&x, &generators[0]);
        for (j, g) in generators.iter().enumerate().skip(1) {
            let ip = dot(&x, g);
            if ip < best_ip {
                best_ip = ip;
                best = j;
            }
        }
        // Wolfe's criterion: <x, x> <= min_j <x, g_j> up to tolerance.
        if x_sq - best_ip <= tol * R::one().max(x_sq) {
            break;
        }
        if active.contains(&best) {
            // The hull of the active set is already optimal; the residual gap
            // is floating-point dust.
            break;
        }
        active.push(best);
        weights.push(R::zero());

        // Minor cycles: project onto the affine hull of the active set,
        // stepping back to the boundary and dropping generators until the
        // minimizer is a convex combination.
        loop {
            let coords = match affine_minimizer(generators, &active) {
                Some(c) => c,
                None => {
                    return match min_norm_by_faces(generators) {
                        Ok(result) => Ok(result),
                        Err(_) => Err(Error::SolverStalled { iterations }),
                    };
                }
            };
            if coords.iter().all(|&c| c > zero_eps) {
                weights = coords;
                x = combine(generators, &active, &weights);
                break;
            }
            let mut theta = R::one();
            for (i, &c) in coords.iter().enumerate() {
                if c <= zero_eps && weights[i] > c {
                    let candidate = weights[i] / (weights[i] - c);
                    if candidate < theta {
                        theta = candidate;
                    }
                }
            }
            let keep_eps = R::from(1e-12).unwrap();
            let mut next_active = Vec::with_capacity(active.len());
            let mut next_weights = Vec::with_capacity(active.len());
            for i in 0..active.len() {
                let w = (R::one() - theta) * weights[i] + theta * coords[i];
                if w > keep_eps {
                    next_active.push(active[i]);
                    next_weights.push(w);
                }
            }
            if next_active.is_empty() {
                // Numerically everything collapsed; keep the best single point.
                next_active.push(active[0]);
                next_weights.push(R::one());
            }
            active = next_active;
            weights = next_weights;
        }
    }

    // Normalize the weights exactly onto the simplex.
    let total = weights.iter().fold(R::zero(), |acc, &w| acc + w);
    let mut full = vec![R::zero(); n];
    for (idx, &g) in active.iter().enumerate() {
        full[g] = (weights[idx] / total).max(R::zero());
    }
    let point = combine(generators, &active, &weights);
    let norm = dot(&point, &point).max(R::zero()).sqrt();
    Ok(MinNormPoint { point, norm, weights: full, iterations, used_fallback: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(gens: &[&[f64]]) -> MinNormPoint<f64> {
        let owned: Vec<Vec<f64>> = gens.iter().map(|g| g.to_vec()).collect();
        min_norm_point(&owned).unwrap()
    }

    #[test]
    fn single_generator_is_its_own_answer() {
        let result = solve(&[&[3.0, 4.0]]);
        assert!((result.norm - 5.0).abs() < 1e-12);
        assert_eq!(result.weights, vec![1.0]);
    }

    #[test]
    fn zero_generator_wins() {
        let result = solve(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(result.norm, 0.0);
    }

    #[test]
    fn two_unit_vectors_meet_in_the_middle() {
        let result = solve(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!((result.norm - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert!((result.weights[0] - 0.5).abs() < 1e-9);
        assert!((result.weights[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn segment_crossing_origin_reaches_zero() {
        let result = solve(&[&[1.0, 1.0], &[-1.0, -1.0]]);
        assert!(result.norm < 1e-7);
    }

    #[test]
    fn interior_point_does_not_distract_the_solver() {
        // The segment between the two outer generators passes closer to the
        // origin than the decoy in the middle.
        let result = solve(&[&[2.0, 0.0], &[0.0, 2.0], &[1.5, 1.5]]);
        assert!((result.norm - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn face_enumeration_agrees_on_a_batch() {
        use crate::rng::{draw, unit};
        for instance in 0..50u64 {
            let n = 2 + (draw(5, 77, instance) % 6) as usize;
            let dim = 2 + (draw(5, 78, instance) % 3) as usize;
            let gens: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    (0..dim)
                        .map(|d| unit(draw(5, 79, instance * 1000 + (i * dim + d) as u64)) * 4.0 - 1.0)
                        .collect()
                })
                .collect();
            let wolfe = min_norm_point(&gens).unwrap();
            let faces = min_norm_by_faces(&gens).unwrap();
            assert!(
                (wolfe.norm - faces.norm).abs() < 1e-8,
                "instance {instance}: wolfe {} vs faces {}",
                wolfe.norm,
                faces.norm
            );
        }
    }

    #[test]
    fn weights_form_a_convex_combination() {
        let gens = vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0], vec![1.0, 1.0, 0.0]];
        let result = min_norm_point(&gens).unwrap();
        let total: f64 = result.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(result.weights.iter().all(|&w| w >= 0.0));
        let mut point = [0.0; 3];
        for (w, g) in result.weights.iter().zip(&gens) {
            for d in 0..3 {
                point[d] += w * g[d];
            }
        }
        let norm = point.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - result.norm).abs() < 1e-9);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            min_norm_point::<f64>(&[]),
            Err(Error::EmptyVertexSet)
        ));
    }

    #[test]
    fn solver_is_generic_over_the_float_width() {
        let gens32: Vec<Vec<f32>> = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let result = min_norm_point(&gens32).unwrap();
        assert!((result.norm - std::f32::consts::FRAC_1_SQRT_2).abs() < 1e-5);
    }
}
