//! The discrete cube `{0,1}^m`: vertices, product measures, sparse multilinear
//! functions with nonnegative weights, dense value tables, discrete
//! derivatives, and the local/global discrete norms.
//!
//! The local norm at a vertex is `sqrt(V(x))` where `V(x) = sum_i V_i(x)^2`
//! and `V_i(x) = Z(x) - Z(x with coordinate i cleared)`; it equals the operator
//! norm of the linearization of `Z` at `x` along the coordinates set to 1.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Scalar};

/// Dense tables are capped at `2^24` entries.
pub const TABLE_DIM_LIMIT: usize = 24;

/// Exhaustive inequality verifiers are capped at `2^14` vertices.
pub const VERIFY_DIM_LIMIT: usize = 14;

/// A vertex of `{0,1}^m`, packed little-endian into a `u64`: coordinate `i`
/// is bit `i`. Dimensions up to 64 are representable; dense enumeration is
/// guarded separately.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CubePoint {
    bits: u64,
    dim: usize,
}

impl CubePoint {
    pub fn new(bits: u64, dim: usize) -> Result<Self> {
        if dim > 64 {
            return Err(Error::InvalidParameter(format!(
                "dimension {dim} exceeds the 64-bit packing limit"
            )));
        }
        if dim < 64 && bits >> dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "bits 0x{bits:x} fall outside dimension {dim}"
            )));
        }
        Ok(CubePoint { bits, dim })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        CubePoint::new(0, dim)
    }

    pub fn ones(dim: usize) -> Result<Self> {
        let bits = if dim == 64 { !0u64 } else { (1u64 << dim) - 1 };
        CubePoint::new(bits, dim)
    }

    pub fn from_coords(coords: &[bool]) -> Result<Self> {
        let mut bits = 0u64;
        for (i, &c) in coords.iter().enumerate() {
            if c {
                bits |= 1 << i;
            }
        }
        CubePoint::new(bits, coords.len())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Coordinate `i` (0-based). Panics if out of range.
    pub fn coord(&self, i: usize) -> bool {
        assert!(i < self.dim, "coordinate {i} out of range for dimension {}", self.dim);
        (self.bits >> i) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn with_coord_cleared(&self, i: usize) -> Self {
        CubePoint { bits: self.bits & !(1 << i), dim: self.dim }
    }

    pub fn flipped(&self, i: usize) -> Self {
        CubePoint { bits: self.bits ^ (1 << i), dim: self.dim }
    }

    pub fn complement(&self) -> Self {
        let mask = if self.dim == 64 { !0u64 } else { (1u64 << self.dim) - 1 };
        CubePoint { bits: !self.bits & mask, dim: self.dim }
    }

    /// Hamming distance to another point of the same dimension.
    pub fn hamming(&self, other: &CubePoint) -> u32 {
        debug_assert_eq!(self.dim, other.dim);
        (self.bits ^ other.bits).count_ones()
    }
}

/// Product measure on `{0,1}^m` with `P(coordinate = 1) = p` independently.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductMeasure {
    p: f64,
    dim: usize,
}

impl ProductMeasure {
    pub fn new(p: f64, dim: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("p = {p} is not in [0, 1]")));
        }
        Ok(ProductMeasure { p, dim })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_probability_bits(&self, bits: u64) -> f64 {
        let ones = bits.count_ones() as i32;
        self.p.powi(ones) * (1.0 - self.p).powi(self.dim as i32 - ones)
    }

    pub fn vertex_probability(&self, x: &CubePoint) -> Result<f64> {
        check_dim(self.dim, x.dim())?;
        Ok(self.vertex_probability_bits(x.bits()))
    }

    /// Probabilities of all `2^m` vertices, indexed by packed bits.
    /// Precomputes the power tables so each entry is one multiply.
    pub fn weights(&self) -> Result<Vec<f64>> {
        check_enumerable(self.dim, TABLE_DIM_LIMIT)?;
        let m = self.dim;
        let mut pow_p = vec![1.0; m + 1];
        let mut pow_q = vec![1.0; m + 1];
        for i in 1..=m {
            pow_p[i] = pow_p[i - 1] * self.p;
            pow_q[i] = pow_q[i - 1] * (1.0 - self.p);
        }
        Ok((0..1u64 << m)
            .map(|bits| {
                let ones = bits.count_ones() as usize;
                pow_p[ones] * pow_q[m - ones]
            })
            .collect())
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn check_enumerable(dim: usize, max: usize) -> Result<()> {
    if dim > max {
        return Err(Error::EnumerationTooLarge { dim, max });
    }
    Ok(())
}

/// `Z(x) = sum_C alpha_C prod_{i in C} x_i` with `alpha_C >= 0`, subsets `C`
/// stored as bitmasks. Nonnegative weights make `Z` and every discrete
/// derivative `V_i` non-decreasing in each coordinate.
///
/// The map is sparse; dense tables are materialized on demand for verifiers.
#[derive(Clone, Debug, PartialEq)]
pub struct MultilinearFunction<T> {
    dim: usize,
    terms: BTreeMap<u64, T>,
}

impl<T: Scalar> MultilinearFunction<T> {
    /// Builds from `(subset mask, weight)` pairs. Duplicate subsets are merged
    /// by addition, exact zeros dropped, negative weights rejected.
    pub fn new(dim: usize, terms: impl IntoIterator<Item = (u64, T)>) -> Result<Self> {
        if dim > 64 {
            return Err(Error::InvalidParameter(format!(
                "dimension {dim} exceeds the 64-bit packing limit"
            )));
        }
        let mut map: BTreeMap<u64, T> = BTreeMap::new();
        for (mask, weight) in terms {
            if dim < 64 && mask >> dim != 0 {
                return Err(Error::InvalidParameter(format!(
                    "subset mask 0x{mask:x} falls outside dimension {dim}"
                )));
            }
            if weight < T::zero() {
                return Err(Error::InvalidParameter(format!(
                    "negative weight {weight} for subset mask 0x{mask:x}"
                )));
            }
            let slot = map.entry(mask).or_insert_with(T::zero);
            *slot = *slot + weight;
        }
        map.retain(|_, w| *w != T::zero());
        Ok(MultilinearFunction { dim, terms: map })
    }

    /// Builds from explicit 0-based index lists.
    pub fn from_subsets(dim: usize, subsets: &[(&[usize], T)]) -> Result<Self> {
        let mut terms = Vec::with_capacity(subsets.len());
        for (indices, weight) in subsets {
            let mut mask = 0u64;
            for &i in *indices {
                if i >= dim {
                    return Err(Error::CoordinateOutOfRange { index: i, dim });
                }
                mask |= 1 << i;
            }
            terms.push((mask, *weight));
        }
        MultilinearFunction::new(dim, terms)
    }

    pub fn constant(dim: usize, value: T) -> Result<Self> {
        MultilinearFunction::new(dim, [(0u64, value)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<u64, T> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Sum of all weights; equals the evaluation at the all-ones vertex.
    pub fn total_weight(&self) -> T {
        self.terms.values().fold(T::zero(), |acc, &w| acc + w)
    }

    /// `Z(x)`: sum of weights of subsets contained in the support of `x`.
    pub fn evaluate(&self, x: &CubePoint) -> Result<T> {
        check_dim(self.dim, x.dim())?;
        Ok(self.evaluate_bits(x.bits()))
    }

    fn evaluate_bits(&self, bits: u64) -> T {
        self.terms
            .iter()
            .filter(|(mask, _)| *mask & bits == **mask)
            .fold(T::zero(), |acc, (_, &w)| acc + w)
    }

    /// `V_i(x) = Z(x) - Z(x with coordinate i cleared)`; zero whenever
    /// `x_i = 0`.
    pub fn discrete_derivative(&self, x: &CubePoint, i: usize) -> Result<T> {
        check_dim(self.dim, x.dim())?;
        if i >= self.dim {
            return Err(Error::CoordinateOutOfRange { index: i, dim: self.dim });
        }
        let bits = x.bits();
        if (bits >> i) & 1 == 0 {
            return Ok(T::zero());
        }
        // Difference of the two evaluations: exactly the terms through i.
        let bit = 1u64 << i;
        Ok(self
            .terms
            .iter()
            .filter(|(mask, _)| *mask & bit != 0 && *mask & bits == **mask)
            .fold(T::zero(), |acc, (_, &w)| acc + w))
    }

    /// `V(x) = sum_i V_i(x)^2`. Its square root is the local discrete
    /// Lipschitz norm at `x`.
    pub fn local_variance(&self, x: &CubePoint) -> Result<T> {
        check_dim(self.dim, x.dim())?;
        let mut total = T::zero();
        let mut bits = x.bits();
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let d = self.discrete_derivative(x, i)?;
            total = total + d * d;
        }
        Ok(total)
    }

    /// Termwise sum of two functions on the same cube.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let merged = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|(&m, &w)| (m, w));
        MultilinearFunction::new(self.dim, merged)
    }

    /// Materializes the dense table via the subset-sum (zeta) transform.
    pub fn to_table(&self) -> Result<FunctionTable<T>> {
        check_enumerable(self.dim, TABLE_DIM_LIMIT)?;
        let size = 1usize << self.dim;
        let mut values = vec![T::zero(); size];
        for (&mask, &w) in &self.terms {
            values[mask as usize] = values[mask as usize] + w;
        }
        for i in 0..self.dim {
            let bit = 1usize << i;
            for x in 0..size {
                if x & bit != 0 {
                    values[x] = values[x] + values[x ^ bit];
                }
            }
        }
        FunctionTable::new(self.dim, values)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson<T> {
    subset: Vec<usize>,
    weight: T,
}

#[derive(Serialize, Deserialize)]
struct FunctionJson<T> {
    m: usize,
    terms: Vec<TermJson<T>>,
}

impl<T: Scalar + Serialize + DeserializeOwned> MultilinearFunction<T> {
    /// JSON wire format: `{"m": int, "terms": [{"subset": [int...], "weight":
    /// number}, ...]}` with 1-based coordinate indices.
    pub fn to_json(&self) -> String {
        let terms = self
            .terms
            .iter()
            .map(|(&mask, &weight)| TermJson {
                subset: (0..self.dim).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect(),
                weight,
            })
            .collect();
        serde_json::to_string_pretty(&FunctionJson { m: self.dim, terms })
            .expect("function serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: FunctionJson<T> = serde_json::from_str(text)?;
        let mut terms = Vec::with_capacity(parsed.terms.len());
        for term in &parsed.terms {
            let mut mask = 0u64;
            for &i in &term.subset {
                if i == 0 || i > parsed.m {
                    return Err(Error::Parse(format!(
                        "subset index {i} outside 1..={}",
                        parsed.m
                    )));
                }
                mask |= 1 << (i - 1);
            }
            terms.push((mask, term.weight));
        }
        MultilinearFunction::new(parsed.m, terms)
    }
}

/// Which function a monotonicity violation was found in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonotoneKind {
    /// The value `Z` itself.
    Value,
    /// The discrete derivative `V_i` for the carried coordinate.
    Derivative(usize),
}

/// Outcome of the exhaustive monotonicity check.
#[derive(Clone, Debug, PartialEq)]
pub enum MonotoneCheck<T> {
    Ok,
    /// First counterexample in scan order: raising `coordinate` at `point`
    /// drops the checked function from `below` to `above`.
    Violation { point: CubePoint, coordinate: usize, kind: MonotoneKind, below: T, above: T },
}

impl<T> MonotoneCheck<T> {
    pub fn is_ok(&self) -> bool {
        matches!(self, MonotoneCheck::Ok)
    }
}

/// Dense values over all `2^m` vertices; index = packed vertex bits.
/// Accepts arbitrary tables so the verifiers can exercise non-multilinear and
/// non-monotone inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionTable<T> {
    dim: usize,
    values: Vec<T>,
}

impl<T: Scalar> FunctionTable<T> {
    pub fn new(dim: usize, values: Vec<T>) -> Result<Self> {
        check_enumerable(dim, TABLE_DIM_LIMIT)?;
        if values.len() != 1usize << dim {
            return Err(Error::InvalidParameter(format!(
                "table length {} is not 2^{dim}",
                values.len()
            )));
        }
        Ok(FunctionTable { dim, values })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(u64) -> T) -> Result<Self> {
        check_enumerable(dim, TABLE_DIM_LIMIT)?;
        Ok(FunctionTable { dim, values: (0..1u64 << dim).map(&mut f).collect() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn value_bits(&self, bits: u64) -> T {
        self.values[bits as usize]
    }

    pub fn value(&self, x: &CubePoint) -> Result<T> {
        check_dim(self.dim, x.dim())?;
        Ok(self.value_bits(x.bits()))
    }

    /// `V_i(x)` read off the table; zero when `x_i = 0`.
    #[inline]
    pub fn derivative_bits(&self, bits: u64, i: usize) -> T {
        let cleared = bits & !(1u64 << i);
        self.values[bits as usize] - self.values[cleared as usize]
    }

    /// `V(x) = sum_i V_i(x)^2` over the coordinates set in `bits`.
    pub fn local_variance_bits(&self, bits: u64) -> T {
        let mut total = T::zero();
        let mut rest = bits;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = self.derivative_bits(bits, i);
            total = total + d * d;
        }
        total
    }

    /// `sum_i (f(x) - f(x^i))^2` over all m coordinate flips (both directions).
    pub fn flip_gradient_sq_bits(&self, bits: u64) -> T {
        let mut total = T::zero();
        for i in 0..self.dim {
            let d = self.values[bits as usize] - self.values[(bits ^ (1 << i)) as usize];
            total = total + d * d;
        }
        total
    }

    /// Global discrete norm: `sup_x sqrt(sum_i (f(x) - f(x^i))^2)`.
    pub fn global_discrete_norm(&self) -> f64 {
        (0..self.values.len() as u64)
            .map(|bits| to_f64(self.flip_gradient_sq_bits(bits)))
            .fold(0.0, f64::max)
            .sqrt()
    }

    /// Confirms `Z` and every `V_i` are non-decreasing in each coordinate, or
    /// returns the first counterexample (scan order: vertex bits ascending,
    /// raised coordinate ascending, value before derivatives).
    pub fn check_monotone(&self) -> MonotoneCheck<T> {
        let size = self.values.len() as u64;
        for bits in 0..size {
            for j in 0..self.dim {
                if bits >> j & 1 == 1 {
                    continue;
                }
                let raised = bits | (1 << j);
                let below = self.values[bits as usize];
                let above = self.values[raised as usize];
                if above < below {
                    return MonotoneCheck::Violation {
                        point: CubePoint { bits, dim: self.dim },
                        coordinate: j,
                        kind: MonotoneKind::Value,
                        below,
                        above,
                    };
                }
                for i in 0..self.dim {
                    let d_below = self.derivative_bits(bits, i);
                    let d_above = self.derivative_bits(raised, i);
                    if d_above < d_below {
                        return MonotoneCheck::Violation {
                            point: CubePoint { bits, dim: self.dim },
                            coordinate: j,
                            kind: MonotoneKind::Derivative(i),
                            below: d_below,
                            above: d_above,
                        };
                    }
                }
            }
        }
        MonotoneCheck::Ok
    }

    /// Exact expectation under the product measure.
    pub fn expectation(&self, measure: &ProductMeasure) -> Result<f64> {
        check_dim(self.dim, measure.dim())?;
        let weights = measure.weights()?;
        Ok(self
            .values
            .iter()
            .zip(&weights)
            .map(|(&v, &w)| to_f64(v) * w)
            .sum())
    }

    /// `P(f >= threshold)`.
    pub fn tail_probability(&self, measure: &ProductMeasure, threshold: T) -> Result<f64> {
        check_dim(self.dim, measure.dim())?;
        let weights = measure.weights()?;
        Ok(self
            .values
            .iter()
            .zip(&weights)
            .filter(|(&v, _)| v >= threshold)
            .map(|(_, &w)| w)
            .sum())
    }

    /// Lower median: `inf{a : P(f <= a) >= 1/2}`, always an attained value.
    pub fn median(&self, measure: &ProductMeasure) -> Result<T> {
        check_dim(self.dim, measure.dim())?;
        let weights = measure.weights()?;
        let mut pairs: Vec<(T, f64)> =
            self.values.iter().copied().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("orderable table values"));
        let mut cumulative = 0.0;
        for &(value, weight) in &pairs {
            cumulative += weight;
            if cumulative >= 0.5 {
                return Ok(value);
            }
        }
        // Rounding dust can leave the total a hair under 1; the maximum is
        // then the lower median.
        Ok(pairs.last().expect("nonempty table").0)
    }

    /// Attained values, sorted ascending, deduplicated.
    pub fn distinct_values(&self) -> Vec<T> {
        let mut values = self.values.clone();
        values.sort_by(|a, b| a.partial_cmp(b).expect("orderable table values"));
        values.dedup();
        values
    }
}
