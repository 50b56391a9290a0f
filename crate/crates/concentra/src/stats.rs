//! Small statistics helpers: Wilson proportion intervals, normal-approximation
//! mean intervals, and lower-convention empirical quantiles.

/// Two-sided 95% normal quantile used throughout the reports.
pub const Z95: f64 = 1.96;

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    assert!(trials > 0, "wilson interval needs at least one trial");
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MeanCi {
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Sample mean with a normal-approximation confidence interval
/// (sample standard deviation, `n - 1` denominator).
pub fn mean_interval(values: &[f64], z: f64) -> MeanCi {
    assert!(!values.is_empty());
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return MeanCi { mean, lo: mean, hi: mean };
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let half = z * (var / n).sqrt();
    MeanCi { mean, lo: mean - half, hi: mean + half }
}

/// Lower empirical quantile: smallest sorted value with at least a `q`
/// fraction of the sample at or below it.
pub fn lower_quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    assert!((0.0..=1.0).contains(&q));
    let n = sorted.len();
    let rank = (q * n as f64).ceil() as usize;
    sorted[rank.max(1).min(n) - 1]
}

/// Lower median of integer observations.
pub fn lower_median_u64(values: &[u64]) -> u64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted[sorted.len().div_ceil(2) - 1]
}
