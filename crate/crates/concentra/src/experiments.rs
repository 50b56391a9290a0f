//! Seeded, parallel Monte Carlo harness over G(n, p): per-trial cycle
//! statistics, summary estimates with confidence intervals, the median-shift
//! bookkeeping, and schema-stable CSV/JSON exports.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycles::{cycle_statistics, variance_ratio, VarianceBudgetForm};
use crate::error::{Error, Result};
use crate::graph::{degree_regularity, Graph};
use crate::rng::{draw, streams};
use crate::stats::{lower_median_u64, lower_quantile, mean_interval, wilson_interval, MeanCi, Z95};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn default_c() -> f64 {
    1.0
}

fn default_epsilon() -> f64 {
    0.1
}

/// One Monte Carlo run. `p` may be given directly or through `np = n p`;
/// flags override config-file values in the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub np: Option<f64>,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    /// Stand-in for the existential constant in the bounds; reports always
    /// carry raw ratios so conclusions do not hinge on it.
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Use the alternate variance-budget exponents in the per-trial ratio.
    #[serde(default)]
    pub alternate_budget: bool,
    /// Wall-clock capture is off by default: the runtime column would break
    /// the byte-identical output contract across thread counts.
    #[serde(default)]
    pub record_runtime: bool,
}

impl ExperimentConfig {
    pub fn edge_probability(&self) -> Result<f64> {
        let p = match (self.p, self.np) {
            (Some(p), _) => p,
            (None, Some(np)) => np / self.n as f64,
            (None, None) => {
                return Err(Error::InvalidParameter("one of p or np is required".into()))
            }
        };
        if !(0.0 < p && p <= 1.0) {
            return Err(Error::InvalidParameter(format!("p = {p} is not in (0, 1]")));
        }
        Ok(p)
    }

    pub fn validate(&self) -> Result<f64> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.k < 3 {
            return Err(Error::InvalidParameter(format!("k = {} must be at least 3", self.k)));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        self.edge_probability()
    }

    pub fn budget_form(&self) -> VarianceBudgetForm {
        if self.alternate_budget {
            VarianceBudgetForm::Alternate
        } else {
            VarianceBudgetForm::Standard
        }
    }
}

/// One trial, reproducible from the config and trial index alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub z: u64,
    pub v: u64,
    pub w: u64,
    /// None when np is below the regularity guard.
    pub event_e: Option<bool>,
    pub t2_ratio: f64,
    pub runtime_ms: u64,
}

/// Records plus the trials that tripped a guard (kept out of summaries).
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRun {
    pub records: Vec<TrialRecord>,
    pub excluded: Vec<(usize, String)>,
}

/// Exact expected k-cycle count: `n (n-1) ... (n-k+1) / (2k) * p^k`.
pub fn expected_cycle_count(n: usize, p: f64, k: usize) -> Result<f64> {
    if k < 3 || k > n {
        return Err(Error::InvalidParameter(format!("k = {k} outside 3..={n}")));
    }
    let mut falling = 1.0f64;
    for i in 0..k {
        falling *= (n - i) as f64;
    }
    Ok(falling / (2.0 * k as f64) * p.powi(k as i32))
}

fn run_one(config: &ExperimentConfig, p: f64, trial: usize) -> Result<TrialRecord> {
    let started = std::time::Instant::now();
    let seed = draw(config.seed, streams::TRIAL, trial as u64);
    let graph = Graph::sample(config.n, p, seed)?;
    let stats = cycle_statistics(&graph, config.k)?;
    let np = config.n as f64 * p;
    let event_e = match degree_regularity(&graph, p) {
        Ok(regularity) => Some(regularity.holds),
        Err(Error::NpBelowGuard { .. }) => None,
        Err(other) => return Err(other),
    };
    let t2_ratio = variance_ratio(&stats, np, config.budget_form());
    let runtime_ms =
        if config.record_runtime { started.elapsed().as_millis() as u64 } else { 0 };
    Ok(TrialRecord {
        trial,
        seed,
        z: stats.count,
        v: stats.local_variance,
        w: stats.shared_edge_pairs,
        event_e,
        t2_ratio,
        runtime_ms,
    })
}

/// Runs all trials. Trials draw independent seed streams and may execute on
/// any number of workers; the output is sorted by trial index and identical
/// regardless of parallelism.
pub fn run_trials(config: &ExperimentConfig) -> Result<TrialRun> {
    let p = config.validate()?;
    let outcomes: Vec<(usize, std::result::Result<TrialRecord, String>)> = (0..config.trials)
        .into_par_iter()
        .map(|trial| (trial, run_one(config, p, trial).map_err(|e| e.to_string())))
        .collect();
    let mut records = Vec::with_capacity(config.trials);
    let mut excluded = Vec::new();
    for (trial, outcome) in outcomes {
        match outcome {
            Ok(record) => records.push(record),
            Err(message) => excluded.push((trial, message)),
        }
    }
    records.sort_by_key(|r| r.trial);
    Ok(TrialRun { records, excluded })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioQuantiles {
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
    pub max: f64,
}

/// Aggregate view of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub trials: usize,
    pub excluded: usize,
    pub mean_z: f64,
    pub mean_z_ci: Interval,
    pub median_z: u64,
    pub closed_form_mean_z: f64,
    /// Empirical tail P(Z >= 2 * mean) against the doubled empirical mean.
    pub tail_threshold: f64,
    pub tail_frequency: f64,
    pub tail_wilson: Interval,
    pub event_e_evaluated: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_e_frequency: Option<f64>,
    pub ratio_quantiles: RatioQuantiles,
    /// Median comparison: is the empirical median at most (1 + epsilon)
    /// times the closed-form mean?
    pub epsilon: f64,
    pub median_bound: f64,
    pub median_within_bound: bool,
    /// Level `a = M - sqrt(c eps ((np)^k M + (np)^(2k)))` and the pointwise
    /// check that shifting by it reproduces the median event on every record.
    pub shifted_level: f64,
    pub shifted_event_mismatches: usize,
}

/// The level `a` that turns the self-normalized event at the median into a
/// plain median comparison: `M - sqrt(c eps ((np)^k M + (np)^(2k)))`.
pub fn shifted_level(median: f64, np: f64, k: usize, epsilon: f64, c: f64) -> f64 {
    median - (c * epsilon * (np.powi(k as i32) * median + np.powi(2 * k as i32))).sqrt()
}

/// Counts records where `{Z >= a + sqrt(c eps ((np)^k Z + (np)^(2k)))}`
/// disagrees with `{Z >= M}`. The two events coincide whenever the shift map
/// is a contraction (`c eps < 4`); mismatches are reported, never asserted
/// away.
pub fn shifted_event_mismatches(
    z_values: &[u64],
    median: f64,
    np: f64,
    k: usize,
    epsilon: f64,
    c: f64,
) -> usize {
    let a = shifted_level(median, np, k, epsilon, c);
    z_values
        .iter()
        .filter(|&&z| {
            let z = z as f64;
            let shifted = z >= a + (c * epsilon * (np.powi(k as i32) * z + np.powi(2 * k as i32))).sqrt();
            let plain = z >= median;
            shifted != plain
        })
        .count()
}

pub fn summarize(run: &TrialRun, config: &ExperimentConfig) -> Result<SummaryReport> {
    let p = config.validate()?;
    if run.records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let np = config.n as f64 * p;
    let z_values: Vec<u64> = run.records.iter().map(|r| r.z).collect();
    let z_float: Vec<f64> = z_values.iter().map(|&z| z as f64).collect();
    let MeanCi { mean, lo, hi } = mean_interval(&z_float, Z95);
    let median_z = lower_median_u64(&z_values);
    let closed_form = expected_cycle_count(config.n, p, config.k)?;

    let tail_threshold = 2.0 * mean;
    let tail_hits = z_float.iter().filter(|&&z| z >= tail_threshold).count();
    let (w_lo, w_hi) = wilson_interval(tail_hits, run.records.len(), Z95);

    let evaluated: Vec<bool> = run.records.iter().filter_map(|r| r.event_e).collect();
    let event_e_frequency = if evaluated.is_empty() {
        None
    } else {
        Some(evaluated.iter().filter(|&&h| h).count() as f64 / evaluated.len() as f64)
    };

    let mut ratios: Vec<f64> = run.records.iter().map(|r| r.t2_ratio).collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
    let ratio_quantiles = RatioQuantiles {
        q50: lower_quantile(&ratios, 0.5),
        q90: lower_quantile(&ratios, 0.9),
        q99: lower_quantile(&ratios, 0.99),
        max: *ratios.last().expect("nonempty"),
    };

    let median_bound = (1.0 + config.epsilon) * closed_form;
    let shifted = shifted_level(median_z as f64, np, config.k, config.epsilon, config.c);
    let mismatches =
        shifted_event_mismatches(&z_values, median_z as f64, np, config.k, config.epsilon, config.c);

    Ok(SummaryReport {
        trials: run.records.len(),
        excluded: run.excluded.len(),
        mean_z: mean,
        mean_z_ci: Interval { lo, hi },
        median_z,
        closed_form_mean_z: closed_form,
        tail_threshold,
        tail_frequency: tail_hits as f64 / run.records.len() as f64,
        tail_wilson: Interval { lo: w_lo, hi: w_hi },
        event_e_evaluated: evaluated.len(),
        event_e_frequency,
        ratio_quantiles,
        epsilon: config.epsilon,
        median_bound,
        median_within_bound: (median_z as f64) <= median_bound,
        shifted_level: shifted,
        shifted_event_mismatches: mismatches,
    })
}

/// Full report carrier for the JSON export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub summary: SummaryReport,
}

fn format_event(event: Option<bool>) -> &'static str {
    match event {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

/// Trials table as CSV. The leading `#` lines echo the code version and the
/// full effective config; the column set is fixed.
pub fn render_csv(config: &ExperimentConfig, records: &[TrialRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let mut out = String::new();
    out.push_str(&format!("# concentra {VERSION}\n"));
    out.push_str(&format!("# config {}\n", serde_json::to_string(config)?));
    out.push_str("trial,seed,Z,V,W,event_E,t2_ratio,runtime_ms\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.trial,
            r.seed,
            r.z,
            r.v,
            r.w,
            format_event(r.event_e),
            r.t2_ratio,
            r.runtime_ms
        ));
    }
    Ok(out)
}

/// Parses a trials CSV produced by [`render_csv`], returning the echoed
/// config (when present) and the records.
pub fn parse_csv(text: &str) -> Result<(Option<ExperimentConfig>, Vec<TrialRecord>)> {
    let mut config = None;
    let mut records = Vec::new();
    let mut saw_header = false;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# config ") {
            config = Some(serde_json::from_str(rest)?);
            continue;
        }
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !saw_header {
            if line != "trial,seed,Z,V,W,event_E,t2_ratio,runtime_ms" {
                return Err(Error::Parse(format!("unexpected CSV header: {line:?}")));
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Parse(format!("bad CSV row: {line:?}")));
        }
        let parse_err = |what: &str| Error::Parse(format!("bad {what} in row {line:?}"));
        records.push(TrialRecord {
            trial: fields[0].parse().map_err(|_| parse_err("trial"))?,
            seed: fields[1].parse().map_err(|_| parse_err("seed"))?,
            z: fields[2].parse().map_err(|_| parse_err("Z"))?,
            v: fields[3].parse().map_err(|_| parse_err("V"))?,
            w: fields[4].parse().map_err(|_| parse_err("W"))?,
            event_e: match fields[5] {
                "" => None,
                "true" => Some(true),
                "false" => Some(false),
                other => return Err(Error::Parse(format!("bad event_E value {other:?}"))),
            },
            t2_ratio: fields[6].parse().map_err(|_| parse_err("t2_ratio"))?,
            runtime_ms: fields[7].parse().map_err(|_| parse_err("runtime_ms"))?,
        });
    }
    if !saw_header {
        return Err(Error::Parse("missing CSV header".into()));
    }
    Ok((config, records))
}

pub fn render_json(report: &McReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn parse_json(text: &str) -> Result<McReport> {
    Ok(serde_json::from_str(text)?)
}

/// Writes atomically enough for our purposes: the content is fully rendered
/// (and validated) before the file is created, so guard failures leave no
/// partial file behind.
pub fn write_csv(path: &Path, config: &ExperimentConfig, records: &[TrialRecord]) -> Result<()> {
    let content = render_csv(config, records)?;
    std::fs::write(path, content)?;
    Ok(())
}

pub fn write_json(path: &Path, report: &McReport) -> Result<()> {
    let content = render_json(report)?;
    std::fs::write(path, content)?;
    Ok(())
}
