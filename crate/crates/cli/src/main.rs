//! Command-line front end: `verify-cube` runs the exhaustive inequality
//! suites, `graph` computes statistics of one sampled or imported graph, and
//! `mc` drives the Monte Carlo harness.
//!
//! Exit codes: 0 on success with zero violations, 1 on runtime errors or
//! reported violations, 2 when a precondition or enumeration guard refuses
//! to run.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use concentra::cube::{FunctionTable, ProductMeasure};
use concentra::cycles::{cycle_statistics, variance_ratio, VarianceBudgetForm};
use concentra::error::Error;
use concentra::experiments::{
    run_trials, summarize, write_csv, write_json, ExperimentConfig, McReport, VERSION,
};
use concentra::graph::{
    degree_buckets, degree_regularity, estimate_bucket_overflow, estimate_max_degree_tail, Graph,
};
use concentra::report::VerifierReport;
use concentra::sampling;
use concentra::talagrand::{
    verify_distance_concentration, verify_global_norm_deviation, verify_local_norm_deviation,
    verify_local_norm_deviation_unchecked, verify_weighted_disagreement,
};
use concentra::{run_with_threads, MultilinearF64};

#[derive(Parser)]
#[command(name = "concentra", version, about = "Deviation-inequality verification lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Master seed for every random draw in the run.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; defaults to CONCENTRA_THREADS or all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Output file (verify-cube, graph) or directory (mc).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
    /// JSON config file with ExperimentConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive verification sweeps over small cubes.
    VerifyCube(VerifyCubeArgs),
    /// Statistics of a single graph (sampled or from an edge list).
    Graph(GraphArgs),
    /// Seeded Monte Carlo over G(n, p).
    Mc(McArgs),
}

#[derive(Args)]
struct VerifyCubeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 2)]
    m_min: usize,
    #[arg(long, default_value_t = 8)]
    m_max: usize,
    /// Comma-separated densities for the product measures.
    #[arg(long, default_value = "0.1,0.3,0.5,0.7,0.9")]
    p_list: String,
    /// Random nonnegative-coefficient functions per (m, p) cell.
    #[arg(long, default_value_t = 20)]
    functions: usize,
    /// Random vertex sets per (m, p) cell for the distance suites.
    #[arg(long, default_value_t = 50)]
    sets: usize,
    /// Random tables per (m, p) cell for the global-norm suite.
    #[arg(long, default_value_t = 20)]
    tables: usize,
    /// Random weight vectors per set instance for the witness search.
    #[arg(long, default_value_t = 5)]
    lambdas: usize,
    /// Verify one function or table from a JSON file instead of sweeping.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Run the deviation sweep on a non-monotone input instead of refusing.
    #[arg(long, default_value_t = false)]
    allow_nonmonotone: bool,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Expected degree n*p, an alternative to --p.
    #[arg(long)]
    np: Option<f64>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Read the graph from an edge-list file instead of sampling.
    #[arg(long)]
    edge_list: Option<PathBuf>,
    /// Also estimate the degree-tail event frequencies over this many seeds.
    #[arg(long)]
    estimate_trials: Option<usize>,
    /// Constant for the bucket-overflow bound shape.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    np: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    /// Use the alternate variance-budget exponents in t2_ratio.
    #[arg(long, default_value_t = false)]
    alt_budget: bool,
    /// Record wall-clock runtime per trial (breaks byte-identical output).
    #[arg(long, default_value_t = false)]
    record_runtime: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::VerifyCube(args) => cmd_verify_cube(args),
        Command::Graph(args) => cmd_graph(args),
        Command::Mc(args) => cmd_mc(args),
    };
    match outcome {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            if error.is_guard() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn effective_threads(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| std::env::var("CONCENTRA_THREADS").ok().and_then(|v| v.parse().ok()))
}

fn effective_sweep_config(args: &VerifyCubeArgs) -> Result<String, Error> {
    Ok(serde_json::to_string(&serde_json::json!({
        "m_min": args.m_min,
        "m_max": args.m_max,
        "p_list": args.p_list,
        "functions": args.functions,
        "sets": args.sets,
        "tables": args.tables,
        "lambdas": args.lambdas,
        "seed": args.common.seed,
        "input": args.input.as_ref().map(|p| p.display().to_string()),
        "allow_nonmonotone": args.allow_nonmonotone,
    }))?)
}

fn parse_p_list(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad density {piece:?}")))
        })
        .collect()
}

fn cmd_verify_cube(args: VerifyCubeArgs) -> Result<ExitCode, Error> {
    let threads = effective_threads(args.common.threads);
    let densities = parse_p_list(&args.p_list)?;
    if args.m_min < 1 || args.m_min > args.m_max {
        return Err(Error::InvalidParameter(format!(
            "m range {}..={} is empty or degenerate",
            args.m_min, args.m_max
        )));
    }

    let reports = run_with_threads(threads, || -> Result<Vec<VerifierReport>, Error> {
        if let Some(path) = &args.input {
            return verify_single_input(path, &densities, args.allow_nonmonotone);
        }
        let mut reports = Vec::new();
        let seed = args.common.seed;
        for m in args.m_min..=args.m_max {
            for (pi, &p) in densities.iter().enumerate() {
                let measure = ProductMeasure::new(p, m)?;
                let cell = (m as u64) << 32 | pi as u64;
                for f_index in 0..args.functions {
                    let f = sampling::random_multilinear_f64(
                        m,
                        seed ^ cell.wrapping_mul(0x9E37).wrapping_add(f_index as u64),
                    );
                    reports.push(verify_local_norm_deviation(&f.to_table()?, &measure, None)?);
                }
                for s_index in 0..args.sets {
                    let instance_seed =
                        seed ^ cell.wrapping_mul(0xC2B2).wrapping_add(s_index as u64);
                    let set = sampling::random_vertex_set(m, 2 * m + 6, instance_seed);
                    reports.push(verify_distance_concentration(&set, &measure, None)?);
                    let x = sampling::random_point(m, instance_seed.wrapping_add(1));
                    let mut witness_report =
                        VerifierReport::new("weighted_disagreement", vec![]);
                    for l_index in 0..args.lambdas {
                        let lambda = sampling::random_weights(
                            m,
                            instance_seed.wrapping_add(2 + l_index as u64),
                        );
                        let check = verify_weighted_disagreement(&set, &x, &lambda)?;
                        if !check.ok {
                            witness_report.record(
                                0.0,
                                None,
                                check.weighted_disagreement,
                                check.bound,
                            );
                        }
                    }
                    reports.push(witness_report);
                }
                for t_index in 0..args.tables {
                    let table = sampling::random_table_f64(
                        m,
                        seed ^ cell.wrapping_mul(0x85EB).wrapping_add(t_index as u64),
                    );
                    reports.push(verify_global_norm_deviation(&table, &measure, None)?);
                }
            }
        }
        Ok(reports)
    })?;

    let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
    println!("# concentra {VERSION}");
    println!(
        "verify-cube: {} reports, {} violations (m {}..={}, p [{}])",
        reports.len(),
        violations,
        args.m_min,
        args.m_max,
        args.p_list
    );
    for report in reports.iter().filter(|r| !r.ok()) {
        println!(
            "violated: {} ({} cells, worst ratio {})",
            report.inequality,
            report.violations.len(),
            report.max_lhs_over_bound
        );
    }

    if let Some(out) = &args.common.out {
        match args.common.format {
            Format::Csv => {
                let mut text = format!(
                    "# concentra {VERSION}\n# config {}\ninequality,grid_size,violations,max_lhs_over_bound\n",
                    effective_sweep_config(&args)?
                );
                for r in &reports {
                    text.push_str(&format!(
                        "{},{},{},{}\n",
                        r.inequality,
                        r.grid.len(),
                        r.violations.len(),
                        r.max_lhs_over_bound
                    ));
                }
                std::fs::write(out, text)?;
            }
            _ => {
                let envelope = serde_json::json!({
                    "version": VERSION,
                    "config": serde_json::from_str::<serde_json::Value>(
                        &effective_sweep_config(&args)?
                    )?,
                    "reports": reports,
                });
                std::fs::write(out, serde_json::to_string_pretty(&envelope)?)?;
            }
        }
        println!("report written to {}", out.display());
    }
    Ok(if violations == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Verifies one function (`{"m", "terms"}`) or table (`{"m", "values"}`)
/// from a file against every requested density.
fn verify_single_input(
    path: &PathBuf,
    densities: &[f64],
    allow_nonmonotone: bool,
) -> Result<Vec<VerifierReport>, Error> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let table: FunctionTable<f64> = if value.get("terms").is_some() {
        MultilinearF64::from_json(&text)?.to_table()?
    } else {
        let m = value
            .get("m")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::Parse("missing \"m\"".into()))? as usize;
        let values: Vec<f64> = serde_json::from_value(
            value
                .get("values")
                .cloned()
                .ok_or_else(|| Error::Parse("expected \"terms\" or \"values\"".into()))?,
        )?;
        FunctionTable::new(m, values)?
    };

    let monotone = table.check_monotone().is_ok();
    if !monotone && !allow_nonmonotone {
        return Err(Error::NotMonotone(
            "input fails the monotonicity gate; pass --allow-nonmonotone to probe it anyway"
                .into(),
        ));
    }
    let mut reports = Vec::new();
    for &p in densities {
        let measure = ProductMeasure::new(p, table.dim())?;
        let deviation = if monotone {
            verify_local_norm_deviation(&table, &measure, None)?
        } else {
            verify_local_norm_deviation_unchecked(&table, &measure, None)?
        };
        reports.push(deviation);
        reports.push(verify_global_norm_deviation(&table, &measure, None)?);
    }
    Ok(reports)
}

fn load_config(path: &Option<PathBuf>) -> Result<Option<ExperimentConfig>, Error> {
    match path {
        None => Ok(None),
        Some(p) => Ok(Some(serde_json::from_str(&std::fs::read_to_string(p)?)?)),
    }
}

fn cmd_graph(args: GraphArgs) -> Result<ExitCode, Error> {
    let threads = effective_threads(args.common.threads);
    let file_config = load_config(&args.common.config)?;
    let n = args.n.or(file_config.as_ref().map(|c| c.n));
    let p_direct = args.p.or(file_config.as_ref().and_then(|c| c.p));
    let np = args.np.or(file_config.as_ref().and_then(|c| c.np));
    let k = args.k;

    let (graph, p) = match &args.edge_list {
        Some(path) => {
            let g = Graph::parse_edge_list(&std::fs::read_to_string(path)?)?;
            let p = match (p_direct, np) {
                (Some(p), _) => Some(p),
                (None, Some(np)) => Some(np / g.n() as f64),
                (None, None) => None,
            };
            (g, p)
        }
        None => {
            let n = n.ok_or_else(|| {
                Error::InvalidParameter("--n is required without --edge-list".into())
            })?;
            let p = match (p_direct, np) {
                (Some(p), _) => p,
                (None, Some(np)) => np / n as f64,
                (None, None) => {
                    return Err(Error::InvalidParameter("one of --p or --np is required".into()))
                }
            };
            (Graph::sample(n, p, args.common.seed)?, Some(p))
        }
    };

    let stats = run_with_threads(threads, || cycle_statistics(&graph, k))?;
    println!("# concentra {VERSION}");
    println!(
        "# graph n={} edges={} k={} seed={}",
        graph.n(),
        graph.edge_count(),
        k,
        args.common.seed
    );
    println!(
        "Z={} V={} W={}",
        stats.count, stats.local_variance, stats.shared_edge_pairs
    );

    let mut extras = serde_json::Map::new();
    if let Some(p) = p {
        let np_value = graph.n() as f64 * p;
        println!("np={np_value}");
        if np_value > 0.0 {
            let profile = degree_buckets(&graph, p)?;
            let summary: Vec<String> = profile
                .buckets
                .iter()
                .map(|b| format!("V_{}={}", b.index, b.vertices.len()))
                .collect();
            println!("buckets: {}", summary.join(" "));
            let ratio = variance_ratio(&stats, np_value, VarianceBudgetForm::Standard);
            println!("t2_ratio={ratio}");
            extras.insert("t2_ratio".into(), serde_json::json!(ratio));
            match degree_regularity(&graph, p) {
                Ok(reg) => {
                    println!("event_E={}", reg.holds);
                    extras.insert("event_E".into(), serde_json::json!(reg.holds));
                    extras.insert("max_degree".into(), serde_json::json!(reg.max_degree));
                }
                Err(Error::NpBelowGuard { np }) => {
                    println!("event_E=skipped (np={np} at or below e^e)");
                }
                Err(other) => return Err(other),
            }
        }
        if let Some(trials) = args.estimate_trials {
            let n = graph.n();
            let (tail, overflow) = run_with_threads(threads, || {
                let tail = estimate_max_degree_tail(n, p, trials, args.common.seed);
                let overflow = estimate_bucket_overflow(n, p, trials, args.common.seed, args.c);
                (tail, overflow)
            });
            let tail = tail?;
            let overflow = overflow?;
            println!(
                "max_degree_tail: freq={} wilson=[{}, {}] bound={}",
                tail.frequency, tail.wilson_low, tail.wilson_high, tail.bound
            );
            println!(
                "bucket_overflow: freq={} wilson=[{}, {}] bound_shape(c={})={}",
                overflow.frequency,
                overflow.wilson_low,
                overflow.wilson_high,
                args.c,
                overflow.bound
            );
            extras.insert("max_degree_tail".into(), serde_json::to_value(&tail)?);
            extras.insert("bucket_overflow".into(), serde_json::to_value(&overflow)?);
        }
    }

    if let Some(out) = &args.common.out {
        let mut body: serde_json::Value = serde_json::from_str(&stats.to_json())?;
        let object = body.as_object_mut().expect("stats serialize to an object");
        object.insert("version".into(), serde_json::json!(VERSION));
        object.insert("n".into(), serde_json::json!(graph.n()));
        object.insert("edges".into(), serde_json::json!(graph.edge_count()));
        object.insert("seed".into(), serde_json::json!(args.common.seed));
        for (key, value) in extras {
            object.insert(key, value);
        }
        std::fs::write(out, serde_json::to_string_pretty(&body)?)?;
        println!("report written to {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_mc(args: McArgs) -> Result<ExitCode, Error> {
    let threads = effective_threads(args.common.threads);
    let base = load_config(&args.common.config)?;
    let config = ExperimentConfig {
        n: args
            .n
            .or(base.as_ref().map(|c| c.n))
            .ok_or_else(|| Error::InvalidParameter("--n or a config file is required".into()))?,
        p: args.p.or(base.as_ref().and_then(|c| c.p)),
        np: if args.p.is_some() { None } else { args.np.or(base.as_ref().and_then(|c| c.np)) },
        k: args.k.or(base.as_ref().map(|c| c.k)).unwrap_or(3),
        trials: args.trials.or(base.as_ref().map(|c| c.trials)).unwrap_or(100),
        seed: args.common.seed,
        c: args.c.or(base.as_ref().map(|c| c.c)).unwrap_or(1.0),
        epsilon: args.epsilon.or(base.as_ref().map(|c| c.epsilon)).unwrap_or(0.1),
        alternate_budget: args.alt_budget || base.as_ref().is_some_and(|c| c.alternate_budget),
        record_runtime: args.record_runtime || base.as_ref().is_some_and(|c| c.record_runtime),
    };
    config.validate()?;

    eprintln!("mc: running {} trials at n={} k={}", config.trials, config.n, config.k);
    let run = run_with_threads(threads, || run_trials(&config))?;
    eprintln!("mc: {} trials done, {} excluded", run.records.len(), run.excluded.len());
    let summary = summarize(&run, &config)?;

    println!("# concentra {VERSION}");
    println!("# config {}", serde_json::to_string(&config)?);
    println!(
        "mean_Z={} ci=[{}, {}] median_Z={} closed_form={}",
        summary.mean_z,
        summary.mean_z_ci.lo,
        summary.mean_z_ci.hi,
        summary.median_z,
        summary.closed_form_mean_z
    );
    println!(
        "tail_freq={} wilson=[{}, {}] threshold={}",
        summary.tail_frequency, summary.tail_wilson.lo, summary.tail_wilson.hi,
        summary.tail_threshold
    );
    match summary.event_e_frequency {
        Some(freq) => println!("event_E_freq={freq} over {} trials", summary.event_e_evaluated),
        None => println!("event_E_freq=skipped (np at or below e^e)"),
    }
    println!(
        "t2_ratio quantiles: q50={} q90={} q99={} max={}",
        summary.ratio_quantiles.q50,
        summary.ratio_quantiles.q90,
        summary.ratio_quantiles.q99,
        summary.ratio_quantiles.max
    );
    println!(
        "median_within_(1+eps)*closed_form={} shifted_level={} mismatches={}",
        summary.median_within_bound, summary.shifted_level, summary.shifted_event_mismatches
    );

    let out_dir = args.common.out.clone().unwrap_or_else(|| PathBuf::from("mc_out"));
    std::fs::create_dir_all(&out_dir)?;
    let report =
        McReport { version: VERSION.into(), config: config.clone(), summary };
    if args.common.format != Format::Json {
        let path = out_dir.join("trials.csv");
        write_csv(&path, &config, &run.records)?;
        println!("trials written to {}", path.display());
    }
    if args.common.format != Format::Csv {
        let path = out_dir.join("summary.json");
        write_json(&path, &report)?;
        println!("summary written to {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}
