//! Command-line front end: run campaigns, tabulate analytic bounds, and
//! cross-check the Monte Carlo engine against exact enumeration.
//!
//! Exit codes: 0 success, 2 invalid flags or ranges, 3 runtime failure,
//! 4 enumeration cap exceeded, 5 oracle check failed.

use clap::{Parser, Subcommand, ValueEnum};
use phaseest::campaign::{run_campaign, run_trials, PhiPolicy};
use phaseest::manifest::{parse_key_values, RunManifest, SimulateSpec};
use phaseest::output::{output_row, to_csv, to_json, OutputRow};
use phaseest_core::angle::TAU;
use phaseest_core::bounds::{
    heisenberg_limit, hybrid_variance_bound, nonadaptive_vmax, proven_schedule_overhead,
    proven_schedule_vmax_cap, sql,
};
use phaseest_core::oracle::{exact_v_grid, fejer_kernel, qpea_error_density, ENUMERATION_CAP};
use phaseest_core::schemes::{HybridMode, SchemeConfig};
use phaseest_core::stats::holevo_std;
use phaseest_core::Error as CoreError;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "phaseest", version, about = "Phase-estimation protocol simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a Monte Carlo campaign sweep and emit one summary row per K.
    Simulate(SimulateArgs),
    /// Tabulate analytic variance bounds and reference curves.
    Bounds(BoundsArgs),
    /// Check the Monte Carlo engine against exact enumeration.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Standard,
    Qpea,
    Hybrid,
    Nonadaptive,
    Fixedm,
}

impl SchemeArg {
    fn name(self) -> &'static str {
        match self {
            SchemeArg::Standard => "standard",
            SchemeArg::Qpea => "qpea",
            SchemeArg::Hybrid => "hybrid",
            SchemeArg::Nonadaptive => "nonadaptive",
            SchemeArg::Fixedm => "fixedm",
        }
    }

    fn parse_name(s: &str) -> Option<Self> {
        match s {
            "standard" => Some(SchemeArg::Standard),
            "qpea" => Some(SchemeArg::Qpea),
            "hybrid" => Some(SchemeArg::Hybrid),
            "nonadaptive" => Some(SchemeArg::Nonadaptive),
            "fixedm" => Some(SchemeArg::Fixedm),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Parser)]
struct SimulateArgs {
    /// Scheme to sweep.
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Largest K of the sweep (rows K=0..k_max; hybrid starts at K=1).
    #[arg(long)]
    k_max: Option<u32>,
    /// Repetitions at the finest level (nonadaptive) or constant M (fixedm).
    #[arg(long)]
    mk: Option<u32>,
    /// Schedule slope for the nonadaptive scheme.
    #[arg(long)]
    mu: Option<u32>,
    /// Standard budget: fixes N_S for hybrid rows, or selects a single
    /// standard-scheme row.
    #[arg(long)]
    ns: Option<u32>,
    /// Trials per row (at least 100).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when omitted. A `<out>.manifest.json` is written
    /// alongside any output file.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Phase policy: `uniform` or `fixed-ref`.
    #[arg(long)]
    phi_policy: Option<String>,
    /// key=value config file; explicit flags override it.
    #[arg(long)]
    config: Option<String>,
    /// Reproduce a previous run from its manifest (other flags besides
    /// --out are ignored).
    #[arg(long)]
    from_manifest: Option<String>,
}

#[derive(Parser)]
struct BoundsArgs {
    /// Which table: hybrid, vmax, proven, or limits.
    #[arg(long)]
    which: String,
    /// Resource counts for --which limits (repeatable).
    #[arg(long)]
    n: Vec<u64>,
    #[arg(long)]
    mk: Option<u32>,
    #[arg(long)]
    mu: Option<u32>,
    /// K for --which proven.
    #[arg(long)]
    k: Option<u32>,
    /// Sweep bound for --which hybrid/vmax.
    #[arg(long)]
    k_max: Option<u32>,
}

#[derive(Parser)]
struct OracleArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long)]
    k_max: u32,
    /// Constant repetition count for fixedm.
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    mk: Option<u32>,
    #[arg(long)]
    mu: Option<u32>,
    #[arg(long)]
    ns: Option<u32>,
    /// Monte Carlo trials for the exact-vs-MC comparison.
    #[arg(long, default_value_t = 200_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Phase grid points averaged by the enumeration.
    #[arg(long, default_value_t = 16)]
    phi_grid: usize,
    /// Reference grid points (QPEA kernel check uses 256 by default).
    #[arg(long)]
    xi_grid: Option<usize>,
}

/// Error carrying the process exit code.
struct Failure {
    code: u8,
    msg: String,
}

fn fail(code: u8, msg: impl Into<String>) -> Failure {
    Failure {
        code,
        msg: msg.into(),
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        fail(3, format!("io error: {e}"))
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::EnumerationCapExceeded { required, cap } => fail(
                4,
                format!("enumeration cap exceeded: {required} > {cap} weighted strings"),
            ),
            other => fail(3, format!("{other}")),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        eprintln!("phaseest: {}", f.msg);
        return ExitCode::from(f.code);
    }
    let result = match cli.cmd {
        Cmd::Simulate(args) => cmd_simulate(args),
        Cmd::Bounds(args) => cmd_bounds(args),
        Cmd::Oracle(args) => cmd_oracle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("phaseest: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("PHASEEST_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .map_err(|_| fail(2, format!("PHASEEST_THREADS must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(fail(2, "PHASEEST_THREADS must be >= 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| fail(3, format!("thread pool: {e}")))
}

// ---------------------------------------------------------------------------
// simulate

fn resolve_spec(args: &SimulateArgs) -> Result<SimulateSpec, Failure> {
    if let Some(path) = &args.from_manifest {
        let text = std::fs::read_to_string(path)?;
        let manifest = RunManifest::from_json(&text)
            .map_err(|e| fail(2, format!("bad manifest {path}: {e}")))?;
        return Ok(manifest.config);
    }

    let file: BTreeMap<String, String> = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            parse_key_values(&text).map_err(|e| fail(2, format!("bad config {path}: {e}")))?
        }
        None => BTreeMap::new(),
    };
    let known = [
        "scheme", "k-max", "mk", "mu", "ns", "trials", "seed", "format", "phi-policy",
    ];
    for key in file.keys() {
        if !known.contains(&key.as_str()) {
            return Err(fail(2, format!("unknown config key {key:?}")));
        }
    }
    fn from_file<T: std::str::FromStr>(
        file: &BTreeMap<String, String>,
        key: &str,
    ) -> Result<Option<T>, Failure> {
        match file.get(key) {
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| fail(2, format!("bad config value for {key}: {v:?}"))),
            None => Ok(None),
        }
    }

    let scheme = match args.scheme {
        Some(s) => s,
        None => match file.get("scheme") {
            Some(name) => SchemeArg::parse_name(name)
                .ok_or_else(|| fail(2, format!("unknown scheme {name:?}")))?,
            None => return Err(fail(2, "missing --scheme")),
        },
    };
    let format = match args.format {
        Some(FormatArg::Json) => "json",
        Some(FormatArg::Csv) => "csv",
        None => match file.get("format").map(String::as_str) {
            Some("json") => "json",
            Some("csv") | None => "csv",
            Some(other) => return Err(fail(2, format!("unknown format {other:?}"))),
        },
    };
    let phi_policy = args
        .phi_policy
        .clone()
        .or_else(|| file.get("phi-policy").cloned())
        .unwrap_or_else(|| "uniform".into());
    if PhiPolicy::parse(&phi_policy).is_none() {
        return Err(fail(2, format!("unknown phi policy {phi_policy:?}")));
    }

    Ok(SimulateSpec {
        scheme: scheme.name().into(),
        k_max: args
            .k_max
            .or(from_file(&file, "k-max")?)
            .unwrap_or(5),
        mk: args.mk.or(from_file(&file, "mk")?).unwrap_or(1),
        mu: args.mu.or(from_file(&file, "mu")?).unwrap_or(0),
        ns: args.ns.or(from_file(&file, "ns")?),
        trials: args
            .trials
            .or(from_file(&file, "trials")?)
            .unwrap_or(10_000),
        seed: args.seed.or(from_file(&file, "seed")?).unwrap_or(0),
        format: format.into(),
        phi_policy,
    })
}

/// The (K, config) sweep a resolved spec describes.
fn sweep(spec: &SimulateSpec) -> Result<Vec<(u32, SchemeConfig)>, Failure> {
    let scheme = SchemeArg::parse_name(&spec.scheme)
        .ok_or_else(|| fail(2, format!("unknown scheme {:?}", spec.scheme)))?;
    if spec.trials < 100 {
        return Err(fail(2, "--trials must be at least 100"));
    }
    let k_max = spec.k_max;
    let list: Vec<(u32, SchemeConfig)> = match scheme {
        SchemeArg::Standard => match spec.ns {
            // single row at the requested budget, labelled by k_max
            Some(ns) => vec![(k_max, SchemeConfig::standard(ns))],
            None => (0..=k_max)
                .map(|k| (k, SchemeConfig::standard(1 << (k + 1))))
                .collect(),
        },
        SchemeArg::Qpea => (0..=k_max)
            .map(|k| (k, SchemeConfig::qpea(k, true)))
            .collect(),
        SchemeArg::Hybrid => {
            if k_max < 1 {
                return Err(fail(2, "hybrid sweep needs --k-max >= 1"));
            }
            (1..=k_max)
                .map(|k| {
                    let mut cfg = SchemeConfig::hybrid(k, HybridMode::Bayesian);
                    if let Some(ns) = spec.ns {
                        cfg.n_s = ns;
                    }
                    (k, cfg)
                })
                .collect()
        }
        SchemeArg::Nonadaptive => (0..=k_max)
            .map(|k| (k, SchemeConfig::nonadaptive(k, spec.mk, spec.mu)))
            .collect(),
        SchemeArg::Fixedm => (0..=k_max)
            .map(|k| (k, SchemeConfig::fixed_m(k, spec.mk)))
            .collect(),
    };
    for (_, cfg) in &list {
        cfg.validate().map_err(|e| fail(2, format!("{e}")))?;
    }
    Ok(list)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let spec = resolve_spec(&args)?;
    let list = sweep(&spec)?;
    let policy = PhiPolicy::parse(&spec.phi_policy).expect("validated");
    let started_at = chrono::Utc::now().to_rfc3339();

    let cfgs: Vec<SchemeConfig> = list.iter().map(|(_, c)| *c).collect();
    let summary =
        run_campaign(&cfgs, spec.trials, spec.seed, policy).map_err(|e| fail(3, format!("{e}")))?;
    let rows: Vec<OutputRow> = list
        .iter()
        .zip(&summary.rows)
        .map(|((k, _), row)| output_row(*k, row))
        .collect();
    let rendered = match spec.format.as_str() {
        "json" => to_json(&rows),
        _ => to_csv(&rows),
    };

    match &args.out {
        Some(out) => {
            std::fs::write(out, &rendered)?;
            let manifest = RunManifest {
                command: "simulate".into(),
                seed: spec.seed,
                config: spec,
                version: env!("CARGO_PKG_VERSION").into(),
                started_at,
                finished_at: chrono::Utc::now().to_rfc3339(),
                outputs: vec![out.clone()],
            };
            std::fs::write(RunManifest::path_for(out), manifest.to_json())?;
        }
        None => print!("{rendered}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bounds

fn cmd_bounds(args: BoundsArgs) -> Result<(), Failure> {
    let mut out = String::new();
    match args.which.as_str() {
        "limits" => {
            if args.n.is_empty() {
                return Err(fail(2, "--which limits needs at least one --n"));
            }
            out.push_str("N,sql,heisenberg\n");
            for &n in &args.n {
                if n < 1 {
                    return Err(fail(2, "--n must be >= 1"));
                }
                let _ = writeln!(out, "{n},{:.11e},{:.11e}", sql(n), heisenberg_limit(n));
            }
        }
        "hybrid" => {
            let k_max = args.k_max.unwrap_or(8).max(1);
            out.push_str("K,N,v_bound,delta_phi_bound,standard_tail,digit_tail,resolution\n");
            for k in 1..=k_max {
                let n_q = (1u64 << (k + 1)) - 1;
                let n_s = 1u64 << k;
                let r = hybrid_variance_bound(n_q, n_s);
                let _ = writeln!(
                    out,
                    "{k},{},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
                    n_q + n_s,
                    r.v_bound,
                    r.delta_phi_bound,
                    r.components[0].1,
                    r.components[1].1,
                    r.components[2].1,
                );
            }
        }
        "vmax" => {
            let (Some(mk), Some(k_max)) = (args.mk, args.k_max) else {
                return Err(fail(2, "--which vmax needs --mk and --k-max"));
            };
            let mu = args.mu.unwrap_or(0);
            if mk < 1 {
                return Err(fail(2, "--mk must be >= 1"));
            }
            out.push_str("K,N,v_bound,delta_phi_bound,coarse_tail,finest_segment,block_tails\n");
            for k_top in 0..=k_max {
                let schedule = move |k: u32| (mk + mu * (k_top - k)) as f64;
                let r = nonadaptive_vmax(k_top, &schedule);
                let n: u64 = (0..=k_top)
                    .map(|k| (mk + mu * (k_top - k)) as u64 * (1u64 << k))
                    .sum();
                let _ = writeln!(
                    out,
                    "{k_top},{n},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
                    r.v_bound,
                    r.delta_phi_bound,
                    r.components[0].1,
                    r.components[1].1,
                    r.components[2].1,
                );
            }
        }
        "proven" => {
            let mk = args.mk.unwrap_or(23);
            let k = args.k.unwrap_or(25);
            if mk < 1 || k < 20 {
                return Err(fail(2, "--which proven needs --mk >= 1 and --k >= 20"));
            }
            out.push_str("mk,K,overhead,vmax_cap\n");
            let _ = writeln!(
                out,
                "{mk},{k},{:.11e},{:.11e}",
                proven_schedule_overhead(mk, k),
                proven_schedule_vmax_cap(mk, k),
            );
        }
        other => return Err(fail(2, format!("unknown --which {other:?}"))),
    }
    print!("{out}");
    Ok(())
}

// ---------------------------------------------------------------------------
// oracle

fn cmd_oracle(args: OracleArgs) -> Result<(), Failure> {
    match args.scheme {
        SchemeArg::Qpea => oracle_qpea(&args),
        _ => oracle_mc_comparison(&args),
    }
}

/// Exact enumerated digit-scheme error density against the closed-form
/// trigonometric kernel.
fn oracle_qpea(args: &OracleArgs) -> Result<(), Failure> {
    let xi_grid = args.xi_grid.unwrap_or(256) as u64;
    let strings = 1u64
        .checked_shl(args.k_max + 1)
        .ok_or_else(|| fail(2, "--k-max too large"))?;
    let required = strings.saturating_mul(xi_grid);
    if required > ENUMERATION_CAP {
        return Err(fail(
            4,
            format!("enumeration cap exceeded: {required} > {ENUMERATION_CAP} weighted strings"),
        ));
    }
    let n_q = strings - 1;
    let mut linf: f64 = 0.0;
    for i in 0..512 {
        let d = TAU * (i as f64 + 0.5) / 512.0;
        linf = linf.max((qpea_error_density(args.k_max, d) - fejer_kernel(d, n_q)).abs());
    }
    println!("qpea K={} kernel Linf error = {linf:.3e} (tolerance 1e-6)", args.k_max);
    if linf < 1e-6 {
        println!("PASS");
        Ok(())
    } else {
        println!("FAIL");
        Err(fail(5, "kernel mismatch beyond tolerance"))
    }
}

/// Exact enumerated variance against a Monte Carlo ensemble (4 sigma).
fn oracle_mc_comparison(args: &OracleArgs) -> Result<(), Failure> {
    if args.trials < 100 {
        return Err(fail(2, "--trials must be at least 100"));
    }
    let cfg = match args.scheme {
        SchemeArg::Standard => SchemeConfig::standard(args.ns.unwrap_or(1 << (args.k_max + 1))),
        SchemeArg::Hybrid => {
            let mut cfg = SchemeConfig::hybrid(args.k_max.max(1), HybridMode::Bayesian);
            if let Some(ns) = args.ns {
                cfg.n_s = ns;
            }
            cfg
        }
        SchemeArg::Nonadaptive => {
            SchemeConfig::nonadaptive(args.k_max, args.mk.unwrap_or(2), args.mu.unwrap_or(3))
        }
        SchemeArg::Fixedm => SchemeConfig::fixed_m(args.k_max, args.m.unwrap_or(1)),
        SchemeArg::Qpea => unreachable!("handled by oracle_qpea"),
    };
    cfg.validate().map_err(|e| fail(2, format!("{e}")))?;

    let xi_grid = args
        .xi_grid
        .unwrap_or(if cfg.randomize_reference { 16 } else { 1 });
    let exact = exact_v_grid(&cfg, args.phi_grid, xi_grid)?;

    let samples = run_trials(&cfg, args.trials, args.seed, 0, PhiPolicy::UniformRandom);
    let stats = holevo_std(&samples).map_err(|e| fail(3, format!("{e}")))?;
    let gap = (stats.v_small_angle - exact.v).abs();
    let tolerance = 4.0 * stats.mc_stderr_v;
    println!(
        "{} K={}: exact V = {:.8e} over {} outcome strings",
        cfg.kind.name(),
        args.k_max,
        exact.v,
        exact.strings
    );
    println!(
        "monte carlo V = {:.8e} +- {:.3e} over {} trials; |gap| = {gap:.3e} (tolerance {tolerance:.3e})",
        stats.v_small_angle, stats.mc_stderr_v, args.trials
    );
    if gap <= tolerance {
        println!("PASS");
        Ok(())
    } else {
        println!("FAIL");
        Err(fail(5, "monte carlo disagrees with exact enumeration beyond 4 sigma"))
    }
}
