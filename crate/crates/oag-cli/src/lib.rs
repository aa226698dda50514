//! Command implementations for the `oag` binary.
//!
//! Exit-code contract: 0 success, 1 oracle-check failure, 2 configuration
//! error (bad flags, malformed instance files, enumeration budget exceeded),
//! 3 runtime error. Every run echoes its fully resolved configuration,
//! including the master seed, both to standard output and as `#` comment
//! lines at the top of the emitted CSV; the CSV alone is enough to re-run
//! the experiment bit-identically.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::FromPrimitive;

use oag::harness::{
    self, emit_plot, estimates_csv, fmt_sig, records_csv, AdversaryKind, ExperimentConfig,
    GeneratorSpec, PointEstimate, ProblemKind,
};

#[derive(Debug, Parser)]
#[command(
    name = "oag",
    about = "Simulation workbench for online algorithms with unreliable guidance",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one (beta, tau) point and write per-trial records.
    Run(RunArgs),
    /// Sweep a (beta, tau) grid and write per-point estimates.
    Sweep(SweepArgs),
    /// Tabulate the closed-form competitive bounds over a grid.
    Bound(BoundArgs),
    /// Cross-check Monte-Carlo estimates against the exact enumeration
    /// oracle on the built-in tiny instances.
    OracleCheck(OracleArgs),
    /// Re-render the sweep plot from an estimates CSV.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Problem family.
    #[arg(long, value_parser = parse_problem)]
    pub problem: ProblemKind,
    /// Instance generator: name followed by key=value parameters, e.g.
    /// `--generator cyclic k=10 rounds=20`.
    #[arg(long, num_args = 1.., value_name = "NAME [KEY=VAL]...")]
    pub generator: Option<Vec<String>>,
    /// Load the instance from a file instead of generating it.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Trials per grid point.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Master seed; falls back to the OAG_SEED environment variable, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bad guide: `dedicated` or `uniform`.
    #[arg(long, default_value = "dedicated", value_parser = parse_adversary)]
    pub adversary: AdversaryKind,
    /// Cap the worker thread count.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub tau: f64,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Inclusive grid `a:b:step` (or a single value).
    #[arg(long, value_name = "A:B:STEP")]
    pub beta_grid: String,
    #[arg(long, value_name = "A:B:STEP")]
    pub tau_grid: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Also render an SVG plot of the sweep.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, value_parser = parse_problem)]
    pub problem: ProblemKind,
    #[arg(long, value_name = "A:B:STEP", default_value = "0:1:0.25")]
    pub beta_grid: String,
    #[arg(long, value_name = "A:B:STEP", default_value = "0:1:0.05")]
    pub tau_grid: String,
    /// Cache capacity (caching bounds).
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// State count (MTS bounds).
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Enumeration leaf budget.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: u64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Estimates CSV produced by `sweep`.
    #[arg(long, value_name = "CSV")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Errors mapped onto the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2.
    Config(String),
    /// Exit 3.
    Runtime(String),
    /// Exit 1.
    ChecksFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Runtime(m) | CliError::ChecksFailed(m) => m,
        }
    }
}

fn parse_problem(s: &str) -> Result<ProblemKind, String> {
    match s {
        "matching" => Ok(ProblemKind::Matching),
        "caching" => Ok(ProblemKind::Caching),
        "mts" => Ok(ProblemKind::Mts),
        other => Err(format!("unknown problem {other:?} (matching|caching|mts)")),
    }
}

fn parse_adversary(s: &str) -> Result<AdversaryKind, String> {
    match s {
        "dedicated" => Ok(AdversaryKind::Dedicated),
        "uniform" => Ok(AdversaryKind::Uniform),
        other => Err(format!("unknown adversary {other:?} (dedicated|uniform)")),
    }
}

/// Parses `a:b:step` (inclusive endpoints) or a single value, snapping every
/// grid point to the decimal resolution of the inputs so that sweeps are
/// reproducible from their textual form.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    fn decimals(s: &str) -> usize {
        s.split('.').nth(1).map_or(0, str::len)
    }
    fn value(s: &str) -> Result<f64, CliError> {
        s.trim()
            .parse::<f64>()
            .map_err(|e| CliError::Config(format!("bad grid value {s:?}: {e}")))
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => {
            let v = value(single)?;
            check_unit_range(&[v])?;
            Ok(vec![v])
        }
        [a, b, step] => {
            let scale = 10f64.powi(decimals(a).max(decimals(b)).max(decimals(step)) as i32);
            let (a, b, step) = (value(a)?, value(b)?, value(step)?);
            if step <= 0.0 {
                return Err(CliError::Config("grid step must be positive".into()));
            }
            let (ia, ib, istep) =
                ((a * scale).round() as i64, (b * scale).round() as i64, (step * scale).round() as i64);
            if istep == 0 {
                return Err(CliError::Config("grid step rounds to zero".into()));
            }
            let mut values = Vec::new();
            let mut v = ia;
            while v <= ib {
                values.push(v as f64 / scale);
                v += istep;
            }
            if values.is_empty() {
                return Err(CliError::Config(format!("grid {spec:?} is empty")));
            }
            check_unit_range(&values)?;
            Ok(values)
        }
        _ => Err(CliError::Config(format!("grid {spec:?} is not `a:b:step` or a single value"))),
    }
}

fn check_unit_range(values: &[f64]) -> Result<(), CliError> {
    for &v in values {
        if !(0.0..=1.0).contains(&v) {
            return Err(CliError::Config(format!("grid value {v} outside [0, 1]")));
        }
    }
    Ok(())
}

/// Parses `NAME key=val...` into a generator spec for the given problem.
pub fn parse_generator(
    problem: ProblemKind,
    tokens: &[String],
) -> Result<GeneratorSpec, CliError> {
    let name = tokens.first().ok_or(CliError::Config("empty generator".into()))?;
    let mut map = std::collections::BTreeMap::new();
    for token in &tokens[1..] {
        let (key, val) = token
            .split_once('=')
            .ok_or(CliError::Config(format!("generator parameter {token:?} is not key=val")))?;
        map.insert(key.to_string(), val.to_string());
    }
    let get_usize = |map: &std::collections::BTreeMap<String, String>, key: &str| {
        map.get(key)
            .ok_or(CliError::Config(format!("generator {name} needs {key}=<int>")))?
            .parse::<usize>()
            .map_err(|e| CliError::Config(format!("{key}: {e}")))
    };
    let get_f64 = |map: &std::collections::BTreeMap<String, String>, key: &str, default: f64| {
        map.get(key)
            .map(|v| v.parse::<f64>().map_err(|e| CliError::Config(format!("{key}: {e}"))))
            .unwrap_or(Ok(default))
    };
    match (problem, name.as_str()) {
        (ProblemKind::Matching, "upper-triangular") => {
            Ok(GeneratorSpec::UpperTriangular { n: get_usize(&map, "n")? })
        }
        (ProblemKind::Matching, "random-perfect") => Ok(GeneratorSpec::RandomPerfect {
            n: get_usize(&map, "n")?,
            extra_edge_prob: get_f64(&map, "p", 0.1)?,
        }),
        (ProblemKind::Caching, "cyclic") => Ok(GeneratorSpec::Cyclic {
            k: get_usize(&map, "k")?,
            rounds: get_usize(&map, "rounds")?,
            warm: map.get("warm").map_or(true, |v| v == "true"),
        }),
        (ProblemKind::Caching, "zipf") => Ok(GeneratorSpec::Zipf {
            k: get_usize(&map, "k")?,
            pages: get_usize(&map, "pages")?,
            length: get_usize(&map, "length")?,
            exponent: get_f64(&map, "exponent", 1.0)?,
        }),
        (ProblemKind::Mts, "random") => Ok(GeneratorSpec::MtsRandom {
            n: get_usize(&map, "n")?,
            m: get_usize(&map, "m")?,
            q: get_usize(&map, "q")? as u32,
        }),
        (ProblemKind::Mts, "elevator") => Ok(GeneratorSpec::MtsElevator {
            n: get_usize(&map, "n")?,
            rounds: get_usize(&map, "rounds")?,
        }),
        (p, g) => Err(CliError::Config(format!("no generator {g:?} for problem {}", p.name()))),
    }
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var("OAG_SEED").ok().and_then(|s| s.parse().ok())).unwrap_or(0)
}

fn apply_thread_cap(threads: Option<usize>) {
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn build_config(
    common: &CommonArgs,
    beta_grid: Vec<f64>,
    tau_grid: Vec<f64>,
) -> Result<(ExperimentConfig, Vec<String>), CliError> {
    let instance_text = match &common.instance {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let generator = match (&common.generator, instance_text.is_some()) {
        (Some(tokens), false) => Some(parse_generator(common.problem, tokens)?),
        (_, true) => None,
        (None, false) => {
            return Err(CliError::Config("need --generator or --instance".into()));
        }
    };
    let master_seed = resolve_seed(common.seed);
    let config = ExperimentConfig {
        problem: common.problem,
        generator,
        instance_text,
        beta_grid,
        tau_grid,
        trials: common.trials,
        master_seed,
        adversary: common.adversary,
    };
    config.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let mut echo = vec![
        format!("problem={}", common.problem.name()),
        format!(
            "generator={}",
            common.generator.as_ref().map(|t| t.join(" ")).unwrap_or_else(|| "-".into())
        ),
        format!(
            "instance={}",
            common.instance.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "-".into())
        ),
        format!("beta_grid={}", config.beta_grid.iter().map(|v| fmt_sig(*v)).collect::<Vec<_>>().join(";")),
        format!("tau_grid={}", config.tau_grid.iter().map(|v| fmt_sig(*v)).collect::<Vec<_>>().join(";")),
        format!("trials={}", config.trials),
        format!("master_seed={}", config.master_seed),
        format!("instance_seed={}", config.instance_seed()),
        format!("adversary={}", config.adversary.name()),
    ];
    echo.insert(0, "oag-config".to_string());
    Ok((config, echo))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    apply_thread_cap(args.common.threads);
    if !(0.0..=1.0).contains(&args.beta) {
        return Err(CliError::Config(format!("beta {} outside [0, 1]", args.beta)));
    }
    if !(0.0..=1.0).contains(&args.tau) {
        return Err(CliError::Config(format!("tau {} outside [0, 1]", args.tau)));
    }
    let (config, echo) = build_config(&args.common, vec![args.beta], vec![args.tau])?;
    let output = harness::run_experiment(&config, true)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    for line in &echo {
        println!("# {line}");
    }
    let records = output.outcome.records.expect("records kept");
    write_file(&args.out, &records_csv(config.problem.name(), &records, &echo))?;
    println!("wrote {} records to {}", records.len(), args.out.display());
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    apply_thread_cap(args.common.threads);
    let beta_grid = parse_grid(&args.beta_grid)?;
    let tau_grid = parse_grid(&args.tau_grid)?;
    let (config, echo) = build_config(&args.common, beta_grid, tau_grid)?;
    let output = harness::run_experiment(&config, false)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    for line in &echo {
        println!("# {line}");
    }
    write_file(&args.out, &estimates_csv(&output.outcome.estimates, &echo))?;
    println!(
        "wrote {} grid points to {}",
        output.outcome.estimates.len(),
        args.out.display()
    );
    if let Some(plot_path) = &args.plot {
        let title = format!("{} sweep", config.problem.name());
        emit_plot(&output.outcome.estimates, &title, plot_path)
            .map_err(|e| CliError::Runtime(format!("cannot write plot: {e}")))?;
        println!("wrote plot to {}", plot_path.display());
    }
    let failed: Vec<&PointEstimate> =
        output.outcome.estimates.iter().filter(|e| !e.pass).collect();
    for e in failed {
        eprintln!(
            "bound violation at beta={} tau={}: mean {} vs bound {} (margin {})",
            fmt_sig(e.beta),
            fmt_sig(e.tau),
            fmt_sig(e.mean_ratio),
            fmt_sig(e.bound),
            fmt_sig(e.margin)
        );
    }
    Ok(())
}

/// Bound-table row values, exposed for tests.
pub fn bound_row(problem: ProblemKind, beta: f64, tau: f64, k: usize, n: usize) -> f64 {
    match problem {
        ProblemKind::Matching => oag::matching::bound_matching(beta, tau),
        ProblemKind::Caching => oag::caching::bound_caching(beta, tau, k),
        ProblemKind::Mts => oag::mts::bound_mts(beta, tau, n),
    }
}

/// Consistency/robustness annotation columns (only defined at beta 0 / 1).
pub fn annotation_columns(
    problem: ProblemKind,
    beta: f64,
    tau: f64,
    k: usize,
    n: usize,
) -> (Option<f64>, Option<f64>) {
    let consistency = (beta == 0.0).then(|| match problem {
        ProblemKind::Matching => oag::matching::consistency_matching(tau),
        ProblemKind::Caching => oag::caching::consistency_caching(tau, k),
        ProblemKind::Mts => oag::mts::consistency_mts(tau, n),
    });
    let robustness = (beta == 1.0).then(|| match problem {
        ProblemKind::Matching => oag::matching::robustness_matching(tau),
        ProblemKind::Caching => oag::caching::robustness_caching(tau, k),
        ProblemKind::Mts => oag::mts::robustness_mts(tau, n),
    });
    (consistency, robustness)
}

pub fn render_bound_table(
    problem: ProblemKind,
    beta_grid: &[f64],
    tau_grid: &[f64],
    k: usize,
    n: usize,
) -> String {
    let mut out = String::from("problem,beta,tau,param,bound,consistency,robustness\n");
    let param = match problem {
        ProblemKind::Matching => 0,
        ProblemKind::Caching => k,
        ProblemKind::Mts => n,
    };
    for &beta in beta_grid {
        for &tau in tau_grid {
            let bound = bound_row(problem, beta, tau, k, n);
            let (cons, rob) = annotation_columns(problem, beta, tau, k, n);
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                problem.name(),
                fmt_sig(beta),
                fmt_sig(tau),
                param,
                fmt_sig(bound),
                cons.map(fmt_sig).unwrap_or_default(),
                rob.map(fmt_sig).unwrap_or_default(),
            ));
        }
    }
    out
}

pub fn cmd_bound(args: &BoundArgs) -> Result<(), CliError> {
    let beta_grid = parse_grid(&args.beta_grid)?;
    let tau_grid = parse_grid(&args.tau_grid)?;
    if args.k < 1 || args.n < 1 {
        return Err(CliError::Config("k and n must be at least 1".into()));
    }
    let table = render_bound_table(args.problem, &beta_grid, &tau_grid, args.k, args.n);
    write_file(&args.out, &table)?;
    println!(
        "wrote {} bound rows to {}",
        beta_grid.len() * tau_grid.len(),
        args.out.display()
    );
    Ok(())
}

pub fn cmd_oracle_check(args: &OracleArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed);
    let cases = harness::oracle_check(args.trials, args.budget, seed).map_err(|e| match e {
        harness::OracleError::TooLarge { budget } => {
            CliError::Config(format!("enumeration budget {budget} exceeded"))
        }
        other => CliError::Runtime(other.to_string()),
    })?;
    let mut failures = 0;
    for case in &cases {
        let verdict = if case.ok() { "pass" } else { "FAIL" };
        println!(
            "{verdict} {} adversary={} beta={} tau={}: exact={} mc={} (stderr {}) ratio={} bound={}",
            case.problem,
            case.adversary,
            fmt_sig(case.beta),
            fmt_sig(case.tau),
            oag::harness::rational_str(&case.exact_value),
            fmt_sig(case.mc_mean),
            fmt_sig(case.mc_stderr),
            fmt_sig(case.exact_ratio),
            fmt_sig(case.bound),
        );
        if !case.ok() {
            failures += 1;
        }
    }
    if failures > 0 {
        return Err(CliError::ChecksFailed(format!("{failures} of {} cases failed", cases.len())));
    }
    println!("all {} oracle cases pass", cases.len());
    Ok(())
}

/// Parses an estimates CSV (as written by `sweep`) back into points.
pub fn parse_estimates_csv(text: &str) -> Result<Vec<PointEstimate>, CliError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.is_empty() || line.starts_with("problem,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(CliError::Config(format!("line {}: expected 11 columns", i + 1)));
        }
        let f = |s: &str| -> Result<f64, CliError> {
            s.parse().map_err(|e| CliError::Config(format!("line {}: {e}", i + 1)))
        };
        let opt_f = |s: &str| -> Result<Option<f64>, CliError> {
            if s.is_empty() {
                Ok(None)
            } else {
                f(s).map(Some)
            }
        };
        let ci = match (opt_f(fields[6])?, opt_f(fields[7])?) {
            (Some(lo), Some(hi)) => Some((lo, hi)),
            _ => None,
        };
        rows.push(PointEstimate {
            problem: fields[0].to_string(),
            beta: f(fields[1])?,
            tau: f(fields[2])?,
            trials: fields[3]
                .parse()
                .map_err(|e| CliError::Config(format!("line {}: {e}", i + 1)))?,
            mean_ratio: f(fields[4])?,
            stderr: opt_f(fields[5])?,
            ci,
            bound: f(fields[8])?,
            margin: f(fields[9])?,
            pass: fields[10] == "true",
            mean_opt: f64::NAN,
        });
    }
    Ok(rows)
}

pub fn cmd_plot(args: &PlotArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.input.display())))?;
    let estimates = parse_estimates_csv(&text)?;
    if estimates.is_empty() {
        return Err(CliError::Config("estimates CSV has no data rows".into()));
    }
    let title = format!("{} sweep", estimates[0].problem);
    emit_plot(&estimates, &title, &args.out)
        .map_err(|e| CliError::Runtime(format!("cannot write plot: {e}")))?;
    println!("wrote plot to {}", args.out.display());
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Bound(args) => cmd_bound(args),
        Command::OracleCheck(args) => cmd_oracle_check(args),
        Command::Plot(args) => cmd_plot(args),
    }
}

/// Exact rational consistency/robustness references used by the bound-table
/// tests; exposes the same formulas as `annotation_columns` through exact
/// arithmetic where the closed forms are rational.
pub fn exact_annotation(
    problem: ProblemKind,
    beta_is_zero: bool,
    tau: &BigRational,
    k: usize,
    n: usize,
) -> Option<BigRational> {
    match (problem, beta_is_zero) {
        (ProblemKind::Caching, true) => oag::caching::consistency_caching_exact(tau, k),
        (ProblemKind::Caching, false) => oag::caching::robustness_caching_exact(tau, k),
        (ProblemKind::Mts, true) => Some(oag::mts::consistency_mts_exact(tau, n)),
        (ProblemKind::Mts, false) => Some(oag::mts::robustness_mts_exact(tau, n)),
        (ProblemKind::Matching, _) => None,
    }
}

/// Convenience used by tests: beta/tau from an exact fraction.
pub fn ratio_from_f64(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite")
}
