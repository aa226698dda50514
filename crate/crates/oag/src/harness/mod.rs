//! Experiment orchestration: seeded (beta, tau) grid sweeps, Monte-Carlo
//! competitive-ratio estimation with confidence intervals, bound comparison,
//! the exact enumeration oracle for tiny instances, and CSV/SVG emission.

mod csv;
mod driver;
mod exact;
mod plot;
mod tiny;

pub use csv::{estimates_csv, fmt_sig, rational_str, records_csv};
pub use driver::{
    build_caching_instance, build_matching_instance, build_mts_instance, run_experiment,
    AdversaryKind, DriverError, ExperimentConfig, ExperimentOutput, GeneratorSpec, ProblemKind,
};
pub use exact::{exact_expectation, OracleError};
pub use plot::emit_plot;
pub use tiny::{oracle_check, tiny_caching, tiny_matching, tiny_mts, OracleCase};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::core::{
    derive_seeds, BaseAlgorithm, Guide, Objective, OagConfig, Problem, RngStreams, RunError,
};
use crate::dtb::dtb_transform;

#[derive(Debug, Clone, Error, PartialEq)]
#[error("invalid parameter: {0}")]
pub struct InvalidParam(pub String);

/// A closed-form competitive bound: evaluator over (beta, tau), comparison
/// direction, and the additive constant tolerated by the competitive
/// definition.
pub struct BoundSpec {
    pub evaluator: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub direction: Objective,
    /// The additive constant `d`; folded into comparisons as `d / opt`.
    pub additive_slack: f64,
}

/// Computes compact problem-specific statistics from a finished trial.
pub type StatsFn<P> =
    Box<dyn Fn(&P, &[<P as Problem>::Answer]) -> TrialStats + Send + Sync>;

/// Everything needed to run one problem over a grid: the fixed instance, the
/// base algorithm, pristine guide prototypes (cloned per trial), the exact
/// offline optimum, and the bound.
pub struct Experiment<P: Problem, B, GG, GB> {
    pub name: &'static str,
    pub problem: P,
    pub base: B,
    pub good: GG,
    pub bad: GB,
    pub opt: BigRational,
    pub bound: BoundSpec,
    /// Populated onto records when records are kept.
    pub stats: Option<StatsFn<P>>,
}

/// Compact problem-specific statistics carried by a trial record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrialStats {
    None,
    Caching { phases: u32, faults: u64 },
    Mts { completed_phases: u32, max_phase_transitions: u32 },
}

/// One simulated trial at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub beta: f64,
    pub tau: f64,
    pub grid_index: u64,
    pub trial: u64,
    pub alg: BigRational,
    pub opt: BigRational,
    /// Exact ratio; `None` when opt is zero.
    pub ratio: Option<BigRational>,
    pub good_steps: u64,
    pub bad_steps: u64,
    pub stats: TrialStats,
}

/// Mean/stderr/CI of the per-trial ratios at one grid point, plus the bound
/// comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEstimate {
    pub problem: String,
    pub beta: f64,
    pub tau: f64,
    pub trials: u64,
    pub mean_ratio: f64,
    /// Missing when there is a single trial.
    pub stderr: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    pub mean_opt: f64,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EstimateError {
    #[error("cannot estimate from an empty sample")]
    EmptySample,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GridError {
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
}

/// Sample mean, standard error, and 99% confidence interval. With a single
/// observation the spread is reported as missing rather than zero.
pub fn estimate(ratios: &[f64]) -> Result<(f64, Option<f64>, Option<(f64, f64)>), EstimateError> {
    if ratios.is_empty() {
        return Err(EstimateError::EmptySample);
    }
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    if ratios.len() == 1 {
        return Ok((mean, None, None));
    }
    let var = ratios.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let stderr = (var / n).sqrt();
    let ci = (mean - 2.576 * stderr, mean + 2.576 * stderr);
    Ok((mean, Some(stderr), Some(ci)))
}

/// Bound comparison with the 3-sigma margin policy. Costs pass when
/// `mean <= bound + 3 stderr + d/opt`, payoffs when `mean >= bound - 3 stderr`.
/// Returns (margin, pass); an infinite cost bound always passes.
pub fn compare_to_bound(
    mean: f64,
    stderr: Option<f64>,
    bound: f64,
    direction: Objective,
    additive_slack: f64,
    opt: f64,
) -> (f64, bool) {
    let sigma = stderr.unwrap_or(0.0);
    match direction {
        Objective::Minimize => {
            if bound.is_infinite() {
                return (f64::INFINITY, true);
            }
            let threshold = bound + 3.0 * sigma + additive_slack / opt;
            (threshold - mean, threshold - mean >= 0.0)
        }
        Objective::Maximize => {
            let threshold = bound - 3.0 * sigma;
            (mean - threshold, mean - threshold >= 0.0)
        }
    }
}

/// Output of a grid run: per-point estimates, and the raw records when
/// requested (sorted by (grid index, trial)).
pub struct GridOutcome {
    pub estimates: Vec<PointEstimate>,
    pub records: Option<Vec<TrialRecord>>,
}

/// Runs `trials` independent trials at every grid point. Per-trial seeds are
/// derived from (master seed, grid index, trial index) and split into the
/// environment and algorithm streams; identical configurations reproduce
/// identical outcomes. Environment seeds are checked for collisions across
/// the whole grid.
pub fn run_grid<P, B, GG, GB>(
    exp: &Experiment<P, B, GG, GB>,
    beta_grid: &[f64],
    tau_grid: &[f64],
    trials: u64,
    master_seed: u64,
    keep_records: bool,
) -> Result<GridOutcome, GridError>
where
    P: Problem + Sync,
    P::Answer: Send,
    B: BaseAlgorithm<P> + Clone + Sync + Send,
    GG: Guide<P> + Clone + Sync + Send,
    GB: Guide<P> + Clone + Sync + Send,
{
    let mut estimates = Vec::new();
    let mut records = keep_records.then(Vec::new);
    let mut env_seeds: Vec<u64> = Vec::new();
    let opt_f = exp.opt.to_f64().unwrap();
    let opt_is_zero = num_traits::Zero::is_zero(&exp.opt);
    for (bi, &beta) in beta_grid.iter().enumerate() {
        for (ti, &tau) in tau_grid.iter().enumerate() {
            let grid_index = (bi * tau_grid.len() + ti) as u64;
            let config = OagConfig::new(beta, tau).expect("grid values validated by caller");
            let wrapped = dtb_transform(exp.base.clone(), tau).expect("tau validated");
            let point: Result<Vec<TrialRecord>, RunError> = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let (env_seed, alg_seed) = derive_seeds(master_seed, grid_index, trial);
                    let mut streams = RngStreams::from_seeds(env_seed, alg_seed);
                    let mut good = exp.good.clone();
                    let mut bad = exp.bad.clone();
                    let outcome = crate::core::run_oag(
                        &wrapped,
                        &exp.problem,
                        &mut good,
                        &mut bad,
                        &config,
                        &mut streams,
                    )?;
                    let bad_steps = outcome
                        .trace
                        .iter()
                        .filter(|e| e.source == crate::core::GuideSource::Bad)
                        .count() as u64;
                    let ratio = (!opt_is_zero).then(|| &outcome.value / &exp.opt);
                    let stats = match (&exp.stats, keep_records) {
                        (Some(f), true) => f(&exp.problem, &outcome.answers),
                        _ => TrialStats::None,
                    };
                    Ok(TrialRecord {
                        beta,
                        tau,
                        grid_index,
                        trial,
                        alg: outcome.value,
                        opt: exp.opt.clone(),
                        ratio,
                        good_steps: outcome.trace.len() as u64 - bad_steps,
                        bad_steps,
                        stats,
                    })
                })
                .collect();
            let mut point = point?;
            point.sort_by_key(|r| r.trial);
            for trial in 0..trials {
                env_seeds.push(derive_seeds(master_seed, grid_index, trial).0);
            }
            let ratios: Vec<f64> =
                point.iter().filter_map(|r| r.ratio.as_ref().and_then(|x| x.to_f64())).collect();
            let (mean, stderr, ci) = estimate(&ratios)?;
            let bound = (exp.bound.evaluator)(beta, tau);
            let (margin, pass) = compare_to_bound(
                mean,
                stderr,
                bound,
                exp.bound.direction,
                exp.bound.additive_slack,
                opt_f,
            );
            estimates.push(PointEstimate {
                problem: exp.name.to_string(),
                beta,
                tau,
                trials,
                mean_ratio: mean,
                stderr,
                ci,
                bound,
                margin,
                pass,
                mean_opt: opt_f,
            });
            if let Some(all) = records.as_mut() {
                all.append(&mut point);
            }
        }
    }
    let mut sorted = env_seeds.clone();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(sorted.len(), env_seeds.len(), "environment seed collision across the grid");
    Ok(GridOutcome { estimates, records })
}
