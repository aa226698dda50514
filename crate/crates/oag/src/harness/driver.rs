//! Binds generators, algorithms, guides, bounds, and the grid runner into
//! ready-to-run experiments selected by name.

use num_rational::BigRational;
use num_traits::FromPrimitive;
use thiserror::Error;

use super::{
    run_grid, BoundSpec, Experiment, GridError, GridOutcome, InvalidParam, TrialStats,
};
use crate::core::{derive_seeds, Objective, UniformValidGuide};
use crate::{caching, matching, mts};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Matching,
    Caching,
    Mts,
}

impl ProblemKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::Matching => "matching",
            ProblemKind::Caching => "caching",
            ProblemKind::Mts => "mts",
        }
    }
}

/// Which bad guide to run against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryKind {
    /// The problem's dedicated adversary: partner stealing for matching,
    /// nearest-request eviction for caching, earliest saturation for MTS.
    Dedicated,
    /// The null adversary: a deterministic pseudo-uniform valid answer.
    Uniform,
}

impl AdversaryKind {
    pub fn name(&self) -> &'static str {
        match self {
            AdversaryKind::Dedicated => "dedicated",
            AdversaryKind::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    UpperTriangular { n: usize },
    RandomPerfect { n: usize, extra_edge_prob: f64 },
    Cyclic { k: usize, rounds: usize, warm: bool },
    Zipf { k: usize, pages: usize, length: usize, exponent: f64 },
    MtsRandom { n: usize, m: usize, q: u32 },
    MtsElevator { n: usize, rounds: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub generator: Option<GeneratorSpec>,
    /// Contents of an instance file; takes precedence over the generator.
    pub instance_text: Option<String>,
    pub beta_grid: Vec<f64>,
    pub tau_grid: Vec<f64>,
    pub trials: u64,
    pub master_seed: u64,
    pub adversary: AdversaryKind,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DriverError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("instance parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    InvalidParam(#[from] InvalidParam),
    #[error(transparent)]
    Grid(#[from] GridError),
}

pub struct ExperimentOutput {
    pub outcome: GridOutcome,
    pub opt: BigRational,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), DriverError> {
        if self.beta_grid.is_empty() || self.tau_grid.is_empty() {
            return Err(DriverError::Config("beta and tau grids must be nonempty".into()));
        }
        for &v in self.beta_grid.iter().chain(&self.tau_grid) {
            if !(0.0..=1.0).contains(&v) {
                return Err(DriverError::Config(format!("grid value {v} outside [0, 1]")));
            }
        }
        if self.trials < 1 {
            return Err(DriverError::Config("need at least one trial".into()));
        }
        if self.instance_text.is_none() && self.generator.is_none() {
            return Err(DriverError::Config("need a generator or an instance file".into()));
        }
        Ok(())
    }

    /// The seed generators draw from, derived from the master seed so that
    /// one config value pins the whole experiment.
    pub fn instance_seed(&self) -> u64 {
        derive_seeds(self.master_seed, u64::MAX, 0).0
    }
}

pub fn run_experiment(
    config: &ExperimentConfig,
    keep_records: bool,
) -> Result<ExperimentOutput, DriverError> {
    config.validate()?;
    match config.problem {
        ProblemKind::Matching => run_matching(config, keep_records),
        ProblemKind::Caching => run_caching(config, keep_records),
        ProblemKind::Mts => run_mts(config, keep_records),
    }
}

pub fn build_matching_instance(
    config: &ExperimentConfig,
) -> Result<matching::BipartiteInstance, DriverError> {
    if let Some(text) = &config.instance_text {
        return matching::parse_instance(text).map_err(DriverError::Parse);
    }
    match config.generator {
        Some(GeneratorSpec::UpperTriangular { n }) => Ok(matching::gen_upper_triangular(n)),
        Some(GeneratorSpec::RandomPerfect { n, extra_edge_prob }) => {
            Ok(matching::gen_random_perfect(n, extra_edge_prob, config.instance_seed()))
        }
        Some(ref g) => {
            Err(DriverError::Config(format!("generator {g:?} does not produce matching instances")))
        }
        None => unreachable!("validated"),
    }
}

pub fn build_caching_instance(
    config: &ExperimentConfig,
) -> Result<caching::CacheTrace, DriverError> {
    if let Some(text) = &config.instance_text {
        return caching::parse_trace(text).map_err(DriverError::Parse);
    }
    match config.generator {
        Some(GeneratorSpec::Cyclic { k, rounds, warm }) => {
            let trace = caching::gen_cyclic(k, rounds)?;
            Ok(if warm { trace.warmed() } else { trace })
        }
        Some(GeneratorSpec::Zipf { k, pages, length, exponent }) => {
            Ok(caching::gen_zipf(k, pages, length, exponent, config.instance_seed())?)
        }
        Some(ref g) => {
            Err(DriverError::Config(format!("generator {g:?} does not produce cache traces")))
        }
        None => unreachable!("validated"),
    }
}

pub fn build_mts_instance(
    config: &ExperimentConfig,
) -> Result<mts::UniformMtsInstance, DriverError> {
    if let Some(text) = &config.instance_text {
        return mts::parse_instance(text).map_err(DriverError::Parse);
    }
    match config.generator {
        Some(GeneratorSpec::MtsRandom { n, m, q }) => {
            Ok(mts::gen_mts_random(n, m, q, config.instance_seed())?)
        }
        Some(GeneratorSpec::MtsElevator { n, rounds }) => Ok(mts::gen_mts_elevator(n, rounds)?),
        Some(ref g) => {
            Err(DriverError::Config(format!("generator {g:?} does not produce MTS instances")))
        }
        None => unreachable!("validated"),
    }
}

fn run_matching(
    config: &ExperimentConfig,
    keep_records: bool,
) -> Result<ExperimentOutput, DriverError> {
    let instance = build_matching_instance(config)?;
    let opt_matching = matching::max_matching(&instance);
    let opt = BigRational::from_usize(opt_matching.size()).unwrap();
    let bound = BoundSpec {
        evaluator: Box::new(matching::bound_matching),
        direction: Objective::Maximize,
        additive_slack: 0.0,
    };
    let good = matching::MstarGuide::new(opt_matching.clone());
    let outcome = match config.adversary {
        AdversaryKind::Dedicated => {
            let exp = Experiment {
                name: "matching",
                problem: instance,
                base: matching::Ranking,
                good,
                bad: matching::GreedyHarmGuide::new(opt_matching),
                opt: opt.clone(),
                bound,
                stats: None,
            };
            run_grid(&exp, &config.beta_grid, &config.tau_grid, config.trials, config.master_seed, keep_records)?
        }
        AdversaryKind::Uniform => {
            let exp = Experiment {
                name: "matching",
                problem: instance,
                base: matching::Ranking,
                good,
                bad: UniformValidGuide,
                opt: opt.clone(),
                bound,
                stats: None,
            };
            run_grid(&exp, &config.beta_grid, &config.tau_grid, config.trials, config.master_seed, keep_records)?
        }
    };
    Ok(ExperimentOutput { outcome, opt })
}

fn caching_stats(trace: &caching::CacheTrace, answers: &[caching::CacheAnswer]) -> TrialStats {
    let analysis = caching::analyze_trial(trace, answers);
    TrialStats::Caching { phases: analysis.phases.len() as u32, faults: analysis.total_faults }
}

fn run_caching(
    config: &ExperimentConfig,
    keep_records: bool,
) -> Result<ExperimentOutput, DriverError> {
    let trace = build_caching_instance(config)?;
    let k = trace.k();
    let opt = BigRational::from_u64(caching::belady_opt(&trace)).unwrap();
    let bound = BoundSpec {
        evaluator: Box::new(move |beta, tau| caching::bound_caching(beta, tau, k)),
        direction: Objective::Minimize,
        additive_slack: k as f64,
    };
    let good = caching::FarthestInFutureGuide;
    let outcome = match config.adversary {
        AdversaryKind::Dedicated => {
            let exp = Experiment {
                name: "caching",
                problem: trace,
                base: caching::RandomMarking,
                good,
                bad: caching::NearestRequestGuide,
                opt: opt.clone(),
                bound,
                stats: Some(Box::new(caching_stats)),
            };
            run_grid(&exp, &config.beta_grid, &config.tau_grid, config.trials, config.master_seed, keep_records)?
        }
        AdversaryKind::Uniform => {
            let exp = Experiment {
                name: "caching",
                problem: trace,
                base: caching::RandomMarking,
                good,
                bad: UniformValidGuide,
                opt: opt.clone(),
                bound,
                stats: Some(Box::new(caching_stats)),
            };
            run_grid(&exp, &config.beta_grid, &config.tau_grid, config.trials, config.master_seed, keep_records)?
        }
    };
    Ok(ExperimentOutput { outcome, opt })
}

fn mts_stats(instance: &mts::UniformMtsInstance, answers: &[usize]) -> TrialStats {
    let stats = mts::analyze_trial(instance, answers);
    TrialStats::Mts {
        completed_phases: stats.completed_phases as u32,
        max_phase_transitions: stats.per_phase_transitions.iter().copied().max().unwrap_or(0),
    }
}

fn run_mts(config: &ExperimentConfig, keep_records: bool) -> Result<ExperimentOutput, DriverError> {
    let instance = build_mts_instance(config)?;
    let n = instance.n();
    let opt = mts::offline_opt(&instance);
    let bound = BoundSpec {
        evaluator: Box::new(move |beta, tau| mts::bound_mts(beta, tau, n)),
        direction: Objective::Minimize,
        additive_slack: 2.0,
    };
    let good = mts::SaturationGuide::latest(&instance);
    let outcome = match config.adversary {
        AdversaryKind::Dedicated => {
            let bad = mts::SaturationGuide::earliest(&instance);
            let exp = Experiment {
                name: "mts",
                problem: instance,
                base: mts::SaturationWalker,
                good,
                bad,
                opt: opt.clone(),
                bound,
                stats: Some(Box::new(mts_stats)),
            };
            run_grid(&exp, &config.beta_grid, &config.tau_grid, config.trials, config.master_seed, keep_records)?
        }
        AdversaryKind::Uniform => {
            let exp = Experiment {
                name: "mts",
                problem: instance,
                base: mts::SaturationWalker,
                good,
                bad: UniformValidGuide,
                opt: opt.clone(),
                bound,
                stats: Some(Box::new(mts_stats)),
            };
            run_grid(&exp, &config.beta_grid, &config.tau_grid, config.trials, config.master_seed, keep_records)?
        }
    };
    Ok(ExperimentOutput { outcome, opt })
}
