//! The built-in tiny-instance suite: instances small enough for the exact
//! enumeration oracle, used to cross-check the Monte-Carlo path and to
//! verify the closed-form bounds with no statistical slack.

use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

use super::exact::{exact_expectation, OracleError};
use super::{estimate, AdversaryKind};
use crate::core::{
    derive_seeds, run_oag, BaseAlgorithm, Guide, Objective, OagConfig, Problem, RngStreams,
    UniformValidGuide,
};
use crate::dtb::dtb_transform;
use crate::{caching, matching, mts};

/// Matching: the 3x3 upper-triangular instance (perfect matching exists).
pub fn tiny_matching() -> matching::BipartiteInstance {
    matching::gen_upper_triangular(3)
}

/// Caching: capacity 2, three pages, a warm full start, eight requests.
pub fn tiny_caching() -> caching::CacheTrace {
    caching::CacheTrace::new(2, vec![1, 2], vec![1, 2, 3, 1, 2, 3, 1, 2]).unwrap()
}

/// MTS: two states, five alternating unit tasks.
pub fn tiny_mts() -> mts::UniformMtsInstance {
    let one = BigRational::one;
    let zero = BigRational::zero;
    mts::UniformMtsInstance::new(
        2,
        vec![
            vec![one(), zero()],
            vec![zero(), one()],
            vec![one(), zero()],
            vec![zero(), one()],
            vec![one(), zero()],
        ],
        0,
    )
    .unwrap()
}

/// One oracle cross-check: exact expectation vs the Monte-Carlo estimate at
/// the same point, plus bound respect of the exact ratio.
#[derive(Debug, Clone)]
pub struct OracleCase {
    pub problem: &'static str,
    pub adversary: &'static str,
    pub beta: f64,
    pub tau: f64,
    pub exact_value: BigRational,
    pub exact_ratio: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    /// |Monte-Carlo mean - exact| <= 3 stderr (exact equality when the run is
    /// deterministic and stderr is zero).
    pub mc_ok: bool,
    pub bound: f64,
    /// Exact ratio respects the bound with only the additive-constant slack.
    pub bound_ok: bool,
}

impl OracleCase {
    pub fn ok(&self) -> bool {
        self.mc_ok && self.bound_ok
    }
}

#[allow(clippy::too_many_arguments)]
fn check_case<P, B, GG, GB>(
    name: &'static str,
    adversary: &'static str,
    problem: &P,
    base: &B,
    good: &GG,
    bad: &GB,
    opt: &BigRational,
    bound: f64,
    direction: Objective,
    additive_slack: f64,
    beta_tau: (f64, f64),
    trials: u64,
    budget: u64,
    master_seed: u64,
    grid_index: u64,
) -> Result<OracleCase, OracleError>
where
    P: Problem + Sync,
    P::Answer: Send,
    B: BaseAlgorithm<P> + Clone + Sync + Send,
    GG: Guide<P> + Clone + Sync + Send,
    GB: Guide<P> + Clone + Sync + Send,
{
    use rayon::prelude::*;
    let (beta, tau) = beta_tau;
    let beta_q = BigRational::from_f64(beta).unwrap();
    let tau_q = BigRational::from_f64(tau).unwrap();
    let exact_value = exact_expectation(problem, base, good, bad, &beta_q, &tau_q, budget)?;
    let config = OagConfig::new(beta, tau).unwrap();
    let wrapped = dtb_transform(base.clone(), tau).unwrap();
    let values: Result<Vec<f64>, crate::core::RunError> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let (env_seed, alg_seed) = derive_seeds(master_seed, grid_index, trial);
            let mut streams = RngStreams::from_seeds(env_seed, alg_seed);
            let mut g = good.clone();
            let mut b = bad.clone();
            let outcome = run_oag(&wrapped, problem, &mut g, &mut b, &config, &mut streams)?;
            Ok(outcome.value.to_f64().unwrap())
        })
        .collect();
    let values = values?;
    let (mc_mean, stderr, _) = estimate(&values).expect("trials >= 1");
    let mc_stderr = stderr.unwrap_or(0.0);
    let exact_f = exact_value.to_f64().unwrap();
    let mc_ok = (mc_mean - exact_f).abs() <= 3.0 * mc_stderr
        || (mc_stderr == 0.0 && (mc_mean - exact_f).abs() < 1e-12);
    let opt_f = opt.to_f64().unwrap();
    let exact_ratio = exact_f / opt_f;
    let bound_ok = match direction {
        Objective::Minimize => {
            bound.is_infinite() || exact_ratio <= bound + additive_slack / opt_f
        }
        Objective::Maximize => exact_ratio >= bound,
    };
    Ok(OracleCase {
        problem: name,
        adversary,
        beta,
        tau,
        exact_value,
        exact_ratio,
        mc_mean,
        mc_stderr,
        mc_ok,
        bound,
        bound_ok,
    })
}

/// Runs the whole tiny suite: every problem, both adversaries, all
/// `(beta, tau)` in {0, 1/2, 1}^2.
pub fn oracle_check(
    trials: u64,
    budget: u64,
    master_seed: u64,
) -> Result<Vec<OracleCase>, OracleError> {
    let grid = [0.0, 0.5, 1.0];
    let mut cases = Vec::new();
    let mut grid_index = 0u64;

    let instance = tiny_matching();
    let opt_matching = matching::max_matching(&instance);
    let opt = BigRational::from_usize(opt_matching.size()).unwrap();
    let good = matching::MstarGuide::new(opt_matching.clone());
    let greedy = matching::GreedyHarmGuide::new(opt_matching);
    for adversary in [AdversaryKind::Dedicated, AdversaryKind::Uniform] {
        for &beta in &grid {
            for &tau in &grid {
                let bound = matching::bound_matching(beta, tau);
                let case = match adversary {
                    AdversaryKind::Dedicated => check_case(
                        "matching", "dedicated", &instance, &matching::Ranking, &good, &greedy,
                        &opt, bound, Objective::Maximize, 0.0, (beta, tau), trials, budget,
                        master_seed, grid_index,
                    )?,
                    AdversaryKind::Uniform => check_case(
                        "matching", "uniform", &instance, &matching::Ranking, &good,
                        &UniformValidGuide, &opt, bound, Objective::Maximize, 0.0, (beta, tau),
                        trials, budget, master_seed, grid_index,
                    )?,
                };
                cases.push(case);
                grid_index += 1;
            }
        }
    }

    let trace = tiny_caching();
    let k = trace.k();
    let opt = BigRational::from_u64(caching::belady_opt(&trace)).unwrap();
    for adversary in [AdversaryKind::Dedicated, AdversaryKind::Uniform] {
        for &beta in &grid {
            for &tau in &grid {
                let bound = caching::bound_caching(beta, tau, k);
                let case = match adversary {
                    AdversaryKind::Dedicated => check_case(
                        "caching", "dedicated", &trace, &caching::RandomMarking,
                        &caching::FarthestInFutureGuide, &caching::NearestRequestGuide, &opt,
                        bound, Objective::Minimize, k as f64, (beta, tau), trials, budget,
                        master_seed, grid_index,
                    )?,
                    AdversaryKind::Uniform => check_case(
                        "caching", "uniform", &trace, &caching::RandomMarking,
                        &caching::FarthestInFutureGuide, &UniformValidGuide, &opt, bound,
                        Objective::Minimize, k as f64, (beta, tau), trials, budget, master_seed,
                        grid_index,
                    )?,
                };
                cases.push(case);
                grid_index += 1;
            }
        }
    }

    let instance = tiny_mts();
    let n = instance.n();
    let opt = mts::offline_opt(&instance);
    let good = mts::SaturationGuide::latest(&instance);
    let bad = mts::SaturationGuide::earliest(&instance);
    for adversary in [AdversaryKind::Dedicated, AdversaryKind::Uniform] {
        for &beta in &grid {
            for &tau in &grid {
                let bound = mts::bound_mts(beta, tau, n);
                let case = match adversary {
                    AdversaryKind::Dedicated => check_case(
                        "mts", "dedicated", &instance, &mts::SaturationWalker, &good, &bad, &opt,
                        bound, Objective::Minimize, 2.0, (beta, tau), trials, budget, master_seed,
                        grid_index,
                    )?,
                    AdversaryKind::Uniform => check_case(
                        "mts", "uniform", &instance, &mts::SaturationWalker, &good,
                        &UniformValidGuide, &opt, bound, Objective::Minimize, 2.0, (beta, tau),
                        trials, budget, master_seed, grid_index,
                    )?,
                };
                cases.push(case);
                grid_index += 1;
            }
        }
    }
    Ok(cases)
}
