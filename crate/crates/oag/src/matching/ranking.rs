//! The ranking base algorithm: draw one uniform random permutation of the
//! offline side up front, then match every arriving node to its available
//! neighbor of lowest rank.

use num_rational::BigRational;
use num_traits::One;
use rand::RngCore;

use super::{BipartiteInstance, MatchAnswer};
use crate::core::{BaseAlgorithm, Problem, StepChoice};

#[derive(Debug, Clone)]
pub struct Ranking;

#[derive(Debug, Clone)]
pub struct RankingState {
    /// rank[v] = position of offline node v in the random permutation.
    pub rank: Vec<usize>,
    pub matched_offline: Vec<bool>,
    pub matched_online: Vec<Option<usize>>,
}

impl RankingState {
    fn with_rank(instance: &BipartiteInstance, rank: Vec<usize>) -> Self {
        RankingState {
            rank,
            matched_offline: vec![false; instance.n_offline()],
            matched_online: vec![None; instance.n_online()],
        }
    }
}

impl BaseAlgorithm<BipartiteInstance> for Ranking {
    type State = RankingState;

    fn init(&self, problem: &BipartiteInstance, alg: &mut dyn RngCore) -> RankingState {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..problem.n_offline()).collect();
        perm.shuffle(alg);
        let mut rank = vec![0; problem.n_offline()];
        for (pos, &v) in perm.iter().enumerate() {
            rank[v] = pos;
        }
        RankingState::with_rank(problem, rank)
    }

    fn init_support(&self, problem: &BipartiteInstance) -> Vec<(RankingState, BigRational)> {
        let n = problem.n_offline();
        let mut perms = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for p in perms {
                for v in 0..n {
                    if !p.contains(&v) {
                        let mut q = p.clone();
                        q.push(v);
                        next.push(q);
                    }
                }
            }
            perms = next;
        }
        let weight = BigRational::one() / BigRational::from_integer((perms.len() as i64).into());
        perms
            .into_iter()
            .map(|perm| {
                let mut rank = vec![0; n];
                for (pos, &v) in perm.iter().enumerate() {
                    rank[v] = pos;
                }
                (RankingState::with_rank(problem, rank), weight.clone())
            })
            .collect()
    }

    fn step_choice(
        &self,
        problem: &BipartiteInstance,
        state: &RankingState,
        t: usize,
    ) -> StepChoice<MatchAnswer> {
        let u = *problem.request(t);
        let available: Vec<usize> = problem
            .neighbors(u)
            .iter()
            .copied()
            .filter(|&v| !state.matched_offline[v])
            .collect();
        if available.is_empty() {
            return StepChoice::point(MatchAnswer::NoMatch);
        }
        let best = available
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| state.rank[v])
            .map(|(i, _)| i)
            .unwrap();
        StepChoice {
            valid: available.into_iter().map(MatchAnswer::Match).collect(),
            sampler: crate::core::Sampler::Point(best),
        }
    }

    fn apply(
        &self,
        problem: &BipartiteInstance,
        state: &mut RankingState,
        t: usize,
        answer: &MatchAnswer,
    ) {
        if let MatchAnswer::Match(v) = *answer {
            let u = *problem.request(t);
            debug_assert!(!state.matched_offline[v]);
            state.matched_offline[v] = true;
            state.matched_online[u] = Some(v);
        }
    }
}
