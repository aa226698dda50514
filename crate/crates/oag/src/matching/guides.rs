//! Guidance generators for bipartite matching.
//!
//! The good guide commits to one fixed maximum matching and suggests it
//! regardless of what the algorithm has done. The adversaries are heuristics:
//! the worst-case guarantee quantifies over all bad guides, so any concrete
//! adversary only lower-bounds the damage.

use std::cmp::Reverse;

use super::{BipartiteInstance, MatchAnswer, OptimalMatching};
use crate::core::{Guide, Problem};

/// Good guide: suggest the fixed maximum matching's partner of the arriving
/// node, whether or not it is still available. Non-adaptive.
#[derive(Debug, Clone)]
pub struct MstarGuide {
    opt: OptimalMatching,
}

impl MstarGuide {
    pub fn new(opt: OptimalMatching) -> Self {
        MstarGuide { opt }
    }
}

impl Guide<BipartiteInstance> for MstarGuide {
    fn guidance(
        &mut self,
        problem: &BipartiteInstance,
        t: usize,
        _history: &[MatchAnswer],
        _valid: &[MatchAnswer],
    ) -> MatchAnswer {
        let u = *problem.request(t);
        self.opt.of_online(u).map(MatchAnswer::Match).unwrap_or(MatchAnswer::NoMatch)
    }
}

/// Adversary that steals, among the still-available neighbors of the arriving
/// node, the fixed matching's partner of the latest-arriving future online
/// node — the partner that will be needed longest from now. Falls back to the
/// arriving node's own partner when there is no other option. Ties break
/// toward the lowest offline index.
#[derive(Debug, Clone)]
pub struct GreedyHarmGuide {
    opt: OptimalMatching,
}

impl GreedyHarmGuide {
    pub fn new(opt: OptimalMatching) -> Self {
        GreedyHarmGuide { opt }
    }
}

impl Guide<BipartiteInstance> for GreedyHarmGuide {
    fn guidance(
        &mut self,
        problem: &BipartiteInstance,
        t: usize,
        _history: &[MatchAnswer],
        valid: &[MatchAnswer],
    ) -> MatchAnswer {
        let u = *problem.request(t);
        let own = self.opt.of_online(u);
        let nodes: Vec<usize> = valid
            .iter()
            .filter_map(|a| match *a {
                MatchAnswer::Match(v) => Some(v),
                MatchAnswer::NoMatch => None,
            })
            .collect();
        if nodes.is_empty() {
            // Forced no-match step.
            return MatchAnswer::NoMatch;
        }
        let candidates: Vec<usize> = nodes.iter().copied().filter(|&v| Some(v) != own).collect();
        if candidates.is_empty() {
            return MatchAnswer::Match(nodes[0]);
        }
        // Arrival position of the offline node's partner, when that partner
        // arrives strictly in the future; stealing anything else is harmless.
        let future_need = |v: usize| -> Option<usize> {
            self.opt
                .of_offline(v)
                .map(|w| problem.arrival_pos(w))
                .filter(|&pos| pos > t)
        };
        let best = candidates
            .into_iter()
            .max_by_key(|&v| (future_need(v), Reverse(v)))
            .unwrap();
        MatchAnswer::Match(best)
    }
}

/// Non-adaptive adversary: always names the partner of the latest-arriving
/// future online node that has one, ignoring validity entirely (invalid
/// guidance is simply dropped by the trust step). Because it never reads the
/// answer history, runs on a graph and on the same graph with one
/// optimally-unmatched node deleted see identical guidance.
#[derive(Debug, Clone)]
pub struct StealFutureGuide {
    opt: OptimalMatching,
}

impl StealFutureGuide {
    pub fn new(opt: OptimalMatching) -> Self {
        StealFutureGuide { opt }
    }
}

impl Guide<BipartiteInstance> for StealFutureGuide {
    fn guidance(
        &mut self,
        problem: &BipartiteInstance,
        t: usize,
        _history: &[MatchAnswer],
        _valid: &[MatchAnswer],
    ) -> MatchAnswer {
        for pos in (t + 1..problem.n_online()).rev() {
            let w = problem.arrival()[pos];
            if let Some(v) = self.opt.of_online(w) {
                return MatchAnswer::Match(v);
            }
        }
        let u = *problem.request(t);
        self.opt.of_online(u).map(MatchAnswer::Match).unwrap_or(MatchAnswer::NoMatch)
    }
}
