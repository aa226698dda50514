//! The random-marking base algorithm.
//!
//! Every requested page is marked; when a fault hits a full cache, a
//! non-marked page is evicted uniformly at random; once `k` pages are marked,
//! all marks are cleared. A fault with a full cache always finds a non-marked
//! victim: the mark count can only reach `k` at the instant the clearing
//! fires, so it is at most `k - 1` between requests.

use num_rational::BigRational;
use num_traits::One;
use rand::RngCore;

use super::{CacheAnswer, CacheTrace, Page};
use crate::core::{BaseAlgorithm, Problem, StepChoice};

/// Cache content with mark bits, in insertion order. Marks live on the cache
/// entries themselves, so `marked ⊆ cache` holds structurally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkingBook {
    k: usize,
    entries: Vec<(Page, bool)>,
}

impl MarkingBook {
    pub fn new(trace: &CacheTrace) -> Self {
        MarkingBook {
            k: trace.k(),
            entries: trace.initial_cache().iter().map(|&p| (p, false)).collect(),
        }
    }

    pub fn contains(&self, page: Page) -> bool {
        self.entries.iter().any(|&(p, _)| p == page)
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() == self.k
    }

    pub fn cached(&self) -> impl Iterator<Item = Page> + '_ {
        self.entries.iter().map(|&(p, _)| p)
    }

    /// Non-marked cached pages, in cache order.
    pub fn unmarked(&self) -> Vec<Page> {
        self.entries.iter().filter(|&&(_, m)| !m).map(|&(p, _)| p).collect()
    }

    pub fn marked_count(&self) -> usize {
        self.entries.iter().filter(|&&(_, m)| m).count()
    }

    /// Applies one request plus the committed answer: evict, fetch if absent,
    /// mark the requested page, clear all marks once `k` pages are marked.
    pub fn step(&mut self, x: Page, answer: &CacheAnswer) {
        if let CacheAnswer::Evict(p) = *answer {
            if let Some(i) = self.entries.iter().position(|&(q, _)| q == p) {
                self.entries.remove(i);
            }
        }
        if !self.contains(x) {
            self.entries.push((x, false));
        }
        debug_assert!(self.entries.len() <= self.k);
        for e in self.entries.iter_mut() {
            if e.0 == x {
                e.1 = true;
            }
        }
        if self.marked_count() == self.k {
            for e in self.entries.iter_mut() {
                e.1 = false;
            }
        }
    }
}

/// The base algorithm; its per-trial state is just the marking book.
#[derive(Debug, Clone)]
pub struct RandomMarking;

impl BaseAlgorithm<CacheTrace> for RandomMarking {
    type State = MarkingBook;

    fn init(&self, problem: &CacheTrace, _alg: &mut dyn RngCore) -> MarkingBook {
        MarkingBook::new(problem)
    }

    fn init_support(&self, problem: &CacheTrace) -> Vec<(MarkingBook, BigRational)> {
        vec![(MarkingBook::new(problem), BigRational::one())]
    }

    fn step_choice(
        &self,
        problem: &CacheTrace,
        state: &MarkingBook,
        t: usize,
    ) -> StepChoice<CacheAnswer> {
        let x = *problem.request(t);
        if state.contains(x) || !state.is_full() {
            return StepChoice::point(CacheAnswer::NoEvict);
        }
        let victims = state.unmarked();
        debug_assert!(!victims.is_empty());
        StepChoice::uniform(victims.into_iter().map(CacheAnswer::Evict).collect())
    }

    fn apply(&self, problem: &CacheTrace, state: &mut MarkingBook, t: usize, answer: &CacheAnswer) {
        state.step(*problem.request(t), answer);
    }
}
