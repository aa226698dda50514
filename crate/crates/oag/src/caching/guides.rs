//! Guides for caching. On an eviction step the valid set is exactly the set
//! of cached non-marked pages, so both guides rank the valid candidates using
//! the trace's next-occurrence tables; no further state is needed.

use std::cmp::Reverse;

use super::{CacheAnswer, CacheTrace};
use crate::core::Guide;

fn candidates(valid: &[CacheAnswer]) -> Option<Vec<u32>> {
    let pages: Vec<u32> = valid
        .iter()
        .filter_map(|a| match *a {
            CacheAnswer::Evict(p) => Some(p),
            CacheAnswer::NoEvict => None,
        })
        .collect();
    if pages.is_empty() {
        None
    } else {
        Some(pages)
    }
}

/// Good guide: evict the candidate whose next request is farthest in the
/// future; pages never requested again rank last of all. Ties break toward
/// the lowest page id.
#[derive(Debug, Clone, Default)]
pub struct FarthestInFutureGuide;

impl Guide<CacheTrace> for FarthestInFutureGuide {
    fn guidance(
        &mut self,
        problem: &CacheTrace,
        t: usize,
        _history: &[CacheAnswer],
        valid: &[CacheAnswer],
    ) -> CacheAnswer {
        match candidates(valid) {
            None => CacheAnswer::NoEvict,
            Some(pages) => {
                let best = pages
                    .into_iter()
                    .max_by_key(|&p| {
                        (problem.next_request(p, t).map_or(usize::MAX, |i| i), Reverse(p))
                    })
                    .unwrap();
                CacheAnswer::Evict(best)
            }
        }
    }
}

/// Adversary: evict the candidate requested soonest, maximizing re-faults.
/// Candidates never requested again are harmless; the lowest id breaks ties.
#[derive(Debug, Clone, Default)]
pub struct NearestRequestGuide;

impl Guide<CacheTrace> for NearestRequestGuide {
    fn guidance(
        &mut self,
        problem: &CacheTrace,
        t: usize,
        _history: &[CacheAnswer],
        valid: &[CacheAnswer],
    ) -> CacheAnswer {
        match candidates(valid) {
            None => CacheAnswer::NoEvict,
            Some(pages) => {
                let best = pages
                    .into_iter()
                    .min_by_key(|&p| (problem.next_request(p, t).map_or(usize::MAX, |i| i), p))
                    .unwrap();
                CacheAnswer::Evict(best)
            }
        }
    }
}
