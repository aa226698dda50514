//! Guides for the uniform metrical task system. Both maintain their own
//! ledger mirror (saturation depends only on the request sequence) and rank
//! the valid states by their exact saturation time, computed over the full
//! task sequence through per-state prefix sums.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{SaturationLedger, UniformMtsInstance};
use crate::core::{Guide, Problem};

/// Cumulative per-state processing: prefix[t][s] = sum of r_j(s) for j < t.
#[derive(Debug)]
pub struct PrefixTable {
    prefix: Vec<Vec<BigRational>>,
}

impl PrefixTable {
    pub fn new(instance: &UniformMtsInstance) -> Self {
        let n = instance.n();
        let m = instance.requests();
        let mut prefix = Vec::with_capacity(m + 1);
        prefix.push(vec![BigRational::zero(); n]);
        for t in 0..m {
            let prev = prefix[t].clone();
            let task = instance.request(t);
            prefix.push((0..n).map(|s| &prev[s] + &task[s]).collect());
        }
        PrefixTable { prefix }
    }

    /// Absolute time at which `state` accumulates `remaining` more
    /// processing, starting from discrete time `now`; `None` if it never
    /// does.
    fn time_to_accumulate(
        &self,
        instance: &UniformMtsInstance,
        state: usize,
        now: usize,
        remaining: &BigRational,
    ) -> Option<BigRational> {
        let base = &self.prefix[now][state];
        let m = instance.requests();
        if &self.prefix[m][state] - base < *remaining {
            return None;
        }
        // First step index j >= now with prefix[j+1] - prefix[now] >= remaining.
        let (mut lo, mut hi) = (now, m);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if &self.prefix[mid + 1][state] - base >= *remaining {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let before = &self.prefix[lo][state] - base;
        let within = remaining - before;
        let rate = &instance.request(lo)[state];
        Some(BigRational::from_integer((lo as i64).into()) + within / rate)
    }
}

/// Which end of the saturation horizon a guide aims for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Horizon {
    Latest,
    Earliest,
}

/// A saturation-horizon guide. [`SaturationGuide::latest`] is the good guide:
/// it names the valid state that stays unsaturated longest (never-saturating
/// states rank latest). [`SaturationGuide::earliest`] is the adversary: the
/// valid state saturating soonest, forcing the next transition as early as
/// possible. Ties break toward the lowest state index.
#[derive(Debug, Clone)]
pub struct SaturationGuide {
    ledger: SaturationLedger,
    prefix: Arc<PrefixTable>,
    horizon: Horizon,
}

impl SaturationGuide {
    pub fn latest(instance: &UniformMtsInstance) -> Self {
        Self::new(instance, Horizon::Latest)
    }

    pub fn earliest(instance: &UniformMtsInstance) -> Self {
        Self::new(instance, Horizon::Earliest)
    }

    fn new(instance: &UniformMtsInstance, horizon: Horizon) -> Self {
        SaturationGuide {
            ledger: SaturationLedger::new(instance.n()),
            prefix: Arc::new(PrefixTable::new(instance)),
            horizon,
        }
    }

    fn saturation_time(&self, instance: &UniformMtsInstance, state: usize) -> Option<BigRational> {
        let remaining = BigRational::one() - self.ledger.acc(state);
        self.prefix.time_to_accumulate(instance, state, self.ledger.now(), &remaining)
    }
}

impl Guide<UniformMtsInstance> for SaturationGuide {
    fn guidance(
        &mut self,
        problem: &UniformMtsInstance,
        _t: usize,
        _history: &[usize],
        valid: &[usize],
    ) -> usize {
        if valid.len() == 1 {
            return valid[0];
        }
        let mut best = valid[0];
        let mut best_time = self.saturation_time(problem, best);
        for &s in &valid[1..] {
            let time = self.saturation_time(problem, s);
            // `None` = never saturates, which ranks latest.
            let better = match (&time, &best_time) {
                (None, None) => false,
                (None, Some(_)) => self.horizon == Horizon::Latest,
                (Some(_), None) => self.horizon == Horizon::Earliest,
                (Some(a), Some(b)) => match self.horizon {
                    Horizon::Latest => a > b,
                    Horizon::Earliest => a < b,
                },
            };
            if better {
                best = s;
                best_time = time;
            }
        }
        best
    }

    fn observe(&mut self, problem: &UniformMtsInstance, t: usize, _answer: &usize) {
        self.ledger.advance(problem.request(t));
    }
}
