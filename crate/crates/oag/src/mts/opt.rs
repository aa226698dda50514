//! Exact offline optimum by dynamic programming over (step, state), in exact
//! rational arithmetic.
//!
//! Starting anywhere other than the fixed start state costs one transition:
//! c(0, s) = [s != start]; thereafter
//! c(t, s) = r_t(s) + min(c(t-1, s), 1 + min_{s' != s} c(t-1, s')).

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::UniformMtsInstance;
use crate::core::Problem;

pub fn offline_opt(instance: &UniformMtsInstance) -> BigRational {
    let n = instance.n();
    let mut cost: Vec<BigRational> = (0..n)
        .map(|s| {
            if s == instance.start_state() {
                BigRational::zero()
            } else {
                BigRational::one()
            }
        })
        .collect();
    for t in 0..instance.requests() {
        let task = instance.request(t);
        // Cheapest previous state overall and second-cheapest, to get
        // min_{s' != s} in one pass.
        let mut best = usize::MAX;
        let mut second = usize::MAX;
        for s in 0..n {
            if best == usize::MAX || cost[s] < cost[best] {
                second = best;
                best = s;
            } else if second == usize::MAX || cost[s] < cost[second] {
                second = s;
            }
        }
        cost = (0..n)
            .map(|s| {
                let other = if s == best { second } else { best };
                let mut c = cost[s].clone();
                if other != usize::MAX {
                    let via = BigRational::one() + &cost[other];
                    if via < c {
                        c = via;
                    }
                }
                &task[s] + c
            })
            .collect();
    }
    cost.into_iter().min().unwrap()
}
