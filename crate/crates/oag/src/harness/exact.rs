//! Exact expected value of a guided run by exhaustive enumeration.
//!
//! Walks the full product space of per-step randomness — the guide-source
//! coin, the trust coin, the fallback sampler's draw, and the base
//! algorithm's up-front randomness — with exact rational weights. Branches
//! whose answers coincide are merged (their weights add), zero-probability
//! branches are skipped, and each leaf contributes its exact evaluated value
//! times its path probability.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::core::{BaseAlgorithm, Guide, Problem, RunError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OracleError {
    #[error("enumeration exceeded the budget of {budget} leaves")]
    TooLarge { budget: u64 },
    #[error("beta and tau must be rationals in [0, 1]")]
    BadParameter,
    #[error(transparent)]
    Run(#[from] RunError),
}

struct Walker<'a, P: Problem, B: BaseAlgorithm<P>> {
    problem: &'a P,
    base: &'a B,
    beta: BigRational,
    tau: BigRational,
    budget: u64,
    leaves: u64,
    acc: BigRational,
}

impl<'a, P, B> Walker<'a, P, B>
where
    P: Problem,
    B: BaseAlgorithm<P>,
{
    fn walk<GG, GB>(
        &mut self,
        state: &B::State,
        good: &GG,
        bad: &GB,
        t: usize,
        answers: &mut Vec<P::Answer>,
        weight: BigRational,
    ) -> Result<(), OracleError>
    where
        GG: Guide<P> + Clone,
        GB: Guide<P> + Clone,
    {
        if t == self.problem.requests() {
            self.leaves += 1;
            if self.leaves > self.budget {
                return Err(OracleError::TooLarge { budget: self.budget });
            }
            let value = self.problem.evaluate(answers).map_err(RunError::from)?;
            self.acc += weight * value;
            return Ok(());
        }
        let choice = self.base.step_choice(self.problem, state, t);
        if choice.valid.is_empty() {
            return Err(RunError::EmptyValidSet { time: t + 1 }.into());
        }
        let one = BigRational::one();
        let w_good = (&one - &self.beta) * &self.tau;
        let w_bad = &self.beta * &self.tau;
        let mut fallback = &one - &self.tau;
        let mut outcomes: Vec<(P::Answer, BigRational)> = Vec::new();
        let add = |answer: P::Answer, w: BigRational, outcomes: &mut Vec<(P::Answer, BigRational)>| {
            match outcomes.iter_mut().find(|(a, _)| *a == answer) {
                Some((_, acc)) => *acc += w,
                None => outcomes.push((answer, w)),
            }
        };
        for (is_bad, w) in [(false, w_good), (true, w_bad)] {
            if w.is_zero() {
                continue;
            }
            let guidance = if is_bad {
                bad.clone().guidance(self.problem, t, answers, &choice.valid)
            } else {
                good.clone().guidance(self.problem, t, answers, &choice.valid)
            };
            if !self.problem.answer_in_space(&guidance) {
                return Err(RunError::GuideProtocol { time: t + 1 }.into());
            }
            if choice.valid.contains(&guidance) {
                add(guidance, w, &mut outcomes);
            } else {
                fallback += w;
            }
        }
        if !fallback.is_zero() {
            for (i, p) in choice.sampler_support() {
                add(choice.valid[i].clone(), &fallback * p, &mut outcomes);
            }
        }
        for (answer, w) in outcomes {
            let mut child_state = state.clone();
            self.base.apply(self.problem, &mut child_state, t, &answer);
            let mut child_good = good.clone();
            let mut child_bad = bad.clone();
            child_good.observe(self.problem, t, &answer);
            child_bad.observe(self.problem, t, &answer);
            answers.push(answer);
            self.walk(&child_state, &child_good, &child_bad, t + 1, answers, &weight * &w)?;
            answers.pop();
        }
        Ok(())
    }
}

/// Exact expected value of the guided run of `base` on `problem` with the
/// given guides at exact `(beta, tau)`. Errors with `TooLarge` once more than
/// `budget` leaves have been visited.
pub fn exact_expectation<P, B, GG, GB>(
    problem: &P,
    base: &B,
    good: &GG,
    bad: &GB,
    beta: &BigRational,
    tau: &BigRational,
    budget: u64,
) -> Result<BigRational, OracleError>
where
    P: Problem,
    B: BaseAlgorithm<P>,
    GG: Guide<P> + Clone,
    GB: Guide<P> + Clone,
{
    let one = BigRational::one();
    if beta.is_negative() || tau.is_negative() || beta > &one || tau > &one {
        return Err(OracleError::BadParameter);
    }
    let mut walker = Walker {
        problem,
        base,
        beta: beta.clone(),
        tau: tau.clone(),
        budget,
        leaves: 0,
        acc: BigRational::zero(),
    };
    let mut answers = Vec::with_capacity(problem.requests());
    for (state, weight) in base.init_support(problem) {
        walker.walk(&state, good, bad, 0, &mut answers, weight)?;
    }
    Ok(walker.acc)
}
