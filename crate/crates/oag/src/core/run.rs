//! The two execution loops: plain online (no guidance channel) and guided.

use num_rational::BigRational;

use super::{
    coin, BaseAlgorithm, Guide, GuidanceEvent, GuideSource, OagConfig, Problem, RngStreams,
    RunError,
};
use crate::dtb::DtbWrapped;

/// Result of a plain online run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome<A> {
    pub answers: Vec<A>,
    pub value: BigRational,
}

/// Result of a guided run: answers, value, and the full guidance trace.
#[derive(Debug, Clone, PartialEq)]
pub struct OagOutcome<A> {
    pub answers: Vec<A>,
    pub value: BigRational,
    pub trace: Vec<GuidanceEvent<A>>,
}

/// Runs a base algorithm without any guidance. Only the algorithm stream is
/// consumed; the environment stream is untouched.
pub fn run_online<P, B>(
    base: &B,
    problem: &P,
    streams: &mut RngStreams,
) -> Result<RunOutcome<P::Answer>, RunError>
where
    P: Problem,
    B: BaseAlgorithm<P>,
{
    let mut state = base.init(problem, &mut streams.alg);
    let mut answers = Vec::with_capacity(problem.requests());
    for t in 0..problem.requests() {
        let choice = base.step_choice(problem, &state, t);
        if choice.valid.is_empty() {
            return Err(RunError::EmptyValidSet { time: t + 1 });
        }
        let answer = choice.sample(&mut streams.alg);
        base.apply(problem, &mut state, t, &answer);
        answers.push(answer);
    }
    let value = problem.evaluate(&answers)?;
    Ok(RunOutcome { answers, value })
}

/// Runs a wrapped algorithm in the guided model.
///
/// Per step, in this fixed order: (1) the guide-source coin is drawn from the
/// environment stream (bad with probability `beta`); (2) the selected guide is
/// queried with the full request sequence, the answer history, and the step's
/// valid set; (3) the guidance is handed to the trust step, which draws the
/// trust coin (also from the environment stream) and either adopts the
/// guidance or falls back to the base sampler. Both coins are drawn on every
/// step, even when their outcome is forced.
pub fn run_oag<P, B, GG, GB>(
    wrapped: &DtbWrapped<B>,
    problem: &P,
    good: &mut GG,
    bad: &mut GB,
    config: &OagConfig,
    streams: &mut RngStreams,
) -> Result<OagOutcome<P::Answer>, RunError>
where
    P: Problem,
    B: BaseAlgorithm<P>,
    GG: Guide<P>,
    GB: Guide<P>,
{
    let mut state = wrapped.base().init(problem, &mut streams.alg);
    let mut answers = Vec::with_capacity(problem.requests());
    let mut trace = Vec::with_capacity(problem.requests());
    for t in 0..problem.requests() {
        let choice = wrapped.base().step_choice(problem, &state, t);
        if choice.valid.is_empty() {
            return Err(RunError::EmptyValidSet { time: t + 1 });
        }
        let source = if coin(&mut streams.env, config.beta()) {
            GuideSource::Bad
        } else {
            GuideSource::Good
        };
        let guidance = match source {
            GuideSource::Good => good.guidance(problem, t, &answers, &choice.valid),
            GuideSource::Bad => bad.guidance(problem, t, &answers, &choice.valid),
        };
        if !problem.answer_in_space(&guidance) {
            return Err(RunError::GuideProtocol { time: t + 1 });
        }
        let (adopted, trusted) =
            crate::dtb::dtb_step(&choice, &guidance, wrapped.tau(), &mut streams.env, &mut streams.alg);
        debug_assert!(choice.valid.contains(&adopted));
        trace.push(GuidanceEvent { time: t + 1, source, guidance, trusted, adopted: adopted.clone() });
        good.observe(problem, t, &adopted);
        bad.observe(problem, t, &adopted);
        wrapped.base().apply(problem, &mut state, t, &adopted);
        answers.push(adopted);
    }
    let value = problem.evaluate(&answers)?;
    Ok(OagOutcome { answers, value, trace })
}
