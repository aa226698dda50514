//! The drop-or-trust-blindly compiler.
//!
//! Wraps any base online algorithm into a guided one: per step, a trust coin
//! with success probability `tau` decides whether the incoming guidance is
//! adopted blindly (when it is a valid answer) or ignored in favor of the
//! base algorithm's own sampler. The wrapper adds no state of its own and
//! never changes the base algorithm's valid sets.

use rand::RngCore;
use thiserror::Error;

use crate::core::{coin, BaseAlgorithm, Problem, StepChoice};

#[derive(Debug, Clone, Error, PartialEq)]
#[error("tau must lie in [0, 1], got {0}")]
pub struct InvalidTau(pub f64);

/// A base algorithm together with a trust parameter.
#[derive(Debug, Clone)]
pub struct DtbWrapped<B> {
    base: B,
    tau: f64,
}

impl<B> DtbWrapped<B> {
    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Wraps `base` with trust parameter `tau`. The returned algorithm applies
/// [`dtb_step`] at every step and otherwise delegates all state evolution to
/// the base algorithm.
pub fn dtb_transform<P, B>(base: B, tau: f64) -> Result<DtbWrapped<B>, InvalidTau>
where
    P: Problem,
    B: BaseAlgorithm<P>,
{
    if !(0.0..=1.0).contains(&tau) || !tau.is_finite() {
        return Err(InvalidTau(tau));
    }
    Ok(DtbWrapped { base, tau })
}

/// One trust decision. Draws the trust coin from the environment stream
/// (always, even when the guidance is invalid, so that streams stay aligned
/// across parameter settings). On success with valid guidance the guidance is
/// adopted verbatim; otherwise the fallback answer is sampled from the
/// algorithm stream.
pub fn dtb_step<A: Clone + PartialEq>(
    choice: &StepChoice<A>,
    guidance: &A,
    tau: f64,
    env: &mut dyn RngCore,
    alg: &mut dyn RngCore,
) -> (A, bool) {
    let success = coin(env, tau);
    if success && choice.valid.contains(guidance) {
        (guidance.clone(), true)
    } else {
        (choice.sample(alg), false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caching::{CacheTrace, FarthestInFutureGuide, NearestRequestGuide, RandomMarking};
    use crate::core::{run_oag, OagConfig, RngStreams, Sampler};
    use rand::RngCore;

    fn choice() -> StepChoice<u32> {
        StepChoice { valid: vec![10, 20, 30], sampler: Sampler::Point(1) }
    }

    #[test]
    fn full_trust_adopts_valid_guidance() {
        let mut streams = RngStreams::from_seeds(1, 2);
        let (answer, trusted) =
            dtb_step(&choice(), &30, 1.0, &mut streams.env, &mut streams.alg);
        assert_eq!((answer, trusted), (30, true));
    }

    #[test]
    fn zero_trust_always_falls_back() {
        let mut streams = RngStreams::from_seeds(1, 2);
        let (answer, trusted) =
            dtb_step(&choice(), &30, 0.0, &mut streams.env, &mut streams.alg);
        assert_eq!((answer, trusted), (20, false));
    }

    #[test]
    fn invalid_guidance_is_dropped_even_at_full_trust() {
        let mut streams = RngStreams::from_seeds(1, 2);
        let (answer, trusted) =
            dtb_step(&choice(), &99, 1.0, &mut streams.env, &mut streams.alg);
        assert_eq!((answer, trusted), (20, false));
    }

    #[test]
    fn trust_coin_is_consumed_when_guidance_is_invalid() {
        let mut a = RngStreams::from_seeds(8, 9);
        dtb_step(&choice(), &99, 0.9, &mut a.env, &mut a.alg);
        let mut b = RngStreams::from_seeds(8, 9);
        crate::core::coin(&mut b.env, 0.9);
        assert_eq!(a.env.next_u64(), b.env.next_u64());
    }

    #[test]
    fn uniform_fallback_consumes_the_algorithm_stream() {
        let uniform = StepChoice { valid: vec![10u32, 20, 30], sampler: Sampler::Uniform };
        let mut a = RngStreams::from_seeds(8, 9);
        let before = a.alg.clone().next_u64();
        dtb_step(&uniform, &99, 0.0, &mut a.env, &mut a.alg);
        assert_ne!(a.alg.next_u64(), before, "one draw must have been consumed");
    }

    #[test]
    fn transform_rejects_invalid_tau() {
        assert!(dtb_transform::<CacheTrace, _>(RandomMarking, 1.5).is_err());
        assert!(dtb_transform::<CacheTrace, _>(RandomMarking, -0.1).is_err());
        assert!(dtb_transform::<CacheTrace, _>(RandomMarking, 1.0).is_ok());
    }

    #[test]
    fn singleton_valid_sets_pin_the_run_for_any_parameters() {
        // A trace that fits in cache: every step has the singleton no-evict
        // valid set, so guidance and trust cannot change anything.
        let trace = CacheTrace::new(3, vec![], vec![1, 2, 3, 1, 2, 3, 2, 1]).unwrap();
        let mut reference = None;
        for tau in [0.0, 0.3, 1.0] {
            for beta in [0.0, 0.5, 1.0] {
                let wrapped = dtb_transform(RandomMarking, tau).unwrap();
                let config = OagConfig::new(beta, tau).unwrap();
                let mut streams = RngStreams::from_seeds(4, 5);
                let out = run_oag(
                    &wrapped,
                    &trace,
                    &mut FarthestInFutureGuide,
                    &mut NearestRequestGuide,
                    &config,
                    &mut streams,
                )
                .unwrap();
                match &reference {
                    None => reference = Some(out.answers),
                    Some(r) => assert_eq!(r, &out.answers),
                }
            }
        }
    }

    #[test]
    fn wrapped_algorithm_reports_the_base_valid_sets() {
        use crate::core::BaseAlgorithm;
        let trace = CacheTrace::new(2, vec![1, 2], vec![3, 1, 2]).unwrap();
        let wrapped = dtb_transform(RandomMarking, 0.5).unwrap();
        let mut streams = RngStreams::from_seeds(0, 0);
        let state = RandomMarking.init(&trace, &mut streams.alg);
        assert_eq!(
            RandomMarking.step_choice(&trace, &state, 0),
            wrapped.base().step_choice(&trace, &state, 0)
        );
    }
}
