//! Request-answer games, the two-guide guidance channel, and the generic run
//! loops for plain online and guided executions.

mod rng;
mod run;

pub use rng::{coin, derive_seeds, RngStreams};
pub use run::{run_oag, run_online, OagOutcome, RunOutcome};

use num_rational::BigRational;
use rand::RngCore;
use thiserror::Error;

/// Whether the problem's value function is a cost or a payoff.
///
/// The direction of every ratio comparison is determined solely by this:
/// a cost ratio passes a bound when `alg/opt <= bound`, a payoff ratio when
/// `alg/opt >= bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Minimize,
    Maximize,
}

/// Which guide produced a piece of guidance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuideSource {
    Good,
    Bad,
}

/// Per-step record of the guidance channel: who spoke, what they said, and
/// what the algorithm did with it.
///
/// `trusted` is true exactly when the trust coin succeeded *and* the guidance
/// was a valid answer for the step; in that case `adopted == guidance`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuidanceEvent<A> {
    /// 1-based step index.
    pub time: usize,
    pub source: GuideSource,
    pub guidance: A,
    pub trusted: bool,
    pub adopted: A,
}

/// How a step's fallback answer is drawn from the valid set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sampler {
    /// Always returns `valid[index]`; consumes no randomness.
    Point(usize),
    /// Uniform over the whole valid set; consumes one draw.
    Uniform,
}

/// The pair (valid answers, fallback sampler) a base algorithm exposes at one
/// step. The sampler's support is always contained in `valid`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepChoice<A> {
    pub valid: Vec<A>,
    pub sampler: Sampler,
}

impl<A: Clone> StepChoice<A> {
    pub fn point(answer: A) -> Self {
        StepChoice { valid: vec![answer], sampler: Sampler::Point(0) }
    }

    pub fn uniform(valid: Vec<A>) -> Self {
        StepChoice { valid, sampler: Sampler::Uniform }
    }

    /// Draws the fallback answer from the algorithm stream.
    pub fn sample(&self, alg: &mut dyn RngCore) -> A {
        match self.sampler {
            Sampler::Point(i) => self.valid[i].clone(),
            Sampler::Uniform => {
                let i = rand::Rng::gen_range(alg, 0..self.valid.len());
                self.valid[i].clone()
            }
        }
    }

    /// Support of the sampler with exact probabilities, for the enumeration
    /// oracle. Pairs are (index into `valid`, probability).
    pub fn sampler_support(&self) -> Vec<(usize, BigRational)> {
        use num_traits::One;
        match self.sampler {
            Sampler::Point(i) => vec![(i, BigRational::one())],
            Sampler::Uniform => {
                let n = self.valid.len();
                let p = BigRational::new(1.into(), (n as i64).into());
                (0..n).map(|i| (i, p.clone())).collect()
            }
        }
    }
}

/// Guidance-channel parameters: `beta` is the probability a step's guidance
/// comes from the bad guide, `tau` is the trust probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OagConfig {
    beta: f64,
    tau: f64,
}

impl OagConfig {
    pub fn new(beta: f64, tau: f64) -> Result<Self, ConfigError> {
        if !(0.0..=1.0).contains(&beta) || !beta.is_finite() {
            return Err(ConfigError::InvalidBeta(beta));
        }
        if !(0.0..=1.0).contains(&tau) || !tau.is_finite() {
            return Err(ConfigError::InvalidTau(tau));
        }
        Ok(OagConfig { beta, tau })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConfigError {
    #[error("beta must lie in [0, 1], got {0}")]
    InvalidBeta(f64),
    #[error("tau must lie in [0, 1], got {0}")]
    InvalidTau(f64),
}

/// Errors from evaluating an answer sequence against an instance.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("answer sequence has length {answers}, request sequence {requests}")]
    LengthMismatch { answers: usize, requests: usize },
    #[error("illegal answer at step {time}: {reason}")]
    IllegalAnswer { time: usize, reason: String },
}

/// Errors from a (guided or plain) run.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum RunError {
    #[error("no legal answer exists at step {time}")]
    EmptyValidSet { time: usize },
    #[error("guide returned an answer outside the answer space at step {time}")]
    GuideProtocol { time: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A problem instance: a fixed request sequence plus the value function.
pub trait Problem {
    type Request;
    type Answer: Clone + PartialEq + std::fmt::Debug;

    fn objective(&self) -> Objective;

    fn requests(&self) -> usize;

    fn request(&self, t: usize) -> &Self::Request;

    /// Total cost or payoff of a complete answer sequence. Illegal solutions
    /// are an error, not an infinite value.
    fn evaluate(&self, answers: &[Self::Answer]) -> Result<BigRational, EvalError>;

    /// Membership in the global answer space (not step legality). Guides that
    /// leave this space break the protocol.
    fn answer_in_space(&self, answer: &Self::Answer) -> bool;
}

/// A base online algorithm: per-trial state, a step choice (valid set plus
/// fallback sampler) for each incoming request, and a state update once the
/// answer is committed.
///
/// All randomness an implementation consumes must come from the provided
/// algorithm stream; `init` draws any up-front randomness (e.g. a random
/// ranking) and `init_support` exposes the exact distribution of that draw
/// for the enumeration oracle.
pub trait BaseAlgorithm<P: Problem> {
    type State: Clone;

    fn init(&self, problem: &P, alg: &mut dyn RngCore) -> Self::State;

    /// Exact initial-state distribution. Only called on small instances by
    /// the enumeration oracle.
    fn init_support(&self, problem: &P) -> Vec<(Self::State, BigRational)>;

    fn step_choice(&self, problem: &P, state: &Self::State, t: usize) -> StepChoice<P::Answer>;

    fn apply(&self, problem: &P, state: &mut Self::State, t: usize, answer: &P::Answer);
}

/// A guidance generator. Guides see the full request sequence (through the
/// problem instance), the answer history, and the current valid set — never
/// the algorithm's coins. Implementations may carry internal state derived
/// from the observed history; `observe` is called once per step for both
/// guides regardless of which one was selected.
pub trait Guide<P: Problem> {
    fn guidance(
        &mut self,
        problem: &P,
        t: usize,
        history: &[P::Answer],
        valid: &[P::Answer],
    ) -> P::Answer;

    fn observe(&mut self, _problem: &P, _t: usize, _answer: &P::Answer) {}
}

/// Null adversary: a deterministic pseudo-uniform pick from the valid set.
///
/// The model requires guides to be deterministic functions of the request
/// sequence and answer history, so "uniform" is realized by hashing the step
/// index with a fixed constant rather than by consuming a random stream.
#[derive(Debug, Clone, Default)]
pub struct UniformValidGuide;

impl<P: Problem> Guide<P> for UniformValidGuide {
    fn guidance(
        &mut self,
        _problem: &P,
        t: usize,
        _history: &[P::Answer],
        valid: &[P::Answer],
    ) -> P::Answer {
        let h = rng::splitmix64(0x5eed_0a6_u64 ^ (t as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        valid[(h % valid.len() as u64) as usize].clone()
    }
}
