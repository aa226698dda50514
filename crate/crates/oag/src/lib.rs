//! Simulation workbench for online algorithms with unreliable guidance.
//!
//! An online problem is modeled as a request-answer game: requests arrive one
//! by one and the algorithm commits to an answer for each, irrevocably. In the
//! guided (OAG) execution mode, each request is accompanied by a piece of
//! *guidance* drawn from the answer space. The guidance comes from a good
//! guide with probability `1 - beta` and from an adversarial bad guide with
//! probability `beta`; both guides know the whole request sequence and the
//! answer history.
//!
//! The [`dtb`] module provides the drop-or-trust-blindly compiler: it wraps
//! any base online algorithm that exposes its per-step valid answers and
//! fallback sampler into a guided algorithm with a trust parameter `tau`
//! (adopt valid guidance blindly with probability `tau`, otherwise fall back
//! to the base sampler).
//!
//! Three problem instantiations are included, each with its own good guide,
//! adversaries, and exact offline optimum:
//!
//! - [`matching`]: online bipartite matching under adversarial arrival
//!   (ranking base algorithm),
//! - [`caching`]: paging with a cache of size `k` (random marking base
//!   algorithm),
//! - [`mts`]: metrical task systems on the uniform metric (saturation-based
//!   base algorithm, exact rational bookkeeping).
//!
//! The [`harness`] module runs seeded Monte-Carlo sweeps over `(beta, tau)`
//! grids, estimates competitive ratios with confidence intervals, compares
//! them against the closed-form bounds, and cross-checks small instances
//! against an exact enumeration oracle.

pub mod caching;
pub mod core;
pub mod dtb;
pub mod harness;
pub mod matching;
pub mod mts;

pub use crate::core::{
    coin, BaseAlgorithm, EvalError, Guide, GuidanceEvent, GuideSource, OagConfig, Objective,
    Problem, RngStreams, RunError, Sampler, StepChoice,
};
pub use crate::dtb::{dtb_transform, DtbWrapped};
