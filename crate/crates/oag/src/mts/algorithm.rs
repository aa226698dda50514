//! The saturation-following base algorithm on the uniform metric.
//!
//! Per arriving task, with the ledger at the start of the step: stay if the
//! current state survives the step unsaturated; otherwise move to a state
//! drawn uniformly from those still unsaturated at the step's end; and when
//! the phase itself ends within the step, restart at a state of minimum
//! processing cost. Only tasks seen so far are consulted.

use num_rational::BigRational;
use num_traits::One;
use rand::RngCore;

use super::{SaturationLedger, UniformMtsInstance};
use crate::core::{BaseAlgorithm, Problem, StepChoice};

/// How one step looks from the ledger at its start.
#[derive(Debug, Clone, PartialEq)]
pub enum StepCase {
    /// The current state stays unsaturated past the step.
    Stay,
    /// The current state saturates but the phase persists; the valid moves
    /// are the states unsaturated at the step's end.
    Move { unsaturated: Vec<usize> },
    /// The phase ends within the step; restart at the lowest-index state of
    /// minimum processing cost.
    PhaseEnd { s_min: usize },
}

/// Classifies a step from the ledger state at its start.
pub fn classify_step(
    ledger: &SaturationLedger,
    current: usize,
    task: &[BigRational],
) -> StepCase {
    let unsaturated: Vec<usize> =
        (0..ledger.n()).filter(|&s| !ledger.saturates_within(s, &task[s])).collect();
    if unsaturated.is_empty() {
        let s_min = (0..ledger.n()).min_by(|&a, &b| task[a].cmp(&task[b])).unwrap();
        StepCase::PhaseEnd { s_min }
    } else if unsaturated.contains(&current) {
        StepCase::Stay
    } else {
        StepCase::Move { unsaturated }
    }
}

#[derive(Debug, Clone)]
pub struct SaturationWalker;

#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    pub ledger: SaturationLedger,
    pub current: usize,
}

impl BaseAlgorithm<UniformMtsInstance> for SaturationWalker {
    type State = WalkerState;

    fn init(&self, problem: &UniformMtsInstance, _alg: &mut dyn RngCore) -> WalkerState {
        WalkerState {
            ledger: SaturationLedger::new(problem.n()),
            current: problem.start_state(),
        }
    }

    fn init_support(&self, problem: &UniformMtsInstance) -> Vec<(WalkerState, BigRational)> {
        vec![(
            WalkerState {
                ledger: SaturationLedger::new(problem.n()),
                current: problem.start_state(),
            },
            BigRational::one(),
        )]
    }

    fn step_choice(
        &self,
        problem: &UniformMtsInstance,
        state: &WalkerState,
        t: usize,
    ) -> StepChoice<usize> {
        match classify_step(&state.ledger, state.current, problem.request(t)) {
            StepCase::Stay => StepChoice::point(state.current),
            StepCase::Move { unsaturated } => StepChoice::uniform(unsaturated),
            StepCase::PhaseEnd { s_min } => StepChoice::point(s_min),
        }
    }

    fn apply(
        &self,
        problem: &UniformMtsInstance,
        state: &mut WalkerState,
        t: usize,
        answer: &usize,
    ) {
        state.current = *answer;
        state.ledger.advance(problem.request(t));
    }
}
