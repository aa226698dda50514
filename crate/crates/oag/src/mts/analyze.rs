//! Post-hoc analysis of one MTS run: per-phase transition counts and the
//! walker's per-(phase, state) processing cost.
//!
//! Processing is attributed continuously: a step whose interval spans one or
//! more phase ends splits its processing across those phases proportionally
//! to time. With that accounting the walker never pays more than 1 at any
//! state within a phase (it leaves a state no later than the state
//! saturates).

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::{classify_step, SaturationLedger, StepCase, UniformMtsInstance};
use crate::core::Problem;

#[derive(Debug, Clone)]
pub struct MtsTrialStats {
    /// Within-phase transitions (moves to an unsaturated state), indexed by
    /// phase; phase-crossing restarts are not counted here.
    pub per_phase_transitions: Vec<u32>,
    /// Largest continuous processing cost the walker paid at a single state
    /// within a single phase.
    pub max_state_processing: BigRational,
    /// Number of phases that ended during the run.
    pub completed_phases: usize,
}

pub fn analyze_trial(instance: &UniformMtsInstance, answers: &[usize]) -> MtsTrialStats {
    let mut ledger = SaturationLedger::new(instance.n());
    let mut current = instance.start_state();
    let mut transitions: Vec<u32> = Vec::new();
    let mut processing: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
    for (t, &answer) in answers.iter().enumerate() {
        let task = instance.request(t);
        let pre_phase = ledger.phase_index();
        match classify_step(&ledger, current, task) {
            StepCase::Stay => debug_assert_eq!(answer, current),
            StepCase::Move { ref unsaturated } => {
                debug_assert!(unsaturated.contains(&answer));
                if transitions.len() <= pre_phase {
                    transitions.resize(pre_phase + 1, 0);
                }
                transitions[pre_phase] += 1;
            }
            StepCase::PhaseEnd { .. } => {}
        }
        let adv = ledger.advance(task);
        // Split the walker's processing r_t(answer) across the phases the
        // step interval [t, t+1] touches.
        let rate = &task[answer];
        let mut seg_start = BigRational::from_integer((t as i64).into());
        let mut phase = pre_phase;
        for end in adv
            .phase_ends
            .iter()
            .chain(std::iter::once(&BigRational::from_integer((t as i64 + 1).into())))
        {
            let amount = rate * (end - &seg_start);
            if !amount.is_zero() {
                *processing.entry((phase, answer)).or_insert_with(BigRational::zero) += amount;
            }
            seg_start = end.clone();
            phase += 1;
        }
        current = answer;
    }
    let max_state_processing =
        processing.values().max().cloned().unwrap_or_else(BigRational::zero);
    MtsTrialStats {
        per_phase_transitions: transitions,
        max_state_processing,
        completed_phases: ledger.phase_index(),
    }
}
