//! Continuous-time saturation bookkeeping for uniform metrical task systems,
//! in exact rational arithmetic.
//!
//! Task `t` (0-based) processes state `s` at rate `r_t(s)` over the real
//! interval `[t, t+1]`. A state saturates when its accumulated processing
//! within the current phase reaches 1; the phase ends the moment all states
//! are saturated, all accumulations reset, and the remainder of the interval
//! accrues into the new phase — several phases may end within one step.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Rational = BigRational;

/// A state crossing its saturation threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturationEvent {
    pub state: usize,
    /// Absolute time of the crossing, in `(t, t+1]` for step `t`.
    pub time: Rational,
}

/// Everything that happened while advancing one step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepAdvance {
    /// Newly saturated states, ordered by (time, state index).
    pub events: Vec<SaturationEvent>,
    /// Times at which phases ended during the step.
    pub phase_ends: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaturationLedger {
    n: usize,
    /// Number of tasks fully processed; the next step covers [now, now+1].
    now: usize,
    phase_index: usize,
    /// Absolute time the current phase began.
    phase_start: Rational,
    /// Accumulated processing in the current phase, capped at 1.
    acc: Vec<Rational>,
    saturated: Vec<bool>,
}

impl SaturationLedger {
    pub fn new(n: usize) -> Self {
        SaturationLedger {
            n,
            now: 0,
            phase_index: 0,
            phase_start: Rational::zero(),
            acc: vec![Rational::zero(); n],
            saturated: vec![false; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn now(&self) -> usize {
        self.now
    }

    pub fn phase_index(&self) -> usize {
        self.phase_index
    }

    pub fn phase_start(&self) -> &Rational {
        &self.phase_start
    }

    pub fn acc(&self, state: usize) -> &Rational {
        &self.acc[state]
    }

    pub fn is_saturated(&self, state: usize) -> bool {
        self.saturated[state]
    }

    /// Will `state` be saturated at time `now + 1` if the current phase
    /// persists? Saturating exactly at the step boundary counts.
    pub fn saturates_within(&self, state: usize, rate: &Rational) -> bool {
        self.saturated[state] || (!rate.is_zero() && &self.acc[state] + rate >= Rational::one())
    }

    /// Advances through one task over `[now, now + 1]`, handling any number
    /// of phase ends with residual carry.
    pub fn advance(&mut self, task: &[Rational]) -> StepAdvance {
        assert_eq!(task.len(), self.n);
        let step_end = int(self.now as i64 + 1);
        let mut t = int(self.now as i64);
        let mut out = StepAdvance::default();
        loop {
            let remaining = &step_end - &t;
            let mut crossings: Vec<(usize, Rational)> = Vec::new();
            let mut all_saturate = true;
            for s in 0..self.n {
                if self.saturated[s] {
                    continue;
                }
                let need = Rational::one() - &self.acc[s];
                if task[s].is_zero() || need > &task[s] * &remaining {
                    all_saturate = false;
                } else {
                    crossings.push((s, &t + need / &task[s]));
                }
            }
            crossings.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
            if all_saturate {
                // Phase ends at the last crossing; reset and re-scan the rest
                // of the step for the next phase.
                let t_star = crossings.last().expect("a phase covers at least one state").1.clone();
                for (s, time) in crossings {
                    out.events.push(SaturationEvent { state: s, time });
                }
                out.phase_ends.push(t_star.clone());
                self.phase_index += 1;
                self.phase_start = t_star.clone();
                for s in 0..self.n {
                    self.acc[s] = Rational::zero();
                    self.saturated[s] = false;
                }
                if t_star == step_end {
                    break;
                }
                t = t_star;
            } else {
                for s in 0..self.n {
                    if self.saturated[s] {
                        continue;
                    }
                    let need = Rational::one() - &self.acc[s];
                    if !task[s].is_zero() && need <= &task[s] * &remaining {
                        self.saturated[s] = true;
                        self.acc[s] = Rational::one();
                    } else {
                        self.acc[s] += &task[s] * &remaining;
                    }
                }
                for (s, time) in crossings {
                    out.events.push(SaturationEvent { state: s, time });
                }
                break;
            }
        }
        self.now += 1;
        debug_assert!(
            self.saturated.iter().any(|&s| !s),
            "a phase keeps at least one unsaturated state between steps"
        );
        out
    }

    /// Independent recomputation of the current accumulations from scratch:
    /// integrates the task rates over `[phase_start, now]` and caps at 1.
    /// Checks that the incremental bookkeeping drifts by exactly nothing.
    pub fn recompute_acc(&self, tasks: &[Vec<Rational>]) -> Vec<Rational> {
        let end = int(self.now as i64);
        let mut acc = vec![Rational::zero(); self.n];
        for s in 0..self.n {
            let mut t = self.phase_start.clone();
            while t < end {
                let idx = t.floor().to_integer().to_usize().unwrap();
                let seg_end = int(idx as i64 + 1).min(end.clone());
                acc[s] += &tasks[idx][s] * (&seg_end - &t);
                t = seg_end;
            }
            if acc[s] > Rational::one() {
                acc[s] = Rational::one();
            }
        }
        acc
    }
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}
