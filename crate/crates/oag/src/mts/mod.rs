//! Metrical task systems on the uniform metric: every pair of distinct
//! states is at distance 1. A task assigns each state a nonnegative rational
//! processing cost; the solution serves each task at some state, paying the
//! processing cost there plus 1 for every move (including the initial move
//! away from the start state). All bookkeeping is exact rational arithmetic:
//! phase boundaries sit at fractional times and must compare exactly.

mod algorithm;
mod analyze;
mod guides;
mod ledger;
mod opt;

pub use algorithm::{classify_step, SaturationWalker, StepCase, WalkerState};
pub use analyze::{analyze_trial, MtsTrialStats};
pub use guides::{PrefixTable, SaturationGuide};
pub use ledger::{Rational, SaturationEvent, SaturationLedger, StepAdvance};
pub use opt::offline_opt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::core::{EvalError, Objective, Problem};
use crate::harness::InvalidParam;

/// A uniform MTS instance: `n` states, a sequence of cost vectors, and the
/// fixed start state.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformMtsInstance {
    n: usize,
    tasks: Vec<Vec<BigRational>>,
    start_state: usize,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MtsError {
    #[error("need at least one state")]
    NoStates,
    #[error("start state {0} out of range")]
    BadStart(usize),
    #[error("task {0} has {1} costs, expected {2}")]
    BadTaskLength(usize, usize, usize),
    #[error("task {0} has a negative cost")]
    NegativeCost(usize),
}

impl UniformMtsInstance {
    pub fn new(
        n: usize,
        tasks: Vec<Vec<BigRational>>,
        start_state: usize,
    ) -> Result<Self, MtsError> {
        if n == 0 {
            return Err(MtsError::NoStates);
        }
        if start_state >= n {
            return Err(MtsError::BadStart(start_state));
        }
        for (i, task) in tasks.iter().enumerate() {
            if task.len() != n {
                return Err(MtsError::BadTaskLength(i, task.len(), n));
            }
            if task.iter().any(|c| c.is_negative()) {
                return Err(MtsError::NegativeCost(i));
            }
        }
        Ok(UniformMtsInstance { n, tasks, start_state })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn start_state(&self) -> usize {
        self.start_state
    }

    pub fn tasks(&self) -> &[Vec<BigRational>] {
        &self.tasks
    }
}

impl Problem for UniformMtsInstance {
    type Request = Vec<BigRational>;
    type Answer = usize;

    fn objective(&self) -> Objective {
        Objective::Minimize
    }

    fn requests(&self) -> usize {
        self.tasks.len()
    }

    fn request(&self, t: usize) -> &Vec<BigRational> {
        &self.tasks[t]
    }

    fn evaluate(&self, answers: &[usize]) -> Result<BigRational, EvalError> {
        if answers.len() != self.tasks.len() {
            return Err(EvalError::LengthMismatch {
                answers: answers.len(),
                requests: self.tasks.len(),
            });
        }
        let mut total = BigRational::zero();
        let mut at = self.start_state;
        for (t, (&s, task)) in answers.iter().zip(&self.tasks).enumerate() {
            if s >= self.n {
                return Err(EvalError::IllegalAnswer {
                    time: t + 1,
                    reason: format!("state {s} out of range"),
                });
            }
            if s != at {
                total += BigRational::one();
                at = s;
            }
            total += &task[s];
        }
        Ok(total)
    }

    fn answer_in_space(&self, answer: &usize) -> bool {
        *answer < self.n
    }
}

/// Exact n-th harmonic number.
pub fn harmonic(n: usize) -> BigRational {
    crate::caching::harmonic(n)
}

/// Competitive-ratio bound for the guided saturation walker. Branches with a
/// zero denominator evaluate to infinity and drop out of the minimum.
pub fn bound_mts(beta: f64, tau: f64, n: usize) -> f64 {
    use crate::caching::div_or_inf;
    let h: f64 = (1..=n).map(|i| 1.0 / i as f64).sum();
    let b1 = div_or_inf(1.0, tau * (1.0 - beta)) + 1.0;
    let b2 = {
        let denom = (1.0 - tau * beta) * (1.0 - tau * beta);
        if denom <= 0.0 {
            f64::INFINITY
        } else {
            (1.0 - tau) / denom * h + 1.0
        }
    };
    2.0 * b1.min(b2).min(n as f64)
}

/// Consistency column (`beta = 0`): 2 + 2 min{1/tau, (1 - tau) H_n}.
pub fn consistency_mts(tau: f64, n: usize) -> f64 {
    use crate::caching::div_or_inf;
    let h: f64 = (1..=n).map(|i| 1.0 / i as f64).sum();
    2.0 + 2.0 * div_or_inf(1.0, tau).min((1.0 - tau) * h)
}

/// Robustness column (`beta = 1`): 2 + 2 min{H_n / (1 - tau), n - 1}.
pub fn robustness_mts(tau: f64, n: usize) -> f64 {
    use crate::caching::div_or_inf;
    let h: f64 = (1..=n).map(|i| 1.0 / i as f64).sum();
    2.0 + 2.0 * div_or_inf(h, 1.0 - tau).min((n - 1) as f64)
}

/// Exact-rational consistency column.
pub fn consistency_mts_exact(tau: &BigRational, n: usize) -> BigRational {
    let two = BigRational::from_integer(2.into());
    let second = (BigRational::one() - tau) * harmonic(n);
    let inner = if tau.is_zero() { second } else { (BigRational::one() / tau.clone()).min(second) };
    &two + two.clone() * inner
}

/// Exact-rational robustness column.
pub fn robustness_mts_exact(tau: &BigRational, n: usize) -> BigRational {
    let two = BigRational::from_integer(2.into());
    let cap = BigRational::from_integer((n as i64 - 1).into());
    let denom = BigRational::one() - tau;
    let inner = if denom.is_zero() { cap } else { (harmonic(n) / denom).min(cap) };
    &two + two.clone() * inner
}

/// Each cost an independent uniform multiple of 1/q in [0, 1].
pub fn gen_mts_random(
    n: usize,
    m: usize,
    q: u32,
    seed: u64,
) -> Result<UniformMtsInstance, InvalidParam> {
    use rand::{Rng, SeedableRng};
    if n < 1 || q < 1 {
        return Err(InvalidParam("random MTS generator needs n >= 1 and q >= 1".into()));
    }
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let tasks = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| BigRational::new(i64::from(rng.gen_range(0..=q)).into(), i64::from(q).into()))
                .collect()
        })
        .collect();
    UniformMtsInstance::new(n, tasks, 0).map_err(|e| InvalidParam(e.to_string()))
}

/// Unit tasks that saturate states one at a time in round-robin order; an
/// unguided walker is forced off each state as it saturates, giving about
/// n - 1 transitions per phase.
pub fn gen_mts_elevator(n: usize, rounds: usize) -> Result<UniformMtsInstance, InvalidParam> {
    if n < 1 {
        return Err(InvalidParam("elevator generator needs n >= 1".into()));
    }
    let tasks = (0..n * rounds)
        .map(|j| {
            (0..n)
                .map(|s| if s == j % n { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    UniformMtsInstance::new(n, tasks, 0).map_err(|e| InvalidParam(e.to_string()))
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|e| format!("bad numerator {s:?}: {e}"))?;
            let q: i64 = q.trim().parse().map_err(|e| format!("bad denominator {s:?}: {e}"))?;
            if q == 0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(BigRational::new(p.into(), q.into()))
        }
        None => {
            let p: i64 = s.trim().parse().map_err(|e| format!("bad integer {s:?}: {e}"))?;
            Ok(BigRational::from_integer(p.into()))
        }
    }
}

/// Parses the instance format: first line `n m start_state`, then `m` lines
/// of `n` costs, each an integer or `p/q`.
pub fn parse_instance(text: &str) -> Result<UniformMtsInstance, String> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (ln, header) = lines.next().ok_or("empty instance file")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(format!("line {}: expected `n m start_state`", ln + 1));
    }
    let n: usize = fields[0].parse().map_err(|e| format!("line {}: {e}", ln + 1))?;
    let m: usize = fields[1].parse().map_err(|e| format!("line {}: {e}", ln + 1))?;
    let start: usize = fields[2].parse().map_err(|e| format!("line {}: {e}", ln + 1))?;
    let mut tasks = Vec::with_capacity(m);
    for (ln, line) in lines {
        let costs: Result<Vec<BigRational>, String> =
            line.split_whitespace().map(parse_rational).collect();
        tasks.push(costs.map_err(|e| format!("line {}: {e}", ln + 1))?);
    }
    if tasks.len() != m {
        return Err(format!("expected {m} task lines, found {}", tasks.len()));
    }
    UniformMtsInstance::new(n, tasks, start).map_err(|e| e.to_string())
}

pub fn format_instance(instance: &UniformMtsInstance) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "{} {} {}", instance.n(), instance.requests(), instance.start_state()).unwrap();
    for task in instance.tasks() {
        let costs: Vec<String> = task
            .iter()
            .map(|c| {
                if c.is_integer() {
                    c.numer().to_string()
                } else {
                    format!("{}/{}", c.numer(), c.denom())
                }
            })
            .collect();
        writeln!(out, "{}", costs.join(" ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{run_oag, Guide, OagConfig, RngStreams};
    use crate::dtb::dtb_transform;
    use rand::{Rng, SeedableRng};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn instance(n: usize, tasks: Vec<Vec<BigRational>>, start: usize) -> UniformMtsInstance {
        UniformMtsInstance::new(n, tasks, start).unwrap()
    }

    /// Independent offline optimum: enumerate all n^m answer sequences.
    fn brute_force_opt(inst: &UniformMtsInstance) -> BigRational {
        let n = inst.n();
        let m = inst.requests();
        let mut best: Option<BigRational> = None;
        let mut answers = vec![0usize; m];
        loop {
            let value = inst.evaluate(&answers).unwrap();
            best = Some(match best {
                None => value,
                Some(b) => b.min(value),
            });
            // Odometer increment.
            let mut i = 0;
            while i < m {
                answers[i] += 1;
                if answers[i] < n {
                    break;
                }
                answers[i] = 0;
                i += 1;
            }
            if i == m {
                break;
            }
        }
        best.unwrap_or_else(BigRational::zero)
    }

    #[test]
    fn symmetric_unit_task_ends_the_phase_exactly_at_the_boundary() {
        let mut ledger = SaturationLedger::new(2);
        let adv = ledger.advance(&[q(1, 1), q(1, 1)]);
        assert_eq!(adv.phase_ends, vec![q(1, 1)]);
        assert_eq!(
            adv.events,
            vec![
                SaturationEvent { state: 0, time: q(1, 1) },
                SaturationEvent { state: 1, time: q(1, 1) },
            ]
        );
        assert_eq!(ledger.acc(0), &q(0, 1));
        assert_eq!(ledger.acc(1), &q(0, 1));
        assert_eq!(ledger.phase_index(), 1);
    }

    #[test]
    fn half_accumulated_state_saturates_mid_step_without_ending_the_phase() {
        let mut ledger = SaturationLedger::new(2);
        ledger.advance(&[q(1, 2), q(0, 1)]);
        assert_eq!(ledger.acc(0), &q(1, 2));
        let adv = ledger.advance(&[q(1, 1), q(0, 1)]);
        assert!(adv.phase_ends.is_empty(), "state 1 never saturates this step");
        assert_eq!(adv.events, vec![SaturationEvent { state: 0, time: q(3, 2) }]);
        assert!(ledger.is_saturated(0) && !ledger.is_saturated(1));
    }

    #[test]
    fn single_state_task_ends_floor_r_phases_per_step() {
        let mut ledger = SaturationLedger::new(1);
        let adv = ledger.advance(&[q(7, 2)]);
        // Saturations at 2/7, 4/7, 6/7; residual carry 1/2.
        assert_eq!(adv.phase_ends, vec![q(2, 7), q(4, 7), q(6, 7)]);
        assert_eq!(ledger.acc(0), &q(1, 2));
        assert_eq!(ledger.phase_index(), 3);
    }

    #[test]
    fn incremental_accumulation_matches_recomputation_from_scratch() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        for _ in 0..30 {
            let n = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=12);
            let inst = gen_mts_random(n, m, 4, rng.gen()).unwrap();
            let mut ledger = SaturationLedger::new(n);
            for t in 0..m {
                ledger.advance(&inst.tasks()[t]);
                let fresh = ledger.recompute_acc(inst.tasks());
                for s in 0..n {
                    assert_eq!(ledger.acc(s), &fresh[s], "state {s} at step {t}");
                }
            }
        }
    }

    #[test]
    fn step_classification_cases() {
        let inst = instance(
            3,
            vec![vec![q(0, 1), q(1, 1), q(1, 1)], vec![q(3, 1), q(1, 1), q(1, 1)]],
            0,
        );
        let ledger = SaturationLedger::new(3);
        // State 0 has zero cost: the walker stays.
        assert_eq!(classify_step(&ledger, 0, &inst.tasks()[0]), StepCase::Stay);
        // From state 1, which saturates, the unsaturated set is {0}.
        assert_eq!(
            classify_step(&ledger, 1, &inst.tasks()[0]),
            StepCase::Move { unsaturated: vec![0] }
        );
        // All states saturate: restart at the cheapest, tie-break lowest.
        let all = instance(3, vec![vec![q(3, 1), q(1, 1), q(1, 1)]], 0);
        assert_eq!(
            classify_step(&SaturationLedger::new(3), 0, &all.tasks()[0]),
            StepCase::PhaseEnd { s_min: 1 }
        );
    }

    #[test]
    fn guides_rank_by_saturation_horizon() {
        // State 0 saturates at t=1, state 1 at t=2.5, state 2 never.
        let inst = instance(
            3,
            vec![
                vec![q(1, 1), q(1, 2), q(0, 1)],
                vec![q(1, 1), q(0, 1), q(0, 1)],
                vec![q(1, 1), q(1, 1), q(0, 1)],
            ],
            0,
        );
        let mut good = SaturationGuide::latest(&inst);
        let mut bad = SaturationGuide::earliest(&inst);
        let valid = vec![0, 1, 2];
        assert_eq!(good.guidance(&inst, 0, &[], &valid), 2, "never-saturating wins");
        assert_eq!(bad.guidance(&inst, 0, &[], &valid), 0);
        assert_eq!(good.guidance(&inst, 0, &[], &[1]), 1, "singleton is forced");
        // Equal saturation times tie-break to the lowest index.
        let tie = instance(2, vec![vec![q(1, 1), q(1, 1)]], 0);
        let mut g = SaturationGuide::latest(&tie);
        assert_eq!(g.guidance(&tie, 0, &[], &[0, 1]), 0);
    }

    #[test]
    fn offline_opt_frozen_values() {
        let zero = instance(2, vec![vec![q(0, 1); 2]; 4], 0);
        assert_eq!(offline_opt(&zero), q(0, 1));
        // Alternating unit tasks: brute force over the 4 paths gives 1
        // (stay at the start state: pay r1 there, r2 is free).
        let alt = instance(2, vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]], 0);
        assert_eq!(brute_force_opt(&alt), q(1, 1));
        assert_eq!(offline_opt(&alt), q(1, 1));
        // Single expensive task: move once instead.
        let single = instance(2, vec![vec![q(5, 1), q(0, 1)]], 0);
        assert_eq!(offline_opt(&single), q(1, 1));
    }

    #[test]
    fn offline_opt_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(1..=3);
            let m = rng.gen_range(0..=6);
            let inst = gen_mts_random(n, m, 3, rng.gen()).unwrap();
            assert_eq!(offline_opt(&inst), brute_force_opt(&inst), "{inst:?}");
        }
    }

    #[test]
    fn bound_frozen_values() {
        assert_eq!(bound_mts(0.0, 1.0, 2), 2.0);
        assert_eq!(bound_mts(0.0, 1.0, 9), 2.0);
        assert_eq!(bound_mts(1.0, 1.0, 5), 10.0);
        // 2 min{3, H_4/2 + 1, 4} with H_4 = 25/12: 49/24 doubled.
        assert!((bound_mts(0.0, 0.5, 4) - 49.0 / 12.0).abs() < 1e-12);
        assert!((consistency_mts(0.5, 4) - (2.0 + 25.0 / 12.0)).abs() < 1e-12);
        assert_eq!(robustness_mts(1.0, 5), 10.0);
        assert_eq!(
            consistency_mts_exact(&q(1, 2), 4),
            q(2, 1) + q(2, 1) * (q(1, 2) * harmonic(4))
        );
    }

    #[test]
    fn generators_produce_documented_instances() {
        let zero_one = gen_mts_random(3, 20, 1, 5).unwrap();
        assert!(zero_one
            .tasks()
            .iter()
            .flatten()
            .all(|c| c == &q(0, 1) || c == &q(1, 1)));
        let elevator = gen_mts_elevator(2, 1).unwrap();
        assert_eq!(
            elevator.tasks(),
            &[vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]
        );
        let empty = gen_mts_random(2, 0, 4, 0).unwrap();
        assert_eq!(offline_opt(&empty), q(0, 1));
        assert!(gen_mts_random(0, 5, 4, 0).is_err());
        assert!(gen_mts_random(2, 5, 0, 0).is_err());
    }

    #[test]
    fn elevator_runs_respect_the_structural_invariants() {
        let inst = gen_mts_elevator(4, 6).unwrap();
        let wrapped = dtb_transform(SaturationWalker, 0.5).unwrap();
        let config = OagConfig::new(0.5, 0.5).unwrap();
        let good = SaturationGuide::latest(&inst);
        let bad = SaturationGuide::earliest(&inst);
        for seed in 0..20 {
            let mut streams = RngStreams::from_seeds(seed, seed + 100);
            let out = run_oag(
                &wrapped,
                &inst,
                &mut good.clone(),
                &mut bad.clone(),
                &config,
                &mut streams,
            )
            .unwrap();
            let stats = analyze_trial(&inst, &out.answers);
            for (phase, &t) in stats.per_phase_transitions.iter().enumerate() {
                assert!(t as usize <= inst.n() - 1, "phase {phase}: {t} transitions");
            }
            assert!(stats.max_state_processing <= q(1, 1));
            assert!(
                offline_opt(&inst) >= q(stats.completed_phases as i64 - 1, 1),
                "opt lower bound by completed phases"
            );
        }
    }

    #[test]
    fn instance_files_round_trip() {
        let inst = gen_mts_random(3, 5, 4, 77).unwrap();
        let text = format_instance(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst);
        assert!(parse_instance("2 1 0\n1/0 2\n").unwrap_err().contains("denominator"));
        assert!(parse_instance("2 2 0\n1 2\n").unwrap_err().contains("task lines"));
        assert!(UniformMtsInstance::new(2, vec![vec![q(-1, 1), q(0, 1)]], 0).is_err());
    }
}
