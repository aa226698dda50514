//! Online caching (paging): request trace model, the random-marking base
//! algorithm and its guided variant, farthest-in-future and anti-offline
//! guides, the exact offline optimum, and phase bookkeeping.

mod analyze;
mod belady;
mod guides;
mod marking;

pub use analyze::{analyze_trial, TrialAnalysis};
pub use belady::belady_opt;
pub use guides::{FarthestInFutureGuide, NearestRequestGuide};
pub use marking::{MarkingBook, RandomMarking};

use num_rational::BigRational;
use num_traits::FromPrimitive;
use thiserror::Error;

use crate::core::{EvalError, Objective, Problem};

pub type Page = u32;

/// Per-step answer: the page evicted on this request, or no eviction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CacheAnswer {
    Evict(Page),
    NoEvict,
}

/// A caching instance: capacity, initial cache content, and the request
/// sequence. Next-occurrence lookup tables are built once at construction.
#[derive(Debug, Clone)]
pub struct CacheTrace {
    k: usize,
    initial_cache: Vec<Page>,
    requests: Vec<Page>,
    /// Sorted request positions per page, for next-occurrence queries.
    positions: std::collections::BTreeMap<Page, Vec<usize>>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TraceError {
    #[error("cache capacity must be at least 1")]
    ZeroCapacity,
    #[error("initial cache has {0} pages, capacity is {1}")]
    InitialTooLarge(usize, usize),
    #[error("initial cache contains page {0} twice")]
    InitialDuplicate(Page),
}

impl CacheTrace {
    pub fn new(k: usize, initial_cache: Vec<Page>, requests: Vec<Page>) -> Result<Self, TraceError> {
        if k == 0 {
            return Err(TraceError::ZeroCapacity);
        }
        if initial_cache.len() > k {
            return Err(TraceError::InitialTooLarge(initial_cache.len(), k));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &p in &initial_cache {
            if !seen.insert(p) {
                return Err(TraceError::InitialDuplicate(p));
            }
        }
        let mut positions: std::collections::BTreeMap<Page, Vec<usize>> =
            std::collections::BTreeMap::new();
        for (i, &p) in requests.iter().enumerate() {
            positions.entry(p).or_default().push(i);
        }
        Ok(CacheTrace { k, initial_cache, requests, positions })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn initial_cache(&self) -> &[Page] {
        &self.initial_cache
    }

    pub fn requests_slice(&self) -> &[Page] {
        &self.requests
    }

    /// Position of the next request of `page` strictly after time `t`.
    pub fn next_request(&self, page: Page, t: usize) -> Option<usize> {
        let pos = self.positions.get(&page)?;
        let i = pos.partition_point(|&x| x <= t);
        pos.get(i).copied()
    }

    /// Returns a copy whose initial cache is the first `k` distinct pages of
    /// the request sequence (a warm start for traces touching at least `k`
    /// pages).
    pub fn warmed(&self) -> CacheTrace {
        let mut initial = Vec::new();
        for &p in &self.requests {
            if !initial.contains(&p) {
                initial.push(p);
                if initial.len() == self.k {
                    break;
                }
            }
        }
        CacheTrace::new(self.k, initial, self.requests.clone()).unwrap()
    }
}

impl Problem for CacheTrace {
    type Request = Page;
    type Answer = CacheAnswer;

    fn objective(&self) -> Objective {
        Objective::Minimize
    }

    fn requests(&self) -> usize {
        self.requests.len()
    }

    fn request(&self, t: usize) -> &Page {
        &self.requests[t]
    }

    fn evaluate(&self, answers: &[CacheAnswer]) -> Result<BigRational, EvalError> {
        if answers.len() != self.requests.len() {
            return Err(EvalError::LengthMismatch {
                answers: answers.len(),
                requests: self.requests.len(),
            });
        }
        let mut cache: Vec<Page> = self.initial_cache.clone();
        let mut faults = 0u64;
        for (t, (&x, answer)) in self.requests.iter().zip(answers).enumerate() {
            let hit = cache.contains(&x);
            match *answer {
                CacheAnswer::NoEvict => {}
                CacheAnswer::Evict(p) => {
                    if hit {
                        return Err(EvalError::IllegalAnswer {
                            time: t + 1,
                            reason: format!("eviction on a hit of page {x}"),
                        });
                    }
                    match cache.iter().position(|&q| q == p) {
                        Some(i) => {
                            cache.remove(i);
                        }
                        None => {
                            return Err(EvalError::IllegalAnswer {
                                time: t + 1,
                                reason: format!("evicting page {p} which is not cached"),
                            });
                        }
                    }
                }
            }
            if !hit {
                if cache.len() == self.k {
                    return Err(EvalError::IllegalAnswer {
                        time: t + 1,
                        reason: format!("fault on page {x} with a full cache and no eviction"),
                    });
                }
                cache.push(x);
                faults += 1;
            }
        }
        Ok(BigRational::from_u64(faults).unwrap())
    }

    fn answer_in_space(&self, answer: &CacheAnswer) -> bool {
        match *answer {
            CacheAnswer::NoEvict => true,
            // Any page id is in the answer space; step legality is checked by
            // evaluate and the valid set.
            CacheAnswer::Evict(_) => true,
        }
    }
}

/// One phase of the greedy partition plus its page classification relative to
/// the (deterministic) marking cache at phase start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseStats {
    pub phase_index: usize,
    /// Request index range [start, end).
    pub start: usize,
    pub end: usize,
    /// Pages requested in the phase but not cached at its start.
    pub clean: usize,
    /// Pages requested in the phase and cached at its start.
    pub returning: usize,
    /// Pages cached at phase start and never requested in the phase.
    pub vanishing: usize,
    /// Faults the analyzed run incurred inside the phase (filled by
    /// [`analyze_trial`]; zero when produced by [`phase_partition`] alone).
    pub alg_faults: usize,
    /// Optional diagnostic: lengths of the eviction chains triggered by clean
    /// pages during the phase.
    pub blame_chain_lengths: Option<Vec<usize>>,
}

/// Greedy maximal partition of the trace into phases with at most `k`
/// distinct pages, with page classification per phase.
///
/// The reference cache at a phase boundary is the distinct page set of the
/// phase that just ended: any marking-style algorithm holds exactly those
/// pages there, regardless of its random eviction choices, because every
/// non-final greedy phase touches exactly `k` distinct pages and marked pages
/// are never evicted.
pub fn phase_partition(trace: &CacheTrace) -> Vec<PhaseStats> {
    let requests = trace.requests_slice();
    let mut phases = Vec::new();
    let mut cache: Vec<Page> = trace.initial_cache().to_vec();
    let mut start = 0;
    while start < requests.len() {
        let mut distinct: Vec<Page> = Vec::with_capacity(trace.k());
        let mut end = start;
        while end < requests.len() {
            let p = requests[end];
            if !distinct.contains(&p) {
                if distinct.len() == trace.k() {
                    break;
                }
                distinct.push(p);
            }
            end += 1;
        }
        let returning = distinct.iter().filter(|p| cache.contains(p)).count();
        let clean = distinct.len() - returning;
        let vanishing = cache.iter().filter(|p| !distinct.contains(p)).count();
        phases.push(PhaseStats {
            phase_index: phases.len(),
            start,
            end,
            clean,
            returning,
            vanishing,
            alg_faults: 0,
            blame_chain_lengths: None,
        });
        cache = distinct;
        start = end;
    }
    phases
}

/// Exact k-th harmonic number.
pub fn harmonic(k: usize) -> BigRational {
    use num_traits::Zero;
    let mut h = BigRational::zero();
    for i in 1..=k {
        h += BigRational::new(1.into(), (i as i64).into());
    }
    h
}

fn harmonic_f64(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

/// Competitive-ratio bound for the guided marking algorithm. Branches with a
/// zero denominator evaluate to infinity and drop out of the minimum.
pub fn bound_caching(beta: f64, tau: f64, k: usize) -> f64 {
    let b1 = div_or_inf(2.0, tau * (1.0 - beta));
    let b2 = div_or_inf(2.0 * harmonic_f64(k), 1.0 - tau * beta);
    b1.min(b2).min(k as f64)
}

/// Consistency column (`beta = 0`): min{2/tau, 2 H_k}.
pub fn consistency_caching(tau: f64, k: usize) -> f64 {
    div_or_inf(2.0, tau).min(2.0 * harmonic_f64(k))
}

/// Robustness column (`beta = 1`): min{2 H_k / (1 - tau), k}.
pub fn robustness_caching(tau: f64, k: usize) -> f64 {
    div_or_inf(2.0 * harmonic_f64(k), 1.0 - tau).min(k as f64)
}

/// Exact-rational consistency column, `None` when unbounded.
pub fn consistency_caching_exact(tau: &BigRational, k: usize) -> Option<BigRational> {
    use num_traits::Zero;
    let two = BigRational::from_integer(2.into());
    let hk2 = two.clone() * harmonic(k);
    if tau.is_zero() {
        Some(hk2)
    } else {
        Some((two / tau.clone()).min(hk2))
    }
}

/// Exact-rational robustness column, `None` when unbounded.
pub fn robustness_caching_exact(tau: &BigRational, k: usize) -> Option<BigRational> {
    use num_traits::One;
    let kq = BigRational::from_integer((k as i64).into());
    let denom = BigRational::one() - tau.clone();
    use num_traits::Zero;
    if denom.is_zero() {
        Some(kq)
    } else {
        let b = BigRational::from_integer(2.into()) * harmonic(k) / denom;
        Some(b.min(kq))
    }
}

pub(crate) fn div_or_inf(num: f64, denom: f64) -> f64 {
    if denom <= 0.0 {
        f64::INFINITY
    } else {
        num / denom
    }
}

/// Pages `1..=k+1` requested in cyclic order, `rounds` times over.
pub fn gen_cyclic(k: usize, rounds: usize) -> Result<CacheTrace, crate::harness::InvalidParam> {
    if k == 0 {
        return Err(crate::harness::InvalidParam("cyclic generator needs k >= 1".into()));
    }
    let mut requests = Vec::with_capacity((k + 1) * rounds);
    for _ in 0..rounds {
        for p in 1..=(k as Page + 1) {
            requests.push(p);
        }
    }
    CacheTrace::new(k, Vec::new(), requests).map_err(|e| crate::harness::InvalidParam(e.to_string()))
}

/// Independent draws over pages `1..=pages` with frequency proportional to
/// `rank^-exponent`. Exponent 0 gives uniform draws.
pub fn gen_zipf(
    k: usize,
    pages: usize,
    length: usize,
    exponent: f64,
    seed: u64,
) -> Result<CacheTrace, crate::harness::InvalidParam> {
    use rand::{Rng, SeedableRng};
    if pages < 1 {
        return Err(crate::harness::InvalidParam("zipf generator needs pages >= 1".into()));
    }
    if !(exponent >= 0.0) {
        return Err(crate::harness::InvalidParam("zipf exponent must be nonnegative".into()));
    }
    let weights: Vec<f64> = (1..=pages).map(|r| (r as f64).powf(-exponent)).collect();
    let total: f64 = weights.iter().sum();
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let mut requests = Vec::with_capacity(length);
    for _ in 0..length {
        let mut x = rng.gen::<f64>() * total;
        let mut page = pages;
        for (i, w) in weights.iter().enumerate() {
            if x < *w {
                page = i + 1;
                break;
            }
            x -= *w;
        }
        requests.push(page as Page);
    }
    CacheTrace::new(k, Vec::new(), requests).map_err(|e| crate::harness::InvalidParam(e.to_string()))
}

/// Parses the trace format: first line `k`, second line the space-separated
/// initial cache (possibly an empty line), third line the request sequence.
pub fn parse_trace(text: &str) -> Result<CacheTrace, String> {
    let mut lines = text.lines();
    let k: usize = lines
        .next()
        .ok_or("empty trace file")?
        .trim()
        .parse()
        .map_err(|e| format!("line 1: bad capacity: {e}"))?;
    let initial: Result<Vec<Page>, _> = lines
        .next()
        .ok_or("line 2: missing initial cache line")?
        .split_whitespace()
        .map(|s| s.parse::<Page>())
        .collect();
    let initial = initial.map_err(|e| format!("line 2: {e}"))?;
    let requests: Result<Vec<Page>, _> = lines
        .next()
        .ok_or("line 3: missing request line")?
        .split_whitespace()
        .map(|s| s.parse::<Page>())
        .collect();
    let requests = requests.map_err(|e| format!("line 3: {e}"))?;
    CacheTrace::new(k, initial, requests).map_err(|e| e.to_string())
}

pub fn format_trace(trace: &CacheTrace) -> String {
    let initial: Vec<String> = trace.initial_cache().iter().map(|p| p.to_string()).collect();
    let requests: Vec<String> = trace.requests_slice().iter().map(|p| p.to_string()).collect();
    format!("{}\n{}\n{}\n", trace.k(), initial.join(" "), requests.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{run_oag, BaseAlgorithm, Guide, OagConfig, RngStreams, Sampler};
    use crate::dtb::dtb_transform;
    use num_traits::ToPrimitive;
    use rand::{Rng, SeedableRng};

    /// Independent offline optimum: exhaustive search over every eviction
    /// sequence. Exponential; only for tiny traces.
    fn exhaustive_min_faults(trace: &CacheTrace, cache: &mut Vec<Page>, t: usize) -> u64 {
        if t == trace.requests_slice().len() {
            return 0;
        }
        let x = trace.requests_slice()[t];
        if cache.contains(&x) {
            return exhaustive_min_faults(trace, cache, t + 1);
        }
        if cache.len() < trace.k() {
            cache.push(x);
            let best = 1 + exhaustive_min_faults(trace, cache, t + 1);
            cache.pop();
            return best;
        }
        let mut best = u64::MAX;
        for i in 0..cache.len() {
            let evicted = cache[i];
            cache[i] = x;
            best = best.min(1 + exhaustive_min_faults(trace, cache, t + 1));
            cache[i] = evicted;
        }
        best
    }

    fn random_trace(rng: &mut impl Rng, k: usize, pages: Page, len: usize, warm: bool) -> CacheTrace {
        let requests = (0..len).map(|_| rng.gen_range(1..=pages)).collect();
        let trace = CacheTrace::new(k, Vec::new(), requests).unwrap();
        if warm {
            trace.warmed()
        } else {
            trace
        }
    }

    #[test]
    fn marking_step_cases() {
        let trace = CacheTrace::new(2, vec![1, 2], vec![1, 3, 4]).unwrap();
        let mut state = MarkingBook::new(&trace);
        // Hit: no eviction, page becomes marked.
        let hit = RandomMarking.step_choice(&trace, &state, 0);
        assert_eq!(hit, crate::core::StepChoice::point(CacheAnswer::NoEvict));
        RandomMarking.apply(&trace, &mut state, 0, &CacheAnswer::NoEvict);
        assert_eq!(state.marked_count(), 1);
        // Fault with a full cache: uniform over the unmarked pages.
        let fault = RandomMarking.step_choice(&trace, &state, 1);
        assert_eq!(fault.valid, vec![CacheAnswer::Evict(2)]);
        RandomMarking.apply(&trace, &mut state, 1, &CacheAnswer::Evict(2));
        assert!(state.contains(3) && !state.contains(2));
        // Both pages marked now would clear; after the clear both are victims.
        let next = RandomMarking.step_choice(&trace, &state, 2);
        assert_eq!(next.valid, vec![CacheAnswer::Evict(1), CacheAnswer::Evict(3)]);
        assert_eq!(next.sampler, Sampler::Uniform);
    }

    #[test]
    fn cold_start_fetches_without_eviction() {
        let trace = CacheTrace::new(3, vec![], vec![5]).unwrap();
        let state = MarkingBook::new(&trace);
        let choice = RandomMarking.step_choice(&trace, &state, 0);
        assert_eq!(choice, crate::core::StepChoice::point(CacheAnswer::NoEvict));
    }

    #[test]
    fn good_guide_prefers_the_farthest_future() {
        let trace = CacheTrace::new(3, vec![1, 2, 3], vec![4, 1, 9]).unwrap();
        // Candidates: 1 next requested at t=1, 2 and 3 never again.
        let valid =
            vec![CacheAnswer::Evict(1), CacheAnswer::Evict(2), CacheAnswer::Evict(3)];
        assert_eq!(
            FarthestInFutureGuide.guidance(&trace, 0, &[], &valid),
            CacheAnswer::Evict(2),
            "never-again pages win; ties break to the lowest id"
        );
        let single = vec![CacheAnswer::Evict(3)];
        assert_eq!(FarthestInFutureGuide.guidance(&trace, 0, &[], &single), CacheAnswer::Evict(3));
        let never = CacheTrace::new(2, vec![5, 9], vec![1, 1]).unwrap();
        let both = vec![CacheAnswer::Evict(5), CacheAnswer::Evict(9)];
        assert_eq!(FarthestInFutureGuide.guidance(&never, 0, &[], &both), CacheAnswer::Evict(5));
    }

    #[test]
    fn bad_guide_prefers_the_nearest_future() {
        let trace = CacheTrace::new(3, vec![1, 2, 3], vec![4, 2, 9, 1]).unwrap();
        // 2 returns at t=1, 1 at t=3, 3 never.
        let valid =
            vec![CacheAnswer::Evict(1), CacheAnswer::Evict(2), CacheAnswer::Evict(3)];
        assert_eq!(NearestRequestGuide.guidance(&trace, 0, &[], &valid), CacheAnswer::Evict(2));
        let single = vec![CacheAnswer::Evict(3)];
        assert_eq!(NearestRequestGuide.guidance(&trace, 0, &[], &single), CacheAnswer::Evict(3));
        // All candidates never requested again: lowest id.
        let never = CacheTrace::new(2, vec![5, 9], vec![1, 1]).unwrap();
        let both = vec![CacheAnswer::Evict(5), CacheAnswer::Evict(9)];
        assert_eq!(NearestRequestGuide.guidance(&never, 0, &[], &both), CacheAnswer::Evict(5));
    }

    #[test]
    fn belady_frozen_values() {
        let alternating = CacheTrace::new(2, vec![], vec![1, 2, 1, 2, 1, 2, 1, 2, 1, 2]).unwrap();
        assert_eq!(belady_opt(&alternating), 2);
        let empty = CacheTrace::new(2, vec![], vec![]).unwrap();
        assert_eq!(belady_opt(&empty), 0);
        // Cyclic over k+1 pages: frozen against the exhaustive oracle.
        let cyc = gen_cyclic(2, 3).unwrap();
        let exhaustive = exhaustive_min_faults(&cyc, &mut cyc.initial_cache().to_vec(), 0);
        assert_eq!(exhaustive, 6);
        assert_eq!(belady_opt(&cyc), 6);
    }

    #[test]
    fn belady_matches_exhaustive_search_on_small_traces() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(42);
        for case in 0..200 {
            let k = rng.gen_range(1..=4);
            let pages = rng.gen_range(1..=5);
            let len = rng.gen_range(0..=12);
            let warm = rng.gen_bool(0.5) && pages as usize >= k;
            let trace = random_trace(&mut rng, k, pages, len, warm);
            let expected = exhaustive_min_faults(&trace, &mut trace.initial_cache().to_vec(), 0);
            assert_eq!(belady_opt(&trace), expected, "case {case}: {trace:?}");
        }
    }

    #[test]
    fn phase_partition_examples() {
        let trace = CacheTrace::new(2, vec![], vec![1, 2, 3, 1]).unwrap();
        let phases = phase_partition(&trace);
        assert_eq!(phases.len(), 2);
        assert_eq!((phases[0].start, phases[0].end), (0, 2));
        assert_eq!((phases[1].start, phases[1].end), (2, 4));
        // A trace with at most k distinct pages is a single phase.
        let small = CacheTrace::new(3, vec![], vec![1, 2, 1, 2, 1]).unwrap();
        assert_eq!(phase_partition(&small).len(), 1);
        // Cyclic with k = 3: clean counts 3 (cold), 1, 1.
        let cyc = gen_cyclic(3, 2).unwrap();
        let phases = phase_partition(&cyc);
        let clean: Vec<usize> = phases.iter().map(|p| p.clean).collect();
        assert_eq!(clean, vec![3, 1, 1]);
        // vanishing = clean holds for full phases; the final short phase
        // leaves two cached pages unrequested.
        let vanishing: Vec<usize> = phases.iter().map(|p| p.vanishing).collect();
        assert_eq!(vanishing, vec![0, 1, 2]);
    }

    #[test]
    fn bound_frozen_values() {
        assert_eq!(bound_caching(0.0, 1.0, 7), 2.0);
        assert_eq!(bound_caching(1.0, 1.0, 5), 5.0);
        assert_eq!(bound_caching(0.0, 0.5, 10), 4.0);
        // H_10 = 7381/2520 exactly.
        assert_eq!(harmonic(10), BigRational::new(7381.into(), 2520.into()));
        assert!((2.0_f64 * 7381.0 / 2520.0 - 5.857936508).abs() < 1e-8);
        // Table columns.
        assert_eq!(consistency_caching(1.0, 10), 2.0);
        assert!((robustness_caching(0.3, 10) - (2.0 * (7381.0 / 2520.0) / 0.7)).abs() < 1e-12);
        assert_eq!(robustness_caching(1.0, 10), 10.0);
    }

    #[test]
    fn generators_produce_documented_traces() {
        assert_eq!(gen_cyclic(2, 2).unwrap().requests_slice(), &[1, 2, 3, 1, 2, 3]);
        assert_eq!(gen_cyclic(1, 1).unwrap().requests_slice(), &[1, 2]);
        assert!(gen_cyclic(0, 1).is_err());
        let zipf = gen_zipf(2, 5, 100, 0.0, 9).unwrap();
        assert_eq!(zipf.requests_slice().len(), 100);
        assert!(zipf.requests_slice().iter().all(|&p| (1..=5).contains(&p)));
        assert_eq!(
            zipf.requests_slice(),
            gen_zipf(2, 5, 100, 0.0, 9).unwrap().requests_slice(),
            "same seed, same trace"
        );
        assert!(gen_zipf(2, 0, 10, 1.0, 0).is_err());
        assert!(gen_zipf(2, 5, 10, -1.0, 0).is_err());
    }

    #[test]
    fn marking_invariants_hold_after_every_request() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for _ in 0..50 {
            let warm = rng.gen_bool(0.5);
            let trace = random_trace(&mut rng, 3, 6, 40, warm);
            let beta = rng.gen::<f64>();
            let tau = rng.gen::<f64>();
            let wrapped = dtb_transform(RandomMarking, tau).unwrap();
            let config = OagConfig::new(beta, tau).unwrap();
            let mut streams = RngStreams::from_seeds(rng.gen(), rng.gen());
            let out = run_oag(
                &wrapped,
                &trace,
                &mut FarthestInFutureGuide,
                &mut NearestRequestGuide,
                &config,
                &mut streams,
            )
            .unwrap();
            // Replay the bookkeeping and check the state invariants after
            // every request.
            let mut book = MarkingBook::new(&trace);
            for (t, answer) in out.answers.iter().enumerate() {
                let x = trace.requests_slice()[t];
                book.step(x, answer);
                assert!(book.contains(x), "requested page must be cached");
                assert!(book.cached().count() <= trace.k());
                let marked = book.marked_count();
                assert!(
                    (book.contains(x) && marked > 0) || marked == 0,
                    "either the request is marked or the global unmark just fired"
                );
                assert!(marked < trace.k(), "k marked pages must trigger the unmark");
            }
        }
    }

    #[test]
    fn perfect_trust_faults_equal_clean_counts() {
        let trace = gen_cyclic(3, 5).unwrap().warmed();
        let wrapped = dtb_transform(RandomMarking, 1.0).unwrap();
        let config = OagConfig::new(0.0, 1.0).unwrap();
        for seed in 0..10 {
            let mut streams = RngStreams::from_seeds(seed, seed + 50);
            let out = run_oag(
                &wrapped,
                &trace,
                &mut FarthestInFutureGuide,
                &mut NearestRequestGuide,
                &config,
                &mut streams,
            )
            .unwrap();
            let analysis = analyze_trial(&trace, &out.answers);
            for phase in &analysis.phases {
                assert_eq!(
                    phase.alg_faults, phase.clean,
                    "phase {}: faults {} vs clean {}",
                    phase.phase_index, phase.alg_faults, phase.clean
                );
            }
        }
    }

    #[test]
    fn opt_pays_at_least_half_the_clean_pages_amortized() {
        for trace in [gen_cyclic(3, 4).unwrap(), gen_cyclic(2, 6).unwrap()] {
            let phases = phase_partition(&trace);
            let min_clean = phases.iter().map(|p| p.clean).min().unwrap();
            let lower = (phases.len() - 1) as f64 * min_clean as f64 / 2.0;
            assert!(belady_opt(&trace) as f64 >= lower);
        }
    }

    #[test]
    fn blame_chains_stay_near_the_harmonic_bound() {
        let trace = gen_cyclic(10, 20).unwrap().warmed();
        let (beta, tau) = (0.3, 0.6);
        let wrapped = dtb_transform(RandomMarking, tau).unwrap();
        let config = OagConfig::new(beta, tau).unwrap();
        let mut lengths: Vec<f64> = Vec::new();
        for seed in 0..60 {
            let mut streams = RngStreams::from_seeds(2 * seed, 2 * seed + 1);
            let out = run_oag(
                &wrapped,
                &trace,
                &mut FarthestInFutureGuide,
                &mut NearestRequestGuide,
                &config,
                &mut streams,
            )
            .unwrap();
            for phase in analyze_trial(&trace, &out.answers).phases {
                for len in phase.blame_chain_lengths.unwrap() {
                    lengths.push(len as f64);
                }
            }
        }
        let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
        let var = lengths.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
            / (lengths.len() as f64 - 1.0);
        let stderr = (var / lengths.len() as f64).sqrt();
        let h10 = 7381.0 / 2520.0;
        let bound = h10 / (1.0 - beta * tau);
        assert!(mean <= bound + 3.0 * stderr, "mean {mean} vs bound {bound}");
    }

    #[test]
    fn trace_files_round_trip_even_with_an_empty_initial_cache() {
        let cold = gen_cyclic(2, 2).unwrap();
        let text = format_trace(&cold);
        assert_eq!(text, "2\n\n1 2 3 1 2 3\n");
        let parsed = parse_trace(&text).unwrap();
        assert_eq!(parsed.requests_slice(), cold.requests_slice());
        assert!(parsed.initial_cache().is_empty());
        let warm = gen_cyclic(2, 2).unwrap().warmed();
        let reparsed = parse_trace(&format_trace(&warm)).unwrap();
        assert_eq!(reparsed.initial_cache(), warm.initial_cache());
        assert!(parse_trace("2\n1 2\nnot-a-page\n").unwrap_err().contains("line 3"));
        assert!(CacheTrace::new(2, vec![1, 2, 3], vec![]).is_err());
        assert!(CacheTrace::new(2, vec![1, 1], vec![]).is_err());
    }
}
