//! Online bipartite matching under adversarial arrival order.
//!
//! Offline nodes are `0..n_offline`, online nodes `0..n_online`; online nodes
//! arrive in the order given by the `arrival` permutation and must be matched
//! (or left unmatched) irrevocably. The payoff is the matching size.

mod guides;
mod oracle;
mod ranking;

pub use guides::{GreedyHarmGuide, MstarGuide, StealFutureGuide};
pub use oracle::{max_matching, OptimalMatching};
pub use ranking::{Ranking, RankingState};

use num_rational::BigRational;
use num_traits::FromPrimitive;
use thiserror::Error;

use crate::core::{EvalError, Objective, Problem};

/// Per-step answer: match the arriving node to an offline node, or leave it
/// unmatched. The distinguished no-match answer keeps answer sequences at
/// full length even when an arriving node has no available neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchAnswer {
    Match(usize),
    NoMatch,
}

/// A bipartite instance: adjacency lists of the online side plus the arrival
/// order (a permutation of the online nodes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteInstance {
    n_offline: usize,
    n_online: usize,
    adjacency: Vec<Vec<usize>>,
    arrival: Vec<usize>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum InstanceError {
    #[error("adjacency list count {0} does not match n_online {1}")]
    AdjacencyCount(usize, usize),
    #[error("neighbor {v} of online node {u} out of range")]
    NeighborRange { u: usize, v: usize },
    #[error("duplicate neighbor {v} of online node {u}")]
    DuplicateNeighbor { u: usize, v: usize },
    #[error("arrival is not a permutation of the online nodes")]
    BadArrival,
}

impl BipartiteInstance {
    /// Builds an instance, validating neighbor ranges (sorted, no duplicates)
    /// and that `arrival` is a permutation.
    pub fn new(
        n_offline: usize,
        n_online: usize,
        mut adjacency: Vec<Vec<usize>>,
        arrival: Vec<usize>,
    ) -> Result<Self, InstanceError> {
        if adjacency.len() != n_online {
            return Err(InstanceError::AdjacencyCount(adjacency.len(), n_online));
        }
        for (u, neigh) in adjacency.iter_mut().enumerate() {
            neigh.sort_unstable();
            for w in neigh.windows(2) {
                if w[0] == w[1] {
                    return Err(InstanceError::DuplicateNeighbor { u, v: w[0] });
                }
            }
            if let Some(&v) = neigh.last() {
                if v >= n_offline {
                    return Err(InstanceError::NeighborRange { u, v });
                }
            }
        }
        let mut seen = vec![false; n_online];
        if arrival.len() != n_online {
            return Err(InstanceError::BadArrival);
        }
        for &u in &arrival {
            if u >= n_online || seen[u] {
                return Err(InstanceError::BadArrival);
            }
            seen[u] = true;
        }
        Ok(BipartiteInstance { n_offline, n_online, adjacency, arrival })
    }

    pub fn n_offline(&self) -> usize {
        self.n_offline
    }

    pub fn n_online(&self) -> usize {
        self.n_online
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn arrival(&self) -> &[usize] {
        &self.arrival
    }

    /// Arrival position of online node `u`.
    pub fn arrival_pos(&self, u: usize) -> usize {
        self.arrival.iter().position(|&x| x == u).unwrap()
    }

    /// Returns a copy with one node isolated: its incident edges are removed
    /// but indices are preserved. An isolated online node still arrives and
    /// is forced to answer no-match, which leaves the expected matching size
    /// identical to outright removal.
    pub fn isolate_node(&self, node: NodeRef) -> BipartiteInstance {
        let mut adjacency = self.adjacency.clone();
        match node {
            NodeRef::Online(u) => adjacency[u].clear(),
            NodeRef::Offline(v) => {
                for neigh in adjacency.iter_mut() {
                    neigh.retain(|&x| x != v);
                }
            }
        }
        BipartiteInstance {
            n_offline: self.n_offline,
            n_online: self.n_online,
            adjacency,
            arrival: self.arrival.clone(),
        }
    }
}

/// A node on either side of the bipartition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRef {
    Online(usize),
    Offline(usize),
}

impl Problem for BipartiteInstance {
    type Request = usize;
    type Answer = MatchAnswer;

    fn objective(&self) -> Objective {
        Objective::Maximize
    }

    fn requests(&self) -> usize {
        self.n_online
    }

    fn request(&self, t: usize) -> &usize {
        &self.arrival[t]
    }

    fn evaluate(&self, answers: &[MatchAnswer]) -> Result<BigRational, EvalError> {
        if answers.len() != self.n_online {
            return Err(EvalError::LengthMismatch {
                answers: answers.len(),
                requests: self.n_online,
            });
        }
        let mut taken = vec![false; self.n_offline];
        let mut size = 0u64;
        for (t, answer) in answers.iter().enumerate() {
            let u = self.arrival[t];
            match *answer {
                MatchAnswer::NoMatch => {}
                MatchAnswer::Match(v) => {
                    if !self.adjacency[u].contains(&v) {
                        return Err(EvalError::IllegalAnswer {
                            time: t + 1,
                            reason: format!("({u}, {v}) is not an edge"),
                        });
                    }
                    if taken[v] {
                        return Err(EvalError::IllegalAnswer {
                            time: t + 1,
                            reason: format!("offline node {v} is already matched"),
                        });
                    }
                    taken[v] = true;
                    size += 1;
                }
            }
        }
        Ok(BigRational::from_u64(size).unwrap())
    }

    fn answer_in_space(&self, answer: &MatchAnswer) -> bool {
        match *answer {
            MatchAnswer::NoMatch => true,
            MatchAnswer::Match(v) => v < self.n_offline,
        }
    }
}

/// True when no remaining edge has both endpoints unmatched.
pub fn is_maximal(instance: &BipartiteInstance, answers: &[MatchAnswer]) -> bool {
    let mut matched_v = vec![false; instance.n_offline];
    let mut matched_u = vec![false; instance.n_online];
    for (t, answer) in answers.iter().enumerate() {
        if let MatchAnswer::Match(v) = *answer {
            matched_v[v] = true;
            matched_u[instance.arrival[t]] = true;
        }
    }
    for u in 0..instance.n_online {
        if !matched_u[u] && instance.adjacency[u].iter().any(|&v| !matched_v[v]) {
            return false;
        }
    }
    true
}

/// Competitive-ratio bound for the guided ranking algorithm as a function of
/// `(beta, tau)`. The `tau = 1` singularity of the second branch is resolved
/// by its analytic limit `1 - beta`.
pub fn bound_matching(beta: f64, tau: f64) -> f64 {
    let guided = if tau >= 1.0 {
        1.0 - beta
    } else {
        (1.0 - beta * tau) * (1.0 - (-(1.0 - tau)).exp()) / (1.0 - tau)
    };
    guided.max(0.5)
}

/// Consistency column (the bound at `beta = 0`).
pub fn consistency_matching(tau: f64) -> f64 {
    if tau >= 1.0 {
        1.0
    } else {
        (1.0 - (-(1.0 - tau)).exp()) / (1.0 - tau)
    }
}

/// Robustness column (the bound at `beta = 1`).
pub fn robustness_matching(tau: f64) -> f64 {
    (1.0 - (-(1.0 - tau)).exp()).max(0.5)
}

/// The hard instance family for ranking: online node `i` is adjacent to all
/// offline nodes `j >= i`, arrival in index order.
pub fn gen_upper_triangular(n: usize) -> BipartiteInstance {
    let adjacency = (0..n).map(|i| (i..n).collect()).collect();
    BipartiteInstance::new(n, n, adjacency, (0..n).collect()).unwrap()
}

/// A hidden perfect matching plus independent extra edges with probability
/// `extra_edge_prob`; the arrival order is shuffled from the same seed.
pub fn gen_random_perfect(n: usize, extra_edge_prob: f64, seed: u64) -> BipartiteInstance {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let mut partner: Vec<usize> = (0..n).collect();
    partner.shuffle(&mut rng);
    let mut adjacency: Vec<Vec<usize>> = Vec::with_capacity(n);
    for u in 0..n {
        let mut neigh = vec![partner[u]];
        for v in 0..n {
            if v != partner[u] && rng.gen::<f64>() < extra_edge_prob {
                neigh.push(v);
            }
        }
        adjacency.push(neigh);
    }
    let mut arrival: Vec<usize> = (0..n).collect();
    arrival.shuffle(&mut rng);
    BipartiteInstance::new(n, n, adjacency, arrival).unwrap()
}

/// Parses the plain-text instance format: header line `n_offline n_online`,
/// one `u: v v ...` line per online node, and a final `arrival: ...` line.
/// All indices 0-based.
pub fn parse_instance(text: &str) -> Result<BipartiteInstance, String> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (ln, header) = lines.next().ok_or("empty instance file")?;
    let mut it = header.split_whitespace();
    let n_offline: usize = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or(format!("line {}: expected `n_offline n_online`", ln + 1))?;
    let n_online: usize = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or(format!("line {}: expected `n_offline n_online`", ln + 1))?;
    let mut adjacency = vec![Vec::new(); n_online];
    let mut arrival = Vec::new();
    for (ln, line) in lines {
        let (head, rest) = line
            .split_once(':')
            .ok_or(format!("line {}: expected `u:` or `arrival:` prefix", ln + 1))?;
        let values: Result<Vec<usize>, _> =
            rest.split_whitespace().map(|s| s.parse::<usize>()).collect();
        let values = values.map_err(|e| format!("line {}: {e}", ln + 1))?;
        if head.trim() == "arrival" {
            arrival = values;
        } else {
            let u: usize = head
                .trim()
                .parse()
                .map_err(|e| format!("line {}: bad online node id: {e}", ln + 1))?;
            if u >= n_online {
                return Err(format!("line {}: online node {u} out of range", ln + 1));
            }
            adjacency[u] = values;
        }
    }
    BipartiteInstance::new(n_offline, n_online, adjacency, arrival).map_err(|e| e.to_string())
}

/// Writes the format accepted by [`parse_instance`].
pub fn format_instance(instance: &BipartiteInstance) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "{} {}", instance.n_offline, instance.n_online).unwrap();
    for u in 0..instance.n_online {
        let neigh: Vec<String> = instance.adjacency[u].iter().map(|v| v.to_string()).collect();
        writeln!(out, "{u}: {}", neigh.join(" ")).unwrap();
    }
    let arr: Vec<String> = instance.arrival.iter().map(|u| u.to_string()).collect();
    writeln!(out, "arrival: {}", arr.join(" ")).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{
        run_oag, BaseAlgorithm, Guide, OagConfig, Problem, RngStreams, Sampler, StepChoice,
    };
    use crate::dtb::dtb_transform;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    #[test]
    fn ranking_step_picks_the_lowest_rank_neighbor() {
        let instance =
            BipartiteInstance::new(8, 1, vec![vec![3, 7]], vec![0]).unwrap();
        let mut state = Ranking.init(&instance, &mut RngStreams::from_seeds(0, 0).alg);
        state.rank[3] = 5;
        state.rank[7] = 2;
        let choice = Ranking.step_choice(&instance, &state, 0);
        assert_eq!(choice.valid, vec![MatchAnswer::Match(3), MatchAnswer::Match(7)]);
        assert_eq!(choice.sampler, Sampler::Point(1), "rank 2 beats rank 5");
    }

    #[test]
    fn ranking_step_forced_cases() {
        let instance = BipartiteInstance::new(2, 2, vec![vec![0], vec![0]], vec![0, 1]).unwrap();
        let mut streams = RngStreams::from_seeds(0, 0);
        let mut state = Ranking.init(&instance, &mut streams.alg);
        let first = Ranking.step_choice(&instance, &state, 0);
        assert_eq!(first.valid, vec![MatchAnswer::Match(0)]);
        Ranking.apply(&instance, &mut state, 0, &MatchAnswer::Match(0));
        // Second arrival has no available neighbor left.
        let second = Ranking.step_choice(&instance, &state, 1);
        assert_eq!(second, StepChoice::point(MatchAnswer::NoMatch));
    }

    #[test]
    fn good_guide_suggests_the_fixed_matching_regardless_of_availability() {
        let instance = gen_upper_triangular(3);
        let opt = max_matching(&instance);
        let mut guide = MstarGuide::new(opt);
        // Even with a valid set that excludes the partner, the suggestion
        // stands; repeated queries agree.
        let valid = vec![MatchAnswer::Match(2)];
        let a = guide.guidance(&instance, 0, &[], &valid);
        let b = guide.guidance(&instance, 0, &[], &valid);
        assert_eq!(a, MatchAnswer::Match(0));
        assert_eq!(a, b);
    }

    #[test]
    fn good_guide_answers_no_match_for_unmatched_nodes() {
        // Two online nodes share the single offline node; the second one is
        // unmatched under the deterministic tie-break.
        let instance = BipartiteInstance::new(1, 2, vec![vec![0], vec![0]], vec![0, 1]).unwrap();
        let opt = max_matching(&instance);
        assert_eq!(opt.of_online(0), Some(0));
        assert_eq!(opt.of_online(1), None);
        let mut guide = MstarGuide::new(opt);
        let valid = vec![MatchAnswer::Match(0)];
        assert_eq!(guide.guidance(&instance, 1, &[], &valid), MatchAnswer::NoMatch);
    }

    #[test]
    fn bad_guide_forced_and_stealing_cases() {
        let instance = gen_upper_triangular(3);
        let opt = max_matching(&instance);
        let mut guide = GreedyHarmGuide::new(opt);
        // Only the partner is available: fall back to it.
        let only = vec![MatchAnswer::Match(0)];
        assert_eq!(guide.guidance(&instance, 0, &[], &only), MatchAnswer::Match(0));
        // Both future partners available: steal the later arriver's (v2,
        // partner of u2 which arrives after u1).
        let all = vec![MatchAnswer::Match(0), MatchAnswer::Match(1), MatchAnswer::Match(2)];
        assert_eq!(guide.guidance(&instance, 0, &[], &all), MatchAnswer::Match(2));
        // Degenerate no-match step.
        let none = vec![MatchAnswer::NoMatch];
        assert_eq!(guide.guidance(&instance, 0, &[], &none), MatchAnswer::NoMatch);
    }

    /// Forces a chosen guidance at step 0 and follows the stealing adversary
    /// afterwards.
    #[derive(Clone)]
    struct OverrideFirst {
        first: MatchAnswer,
        inner: GreedyHarmGuide,
    }

    impl Guide<BipartiteInstance> for OverrideFirst {
        fn guidance(
            &mut self,
            problem: &BipartiteInstance,
            t: usize,
            history: &[MatchAnswer],
            valid: &[MatchAnswer],
        ) -> MatchAnswer {
            if t == 0 {
                self.first
            } else {
                self.inner.guidance(problem, t, history, valid)
            }
        }
    }

    fn fully_trusted_bad_run<G: Guide<BipartiteInstance> + Clone>(
        instance: &BipartiteInstance,
        bad: &G,
    ) -> u64 {
        let opt = max_matching(instance);
        let wrapped = dtb_transform(Ranking, 1.0).unwrap();
        let config = OagConfig::new(1.0, 1.0).unwrap();
        let mut streams = RngStreams::from_seeds(1, 1);
        let out = run_oag(
            &wrapped,
            instance,
            &mut MstarGuide::new(opt),
            &mut bad.clone(),
            &config,
            &mut streams,
        )
        .unwrap();
        out.value.to_f64().unwrap() as u64
    }

    #[test]
    fn greedy_harm_damage_on_3x3_brute_force() {
        // Brute force over every 3x3 instance with a perfect matching, under
        // full trust in the adversary. The stealing rule is a heuristic: it
        // is not always the most damaging first choice (on some instances
        // stealing an earlier arriver's only neighbor hurts more), but it
        // must always cut at least one perfect-matching instance down and
        // never drop below the maximality floor of ceil(n/2).
        let mut strictly_harmful = 0u32;
        for mask in 0u32..512 {
            let adjacency: Vec<Vec<usize>> =
                (0..3).map(|u| (0..3).filter(|v| mask >> (u * 3 + v) & 1 == 1).collect()).collect();
            let instance = BipartiteInstance::new(3, 3, adjacency, vec![0, 1, 2]).unwrap();
            let opt = max_matching(&instance);
            if opt.size() < 3 {
                continue;
            }
            let greedy = GreedyHarmGuide::new(opt.clone());
            let own = fully_trusted_bad_run(&instance, &greedy);
            assert!(own >= 2, "mask {mask}: maximality floor violated");
            if own < 3 {
                strictly_harmful += 1;
            }
            // The first-step deviations bound how damaging the heuristic can
            // be; it stays within one edge of the most damaging deviation.
            for &v in instance.neighbors(0) {
                let alternative =
                    OverrideFirst { first: MatchAnswer::Match(v), inner: greedy.clone() };
                let forced = fully_trusted_bad_run(&instance, &alternative);
                assert!(own <= forced + 1, "mask {mask}: {own} vs forced {forced}");
            }
        }
        assert!(strictly_harmful > 0, "the adversary never did damage");
    }

    #[test]
    fn max_matching_certified_sizes() {
        let complete =
            BipartiteInstance::new(3, 3, vec![vec![0, 1, 2]; 3], vec![0, 1, 2]).unwrap();
        assert_eq!(max_matching(&complete).size(), 3);
        let isolated = BipartiteInstance::new(1, 1, vec![vec![]], vec![0]).unwrap();
        assert_eq!(max_matching(&isolated).size(), 0);
        assert_eq!(max_matching(&gen_upper_triangular(5)).size(), 5);
    }

    #[test]
    fn bound_values_match_the_closed_form() {
        assert!((bound_matching(0.0, 0.0) - 0.632120559).abs() < 1e-6);
        assert!((bound_matching(0.0, 0.5) - 0.786938681).abs() < 1e-6);
        assert_eq!(bound_matching(1.0, 1.0), 0.5);
        // tau -> 1 limit equals 1 - beta when that beats 1/2.
        assert!((bound_matching(0.2, 1.0) - 0.8).abs() < 1e-12);
        // Table columns at the endpoints.
        assert!((consistency_matching(0.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert_eq!(robustness_matching(1.0), 0.5);
    }

    #[test]
    fn generators_produce_the_documented_edge_sets() {
        let one = gen_upper_triangular(1);
        assert_eq!(one.neighbors(0), &[0]);
        let three = gen_upper_triangular(3);
        let edges: Vec<(usize, usize)> = (0..3)
            .flat_map(|u| three.neighbors(u).iter().map(move |&v| (u, v)))
            .collect();
        assert_eq!(edges, vec![(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]);
        // Probability zero: the hidden perfect matching is the entire edge set.
        let pm = gen_random_perfect(6, 0.0, 99);
        for u in 0..6 {
            assert_eq!(pm.neighbors(u).len(), 1);
        }
        assert_eq!(max_matching(&pm).size(), 6);
    }

    #[test]
    fn perfect_trust_good_guidance_is_exactly_optimal() {
        let instance = gen_random_perfect(50, 0.3, 5);
        let opt = max_matching(&instance);
        assert_eq!(opt.size(), 50);
        let wrapped = dtb_transform(Ranking, 1.0).unwrap();
        let config = OagConfig::new(0.0, 1.0).unwrap();
        for seed in 0..20 {
            let mut streams = RngStreams::from_seeds(seed, seed + 77);
            let out = run_oag(
                &wrapped,
                &instance,
                &mut MstarGuide::new(opt.clone()),
                &mut GreedyHarmGuide::new(opt.clone()),
                &config,
                &mut streams,
            )
            .unwrap();
            assert_eq!(out.value.to_f64().unwrap(), 50.0);
        }
    }

    #[test]
    fn instance_files_round_trip_and_report_parse_locations() {
        let instance = gen_random_perfect(7, 0.4, 3);
        let text = format_instance(&instance);
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(instance, parsed);
        let err = parse_instance("2 2\n0: x\narrival: 0 1\n").unwrap_err();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn isolating_a_node_preserves_indices_and_drops_edges() {
        let instance = gen_upper_triangular(3);
        let no_v1 = instance.isolate_node(NodeRef::Offline(1));
        assert_eq!(no_v1.neighbors(0), &[0, 2]);
        assert_eq!(no_v1.neighbors(1), &[2]);
        let no_u0 = instance.isolate_node(NodeRef::Online(0));
        assert!(no_u0.neighbors(0).is_empty());
        assert_eq!(no_u0.n_online(), 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Every guided run outputs a maximal matching, whatever the
        /// parameters and adversary behavior.
        #[test]
        fn guided_runs_are_always_maximal(
            n in 1usize..9,
            extra in 0.0f64..1.0,
            seed in 0u64..1000,
            beta in 0.0f64..=1.0,
            tau in 0.0f64..=1.0,
        ) {
            let instance = gen_random_perfect(n, extra, seed);
            let opt = max_matching(&instance);
            let wrapped = dtb_transform(Ranking, tau).unwrap();
            let config = OagConfig::new(beta, tau).unwrap();
            let mut streams = RngStreams::from_seeds(seed ^ 0xabc, seed ^ 0xdef);
            let out = run_oag(
                &wrapped,
                &instance,
                &mut MstarGuide::new(opt.clone()),
                &mut GreedyHarmGuide::new(opt),
                &config,
                &mut streams,
            ).unwrap();
            prop_assert!(is_maximal(&instance, &out.answers));
            // Maximality implies at least half the optimum.
            let opt_size = max_matching(&instance).size() as f64;
            prop_assert!(out.value.to_f64().unwrap() >= opt_size / 2.0);
        }
    }
}
