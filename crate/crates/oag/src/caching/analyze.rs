//! Post-hoc analysis of one caching run: fault counts per phase and the
//! blame-chain diagnostic.
//!
//! A blame chain starts at the eviction triggered by a fault of a page that
//! was not in the reference cache at phase start (a clean page); whenever an
//! evicted page faults again within the same phase, its eviction extends the
//! same chain. A chain ends when its last evicted page is not requested again
//! in the phase. Chain length counts evictions.

use std::collections::HashMap;

use super::{phase_partition, CacheAnswer, CacheTrace, Page, PhaseStats};

#[derive(Debug, Clone)]
pub struct TrialAnalysis {
    pub phases: Vec<PhaseStats>,
    pub total_faults: u64,
}

pub fn analyze_trial(trace: &CacheTrace, answers: &[CacheAnswer]) -> TrialAnalysis {
    let mut phases = phase_partition(trace);
    let mut cache: Vec<Page> = trace.initial_cache().to_vec();
    let mut total_faults = 0u64;
    for phase in phases.iter_mut() {
        let mut faults = 0usize;
        let mut chains: Vec<usize> = Vec::new();
        let mut chain_of_evicted: HashMap<Page, usize> = HashMap::new();
        for t in phase.start..phase.end {
            let x = trace.requests_slice()[t];
            let hit = cache.contains(&x);
            if let CacheAnswer::Evict(p) = answers[t] {
                cache.retain(|&q| q != p);
                // A fault of a previously evicted page extends that page's
                // chain; a fault of a fresh page opens a new chain.
                let chain = match chain_of_evicted.remove(&x) {
                    Some(c) => c,
                    None => {
                        chains.push(0);
                        chains.len() - 1
                    }
                };
                chains[chain] += 1;
                chain_of_evicted.insert(p, chain);
            }
            if !hit {
                cache.push(x);
                faults += 1;
                total_faults += 1;
            }
        }
        phase.alg_faults = faults;
        phase.blame_chain_lengths = Some(chains);
    }
    TrialAnalysis { phases, total_faults }
}
