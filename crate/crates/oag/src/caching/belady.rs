//! Exact offline optimum: evict the cached page whose next request is
//! farthest in the future (never-requested pages first). Returns the minimum
//! number of fetches, compulsory misses included.

use super::{CacheTrace, Page};

pub fn belady_opt(trace: &CacheTrace) -> u64 {
    let mut cache: Vec<Page> = trace.initial_cache().to_vec();
    let mut faults = 0u64;
    for (t, &x) in trace.requests_slice().iter().enumerate() {
        if cache.contains(&x) {
            continue;
        }
        faults += 1;
        if cache.len() == trace.k() {
            let (i, _) = cache
                .iter()
                .enumerate()
                .max_by_key(|&(_, &p)| {
                    (trace.next_request(p, t).map_or(usize::MAX, |i| i), std::cmp::Reverse(p))
                })
                .unwrap();
            cache.swap_remove(i);
        }
        cache.push(x);
    }
    faults
}
