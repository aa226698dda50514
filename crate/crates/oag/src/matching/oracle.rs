//! Exact maximum matching via augmenting paths, with a certification re-run.

use super::BipartiteInstance;

/// A fixed maximum matching with partner lookup in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalMatching {
    pub pairs: Vec<(usize, usize)>,
    online_partner: Vec<Option<usize>>,
    offline_partner: Vec<Option<usize>>,
}

impl OptimalMatching {
    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    /// Partner of online node `u`, if matched.
    pub fn of_online(&self, u: usize) -> Option<usize> {
        self.online_partner[u]
    }

    /// Partner of offline node `v`, if matched.
    pub fn of_offline(&self, v: usize) -> Option<usize> {
        self.offline_partner[v]
    }

    /// Nodes (either side) left unmatched.
    pub fn unmatched(&self) -> Vec<super::NodeRef> {
        let mut out = Vec::new();
        for (u, p) in self.online_partner.iter().enumerate() {
            if p.is_none() {
                out.push(super::NodeRef::Online(u));
            }
        }
        for (v, p) in self.offline_partner.iter().enumerate() {
            if p.is_none() {
                out.push(super::NodeRef::Offline(v));
            }
        }
        out
    }
}

fn augment(
    instance: &BipartiteInstance,
    u: usize,
    visited: &mut [bool],
    offline_partner: &mut [Option<usize>],
) -> bool {
    for &v in instance.neighbors(u) {
        if visited[v] {
            continue;
        }
        visited[v] = true;
        let free = match offline_partner[v] {
            None => true,
            Some(w) => augment(instance, w, visited, offline_partner),
        };
        if free {
            offline_partner[v] = Some(u);
            return true;
        }
    }
    false
}

fn kuhn_size(instance: &BipartiteInstance, order: impl Iterator<Item = usize>) -> Vec<Option<usize>> {
    let mut offline_partner = vec![None; instance.n_offline()];
    let mut visited = vec![false; instance.n_offline()];
    for u in order {
        visited.iter_mut().for_each(|x| *x = false);
        augment(instance, u, &mut visited, &mut offline_partner);
    }
    offline_partner
}

/// Maximum-cardinality matching with deterministic tie-breaking (augmenting
/// in increasing online-node order). The size is certified against an
/// independent re-run that augments in decreasing order.
pub fn max_matching(instance: &BipartiteInstance) -> OptimalMatching {
    let offline_partner = kuhn_size(instance, 0..instance.n_online());
    let check = kuhn_size(instance, (0..instance.n_online()).rev());
    let size = offline_partner.iter().filter(|p| p.is_some()).count();
    let check_size = check.iter().filter(|p| p.is_some()).count();
    assert_eq!(size, check_size, "matching oracle certification failed");

    let mut online_partner = vec![None; instance.n_online()];
    let mut pairs = Vec::with_capacity(size);
    for (v, p) in offline_partner.iter().enumerate() {
        if let Some(u) = *p {
            online_partner[u] = Some(v);
        }
    }
    for (u, p) in online_partner.iter().enumerate() {
        if let Some(v) = *p {
            pairs.push((u, v));
        }
    }
    OptimalMatching { pairs, online_partner, offline_partner }
}
