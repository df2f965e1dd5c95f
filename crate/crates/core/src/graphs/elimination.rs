use std::collections::BTreeSet;

use super::Graph;

/// Variable elimination order and its induced width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationOrder {
    pub order: Vec<usize>,
    /// Largest number of neighbors a vertex had when it was eliminated, i.e.
    /// the size of the largest clique formed minus one.
    pub width: usize,
}

/// Greedy min-fill order over all vertices, ties broken by lowest index.
pub fn elimination_order(g: &Graph) -> EliminationOrder {
    elimination_order_keeping(g, &[])
}

/// Min-fill order over the vertices not listed in `keep`. Kept vertices stay
/// in the interaction graph so fill edges towards them are still counted.
pub fn elimination_order_keeping(g: &Graph, keep: &[usize]) -> EliminationOrder {
    let n = g.vertex_count();
    let mut nbrs: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut candidate = vec![true; n];
    for &k in keep {
        candidate[k] = false;
    }
    let mut order = Vec::new();
    let mut width = 0;
    loop {
        let best = (0..n).filter(|&v| alive[v] && candidate[v]).min_by_key(|&v| (fill_in(&nbrs, v), v));
        let Some(v) = best else { break };
        let ns: Vec<usize> = nbrs[v].iter().copied().collect();
        width = width.max(ns.len());
        for (i, &a) in ns.iter().enumerate() {
            nbrs[a].remove(&v);
            for &b in &ns[i + 1..] {
                nbrs[a].insert(b);
                nbrs[b].insert(a);
            }
        }
        nbrs[v].clear();
        alive[v] = false;
        order.push(v);
    }
    EliminationOrder { order, width }
}

fn fill_in(nbrs: &[BTreeSet<usize>], v: usize) -> usize {
    let ns: Vec<_> = nbrs[v].iter().collect();
    let mut missing = 0;
    for (i, a) in ns.iter().enumerate() {
        for b in &ns[i + 1..] {
            if !nbrs[**a].contains(b) {
                missing += 1;
            }
        }
    }
    missing
}
