use std::collections::{BTreeSet, VecDeque};

use super::Graph;
use crate::error::{Error, Result};

/// A tree together with its leaf/interior split.
///
/// The split is part of the tree's identity: a single edge is either `P_1`
/// (both endpoints leaves) or `S_1` (one designated center), and the
/// one-vertex tree `S_0` has no leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    graph: Graph,
    leaves: Vec<usize>,
    interior: Vec<usize>,
    root: Option<usize>,
}

impl Tree {
    /// Uses the natural leaf set: degree-one vertices. A single vertex is
    /// `S_0`, a single edge is `P_1`.
    pub fn new(graph: Graph) -> Result<Self> {
        let leaves: Vec<_> = (0..graph.vertex_count()).filter(|&v| graph.degree(v) == 1).collect();
        Tree::with_leaves(graph, leaves)
    }

    /// Explicit leaf set; every listed vertex must have degree one.
    pub fn with_leaves(graph: Graph, leaves: impl IntoIterator<Item = usize>) -> Result<Self> {
        if !graph.is_tree() {
            return Err(Error::validation("graph is not a tree"));
        }
        let leaves: BTreeSet<usize> = leaves.into_iter().collect();
        for &l in &leaves {
            if l >= graph.vertex_count() || graph.degree(l) != 1 {
                return Err(Error::validation(format!("vertex {l} cannot be a leaf")));
            }
        }
        let interior = (0..graph.vertex_count()).filter(|v| !leaves.contains(v)).collect();
        Ok(Tree { graph, leaves: leaves.into_iter().collect(), interior, root: None })
    }

    /// `S_k` with center 0; for `k = 1` this is `S_1` (one leaf).
    pub fn star(k: usize) -> Self {
        Tree::with_leaves(Graph::star(k), 1..=k).expect("star is a tree").rooted(0)
    }

    /// `P_k`, the path with `k` edges; endpoints are the leaves.
    pub fn path(k: usize) -> Self {
        let g = Graph::path(k);
        if k == 0 {
            return Tree::with_leaves(g, []).expect("single vertex");
        }
        Tree::with_leaves(g, [0, k]).expect("path is a tree")
    }

    pub fn rooted(mut self, root: usize) -> Self {
        assert!(root < self.graph.vertex_count(), "root out of range");
        self.root = Some(root);
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// `L(F)`, ascending.
    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    /// `M(F)`, ascending.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// True when every vertex after the first has exactly one earlier neighbor.
    pub fn is_search_order(&self, order: &[usize]) -> bool {
        let n = self.vertex_count();
        if order.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n || seen[v] {
                return false;
            }
            let earlier = self.graph.neighbors(v).iter().filter(|&&u| seen[u]).count();
            if (i == 0 && earlier != 0) || (i > 0 && earlier != 1) {
                return false;
            }
            seen[v] = true;
        }
        true
    }
}

/// Breadth-first search order from `root`, children visited by ascending
/// index.
pub fn search_order(tree: &Tree, root: usize) -> Result<Vec<usize>> {
    let g = tree.graph();
    if root >= g.vertex_count() {
        return Err(Error::validation(format!("root {root} out of range for a tree on {} vertices", g.vertex_count())));
    }
    let mut seen = vec![false; g.vertex_count()];
    let mut order = Vec::with_capacity(g.vertex_count());
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    Ok(order)
}

/// One tree of a sequential decomposition, in the target graph's labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreePart {
    /// All vertices, ascending.
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    /// Attachment set `Z_i`, which is also the tree's leaf set, ascending.
    pub leaves: Vec<usize>,
    /// Center vertex when the part is a star.
    pub center: Option<usize>,
}

impl TreePart {
    /// The part as a standalone [`Tree`] together with the label of each local
    /// vertex.
    pub fn to_tree(&self) -> (Tree, Vec<usize>) {
        let pos = |v: usize| self.vertices.binary_search(&v).expect("edge endpoint is a part vertex");
        let g = Graph::new(self.vertices.len(), self.edges.iter().map(|&(u, v)| (pos(u), pos(v))))
            .expect("part edges are valid");
        let mut tree = Tree::with_leaves(g, self.leaves.iter().map(|&l| pos(l))).expect("part is a tree");
        if let Some(c) = self.center {
            tree = tree.rooted(pos(c));
        }
        (tree, self.vertices.clone())
    }
}

/// A sequence of edge-disjoint trees covering a graph, each attached to the
/// earlier ones exactly along its leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqTreeDecomposition {
    pub parts: Vec<TreePart>,
}

impl SeqTreeDecomposition {
    /// Checks the structural invariants against the target graph.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let first = self.parts.first().ok_or_else(|| Error::validation("empty decomposition"))?;
        if first.vertices.len() != 1 || !first.edges.is_empty() {
            return Err(Error::validation("first tree must be a singleton"));
        }
        let mut covered = vec![false; g.vertex_count()];
        let mut used_edges = BTreeSet::new();
        for (i, part) in self.parts.iter().enumerate() {
            let (tree, labels) = part.to_tree();
            if labels.iter().any(|&v| v >= g.vertex_count()) {
                return Err(Error::validation(format!("part {i} uses an unknown vertex")));
            }
            let attach: Vec<_> = labels.iter().copied().filter(|&v| covered[v]).collect();
            let leaves: Vec<_> = tree.leaves().iter().map(|&l| labels[l]).collect();
            if attach != leaves {
                return Err(Error::validation(format!(
                    "part {i}: attachment set {attach:?} differs from leaves {leaves:?}"
                )));
            }
            for &(u, v) in &part.edges {
                let e = (u.min(v), u.max(v));
                if !g.has_edge(e.0, e.1) {
                    return Err(Error::validation(format!("part {i}: edge {e:?} not in graph")));
                }
                if !used_edges.insert(e) {
                    return Err(Error::validation(format!("part {i}: edge {e:?} reused")));
                }
            }
            labels.iter().for_each(|&v| covered[v] = true);
        }
        if used_edges.len() != g.edge_count() || covered.iter().any(|c| !c) {
            return Err(Error::validation("decomposition does not cover the graph"));
        }
        Ok(())
    }
}

/// Star decomposition along `order`: the i-th tree is the star centered at
/// `order[i]` whose leaves are its neighbors placed earlier.
pub fn star_decomposition(g: &Graph, order: &[usize]) -> Result<SeqTreeDecomposition> {
    check_permutation(order, g.vertex_count())?;
    let mut placed = vec![false; g.vertex_count()];
    let mut parts = Vec::with_capacity(order.len());
    for &c in order {
        let leaves: Vec<usize> = g.neighbors(c).iter().copied().filter(|&u| placed[u]).collect();
        let mut vertices = leaves.clone();
        vertices.push(c);
        vertices.sort_unstable();
        let edges = leaves.iter().map(|&l| (c.min(l), c.max(l))).collect();
        parts.push(TreePart { vertices, edges, leaves, center: Some(c) });
        placed[c] = true;
    }
    Ok(SeqTreeDecomposition { parts })
}

pub(crate) fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::validation(format!("order has {} entries for {n} vertices", order.len())));
    }
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::validation(format!("order is not a permutation: {order:?}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn star_part(center: usize, leaves: &[usize]) -> (usize, Vec<usize>) {
        (center, leaves.to_vec())
    }

    fn summary(d: &SeqTreeDecomposition) -> Vec<(usize, Vec<usize>)> {
        d.parts.iter().map(|p| (p.center.unwrap(), p.leaves.clone())).collect()
    }

    #[test]
    fn c4_star_decomposition() {
        let g = Graph::cycle(4);
        let d = star_decomposition(&g, &[0, 1, 2, 3]).unwrap();
        d.validate(&g).unwrap();
        assert_eq!(summary(&d), vec![star_part(0, &[]), star_part(1, &[0]), star_part(2, &[1]), star_part(3, &[0, 2])]);
    }

    #[test]
    fn k22_left_first() {
        let g = Graph::complete_bipartite(2, 2);
        let d = star_decomposition(&g, &[0, 1, 2, 3]).unwrap();
        d.validate(&g).unwrap();
        let s = summary(&d);
        assert!(s[0].1.is_empty() && s[1].1.is_empty());
        assert_eq!(s[2].1, vec![0, 1]);
        assert_eq!(s[3].1, vec![0, 1]);
    }

    #[test]
    fn single_vertex_decomposition() {
        let g = Graph::empty(1);
        let d = star_decomposition(&g, &[0]).unwrap();
        d.validate(&g).unwrap();
        assert_eq!(d.parts.len(), 1);
    }

    #[test]
    fn rejects_non_permutation() {
        let g = Graph::cycle(4);
        assert!(star_decomposition(&g, &[0, 1, 1, 3]).is_err());
        assert!(star_decomposition(&g, &[0, 1, 2]).is_err());
        assert!(star_decomposition(&g, &[0, 1, 2, 7]).is_err());
    }

    #[test]
    fn validate_catches_bad_attachment() {
        let g = Graph::path(2);
        let bad = SeqTreeDecomposition {
            parts: vec![
                TreePart { vertices: vec![0], edges: vec![], leaves: vec![], center: Some(0) },
                TreePart { vertices: vec![1, 2], edges: vec![(1, 2)], leaves: vec![2], center: Some(1) },
            ],
        };
        assert!(bad.validate(&g).is_err());
    }

    #[test]
    fn search_orders() {
        let p = Tree::new(Graph::path(2)).unwrap();
        assert_eq!(search_order(&p, 1).unwrap(), vec![1, 0, 2]);
        assert_eq!(search_order(&Tree::star(2), 0).unwrap(), vec![0, 1, 2]);
        let s0 = Tree::path(0);
        assert_eq!(search_order(&s0, 0).unwrap(), vec![0]);
        assert!(search_order(&s0, 1).is_err());
    }

    #[test]
    fn leaf_conventions() {
        assert_eq!(Tree::path(1).leaves(), &[0, 1]);
        assert!(Tree::path(1).interior().is_empty());
        let s1 = Tree::star(1);
        assert_eq!(s1.leaves(), &[1]);
        assert_eq!(s1.interior(), &[0]);
        assert!(Tree::path(0).leaves().is_empty());
        assert!(Tree::with_leaves(Graph::path(2), [1]).is_err());
        assert!(Tree::new(Graph::cycle(3)).is_err());
    }

    fn random_graph(rng: &mut ChaCha8Rng) -> Graph {
        let n = rng.gen_range(1..8);
        let edges: Vec<_> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.gen_bool(0.4)).collect();
        Graph::new(n, edges).unwrap()
    }

    #[test]
    fn random_star_decompositions_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let g = random_graph(&mut rng);
            let mut order: Vec<_> = (0..g.vertex_count()).collect();
            order.shuffle(&mut rng);
            let d = star_decomposition(&g, &order).unwrap();
            d.validate(&g).unwrap();
        }
    }

    #[test]
    fn bfs_orders_are_search_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.gen_range(1..10);
            // random recursive tree
            let edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
            let t = Tree::new(Graph::new(n, edges).unwrap()).unwrap();
            for root in 0..n {
                let order = search_order(&t, root).unwrap();
                assert!(t.is_search_order(&order));
            }
        }
    }
}
