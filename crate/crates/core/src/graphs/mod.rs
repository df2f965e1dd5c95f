//! Finite pattern graphs: simple graphs, bigraphs, trees and their
//! decompositions.
//!
//! Vertices are dense indices `0..n`. Any labelling lives in the I/O layer.

mod chromatic;
mod elimination;
mod tree;

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chromatic::{chromatic_polynomial, IntPolynomial, CHROMATIC_EDGE_BUDGET};
pub use elimination::{elimination_order, elimination_order_keeping, EliminationOrder};
pub(crate) use tree::check_permutation;
pub use tree::{search_order, star_decomposition, SeqTreeDecomposition, Tree, TreePart};

/// A simple undirected graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, normalizing each edge to `(min, max)` and removing
    /// duplicates. Self-loops and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::validation(format!("edge ({u}, {v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::validation(format!("self-loop at vertex {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph { n, edges, adj })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new(), adj: vec![Vec::new(); n] }
    }

    /// `K_n`.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, edges).expect("complete graph is valid")
    }

    /// The cycle `C_k` on vertices `0..k` in cyclic order; `k >= 3`.
    pub fn cycle(k: usize) -> Self {
        assert!(k >= 3, "cycles need at least three vertices");
        Graph::new(k, (0..k).map(|i| (i, (i + 1) % k))).expect("cycle is valid")
    }

    /// The path with `k` edges (`k + 1` vertices).
    pub fn path(k: usize) -> Self {
        Graph::new(k + 1, (0..k).map(|i| (i, i + 1))).expect("path is valid")
    }

    /// The star `S_k` with center 0 and leaves `1..=k`.
    pub fn star(k: usize) -> Self {
        Graph::new(k + 1, (1..=k).map(|i| (0, i))).expect("star is valid")
    }

    /// `K_{a,b}` with classes `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|u| (a..a + b).map(move |w| (u, w)));
        Graph::new(a + b, edges).expect("complete bipartite graph is valid")
    }

    /// The `d`-dimensional hypercube `Q_d`.
    pub fn hypercube(d: u32) -> Self {
        let n = 1usize << d;
        let edges = (0..n).flat_map(|u| (0..d).map(move |b| (u, u ^ (1 << b))));
        Graph::new(n, edges).expect("hypercube is valid")
    }

    /// Looks up a named pattern: `K_n`, `C_n`, `P_n` (n edges), `S_n`, `Q_d`
    /// or `K_axb` for the complete bipartite graph.
    pub fn named(name: &str) -> Result<Self> {
        let bad = || Error::validation(format!("unknown pattern name {name:?}"));
        let (kind, rest) = name.split_once('_').ok_or_else(bad)?;
        if kind == "K" {
            if let Some((a, b)) = rest.split_once('x') {
                let a: usize = a.parse().map_err(|_| bad())?;
                let b: usize = b.parse().map_err(|_| bad())?;
                return Ok(Graph::complete_bipartite(a, b));
            }
        }
        let k: usize = rest.parse().map_err(|_| bad())?;
        match kind {
            "K" => Ok(Graph::complete(k)),
            "C" if k >= 3 => Ok(Graph::cycle(k)),
            "P" => Ok(Graph::path(k)),
            "S" => Ok(Graph::star(k)),
            "Q" if k <= 16 => Ok(Graph::hypercube(k as u32)),
            _ => Err(bad()),
        }
    }

    /// Disjoint union; vertices of `other` are shifted by `self.vertex_count()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        let edges = self.edges.iter().copied().chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        Graph::new(self.n + other.n, edges).expect("union of valid graphs is valid")
    }

    /// Categorical (tensor) product; vertex `(x, y)` gets index
    /// `x * other.n + y`.
    pub fn categorical_product(&self, other: &Graph) -> Graph {
        let m = other.n;
        let n = self.n * m;
        let mut adj = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for x1 in 0..self.n {
            for x2 in 0..m {
                let a = x1 * m + x2;
                for &y1 in &self.adj[x1] {
                    for &y2 in &other.adj[x2] {
                        let b = y1 * m + y2;
                        adj[a].push(b);
                        if a < b {
                            edges.push((a, b));
                        }
                    }
                }
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        edges.sort_unstable();
        Graph { n, edges, adj }
    }

    /// Subgraph induced on `vertices` (relabelled by position in the slice).
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| pos[u] != usize::MAX && pos[v] != usize::MAX)
            .map(|&(u, v)| (pos[u], pos[v]));
        Graph::new(vertices.len(), edges).expect("induced subgraph is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.components().iter().all(|&c| c == 0)
    }

    /// Component index of each vertex; components are numbered in order of
    /// their lowest vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_tree(&self) -> bool {
        self.n > 0 && self.edges.len() + 1 == self.n && self.is_connected()
    }

    pub fn is_triangle_free(&self) -> bool {
        self.edges.iter().all(|&(u, v)| {
            let (a, b) = (&self.adj[u], &self.adj[v]);
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => return false,
                }
            }
            true
        })
    }

    /// Two-coloring with the lowest vertex of every component in class `U`.
    pub fn bipartition(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let mut side = vec![u8::MAX; self.n];
        for s in 0..self.n {
            if side[s] != u8::MAX {
                continue;
            }
            side[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if side[v] == u8::MAX {
                        side[v] = 1 - side[u];
                        queue.push_back(v);
                    } else if side[v] == side[u] {
                        return None;
                    }
                }
            }
        }
        let left = (0..self.n).filter(|&v| side[v] == 0).collect();
        let right = (0..self.n).filter(|&v| side[v] == 1).collect();
        Some((left, right))
    }

    /// Length of a shortest cycle, `None` for forests. BFS from every vertex.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; self.n];
        let mut parent = vec![usize::MAX; self.n];
        for s in 0..self.n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[s] = 0;
            parent[s] = usize::MAX;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    } else if parent[u] != v {
                        let len = dist[u] + dist[v] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    /// Serializes to the edge-list text format with an explicit header.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Structural summary of a pattern graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub max_degree: usize,
    /// `None` encodes infinite girth (forests).
    pub girth: Option<usize>,
    pub is_triangle_free: bool,
    pub bipartition: Option<(Vec<usize>, Vec<usize>)>,
}

pub fn graph_stats(g: &Graph) -> GraphStats {
    let girth = g.girth();
    GraphStats {
        max_degree: (0..g.n).map(|v| g.degree(v)).max().unwrap_or(0),
        girth,
        is_triangle_free: girth.is_none_or(|l| l > 3),
        bipartition: g.bipartition(),
    }
}

/// Parses the edge-list format: optional `n=<int>` header, one `u v` pair per
/// line, `#` starts a comment.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut header: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_index: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("n=") {
            if header.is_some() || !edges.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "header must precede all edges and appear once".into(),
                });
            }
            let n = rest
                .trim()
                .parse()
                .map_err(|_| Error::Parse { line: line_no, message: format!("bad vertex count {rest:?}") })?;
            header = Some(n);
            continue;
        }
        let fields: Vec<_> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two vertex indices, found {:?}", line),
            });
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse { line: line_no, message: format!("not a nonnegative integer: {s:?}") })
        };
        let (u, v) = (parse(fields[0])?, parse(fields[1])?);
        if u == v {
            return Err(Error::Parse { line: line_no, message: format!("self-loop at vertex {u}") });
        }
        max_index = Some(max_index.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v));
    }
    let implied = max_index.map_or(0, |m| m + 1);
    let n = match header {
        Some(n) if n < implied => {
            return Err(Error::validation(format!("header declares {n} vertices but index {} appears", implied - 1)))
        }
        Some(n) => n,
        None => implied,
    };
    Graph::new(n, edges)
}

/// A bigraph `(U, W, E)`; the order of the classes is part of its identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bigraph {
    pub left: usize,
    pub right: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Bigraph {
    pub fn new(left: usize, right: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, w) in edges {
            if u >= left || w >= right {
                return Err(Error::validation(format!(
                    "bigraph edge ({u}, {w}) out of range for classes {left}/{right}"
                )));
            }
            set.insert((u, w));
        }
        Ok(Bigraph { left, right, edges: set.into_iter().collect() })
    }

    pub fn complete(a: usize, b: usize) -> Self {
        Bigraph::new(a, b, (0..a).flat_map(|u| (0..b).map(move |w| (u, w)))).expect("valid")
    }

    /// Splits a bipartite graph using its deterministic bipartition.
    pub fn from_graph(g: &Graph) -> Result<Self> {
        let (left, right) = g.bipartition().ok_or_else(|| Error::validation("graph is not bipartite"))?;
        let mut pos = vec![0; g.vertex_count()];
        for (i, &v) in left.iter().enumerate() {
            pos[v] = i;
        }
        for (i, &v) in right.iter().enumerate() {
            pos[v] = i;
        }
        let mut in_left = vec![false; g.vertex_count()];
        left.iter().for_each(|&v| in_left[v] = true);
        let edges = g.edges().iter().map(|&(u, v)| if in_left[u] { (pos[u], pos[v]) } else { (pos[v], pos[u]) });
        Bigraph::new(left.len(), right.len(), edges)
    }

    /// `G*`: the same edges with the classes swapped.
    pub fn reversed(&self) -> Bigraph {
        Bigraph::new(self.right, self.left, self.edges.iter().map(|&(u, w)| (w, u)))
            .expect("reversal of a valid bigraph is valid")
    }

    /// Underlying graph with `U = 0..left` and `W = left..left+right`.
    pub fn to_graph(&self) -> Graph {
        Graph::new(self.left + self.right, self.edges.iter().map(|&(u, w)| (u, self.left + w)))
            .expect("bigraph edges are in range")
    }

    /// Neighbors in `U` of right vertex `w`, ascending.
    pub fn right_neighbors(&self, w: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.1 == w).map(|e| e.0).collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            left: usize,
            right: usize,
            edges: Vec<(usize, usize)>,
        }
        let raw: Raw = serde_json::from_str(text)?;
        Bigraph::new(raw.left, raw.right, raw.edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "left": self.left, "right": self.right, "edges": self.edges }).to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_patterns() {
        assert_eq!(Graph::named("C_4").unwrap(), Graph::cycle(4));
        assert_eq!(Graph::named("K_2x3").unwrap(), Graph::complete_bipartite(2, 3));
        assert_eq!(Graph::named("P_2").unwrap().vertex_count(), 3);
        assert_eq!(Graph::named("Q_3").unwrap().edge_count(), 12);
        for bad in ["C_2", "X_3", "K3", "K_", "S_x"] {
            assert!(Graph::named(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn parse_cycle() {
        let g = parse_graph("0 1\n1 2\n2 3\n3 0").unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g, Graph::cycle(4));
    }

    #[test]
    fn parse_header_only() {
        let g = parse_graph("n=1\n").unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn parse_dedups() {
        let g = parse_graph("0 1\n0 1\n1 0").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn parse_errors_carry_line() {
        match parse_graph("0 1\n# fine\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_graph("0 1\n2 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_graph("0 1 2\n").is_err());
        assert!(parse_graph("n=2\n0 5\n").is_err());
    }

    #[test]
    fn edge_list_roundtrip() {
        let g = Graph::hypercube(3);
        assert_eq!(parse_graph(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn stats_c4() {
        let s = graph_stats(&Graph::cycle(4));
        assert_eq!(s.max_degree, 2);
        assert_eq!(s.girth, Some(4));
        assert!(s.is_triangle_free);
        assert_eq!(s.bipartition, Some((vec![0, 2], vec![1, 3])));
    }

    #[test]
    fn stats_c3() {
        let s = graph_stats(&Graph::cycle(3));
        assert_eq!(s.girth, Some(3));
        assert!(!s.is_triangle_free);
        assert_eq!(s.bipartition, None);
    }

    #[test]
    fn stats_path() {
        let s = graph_stats(&Graph::path(3));
        assert_eq!(s.girth, None);
        assert!(s.is_triangle_free);
        assert!(s.bipartition.is_some());
    }

    #[test]
    fn girths() {
        assert_eq!(Graph::cycle(7).girth(), Some(7));
        assert_eq!(Graph::complete(5).girth(), Some(3));
        assert_eq!(Graph::complete_bipartite(3, 3).girth(), Some(4));
        assert_eq!(Graph::hypercube(3).girth(), Some(4));
        // Petersen graph has girth 5.
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let petersen = Graph::new(10, outer.chain(spokes).chain(inner)).unwrap();
        assert_eq!(petersen.girth(), Some(5));
    }

    #[test]
    fn bipartition_roots_in_left() {
        let g = Graph::new(5, [(1, 2), (3, 4)]).unwrap();
        let (l, r) = g.bipartition().unwrap();
        assert_eq!(l, vec![0, 1, 3]);
        assert_eq!(r, vec![2, 4]);
    }

    #[test]
    fn bigraph_json_and_reversal() {
        let b = Bigraph::from_json(r#"{"left": 2, "right": 3, "edges": [[0,0],[1,2],[0,0]]}"#).unwrap();
        assert_eq!(b.edges.len(), 2);
        assert_eq!(b.reversed().left, 3);
        assert_eq!(b.reversed().reversed(), b);
        assert_eq!(Bigraph::from_json(&b.to_json()).unwrap(), b);
        assert!(Bigraph::from_json(r#"{"left": 1, "right": 1, "edges": [[0,1]]}"#).is_err());
    }

    #[test]
    fn bigraph_from_graph() {
        let b = Bigraph::from_graph(&Graph::cycle(4)).unwrap();
        assert_eq!((b.left, b.right), (2, 2));
        assert_eq!(b, Bigraph::complete(2, 2));
        assert!(Bigraph::from_graph(&Graph::cycle(5)).is_err());
    }

    #[test]
    fn categorical_product_of_complete_graphs() {
        let h = Graph::complete(2).categorical_product(&Graph::complete(3));
        assert_eq!(h.vertex_count(), 6);
        // K_2 x K_3 is the 6-cycle.
        assert_eq!(h.edge_count(), 6);
        assert!((0..6).all(|v| h.degree(v) == 2));
        assert_eq!(h.girth(), Some(6));
    }

    #[test]
    fn named_graphs() {
        assert_eq!(Graph::hypercube(3).edge_count(), 12);
        assert_eq!(Graph::complete_bipartite(2, 3).edge_count(), 6);
        assert!(Graph::star(3).is_tree());
        assert!(!Graph::cycle(4).is_tree());
        let u = Graph::complete(2).disjoint_union(&Graph::complete(2));
        assert_eq!(u.edges(), &[(0, 1), (2, 3)]);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn arb_bigraph() -> impl Strategy<Value = Bigraph> {
        (1usize..5, 1usize..5).prop_flat_map(|(l, r)| {
            proptest::collection::vec((0..l, 0..r), 0..10).prop_map(move |e| Bigraph::new(l, r, e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn reversal_is_involution(b in arb_bigraph()) {
            prop_assert_eq!(b.reversed().reversed(), b);
        }
    }
}
