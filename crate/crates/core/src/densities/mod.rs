//! Homomorphism densities and homomorphism measures in finite Markov spaces.
//!
//! The measure `eta^G` of a pattern `G` is `W^G . pi^V`: a map `x: V -> atoms`
//! has weight `prod_{uv in E} W[x_u][x_v] prod_v pi[x_v]`. Its total mass is the
//! density `t(G, W)`. All quantities are computed by variable elimination on
//! the factor graph with one `pi` factor per vertex and one `W` factor per edge.

mod engine;
mod family;
mod finite;
mod finner;
mod sk;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::{Bigraph, Graph};
use crate::scalar::Scalar;
use crate::spaces::FiniteMarkovSpace;

pub use engine::{Factor, FactorGraph, DEFAULT_BUDGET};
pub use family::{check_family, FamilyReport};
pub use finite::{hom_count, hom_count_with_budget, normalized_density_finite_graph, HOM_STEP_BUDGET};
pub use finner::{finner_check, FinnerReport, FinnerSystem};
pub use sk::{bigraph_density_via_s, kp_norm, kp_norm_power, s_table, SkTable, SK_TABLE_LIMIT};

/// Largest `n^|V|` a homomorphism measure may be materialized at.
pub const MATERIALIZE_LIMIT: f64 = 1e7;
/// Largest marginal table.
pub const MARGINAL_LIMIT: f64 = 1e6;

/// `t(G, W)` under the default elimination budget.
pub fn density<T: Scalar>(g: &Graph, s: &FiniteMarkovSpace<T>, normalized: bool) -> Result<T> {
    density_with_budget(g, s, normalized, DEFAULT_BUDGET)
}

/// `t(G, W)`, failing when the widest elimination step would exceed `budget`
/// operations. With `normalized` the value is divided by `t(K_2)^|E|`.
pub fn density_with_budget<T: Scalar>(g: &Graph, s: &FiniteMarkovSpace<T>, normalized: bool, budget: f64) -> Result<T> {
    let t = HomMeasure::new(g, s).factor_graph().contract(budget)?;
    if !normalized {
        return Ok(t);
    }
    let edge = s.total_mass();
    if edge.is_negligible() {
        return Err(Error::Degenerate { atom: 0 });
    }
    Ok(t / edge.pow(g.edge_count() as u32))
}

/// Bigraph densities in a symmetric space are those of the underlying graph.
pub fn bigraph_density<T: Scalar>(b: &Bigraph, s: &FiniteMarkovSpace<T>, normalized: bool) -> Result<T> {
    density(&b.to_graph(), s, normalized)
}

/// Densities of many patterns in one space, evaluated in parallel.
pub fn density_batch<T: Scalar>(patterns: &[Graph], s: &FiniteMarkovSpace<T>, budget: f64) -> Vec<Result<T>> {
    patterns.par_iter().map(|g| density_with_budget(g, s, false, budget)).collect()
}

/// The homomorphism measure `eta^G = W^G . pi^V` in factored form.
#[derive(Clone, Debug)]
pub struct HomMeasure<'a, T: Scalar> {
    graph: Graph,
    space: &'a FiniteMarkovSpace<T>,
    factors: FactorGraph<T>,
}

impl<'a, T: Scalar> HomMeasure<'a, T> {
    pub fn new(g: &Graph, s: &'a FiniteMarkovSpace<T>) -> Self {
        let n = s.n();
        let mut factors = FactorGraph::new(n, g.vertex_count());
        for v in 0..g.vertex_count() {
            factors.add(Factor::new(vec![v], s.pi().to_vec(), n).expect("pi has n entries")).expect("vertex in range");
        }
        if g.edge_count() > 0 {
            let w = s.step_graphon().as_flat().to_vec();
            for &(u, v) in g.edges() {
                factors.add(Factor::new(vec![u, v], w.clone(), n).expect("W is n x n")).expect("edge in range");
            }
        }
        HomMeasure { graph: g.clone(), space: s, factors }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn space(&self) -> &FiniteMarkovSpace<T> {
        self.space
    }

    pub fn factor_graph(&self) -> &FactorGraph<T> {
        &self.factors
    }

    /// The density `t(G, W)`.
    pub fn total_mass(&self) -> Result<T> {
        self.factors.contract(DEFAULT_BUDGET)
    }

    /// Weight of one map `V -> atoms`.
    pub fn weight(&self, map: &[usize]) -> Result<T> {
        if map.len() != self.graph.vertex_count() {
            return Err(Error::Mismatch { expected: self.graph.vertex_count(), found: map.len() });
        }
        if let Some(&x) = map.iter().find(|&&x| x >= self.space.n()) {
            return Err(Error::validation(format!("atom {x} out of range")));
        }
        let n = self.space.n();
        let mut p = T::one();
        for f in self.factors.factors() {
            p = p.mul_ref(f.value_at(map, n));
        }
        Ok(p)
    }

    /// Dense table over `[n]^V`, vertex 0 most significant.
    pub fn materialize(&self) -> Result<Vec<T>> {
        let v = self.graph.vertex_count();
        check_table(self.space.n(), v, MATERIALIZE_LIMIT)?;
        self.factors.marginal(&(0..v).collect::<Vec<_>>(), MATERIALIZE_LIMIT.max(DEFAULT_BUDGET))
    }

    /// Marginal on `subset`, tabulated in the given vertex order.
    pub fn marginal(&self, subset: &[usize]) -> Result<Vec<T>> {
        check_table(self.space.n(), subset.len(), MARGINAL_LIMIT)?;
        self.factors.marginal(subset, DEFAULT_BUDGET)
    }
}

fn check_table(n: usize, k: usize, limit: f64) -> Result<()> {
    let size = (n as f64).powi(k as i32);
    if size > limit {
        return Err(Error::resource(format!("a table over {n}^{k} = {size:.3e} maps exceeds the limit {limit:.0e}")));
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod oracle {
    use super::*;

    /// Density by enumerating all maps.
    pub fn brute_density<T: Scalar>(g: &Graph, s: &FiniteMarkovSpace<T>) -> T {
        brute_table(g, s).into_iter().fold(T::zero(), |mut acc, x| {
            acc.add_assign_ref(&x);
            acc
        })
    }

    /// All map weights, vertex 0 most significant.
    pub fn brute_table<T: Scalar>(g: &Graph, s: &FiniteMarkovSpace<T>) -> Vec<T> {
        let (n, k) = (s.n(), g.vertex_count());
        let w = s.step_graphon();
        let mut x = vec![0usize; k];
        let mut out = Vec::new();
        for _ in 0..n.pow(k as u32) {
            let mut p = T::one();
            for v in 0..k {
                p = p * s.pi()[x[v]].clone();
            }
            for &(u, v) in g.edges() {
                p = p * w.w(x[u], x[v]).clone();
            }
            out.push(p);
            for j in (0..k).rev() {
                x[j] = (x[j] + 1) % n;
                if x[j] != 0 {
                    break;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::*;
    use super::*;
    use crate::spaces::test_util::{random_rational_space, random_space};
    use crate::spaces::{Partition, RationalSpace};
    use num::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::from_ratio(p, q)
    }

    fn k_space(k: usize) -> RationalSpace {
        RationalSpace::from_graph(&Graph::complete(k)).unwrap()
    }

    /// Every graph on up to `max_v` vertices, by edge subsets.
    fn small_graphs(max_v: usize) -> Vec<Graph> {
        let mut out = Vec::new();
        for v in 1..=max_v {
            let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
            for mask in 0u32..1 << pairs.len() {
                let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
                out.push(Graph::new(v, edges).unwrap());
            }
        }
        out
    }

    #[test]
    fn fixtures() {
        let k2 = k_space(2);
        assert_eq!(density(&Graph::complete(2), &k2, false).unwrap(), r(1, 1));
        assert_eq!(density(&Graph::cycle(4), &k2, false).unwrap(), r(2, 1));
        assert_eq!(density(&Graph::cycle(3), &k2, false).unwrap(), r(0, 1));
        assert_eq!(density(&Graph::cycle(3), &k_space(3), false).unwrap(), r(3, 4));
        assert_eq!(density(&Graph::cycle(4), &k2, true).unwrap(), r(2, 1));
        assert_eq!(density(&Graph::empty(3), &k2, false).unwrap(), r(1, 1));
    }

    #[test]
    fn trees_have_density_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = random_rational_space(&mut rng, 4);
        for g in [Graph::path(4), Graph::star(3), Graph::path(1)] {
            assert_eq!(density(&g, &s, false).unwrap(), r(1, 1));
        }
    }

    #[test]
    fn elimination_matches_enumeration_on_all_small_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let graphs = small_graphs(5);
        for n in 1..=4 {
            let s = random_space(&mut rng, n, 0.3);
            for g in &graphs {
                let a = density(g, &s, false).unwrap();
                let b = brute_density(g, &s);
                assert!((a - b).abs() <= 1e-12 * b.max(1.0), "{g:?}: {a} vs {b}");
            }
        }
        let s = random_rational_space(&mut rng, 3);
        for g in graphs.iter().step_by(37) {
            assert_eq!(density(g, &s, false).unwrap(), brute_density(g, &s));
        }
    }

    #[test]
    fn hom_measure_basics() {
        let k2 = k_space(2);
        let edge = HomMeasure::new(&Graph::complete(2), &k2);
        assert_eq!(edge.materialize().unwrap(), k2.eta_flat());
        assert_eq!(edge.marginal(&[1]).unwrap(), k2.pi());
        let vertex = HomMeasure::new(&Graph::empty(1), &k2);
        assert_eq!(vertex.materialize().unwrap(), k2.pi());
        let c4 = HomMeasure::new(&Graph::cycle(4), &k2);
        assert_eq!(c4.total_mass().unwrap(), r(2, 1));
        assert_eq!(c4.marginal(&[]).unwrap(), vec![r(2, 1)]);
        assert_eq!(c4.marginal(&[2]).unwrap(), vec![r(1, 1), r(1, 1)]);
        assert_eq!(c4.materialize().unwrap(), brute_table(&Graph::cycle(4), &k2));
        assert_eq!(c4.weight(&[0, 1, 0, 1]).unwrap(), r(1, 1));
        assert!(c4.weight(&[0, 1]).is_err());
    }

    #[test]
    fn marginal_order_follows_request() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = random_space(&mut rng, 3, 0.0);
        let m = HomMeasure::new(&Graph::path(3), &s);
        let full = m.materialize().unwrap();
        let sub = m.marginal(&[3, 1]).unwrap();
        for x3 in 0..3 {
            for x1 in 0..3 {
                let direct: f64 = (0..3)
                    .flat_map(|x0| (0..3).map(move |x2| (x0, x2)))
                    .map(|(x0, x2)| full[((x0 * 3 + x1) * 3 + x2) * 3 + x3])
                    .sum();
                assert!((sub[x3 * 3 + x1] - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn budget_errors() {
        let s = crate::spaces::discretize_graphon::<f64>(&crate::spaces::GraphonSpec::Bilinear, 512).unwrap();
        assert!(matches!(density(&Graph::cycle(4), &s, false), Err(Error::Resource(_))));
        let t = density_with_budget(&Graph::cycle(4), &s, false, 1e9).unwrap();
        assert!((t - (1.0 + (1.0f64 / 3.0).powi(4))).abs() < 1e-4);
        let big = HomMeasure::new(&Graph::empty(8), &s);
        assert!(matches!(big.materialize(), Err(Error::Resource(_))));
    }

    #[test]
    fn normalized_is_scale_invariant() {
        let m = vec![vec![0.0, 2.0, 1.0], vec![2.0, 0.0, 3.0], vec![1.0, 3.0, 4.0]];
        let scaled: Vec<Vec<f64>> = m.iter().map(|row| row.iter().map(|x| x * 7.5).collect()).collect();
        let a = FiniteMarkovSpace::from_matrix(m, true).unwrap();
        let b = FiniteMarkovSpace::from_matrix(scaled, true).unwrap();
        let g = Graph::cycle(5);
        assert!((density(&g, &a, true).unwrap() - density(&g, &b, true).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn bigraphs_and_batches() {
        let k2 = k_space(2);
        assert_eq!(bigraph_density(&Bigraph::complete(2, 2), &k2, false).unwrap(), r(2, 1));
        let pats = vec![Graph::cycle(3), Graph::cycle(4), Graph::complete(2)];
        let out: Vec<_> = density_batch(&pats, &k2, DEFAULT_BUDGET).into_iter().map(Result::unwrap).collect();
        assert_eq!(out, vec![r(0, 1), r(2, 1), r(1, 1)]);
    }

    #[test]
    fn weak_step_sidorenko() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let pats = [
            Graph::cycle(4),
            Graph::cycle(6),
            Graph::complete_bipartite(2, 3),
            Graph::complete_bipartite(3, 3),
            Graph::hypercube(3),
        ];
        for _ in 0..10 {
            let n = rng.gen_range(2..7);
            let s = random_space(&mut rng, n, 0.3);
            let fine = Partition::random(n, rng.gen_range(1..=n), &mut rng);
            let coarse = fine.random_coarsening(rng.gen_range(1..=fine.block_count()), &mut rng);
            for g in &pats {
                let full = density(g, &s, false).unwrap();
                let tf = density(g, &s.project(&fine).unwrap(), false).unwrap();
                let tc = density(g, &s.project(&coarse).unwrap(), false).unwrap();
                assert!(tc <= tf + 1e-12 && tf <= full + 1e-12, "{g:?}: {tc} {tf} {full}");
            }
        }
    }

    #[test]
    fn quotient_and_projection_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let s = random_space(&mut rng, 6, 0.2);
        let p = Partition::random(6, 3, &mut rng);
        for g in [Graph::cycle(4), Graph::complete(3), Graph::path(3)] {
            let a = density(&g, &s.project(&p).unwrap(), false).unwrap();
            let b = density(&g, &s.quotient(&p).unwrap(), false).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
}
