//! Sequential constructions of homomorphism measures.
//!
//! Random tree maps place a root by `pi` and every later vertex by one Markov
//! step from its earlier neighbor. For a triangle-free pattern, attaching one
//! star at a time and multiplying by the conditional star kernel builds the
//! measure `eta_p`; on a finite space every order gives `W^G . pi^V`.

mod sphere;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::densities::HomMeasure;
use crate::error::{Error, Result};
use crate::graphs::{check_permutation, star_decomposition, Graph, Tree};
use crate::scalar::Scalar;
use crate::spaces::FiniteMarkovSpace;

pub use sphere::{k22_order_experiment, sphere_sequential_sample, write_k22_csv, K22Report, SphereMap, HIST_BINS};

/// Largest table the sequential constructions build.
pub const SEQ_TABLE_LIMIT: f64 = 1e6;

/// Distribution of the random map of `t` built along the search order
/// `order`, as a table over `[n]^V` with vertex 0 most significant.
pub fn tree_distribution<T: Scalar>(t: &Tree, s: &FiniteMarkovSpace<T>, order: &[usize]) -> Result<Vec<T>> {
    if !t.is_search_order(order) {
        return Err(Error::validation(format!("{order:?} is not a search order of the tree")));
    }
    let n = s.n();
    check_size(n, t.vertex_count())?;
    let g = t.graph();
    let mut placed: Vec<usize> = Vec::with_capacity(order.len());
    let mut table = vec![T::one()];
    for &v in order {
        let parent = g.neighbors(v).iter().find_map(|u| placed.iter().position(|p| p == u));
        let m = placed.len();
        let mut next = Vec::with_capacity(table.len() * n);
        for (i, w) in table.iter().enumerate() {
            for y in 0..n {
                let step = match parent {
                    None => s.pi()[y].clone(),
                    Some(p) => s.transition(digit(i, p, m, n), y),
                };
                next.push(w.mul_ref(&step));
            }
        }
        table = next;
        placed.push(v);
    }
    Ok(to_vertex_major(&table, &placed, n))
}

/// One star attached during the sequential construction.
#[derive(Clone, Debug, PartialEq)]
pub struct StarStep<T: Scalar> {
    pub center: usize,
    /// Earlier neighbors of the center, ascending.
    pub leaves: Vec<usize>,
    /// `psi_z(x)` over `[n]^leaves x [n]`, leaf tuple most significant.
    pub psi: Vec<T>,
    /// `s(z) = psi_z(all atoms)`, over `[n]^leaves`.
    pub s: Vec<T>,
    /// Leaf tuples whose marginal mass was negligible; their kernels are zero.
    pub null_tuples: Vec<usize>,
}

/// Record of one sequential star construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SeqMeasureTrace<T: Scalar> {
    pub order: Vec<usize>,
    pub steps: Vec<StarStep<T>>,
    /// Final measure over `[n]^V`, vertex 0 most significant.
    pub table: Vec<T>,
}

impl<T: Scalar> SeqMeasureTrace<T> {
    pub fn total_mass(&self) -> T {
        let mut t = T::zero();
        self.table.iter().for_each(|x| t.add_assign_ref(x));
        t
    }
}

/// Conditional kernel of the star with `k` leaves: `psi_z = s(z) theta_z`,
/// where `theta_z` is the law of the center given the leaves. Returns
/// `(psi, s, null_tuples)`.
fn star_kernel<T: Scalar>(s: &FiniteMarkovSpace<T>, k: usize) -> Result<(Vec<T>, Vec<T>, Vec<usize>)> {
    let n = s.n();
    // Random map of S_k rooted at the center: center is vertex 0.
    let star = Tree::star(k);
    let order: Vec<usize> = (0..=k).collect();
    let joint = tree_distribution(&star, s, &order)?;
    let leaves = n.pow(k as u32);
    let mut psi = vec![T::zero(); leaves * n];
    let mut svals = Vec::with_capacity(leaves);
    let mut null_tuples = Vec::new();
    for z in 0..leaves {
        let mut sigma = T::zero();
        let mut pi_l = T::one();
        for j in 0..k {
            pi_l = pi_l.mul_ref(&s.pi()[digit(z, j, k, n)]);
        }
        for x in 0..n {
            sigma.add_assign_ref(&joint[x * leaves + z]);
        }
        if sigma.is_negligible() {
            null_tuples.push(z);
            svals.push(T::zero());
            continue;
        }
        let sz = sigma.clone() / pi_l;
        for x in 0..n {
            let theta = joint[x * leaves + z].clone() / sigma.clone();
            psi[z * n + x] = sz.mul_ref(&theta);
        }
        svals.push(sz);
    }
    Ok((psi, svals, null_tuples))
}

/// Builds `eta_p` by attaching the stars of `order` one at a time.
pub fn sequential_star_measure<T: Scalar>(
    g: &Graph,
    s: &FiniteMarkovSpace<T>,
    order: &[usize],
) -> Result<SeqMeasureTrace<T>> {
    check_permutation(order, g.vertex_count())?;
    if !g.is_triangle_free() {
        return Err(Error::precondition("the sequential star construction needs a triangle-free graph"));
    }
    let n = s.n();
    check_size(n, g.vertex_count())?;
    let decomposition = star_decomposition(g, order)?;
    let mut kernels: Vec<Option<(Vec<T>, Vec<T>, Vec<usize>)>> = Vec::new();
    let mut placed: Vec<usize> = Vec::with_capacity(order.len());
    let mut table = vec![T::one()];
    let mut steps = Vec::with_capacity(order.len());
    for part in decomposition.parts {
        let center = part.center.expect("star parts have centers");
        let k = part.leaves.len();
        if kernels.len() <= k {
            kernels.resize(k + 1, None);
        }
        if kernels[k].is_none() {
            kernels[k] = Some(star_kernel(s, k)?);
        }
        let (psi, svals, nulls) = kernels[k].clone().expect("kernel built");
        let leaf_pos: Vec<usize> =
            part.leaves.iter().map(|l| placed.iter().position(|p| p == l).expect("leaves are placed")).collect();
        let m = placed.len();
        let mut next = Vec::with_capacity(table.len() * n);
        for (i, w) in table.iter().enumerate() {
            let z = leaf_pos.iter().fold(0, |acc, &p| acc * n + digit(i, p, m, n));
            for x in 0..n {
                next.push(w.mul_ref(&psi[z * n + x]));
            }
        }
        table = next;
        placed.push(center);
        steps.push(StarStep { center, leaves: part.leaves, psi, s: svals, null_tuples: nulls });
    }
    Ok(SeqMeasureTrace { order: order.to_vec(), steps, table: to_vertex_major(&table, &placed, n) })
}

/// Outcome of [`order_independence_report`].
#[derive(Clone, Debug, PartialEq)]
pub struct OrderReport {
    pub orders_tested: usize,
    /// Largest entrywise difference between any order's table and the first.
    pub max_deviation: f64,
    /// Largest entrywise difference from the factored homomorphism measure.
    pub max_deviation_from_hom: f64,
    pub orders: Vec<Vec<usize>>,
    pub total_masses: Vec<f64>,
}

/// Runs the star construction along the identity order, its reverse and
/// `n_orders` seeded random permutations.
pub fn order_independence_report<T: Scalar>(
    g: &Graph,
    s: &FiniteMarkovSpace<T>,
    n_orders: usize,
    seed: u64,
) -> Result<OrderReport> {
    let v = g.vertex_count();
    let mut orders: Vec<Vec<usize>> = vec![(0..v).collect(), (0..v).rev().collect()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_orders {
        let mut p: Vec<usize> = (0..v).collect();
        p.shuffle(&mut rng);
        orders.push(p);
    }
    let traces: Vec<SeqMeasureTrace<T>> =
        orders.par_iter().map(|o| sequential_star_measure(g, s, o)).collect::<Result<_>>()?;
    let reference = HomMeasure::new(g, s).materialize()?;
    let dev =
        |a: &[T], b: &[T]| a.iter().zip(b).map(|(x, y)| (x.clone() - y.clone()).to_f64().abs()).fold(0.0, f64::max);
    let first = &traces[0].table;
    Ok(OrderReport {
        orders_tested: orders.len(),
        max_deviation: traces.iter().map(|t| dev(&t.table, first)).fold(0.0, f64::max),
        max_deviation_from_hom: traces.iter().map(|t| dev(&t.table, &reference)).fold(0.0, f64::max),
        total_masses: traces.iter().map(|t| t.total_mass().to_f64()).collect(),
        orders,
    })
}

fn check_size(n: usize, k: usize) -> Result<()> {
    let size = (n as f64).powi(k as i32);
    if size > SEQ_TABLE_LIMIT {
        return Err(Error::resource(format!("{n}^{k} = {size:.3e} maps exceed the limit {SEQ_TABLE_LIMIT:.0e}")));
    }
    Ok(())
}

/// Digit `p` (most significant first) of `i` written with `m` base-`n` digits.
#[inline]
fn digit(i: usize, p: usize, m: usize, n: usize) -> usize {
    i / n.pow((m - 1 - p) as u32) % n
}

/// Reorders a table whose digits follow `placed` into vertex-index order.
fn to_vertex_major<T: Scalar>(table: &[T], placed: &[usize], n: usize) -> Vec<T> {
    let m = placed.len();
    let mut out = vec![T::zero(); table.len()];
    for (i, w) in table.iter().enumerate() {
        let mut x = vec![0usize; m];
        for (p, &v) in placed.iter().enumerate() {
            x[v] = digit(i, p, m, n);
        }
        out[x.iter().fold(0, |acc, &d| acc * n + d)] = w.clone();
    }
    out
}
