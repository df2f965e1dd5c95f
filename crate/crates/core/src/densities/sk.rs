use super::engine::{Factor, FactorGraph, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::graphs::Bigraph;
use crate::scalar::Scalar;
use crate::spaces::FiniteMarkovSpace;

/// Largest `n^k` an [`SkTable`] may hold.
pub const SK_TABLE_LIMIT: f64 = 1e6;
const MAX_K: usize = 4;

/// `s_k(y_1..y_k) = sum_x pi[x] prod_j W[x][y_j]`: the density of the joint law
/// of `k` independent steps from a common `pi`-random start, relative to
/// `pi^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkTable<T: Scalar = f64> {
    k: usize,
    n: usize,
    table: Vec<T>,
}

impl<T: Scalar> SkTable<T> {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major over `[n]^k`.
    pub fn table(&self) -> &[T] {
        &self.table
    }

    pub fn get(&self, ys: &[usize]) -> &T {
        assert_eq!(ys.len(), self.k, "tuple length must equal k");
        &self.table[ys.iter().fold(0, |acc, &y| acc * self.n + y)]
    }
}

/// Builds `s_k` for `k <= 4`.
pub fn s_table<T: Scalar>(s: &FiniteMarkovSpace<T>, k: usize) -> Result<SkTable<T>> {
    let n = s.n();
    if k > MAX_K {
        return Err(Error::validation(format!("s_k tables support k <= {MAX_K}, got {k}")));
    }
    let size = (n as f64).powi(k as i32);
    if size > SK_TABLE_LIMIT {
        return Err(Error::resource(format!(
            "s_{k} table over {n} atoms has {size:.3e} entries, over the limit {SK_TABLE_LIMIT:.0e}"
        )));
    }
    let w = s.step_graphon();
    let mut table = vec![T::zero(); n.pow(k as u32)];
    for (x, px) in s.pi().iter().enumerate() {
        let row = &w.as_flat()[x * n..(x + 1) * n];
        accumulate(&mut table, row, px.clone(), k, 0);
    }
    Ok(SkTable { k, n, table })
}

/// Adds `prefix * prod_j row[y_j]` to every entry below `offset`, one
/// coordinate per level.
fn accumulate<T: Scalar>(table: &mut [T], row: &[T], prefix: T, depth: usize, offset: usize) {
    if depth == 0 {
        table[offset].add_assign_ref(&prefix);
        return;
    }
    let n = row.len();
    for (y, wy) in row.iter().enumerate() {
        if wy.is_zero() {
            continue;
        }
        accumulate(table, row, prefix.mul_ref(wy), depth - 1, offset * n + y);
    }
}

/// `||eta||_{k,p}^{kp} = sum_y pi^k(y) s_k(y)^p`, which equals `t(K_{k,p})`.
pub fn kp_norm_power<T: Scalar>(s: &FiniteMarkovSpace<T>, k: usize, p: u32) -> Result<T> {
    if p == 0 {
        return Err(Error::validation("p must be at least 1"));
    }
    let sk = s_table(s, k)?;
    let n = s.n();
    let mut acc = T::zero();
    let mut ys = vec![0usize; k];
    for v in &sk.table {
        let mut term = v.pow(p);
        for &y in &ys {
            term = term.mul_ref(&s.pi()[y]);
        }
        acc.add_assign_ref(&term);
        for j in (0..k).rev() {
            ys[j] += 1;
            if ys[j] < n {
                break;
            }
            ys[j] = 0;
        }
    }
    Ok(acc)
}

/// The `(k, p)`-norm `||s_k||_p^{1/k}` under `pi^k`.
pub fn kp_norm<T: Scalar>(s: &FiniteMarkovSpace<T>, k: usize, p: u32) -> Result<f64> {
    if k == 1 {
        return Ok(1.0);
    }
    let m = kp_norm_power(s, k, p)?.to_f64();
    Ok(m.powf(1.0 / (k as f64 * p as f64)))
}

/// Bigraph density as `sum_{x in [n]^U} pi^U(x) prod_{w in W} s_deg(w)(x|N(w))`,
/// contracted over the left class.
pub fn bigraph_density_via_s<T: Scalar>(b: &Bigraph, s: &FiniteMarkovSpace<T>) -> Result<T> {
    let n = s.n();
    let mut fg = FactorGraph::new(n, b.left);
    for u in 0..b.left {
        fg.add(Factor::new(vec![u], s.pi().to_vec(), n)?)?;
    }
    let mut tables: Vec<Option<SkTable<T>>> = vec![None; MAX_K + 1];
    for w in 0..b.right {
        let nbrs = b.right_neighbors(w);
        let k = nbrs.len();
        if k > MAX_K {
            return Err(Error::validation(format!("right vertex {w} has degree {k}, above {MAX_K}")));
        }
        if tables[k].is_none() {
            tables[k] = Some(s_table(s, k)?);
        }
        let sk = tables[k].as_ref().expect("table built");
        fg.add(Factor::new(nbrs, sk.table.clone(), n)?)?;
    }
    fg.contract(DEFAULT_BUDGET)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::density;
    use crate::graphs::Graph;
    use crate::spaces::test_util::{random_rational_space, random_space};
    use crate::spaces::RationalSpace;
    use num::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k2() -> RationalSpace {
        RationalSpace::from_graph(&Graph::complete(2)).unwrap()
    }

    #[test]
    fn examples() {
        let one = BigRational::from_ratio(1, 1);
        let s1 = s_table(&k2(), 1).unwrap();
        assert!(s1.table().iter().all(|x| *x == one));
        let s2 = s_table(&k2(), 2).unwrap();
        let two = BigRational::from_ratio(2, 1);
        assert_eq!(s2.table(), &[two.clone(), BigRational::from_ratio(0, 1), BigRational::from_ratio(0, 1), two]);
        let atom = RationalSpace::single_atom();
        for k in 0..=4 {
            assert_eq!(s_table(&atom, k).unwrap().table(), std::slice::from_ref(&one));
        }
        assert!(s_table(&k2(), 5).is_err());
    }

    #[test]
    fn symmetric_and_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let n = rng.gen_range(1..6);
            let s = random_space(&mut rng, n, 0.3);
            let sk = s_table(&s, 3).unwrap();
            let mut total = 0.0;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let v = *sk.get(&[a, b, c]);
                        for perm in [[b, a, c], [a, c, b], [c, b, a], [b, c, a]] {
                            assert!((sk.get(&perm) - v).abs() < 1e-12);
                        }
                        total += v * s.pi()[a] * s.pi()[b] * s.pi()[c];
                    }
                }
            }
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn norms() {
        let s = k2();
        for p in 1..4 {
            assert_eq!(kp_norm(&s, 1, p).unwrap(), 1.0);
        }
        assert!((kp_norm(&s, 2, 2).unwrap() - 2f64.powf(0.25)).abs() < 1e-15);
        let atom = RationalSpace::single_atom();
        assert_eq!(kp_norm(&atom, 3, 2).unwrap(), 1.0);
        assert!(kp_norm(&s, 2, 0).is_err());
    }

    #[test]
    fn norm_symmetry_and_biclique_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let s = random_rational_space(&mut rng, 4);
        for k in 1..=3usize {
            for p in 1..=3usize {
                let kp = kp_norm_power(&s, k, p as u32).unwrap();
                assert_eq!(kp, kp_norm_power(&s, p, k as u32).unwrap());
                assert_eq!(kp, density(&Graph::complete_bipartite(k, p), &s, false).unwrap());
            }
        }
    }

    #[test]
    fn bigraph_formula_matches_density() {
        let s = k2();
        assert_eq!(bigraph_density_via_s(&Bigraph::complete(2, 2), &s).unwrap(), BigRational::from_ratio(2, 1));
        assert_eq!(bigraph_density_via_s(&Bigraph::complete(1, 3), &s).unwrap(), BigRational::from_ratio(1, 1));
        assert_eq!(bigraph_density_via_s(&Bigraph::complete(1, 1), &s).unwrap(), BigRational::from_ratio(1, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let n = rng.gen_range(1..5);
            let s = random_space(&mut rng, n, 0.2);
            let (l, r) = (rng.gen_range(1..4), rng.gen_range(1..4));
            let edges: Vec<(usize, usize)> =
                (0..l).flat_map(|u| (0..r).map(move |w| (u, w))).filter(|_| rng.gen_bool(0.6)).collect();
            let b = Bigraph::new(l, r, edges).unwrap();
            let via_s = bigraph_density_via_s(&b, &s).unwrap();
            let direct = density(&b.to_graph(), &s, false).unwrap();
            assert!((via_s - direct).abs() < 1e-10);
        }
    }
}
