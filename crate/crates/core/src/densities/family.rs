use super::{HomMeasure, MARGINAL_LIMIT};
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::scalar::Scalar;
use crate::spaces::FiniteMarkovSpace;

/// Outcome of [`check_family`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyReport {
    pub decreasing_ok: bool,
    pub markov_ok: bool,
    /// Largest entrywise defect `|mu(x | x_S) - mu(x_U | x_S) mu(x_W | x_S)|`.
    pub max_residual: f64,
}

/// Residual above which the Markov property is reported as failing.
pub const MARKOV_TOL: f64 = 1e-10;

/// Checks that the measures `eta^{G[S]}` form a decreasing family, and that
/// `eta^G` is Markovian across every separation `(U, W)` of `G`.
pub fn check_family<T: Scalar>(g: &Graph, s: &FiniteMarkovSpace<T>) -> Result<FamilyReport> {
    let (n, k) = (s.n(), g.vertex_count());
    if (n as f64).powi(k as i32) > MARGINAL_LIMIT {
        return Err(Error::resource(format!("{n}^{k} maps exceed the limit {MARGINAL_LIMIT:.0e}")));
    }
    // Measures of all induced subgraphs, indexed by vertex bitmask.
    let measures: Vec<Vec<T>> = (0u32..1 << k)
        .map(|mask| {
            let verts = members(mask, k);
            HomMeasure::new(&g.induced(&verts), s).materialize()
        })
        .collect::<Result<_>>()?;

    let mut decreasing_ok = true;
    for t in 0u32..1 << k {
        let tv = members(t, k);
        let mut sub = t;
        // Every subset of t, including the empty set.
        loop {
            let positions: Vec<usize> =
                members(sub, k).iter().map(|v| tv.iter().position(|u| u == v).expect("subset")).collect();
            let marg = sum_onto(&measures[t as usize], tv.len(), n, &positions);
            let own = &measures[sub as usize];
            if marg.iter().zip(own).any(|(m, o)| o.is_negligible() && !m.is_negligible()) {
                decreasing_ok = false;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & t;
        }
    }

    let full = &measures[(1usize << k) - 1];
    let mut max_residual = 0.0f64;
    // Each vertex goes to U only (0), W only (1) or the separator (2).
    for code in 0..3usize.pow(k as u32) {
        let mut side = vec![0u8; k];
        let mut c = code;
        for v in side.iter_mut() {
            *v = (c % 3) as u8;
            c /= 3;
        }
        let separated = g.edges().iter().all(|&(a, b)| !matches!((side[a], side[b]), (0, 1) | (1, 0)));
        if !separated || !side.contains(&0) || !side.contains(&1) {
            continue;
        }
        let pick = |keep: &dyn Fn(u8) -> bool| (0..k).filter(|&v| keep(side[v])).collect::<Vec<_>>();
        let sep = pick(&|x| x == 2);
        let u = pick(&|x| x != 1);
        let w = pick(&|x| x != 0);
        let mu_s = sum_onto(full, k, n, &sep);
        let mu_u = sum_onto(full, k, n, &u);
        let mu_w = sum_onto(full, k, n, &w);
        let mut x = vec![0usize; k];
        for value in full {
            let idx = |vs: &[usize]| vs.iter().fold(0, |acc, &v| acc * n + x[v]);
            let ms = &mu_s[idx(&sep)];
            if !ms.is_negligible() {
                let joint = value.clone() / ms.clone();
                let product = (mu_u[idx(&u)].clone() / ms.clone()) * (mu_w[idx(&w)].clone() / ms.clone());
                max_residual = max_residual.max((joint - product).to_f64().abs());
            }
            for j in (0..k).rev() {
                x[j] += 1;
                if x[j] < n {
                    break;
                }
                x[j] = 0;
            }
        }
    }
    Ok(FamilyReport { decreasing_ok, markov_ok: max_residual <= MARKOV_TOL, max_residual })
}

fn members(mask: u32, k: usize) -> Vec<usize> {
    (0..k).filter(|&v| mask >> v & 1 == 1).collect()
}

/// Sums a dense table over `[n]^k` onto the coordinates `keep`, in order.
pub(crate) fn sum_onto<T: Scalar>(table: &[T], k: usize, n: usize, keep: &[usize]) -> Vec<T> {
    let mut out = vec![T::zero(); n.pow(keep.len() as u32)];
    let mut x = vec![0usize; k];
    for value in table {
        let idx = keep.iter().fold(0, |acc, &v| acc * n + x[v]);
        out[idx].add_assign_ref(value);
        for j in (0..k).rev() {
            x[j] += 1;
            if x[j] < n {
                break;
            }
            x[j] = 0;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::oracle::brute_table;
    use crate::spaces::test_util::{random_rational_space, random_space};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn disjoint_union_is_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let s = random_rational_space(&mut rng, 3);
        let g1 = Graph::path(2);
        let g2 = Graph::cycle(3);
        let union = HomMeasure::new(&g1.disjoint_union(&g2), &s).materialize().unwrap();
        let a = HomMeasure::new(&g1, &s).materialize().unwrap();
        let b = HomMeasure::new(&g2, &s).materialize().unwrap();
        let expected: Vec<_> = a.iter().flat_map(|x| b.iter().map(move |y| x.clone() * y.clone())).collect();
        assert_eq!(union, expected);
    }

    #[test]
    fn path_is_markov_at_middle_vertex() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let s = random_space(&mut rng, 3, 0.2);
        let r = check_family(&Graph::path(2), &s).unwrap();
        assert!(r.decreasing_ok && r.markov_ok && r.max_residual <= 1e-12);
        assert_eq!(HomMeasure::new(&Graph::path(2), &s).materialize().unwrap().len(), 27);
        let brute = brute_table(&Graph::path(2), &s);
        let mu_mid = sum_onto(&brute, 3, 3, &[1]);
        assert!((mu_mid.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_atom_is_trivially_fine() {
        let s = FiniteMarkovSpace::<f64>::single_atom();
        let r = check_family(&Graph::complete(4), &s).unwrap();
        assert!(r.decreasing_ok && r.markov_ok);
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn exact_mode_has_zero_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let s = random_rational_space(&mut rng, 2);
        let r = check_family(&Graph::cycle(4), &s).unwrap();
        assert!(r.decreasing_ok && r.markov_ok);
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn budget() {
        let s = FiniteMarkovSpace::<f64>::from_graph(&Graph::complete(20)).unwrap();
        assert!(matches!(check_family(&Graph::path(5), &s), Err(Error::Resource(_))));
    }
}
