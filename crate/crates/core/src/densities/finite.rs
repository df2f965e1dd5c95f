use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::graphs::{chromatic_polynomial, Graph, CHROMATIC_EDGE_BUDGET};

/// Default cap on the candidate images tried by [`hom_count`].
pub const HOM_STEP_BUDGET: u64 = 100_000_000;

/// Number of homomorphisms `g -> h` by backtracking.
pub fn hom_count(g: &Graph, h: &Graph) -> Result<BigInt> {
    hom_count_with_budget(g, h, HOM_STEP_BUDGET)
}

/// As [`hom_count`], failing once more than `budget` candidate images have
/// been tried.
pub fn hom_count_with_budget(g: &Graph, h: &Graph, budget: u64) -> Result<BigInt> {
    let order = bfs_order(g);
    // For each vertex in the order: its neighbors placed before it.
    let mut placed_at = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in order.iter().enumerate() {
        placed_at[v] = i;
    }
    let back: Vec<Vec<usize>> = order
        .iter()
        .map(|&v| g.neighbors(v).iter().copied().filter(|&u| placed_at[u] < placed_at[v]).collect())
        .collect();
    let all: Vec<usize> = (0..h.vertex_count()).collect();
    let mut search =
        Search { g_order: &order, back: &back, h, all: &all, image: vec![0; g.vertex_count()], steps: 0, budget };
    let count = search.run(0)?;
    Ok(BigInt::from(count))
}

struct Search<'a> {
    g_order: &'a [usize],
    back: &'a [Vec<usize>],
    h: &'a Graph,
    all: &'a [usize],
    image: Vec<usize>,
    steps: u64,
    budget: u64,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) -> Result<u128> {
        if depth == self.g_order.len() {
            return Ok(1);
        }
        let v = self.g_order[depth];
        let back = &self.back[depth];
        let candidates: &[usize] = match back.first() {
            Some(&u) => self.h.neighbors(self.image[u]),
            None => self.all,
        };
        let mut total = 0u128;
        for &y in candidates {
            self.steps += 1;
            if self.steps > self.budget {
                return Err(Error::resource(format!("homomorphism search exceeded {} steps", self.budget)));
            }
            if back.iter().skip(1).all(|&u| self.h.has_edge(self.image[u], y)) {
                self.image[v] = y;
                total += self.run(depth + 1)?;
            }
        }
        Ok(total)
    }
}

/// Breadth-first order over every component, roots and children ascending.
fn bfs_order(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let start = order.len();
        order.push(root);
        let mut head = start;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &u in g.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    order.push(u);
                }
            }
        }
    }
    order
}

/// `t*(G, H) = hom(G, H) p^(2b - a) / (2q)^b` for `G` with `a` vertices and `b`
/// edges and `H` with `p` vertices and `q` edges.
///
/// Complete targets use the chromatic polynomial when `G` is small enough;
/// everything else is counted by search.
pub fn normalized_density_finite_graph(g: &Graph, h: &Graph) -> Result<BigRational> {
    let (a, b) = (g.vertex_count() as i64, g.edge_count() as i64);
    let (p, q) = (h.vertex_count(), h.edge_count());
    if q == 0 {
        return Err(Error::validation("target graph has no edges"));
    }
    let complete = q == p * (p - 1) / 2;
    let hom = if complete && g.edge_count() <= CHROMATIC_EDGE_BUDGET {
        chromatic_polynomial(g)?.eval(p as i64)
    } else {
        hom_count(g, h)?
    };
    Ok(BigRational::from_integer(hom) * int_power(p, 2 * b - a) / int_power(2 * q, b))
}

fn int_power(base: usize, e: i64) -> BigRational {
    let x = num::pow(BigInt::from(base), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(x)
    } else if x.is_zero() {
        BigRational::zero()
    } else {
        BigRational::one() / BigRational::from_integer(x)
    }
}
