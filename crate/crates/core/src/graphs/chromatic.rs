use std::collections::HashMap;
use std::fmt;

use num::BigInt;

use super::Graph;
use crate::error::{Error, Result};

/// Deletion–contraction is only run on patterns up to this many edges.
pub const CHROMATIC_EDGE_BUDGET: usize = 16;

/// Integer polynomial, coefficients lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0; k + 1];
        c[k] = 1;
        IntPolynomial { coeffs: c }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> i64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn eval(&self, x: i64) -> BigInt {
        let x = BigInt::from(x);
        self.coeffs.iter().rev().fold(BigInt::from(0), |acc, &c| acc * &x + c)
    }

    fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        IntPolynomial::new((0..len).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.unsigned_abs();
            match (k, a) {
                (0, _) => write!(f, "{a}")?,
                (_, 1) => {}
                _ => write!(f, "{a}")?,
            }
            match k {
                0 => {}
                1 => write!(f, "q")?,
                _ => write!(f, "q^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Memo key: vertex count plus the sorted edge list after relabelling the
/// vertices in ascending order. Not isomorphism-invariant, but stable.
type Key = (usize, Vec<(u8, u8)>);

/// Chromatic polynomial by deletion–contraction with memoization.
pub fn chromatic_polynomial(g: &Graph) -> Result<IntPolynomial> {
    if g.edge_count() > CHROMATIC_EDGE_BUDGET {
        return Err(Error::resource(format!(
            "chromatic polynomial limited to {CHROMATIC_EDGE_BUDGET} edges, pattern has {}",
            g.edge_count()
        )));
    }
    let edges: Vec<(u8, u8)> = g.edges().iter().map(|&(u, v)| (u as u8, v as u8)).collect();
    let mut memo = HashMap::new();
    Ok(dc(g.vertex_count(), edges, &mut memo))
}

fn dc(n: usize, edges: Vec<(u8, u8)>, memo: &mut HashMap<Key, IntPolynomial>) -> IntPolynomial {
    if edges.is_empty() {
        return IntPolynomial::monomial(n);
    }
    let key = (n, edges);
    if let Some(p) = memo.get(&key) {
        return p.clone();
    }
    let (n, edges) = key.clone();
    let (u, v) = edges[edges.len() - 1];
    let deleted: Vec<_> = edges[..edges.len() - 1].to_vec();
    let contracted = contract(&deleted, u, v);
    let p = dc(n, deleted, memo).sub(&dc(n - 1, contracted, memo));
    memo.insert(key, p.clone());
    p
}

/// Merges `v` into `u` (u < v), drops vertex `v` and relabels.
fn contract(edges: &[(u8, u8)], u: u8, v: u8) -> Vec<(u8, u8)> {
    let relabel = |x: u8| {
        let x = if x == v { u } else { x };
        if x > v {
            x - 1
        } else {
            x
        }
    };
    let mut out: Vec<(u8, u8)> = edges
        .iter()
        .map(|&(a, b)| {
            let (a, b) = (relabel(a), relabel(b));
            (a.min(b), a.max(b))
        })
        .filter(|&(a, b)| a != b)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}
