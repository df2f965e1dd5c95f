//! Sum-product variable elimination over factors on a common finite domain.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graphs::{elimination_order_keeping, Graph};
use crate::scalar::Scalar;

/// Default cap on `n^(w+1)`, the work of the widest elimination step.
pub const DEFAULT_BUDGET: f64 = 1e8;

/// Fraction of zero entries above which a two-variable factor keeps
/// per-row support lists.
const SPARSE_FRACTION: f64 = 0.9;

/// A nonnegative table over an ordered tuple of distinct variables. The
/// first variable is the most significant index.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor<T: Scalar> {
    vars: Vec<usize>,
    table: Vec<T>,
    support: Option<Support>,
}

/// Nonzero columns per row, and nonzero rows per column, of a sparse
/// two-variable factor.
#[derive(Clone, Debug, PartialEq)]
struct Support {
    by_first: Vec<Vec<usize>>,
    by_second: Vec<Vec<usize>>,
}

impl<T: Scalar> Factor<T> {
    /// `table` has `n^vars.len()` entries.
    pub fn new(vars: Vec<usize>, table: Vec<T>, n: usize) -> Result<Self> {
        let distinct: BTreeSet<_> = vars.iter().collect();
        if distinct.len() != vars.len() {
            return Err(Error::validation("factor variables must be distinct"));
        }
        let size = checked_pow(n, vars.len()).ok_or_else(|| Error::resource("factor table too large"))?;
        if table.len() != size {
            return Err(Error::Mismatch { expected: size, found: table.len() });
        }
        let mut f = Factor { vars, table, support: None };
        f.index_support(n);
        Ok(f)
    }

    pub fn scalar(value: T) -> Self {
        Factor { vars: Vec::new(), table: vec![value], support: None }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    /// Value at a full assignment of all variables (indexed by variable).
    pub fn value_at(&self, assignment: &[usize], n: usize) -> &T {
        let idx = self.vars.iter().fold(0, |acc, &v| acc * n + assignment[v]);
        &self.table[idx]
    }

    fn index_support(&mut self, n: usize) {
        if self.vars.len() != 2 {
            return;
        }
        let zeros = self.table.iter().filter(|x| x.is_zero()).count();
        if (zeros as f64) < SPARSE_FRACTION * self.table.len() as f64 {
            return;
        }
        let mut by_first = vec![Vec::new(); n];
        let mut by_second = vec![Vec::new(); n];
        for a in 0..n {
            for b in 0..n {
                if !self.table[a * n + b].is_zero() {
                    by_first[a].push(b);
                    by_second[b].push(a);
                }
            }
        }
        self.support = Some(Support { by_first, by_second });
    }

    fn strides(&self, n: usize) -> Vec<usize> {
        let mut s = vec![1; self.vars.len()];
        for i in (0..self.vars.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * n;
        }
        s
    }
}

/// Factors over variables `0..var_count`, each ranging over `0..n`.
#[derive(Clone, Debug)]
pub struct FactorGraph<T: Scalar> {
    n: usize,
    var_count: usize,
    factors: Vec<Factor<T>>,
}

impl<T: Scalar> FactorGraph<T> {
    pub fn new(n: usize, var_count: usize) -> Self {
        FactorGraph { n, var_count, factors: Vec::new() }
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn factors(&self) -> &[Factor<T>] {
        &self.factors
    }

    pub fn add(&mut self, f: Factor<T>) -> Result<()> {
        if let Some(&v) = f.vars.iter().find(|&&v| v >= self.var_count) {
            return Err(Error::validation(format!("factor variable {v} out of range")));
        }
        let expected = checked_pow(self.n, f.vars.len());
        if expected != Some(f.table.len()) {
            return Err(Error::Mismatch { expected: expected.unwrap_or(usize::MAX), found: f.table.len() });
        }
        self.factors.push(f);
        Ok(())
    }

    /// Graph joining variables that share a factor.
    pub fn interaction_graph(&self) -> Graph {
        let mut edges = BTreeSet::new();
        for f in &self.factors {
            for (i, &a) in f.vars.iter().enumerate() {
                for &b in &f.vars[i + 1..] {
                    edges.insert((a.min(b), a.max(b)));
                }
            }
        }
        Graph::new(self.var_count, edges).expect("interaction edges are valid")
    }

    /// Induced width of the min-fill order that keeps `keep`.
    pub fn width(&self, keep: &[usize]) -> usize {
        elimination_order_keeping(&self.interaction_graph(), keep).width
    }

    /// Sum over all assignments of the product of all factors.
    pub fn contract(&self, budget: f64) -> Result<T> {
        let table = self.marginal(&[], budget)?;
        Ok(table.into_iter().next().expect("scalar table"))
    }

    /// Dense table over `keep` (in the given order, first most significant)
    /// of the sum of the factor product over all other variables.
    pub fn marginal(&self, keep: &[usize], budget: f64) -> Result<Vec<T>> {
        let distinct: BTreeSet<_> = keep.iter().collect();
        if distinct.len() != keep.len() || keep.iter().any(|&v| v >= self.var_count) {
            return Err(Error::validation("marginal variables must be distinct and in range"));
        }
        let elim = elimination_order_keeping(&self.interaction_graph(), keep);
        let n = self.n as f64;
        let work = n.powi(elim.width as i32 + 1);
        if work > budget {
            return Err(Error::resource(format!(
                "elimination needs about {work:.3e} operations (width {}, {} atoms), over the budget {budget:.0e}; use a coarser space",
                elim.width, self.n
            )));
        }
        let out_size = n.powi(keep.len() as i32);
        if out_size > budget {
            return Err(Error::resource(format!(
                "output table of {out_size:.3e} entries exceeds the budget {budget:.0e}"
            )));
        }
        let mut factors = self.factors.clone();
        for &v in &elim.order {
            let (with_v, rest): (Vec<_>, Vec<_>) = factors.into_iter().partition(|f| f.vars.contains(&v));
            factors = rest;
            factors.push(if with_v.is_empty() {
                Factor::scalar(T::from_ratio(self.n as i64, 1))
            } else {
                eliminate(&with_v, v, self.n)
            });
        }
        Ok(combine(&factors, keep, self.n))
    }
}

/// Sums variable `v` out of the product of `fs`, all of which mention `v`.
/// The same factor with `v` moved to the last (contiguous) position.
fn with_last<T: Scalar>(f: &Factor<T>, v: usize, n: usize) -> Factor<T> {
    let i = f.vars.iter().position(|&u| u == v).expect("factor mentions v");
    let k = f.vars.len();
    if i + 1 == k || f.support.is_some() {
        return f.clone();
    }
    let mut vars = f.vars.clone();
    vars.remove(i);
    vars.push(v);
    let st = f.strides(n);
    // Old strides listed in the new variable order.
    let old: Vec<usize> = vars.iter().map(|u| st[f.vars.iter().position(|w| w == u).unwrap()]).collect();
    let mut table = Vec::with_capacity(f.table.len());
    let mut digits = vec![0usize; k];
    let mut idx = 0;
    for _ in 0..f.table.len() {
        table.push(f.table[idx].clone());
        for j in (0..k).rev() {
            if digits[j] + 1 < n {
                digits[j] += 1;
                idx += old[j];
                break;
            }
            digits[j] = 0;
            idx -= (n - 1) * old[j];
        }
    }
    Factor { vars, table, support: None }
}

fn eliminate<T: Scalar>(fs: &[Factor<T>], v: usize, n: usize) -> Factor<T> {
    let fs: Vec<Factor<T>> = fs.iter().map(|f| with_last(f, v, n)).collect();
    let scope: Vec<usize> = fs
        .iter()
        .flat_map(|f| f.vars.iter().copied())
        .filter(|&u| u != v)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let r = scope.len();
    // Per factor: stride of each scope position (0 when absent), stride of v.
    let layout: Vec<(Vec<usize>, usize)> = fs
        .iter()
        .map(|f| {
            let st = f.strides(n);
            let pos = |u: usize| f.vars.iter().position(|&w| w == u);
            let per = scope.iter().map(|&u| pos(u).map_or(0, |i| st[i])).collect();
            (per, st[pos(v).expect("factor mentions v")])
        })
        .collect();
    // A sparse two-variable factor restricts the values of v to scan.
    let sparse = fs.iter().find_map(|f| {
        let sup = f.support.as_ref()?;
        let (lists, other) = if f.vars[1] == v { (&sup.by_first, f.vars[0]) } else { (&sup.by_second, f.vars[1]) };
        Some((lists, scope.iter().position(|&u| u == other).expect("other variable in scope")))
    });
    let all: Vec<usize> = (0..n).collect();
    let size = checked_pow(n, r).expect("size within budget");
    let mut table = Vec::with_capacity(size);
    let mut digits = vec![0usize; r];
    let mut base = vec![0usize; fs.len()];
    for _ in 0..size {
        let candidates = match sparse {
            Some((lists, j)) => &lists[digits[j]],
            None => &all,
        };
        let mut acc = T::zero();
        'x: for &x in candidates {
            let mut p = fs[0].table[base[0] + x * layout[0].1].clone();
            if p.is_zero() {
                continue;
            }
            for (k, f) in fs.iter().enumerate().skip(1) {
                let y = &f.table[base[k] + x * layout[k].1];
                if y.is_zero() {
                    continue 'x;
                }
                p = p.mul_ref(y);
            }
            acc.add_assign_ref(&p);
        }
        table.push(acc);
        // Odometer step, last digit fastest.
        for j in (0..r).rev() {
            if digits[j] + 1 < n {
                digits[j] += 1;
                for (k, (per, _)) in layout.iter().enumerate() {
                    base[k] += per[j];
                }
                break;
            }
            digits[j] = 0;
            for (k, (per, _)) in layout.iter().enumerate() {
                base[k] -= (n - 1) * per[j];
            }
        }
    }
    let mut f = Factor { vars: scope, table, support: None };
    f.index_support(n);
    f
}

/// Product of factors whose variables all lie in `keep`, tabulated over `keep`.
fn combine<T: Scalar>(fs: &[Factor<T>], keep: &[usize], n: usize) -> Vec<T> {
    let r = keep.len();
    let size = checked_pow(n, r).expect("size within budget");
    let mut assignment = vec![0usize; keep.iter().max().map_or(0, |m| m + 1)];
    let mut digits = vec![0usize; r];
    let mut out = Vec::with_capacity(size);
    for _ in 0..size {
        for (j, &v) in keep.iter().enumerate() {
            assignment[v] = digits[j];
        }
        let mut p = T::one();
        for f in fs {
            p = p.mul_ref(f.value_at(&assignment, n));
        }
        out.push(p);
        for j in (0..r).rev() {
            if digits[j] + 1 < n {
                digits[j] += 1;
                break;
            }
            digits[j] = 0;
        }
    }
    out
}

pub(crate) fn checked_pow(n: usize, k: usize) -> Option<usize> {
    (0..k).try_fold(1usize, |acc, _| acc.checked_mul(n))
}
