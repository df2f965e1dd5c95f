//! Finite Markov spaces, their step graphons, partitions and products.
//!
//! A [`FiniteMarkovSpace`] is a symmetric nonnegative `n x n` edge-mass
//! matrix `eta` with total mass one and strictly positive row sums `pi`. The
//! step graphon is `W[i][j] = eta[i][j] / (pi[i] pi[j])`, which is 1-regular
//! with respect to `pi` by construction.

mod discretize;
mod io;
mod partition;
pub mod sphere;

use num::BigRational;

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::scalar::Scalar;

pub use discretize::{discretize_graphon, discretize_kernel, GraphonSpec};
pub use io::{AnySpace, NumericMode, RATIONAL_MAX_ATOMS};
pub use partition::{Partition, RefinementSequence};
pub use sphere::{SphereDraw, SphereSpace};

/// Symmetry tolerance for float input.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Total-mass tolerance for float input.
pub const MASS_TOL: f64 = 1e-12;

/// A finite, symmetric, non-degenerate Markov space.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMarkovSpace<T: Scalar = f64> {
    n: usize,
    eta: Vec<T>,
    pi: Vec<T>,
}

pub type RationalSpace = FiniteMarkovSpace<BigRational>;

impl<T: Scalar> FiniteMarkovSpace<T> {
    /// Builds a space from a square matrix.
    ///
    /// With `normalize` the matrix is divided by its total; otherwise the total
    /// must already be one. Float input is symmetrized after validation so the
    /// stored matrix is exactly symmetric.
    pub fn from_matrix(rows: Vec<Vec<T>>, normalize: bool) -> Result<Self> {
        let n = rows.len();
        let mut eta = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::validation(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            eta.extend(row);
        }
        Self::from_flat(n, eta, normalize)
    }

    /// As [`from_matrix`](Self::from_matrix) for a row-major buffer.
    pub fn from_flat(n: usize, mut eta: Vec<T>, normalize: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("a space needs at least one atom"));
        }
        if eta.len() != n * n {
            return Err(Error::Mismatch { expected: n * n, found: eta.len() });
        }
        for i in 0..n {
            for j in 0..n {
                let x = &eta[i * n + j];
                if *x < T::zero() {
                    return Err(Error::validation(format!("negative entry at ({i}, {j})")));
                }
                if j > i && !x.approx_eq(&eta[j * n + i], SYMMETRY_TOL) {
                    return Err(Error::validation(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        if !T::EXACT {
            let two = T::one() + T::one();
            for i in 0..n {
                for j in i + 1..n {
                    let avg = (eta[i * n + j].clone() + eta[j * n + i].clone()) / two.clone();
                    eta[i * n + j] = avg.clone();
                    eta[j * n + i] = avg;
                }
            }
        }
        let mut total = T::zero();
        eta.iter().for_each(|x| total.add_assign_ref(x));
        if normalize {
            if total.is_negligible() || total <= T::zero() {
                return Err(Error::Degenerate { atom: 0 });
            }
            eta.iter_mut().for_each(|x| *x = x.clone() / total.clone());
        } else if !total.approx_eq(&T::one(), MASS_TOL) {
            return Err(Error::validation(format!("total mass is {total}, expected 1")));
        }
        let mut pi = Vec::with_capacity(n);
        for i in 0..n {
            let mut s = T::zero();
            eta[i * n..(i + 1) * n].iter().for_each(|x| s.add_assign_ref(x));
            if s <= T::zero() || (!T::EXACT && s.is_negligible()) {
                return Err(Error::Degenerate { atom: i });
            }
            pi.push(s);
        }
        Ok(FiniteMarkovSpace { n, eta, pi })
    }

    /// Uniform distribution on the oriented edges of `g`.
    pub fn from_graph(g: &Graph) -> Result<Self> {
        let n = g.vertex_count();
        let mut m = vec![T::zero(); n * n];
        for &(u, v) in g.edges() {
            m[u * n + v] = T::one();
            m[v * n + u] = T::one();
        }
        Self::from_flat(n, m, true)
    }

    /// The one-atom space.
    pub fn single_atom() -> Self {
        FiniteMarkovSpace { n: 1, eta: vec![T::one()], pi: vec![T::one()] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn eta(&self, i: usize, j: usize) -> &T {
        &self.eta[i * self.n + j]
    }

    /// Row-major edge masses.
    pub fn eta_flat(&self) -> &[T] {
        &self.eta
    }

    pub fn pi(&self) -> &[T] {
        &self.pi
    }

    pub fn total_mass(&self) -> T {
        let mut t = T::zero();
        self.eta.iter().for_each(|x| t.add_assign_ref(x));
        t
    }

    /// Converts to float mode.
    pub fn to_f64(&self) -> FiniteMarkovSpace<f64> {
        FiniteMarkovSpace {
            n: self.n,
            eta: self.eta.iter().map(Scalar::to_f64).collect(),
            pi: self.pi.iter().map(Scalar::to_f64).collect(),
        }
    }

    pub fn step_graphon(&self) -> StepGraphon<T> {
        let n = self.n;
        let mut w = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                w.push(self.eta(i, j).clone() / (self.pi[i].clone() * self.pi[j].clone()));
            }
        }
        StepGraphon { n, w }
    }

    /// Transition probability `P_x(y) = eta[x][y] / pi[x]`.
    pub fn transition(&self, x: usize, y: usize) -> T {
        self.eta(x, y).clone() / self.pi[x].clone()
    }

    /// The stepped space `eta_P`: on the same atoms, each cell pair carries
    /// the block mass spread proportionally to `pi`.
    pub fn project(&self, p: &Partition) -> Result<Self> {
        p.check_atoms(self.n)?;
        let block_eta = self.block_masses(p);
        let block_pi = p.block_sums(&self.pi);
        let k = p.block_count();
        let n = self.n;
        let mut eta = Vec::with_capacity(n * n);
        for x in 0..n {
            let bx = p.block_of(x);
            let wx = self.pi[x].clone() / block_pi[bx].clone();
            for y in 0..n {
                let by = p.block_of(y);
                let wy = self.pi[y].clone() / block_pi[by].clone();
                eta.push(block_eta[bx * k + by].clone() * wx.clone() * wy);
            }
        }
        Ok(FiniteMarkovSpace { n, eta, pi: self.pi.clone() })
    }

    /// The block-level space: one atom per block carrying `eta(B_a x B_b)`.
    /// Densities in the quotient equal densities in [`project`](Self::project).
    pub fn quotient(&self, p: &Partition) -> Result<Self> {
        p.check_atoms(self.n)?;
        let eta = self.block_masses(p);
        let pi = p.block_sums(&self.pi);
        Ok(FiniteMarkovSpace { n: p.block_count(), eta, pi })
    }

    fn block_masses(&self, p: &Partition) -> Vec<T> {
        let k = p.block_count();
        let mut m = vec![T::zero(); k * k];
        for x in 0..self.n {
            let bx = p.block_of(x);
            for y in 0..self.n {
                m[bx * k + p.block_of(y)].add_assign_ref(self.eta(x, y));
            }
        }
        m
    }

    /// `A(f, g) = sum_{x,y} f[x] g[y] eta[x][y]`.
    pub fn adjacency_form(&self, f: &[T], g: &[T]) -> Result<T> {
        for v in [f, g] {
            if v.len() != self.n {
                return Err(Error::Mismatch { expected: self.n, found: v.len() });
            }
        }
        let mut acc = T::zero();
        for x in 0..self.n {
            let mut row = T::zero();
            for y in 0..self.n {
                row.add_assign_ref(&self.eta(x, y).mul_ref(&g[y]));
            }
            acc.add_assign_ref(&f[x].mul_ref(&row));
        }
        Ok(acc)
    }
}

/// Product space on pairs `(x1, x2)`, indexed `x1 * b.n() + x2`.
pub fn product_space<T: Scalar>(a: &FiniteMarkovSpace<T>, b: &FiniteMarkovSpace<T>) -> FiniteMarkovSpace<T> {
    let (na, nb) = (a.n, b.n);
    let n = na * nb;
    let mut eta = Vec::with_capacity(n * n);
    for x1 in 0..na {
        for x2 in 0..nb {
            for y1 in 0..na {
                let ea = a.eta(x1, y1);
                for y2 in 0..nb {
                    eta.push(ea.mul_ref(b.eta(x2, y2)));
                }
            }
        }
    }
    let pi =
        (0..na).flat_map(|x1| (0..nb).map(move |x2| (x1, x2))).map(|(x1, x2)| a.pi[x1].mul_ref(&b.pi[x2])).collect();
    FiniteMarkovSpace { n, eta, pi }
}

/// Density `W = d eta / d pi^2` of a finite space.
#[derive(Clone, Debug, PartialEq)]
pub struct StepGraphon<T: Scalar = f64> {
    n: usize,
    w: Vec<T>,
}

impl<T: Scalar> StepGraphon<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn w(&self, i: usize, j: usize) -> &T {
        &self.w[i * self.n + j]
    }

    pub fn as_flat(&self) -> &[T] {
        &self.w
    }

    /// Largest `|sum_j W[i][j] pi[j] - 1|` over rows.
    pub fn regularity_defect(&self, pi: &[T]) -> f64 {
        (0..self.n)
            .map(|i| {
                let mut s = T::zero();
                for j in 0..self.n {
                    s.add_assign_ref(&self.w(i, j).mul_ref(&pi[j]));
                }
                (s - T::one()).to_f64().abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Seeded random spaces for experiments and property tests.
pub mod random {
    use super::*;
    use rand::Rng;

    /// Random symmetric space with entries in `[0, 1)` and a positive diagonal
    /// bump so no row vanishes; some entries are zeroed with probability
    /// `sparsity`.
    pub fn random_space<R: Rng>(rng: &mut R, n: usize, sparsity: f64) -> FiniteMarkovSpace<f64> {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = if rng.gen_bool(sparsity) { 0.0 } else { rng.gen::<f64>() };
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
            if (0..n).all(|j| m[i * n + j] == 0.0) {
                m[i * n + i] = 0.5;
            }
        }
        FiniteMarkovSpace::from_flat(n, m, true).unwrap()
    }

    /// Random space with small-integer weights in exact arithmetic.
    pub fn random_rational_space<R: Rng>(rng: &mut R, n: usize) -> RationalSpace {
        let mut m = vec![0i64; n * n];
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(0..4);
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
            if (0..n).all(|j| m[i * n + j] == 0) {
                m[i * n + i] = 1;
            }
        }
        let m = m.into_iter().map(|v| BigRational::from_ratio(v, 1)).collect();
        FiniteMarkovSpace::from_flat(n, m, true).unwrap()
    }
}

#[cfg(test)]
pub(crate) use self::random as test_util;
