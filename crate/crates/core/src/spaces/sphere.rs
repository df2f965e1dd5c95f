//! Uniform sampling on the unit sphere subject to orthogonality constraints.
//!
//! The orthogonality space on `S^{d-1}` joins each point to the uniform
//! distribution on the great subsphere orthogonal to it. Only sampling is
//! provided; the conditional law given several earlier neighbors is uniform
//! on the unit sphere of the orthogonal complement of their span.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Tolerance on anchor norms and on reported orthogonality.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
/// Residual norm below which a Gaussian draw is rejected.
const RESAMPLE_NORM: f64 = 1e-12;
/// Residual norm below which an anchor is taken to lie in the span of the
/// previous ones.
const RANK_TOL: f64 = 1e-9;

/// Unit sphere `S^{d-1}` with its orthogonality relation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereSpace {
    d: usize,
    tol: f64,
}

/// Result of a conditional draw.
#[derive(Clone, Debug, PartialEq)]
pub enum SphereDraw {
    Point(Vec<f64>),
    /// The anchors span the whole space, so no unit vector is orthogonal to
    /// all of them.
    Degenerate,
}

impl SphereDraw {
    pub fn point(&self) -> Option<&[f64]> {
        match self {
            SphereDraw::Point(p) => Some(p),
            SphereDraw::Degenerate => None,
        }
    }
}

impl SphereSpace {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::validation(format!("sphere dimension must be at least 2, got {d}")));
        }
        Ok(SphereSpace { d, tol: ORTHOGONALITY_TOL })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Uniform point on the unit sphere of the orthogonal complement of the
    /// anchors' span.
    pub fn conditional_sample<R: Rng + ?Sized>(&self, anchors: &[&[f64]], rng: &mut R) -> Result<SphereDraw> {
        let basis = self.anchor_basis(anchors)?;
        if basis.len() == self.d {
            return Ok(SphereDraw::Degenerate);
        }
        loop {
            let mut v: Vec<f64> = (0..self.d).map(|_| rng.sample(StandardNormal)).collect();
            // Two passes of modified Gram–Schmidt.
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&v, b);
                    v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let norm = dot(&v, &v).sqrt();
            if norm >= RESAMPLE_NORM {
                v.iter_mut().for_each(|x| *x /= norm);
                return Ok(SphereDraw::Point(v));
            }
        }
    }

    /// Orthonormal basis of the anchors' span.
    fn anchor_basis(&self, anchors: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for (i, a) in anchors.iter().enumerate() {
            if a.len() != self.d {
                return Err(Error::Mismatch { expected: self.d, found: a.len() });
            }
            if (dot(a, a).sqrt() - 1.0).abs() > self.tol {
                return Err(Error::validation(format!("anchor {i} is not a unit vector")));
            }
            let mut v = a.to_vec();
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&v, b);
                    v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let norm = dot(&v, &v).sqrt();
            if norm > RANK_TOL {
                v.iter_mut().for_each(|x| *x /= norm);
                basis.push(v);
            }
        }
        Ok(basis)
    }
}

/// Convenience wrapper over [`SphereSpace::conditional_sample`].
pub fn sphere_conditional_sample<R: Rng + ?Sized>(d: usize, anchors: &[&[f64]], rng: &mut R) -> Result<SphereDraw> {
    SphereSpace::new(d)?.conditional_sample(anchors, rng)
}

/// Random stream for one sample, determined by `(seed, index)` alone.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
