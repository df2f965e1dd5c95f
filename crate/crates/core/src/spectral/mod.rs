//! Spectra of the adjacency operator of finite Markov spaces, and the Fourier
//! eigenvalues of the logarithmic convolution graphon.

mod convolution;
mod jacobi;

pub use convolution::{
    convolution_eigenvalue, convolution_eigenvalues, convolution_lower_bound, convolution_report,
    write_convolution_csv, ConvolutionReport, ConvolutionRow, PartialSums, CONVOLUTION_CHECKPOINTS, MAX_CONVOLUTION_K,
    PLATEAU_TOL,
};
pub use jacobi::{symmetric_eigen, Eigen, OFF_TOL};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{FiniteMarkovSpace, Partition};

/// Largest space [`spectrum`] accepts.
pub const MAX_SPECTRUM_ATOMS: usize = 4096;
/// Schatten exponents compared by [`projected_spectrum_check`].
pub const CONTRACTION_EXPONENTS: [u32; 4] = [2, 3, 4, 6];
const INTERLACING_TOL: f64 = 1e-10;

/// Eigenvalues of `S[x][y] = eta[x][y] / sqrt(pi[x] pi[y])`, sorted descending.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    residual: f64,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Off-diagonal Frobenius mass left when the solver stopped.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `sum_i lambda_i^k`, the trace of `A^k`.
    pub fn power_sum(&self, k: u32) -> f64 {
        self.values.iter().map(|x| x.powi(k as i32)).sum()
    }

    pub fn schatten(&self, p: u32) -> f64 {
        self.values.iter().map(|x| x.abs().powi(p as i32)).sum::<f64>().powf(1.0 / p as f64)
    }

    /// The `k`-th largest positive eigenvalue (1-based), or 0.
    pub fn lambda_plus(&self, k: usize) -> f64 {
        self.values.iter().copied().filter(|&x| x > 0.0).nth(k - 1).unwrap_or(0.0)
    }

    /// The `k`-th most negative eigenvalue (1-based), or 0.
    pub fn lambda_minus(&self, k: usize) -> f64 {
        self.values.iter().rev().copied().filter(|&x| x < 0.0).nth(k - 1).unwrap_or(0.0)
    }
}

/// The symmetrized adjacency matrix `D^{1/2} M D^{-1/2}`, row-major.
pub fn symmetrized_matrix<T: Scalar>(s: &FiniteMarkovSpace<T>) -> Vec<f64> {
    let n = s.n();
    let root: Vec<f64> = s.pi().iter().map(|p| p.to_f64().sqrt()).collect();
    let mut m = vec![0.0; n * n];
    for x in 0..n {
        for y in 0..n {
            m[x * n + y] = s.eta(x, y).to_f64() / (root[x] * root[y]);
        }
    }
    m
}

pub fn spectrum<T: Scalar>(s: &FiniteMarkovSpace<T>) -> Result<Spectrum> {
    if s.n() > MAX_SPECTRUM_ATOMS {
        return Err(Error::resource(format!("{} atoms exceed the eigensolver limit {MAX_SPECTRUM_ATOMS}", s.n())));
    }
    let e = symmetric_eigen(&symmetrized_matrix(s), s.n(), false);
    let mut values = e.values;
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(Spectrum { values, residual: e.off })
}

/// Spectra of many spaces, one solver per thread.
pub fn spectrum_batch<T: Scalar>(spaces: &[FiniteMarkovSpace<T>]) -> Result<Vec<Spectrum>> {
    spaces.par_iter().map(spectrum).collect()
}

/// `||S v - v||_inf` for `v = sqrt(pi)`, which is the top eigenvector of every
/// space.
pub fn top_eigenvector_residual<T: Scalar>(s: &FiniteMarkovSpace<T>) -> f64 {
    let n = s.n();
    let m = symmetrized_matrix(s);
    let v: Vec<f64> = s.pi().iter().map(|p| p.to_f64().sqrt()).collect();
    (0..n).map(|x| ((0..n).map(|y| m[x * n + y] * v[y]).sum::<f64>() - v[x]).abs()).fold(0.0, f64::max)
}

/// `t(C_k)` as `tr(A^k)`.
pub fn cycle_density_spectral<T: Scalar>(s: &FiniteMarkovSpace<T>, k: u32) -> Result<f64> {
    if k < 3 {
        return Err(Error::validation(format!("cycle length must be at least 3, got {k}")));
    }
    Ok(spectrum(s)?.power_sum(k))
}

pub fn schatten_norm<T: Scalar>(s: &FiniteMarkovSpace<T>, p: u32) -> Result<f64> {
    if p == 0 {
        return Err(Error::validation("Schatten exponent must be at least 1"));
    }
    Ok(spectrum(s)?.schatten(p))
}

/// Comparison of a space with its stepped projection.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionCheck {
    pub spec_full: Spectrum,
    pub spec_proj: Spectrum,
    pub interlacing_ok: bool,
    pub schatten_contraction_ok: bool,
}

/// Projection onto step functions can only shrink positive eigenvalues and
/// raise negative ones, index by index, and so contracts every Schatten norm.
pub fn projected_spectrum_check<T: Scalar>(s: &FiniteMarkovSpace<T>, p: &Partition) -> Result<ProjectionCheck> {
    let spec_full = spectrum(s)?;
    let spec_proj = spectrum(&s.project(p)?)?;
    let n = s.n();
    let interlacing_ok = (1..=n).all(|k| {
        spec_proj.lambda_plus(k) <= spec_full.lambda_plus(k) + INTERLACING_TOL
            && spec_proj.lambda_minus(k) >= spec_full.lambda_minus(k) - INTERLACING_TOL
    });
    let schatten_contraction_ok =
        CONTRACTION_EXPONENTS.iter().all(|&q| spec_proj.schatten(q) <= spec_full.schatten(q) + INTERLACING_TOL);
    Ok(ProjectionCheck { spec_full, spec_proj, interlacing_ok, schatten_contraction_ok })
}

/// All products `a_i b_j`, sorted descending: the spectrum of a product space.
pub fn outer_product_spectrum(a: &Spectrum, b: &Spectrum) -> Vec<f64> {
    let mut v: Vec<f64> = a.values.iter().flat_map(|x| b.values.iter().map(move |y| x * y)).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::density;
    use crate::graphs::Graph;
    use crate::spaces::product_space;
    use crate::spaces::test_util::random_space;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kn(n: usize) -> FiniteMarkovSpace {
        FiniteMarkovSpace::from_graph(&Graph::complete(n)).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn fixtures() {
        assert!(close(spectrum(&kn(2)).unwrap().values(), &[1.0, -1.0], 1e-14));
        assert!(close(spectrum(&kn(3)).unwrap().values(), &[1.0, -0.5, -0.5], 1e-14));
        assert_eq!(spectrum(&FiniteMarkovSpace::<f64>::single_atom()).unwrap().values(), &[1.0]);
        assert!((cycle_density_spectral(&kn(2), 4).unwrap() - 2.0).abs() < 1e-14);
        assert!(cycle_density_spectral(&kn(2), 3).unwrap().abs() < 1e-14);
        assert!((cycle_density_spectral(&kn(3), 3).unwrap() - 0.75).abs() < 1e-14);
        assert!(cycle_density_spectral(&kn(3), 2).is_err());
        assert!((schatten_norm(&kn(2), 4).unwrap() - 2f64.powf(0.25)).abs() < 1e-14);
        assert_eq!(schatten_norm(&FiniteMarkovSpace::<f64>::single_atom(), 3).unwrap(), 1.0);
    }

    #[test]
    fn cycles_match_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        for _ in 0..10 {
            let n = rng.gen_range(1..=24);
            let s = random_space(&mut rng, n, 0.3);
            let spec = spectrum(&s).unwrap();
            assert!((spec.values()[0] - 1.0).abs() <= 1e-9);
            assert!(spec.values().iter().all(|x| x.abs() <= 1.0 + 1e-9));
            assert!(top_eigenvector_residual(&s) <= 1e-8);
            for k in 3..=8u32 {
                let t = density(&Graph::cycle(k as usize), &s, false).unwrap();
                assert!((t - spec.power_sum(k)).abs() <= 1e-9);
            }
            assert!((spec.schatten(64) - 1.0).abs() < 0.2);
        }
    }

    #[test]
    fn projections() {
        let mut rng = ChaCha8Rng::seed_from_u64(92);
        let s = random_space(&mut rng, 12, 0.2);
        let trivial = projected_spectrum_check(&s, &Partition::trivial(12)).unwrap();
        assert!((trivial.spec_proj.values()[0] - 1.0).abs() < 1e-12);
        assert!(trivial.spec_proj.values()[1..].iter().all(|x| x.abs() < 1e-12));
        let id = projected_spectrum_check(&s, &Partition::identity(12)).unwrap();
        assert!(close(id.spec_full.values(), id.spec_proj.values(), 1e-13));
        for _ in 0..20 {
            let n = rng.gen_range(2..=32);
            let s = random_space(&mut rng, n, 0.3);
            let p = Partition::random(n, rng.gen_range(1..=n), &mut rng);
            let r = projected_spectrum_check(&s, &p).unwrap();
            assert!(r.interlacing_ok && r.schatten_contraction_ok);
        }
        assert!(projected_spectrum_check(&s, &Partition::identity(3)).is_err());
    }

    #[test]
    fn products_multiply_spectra() {
        let mut rng = ChaCha8Rng::seed_from_u64(93);
        let a = random_space(&mut rng, 4, 0.0);
        let b = random_space(&mut rng, 5, 0.3);
        let prod = spectrum(&product_space(&a, &b)).unwrap();
        let expect = outer_product_spectrum(&spectrum(&a).unwrap(), &spectrum(&b).unwrap());
        assert!(close(prod.values(), &expect, 1e-9));
    }

    #[test]
    fn lambda_indexing() {
        let s = Spectrum { values: vec![1.0, 0.5, 0.0, -0.25, -0.75], residual: 0.0 };
        assert_eq!((s.lambda_plus(1), s.lambda_plus(2), s.lambda_plus(3)), (1.0, 0.5, 0.0));
        assert_eq!((s.lambda_minus(1), s.lambda_minus(2), s.lambda_minus(3)), (-0.75, -0.25, 0.0));
    }
}
