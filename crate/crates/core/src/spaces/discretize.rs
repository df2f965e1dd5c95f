use serde_json::{Map, Value};

use super::FiniteMarkovSpace;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, integrate_panels};
use crate::scalar::Scalar;

/// Built-in 1-regular graphons that can be discretized into finite spaces.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphonSpec {
    /// `W = 1`.
    Constant,
    /// `W(x, y) = 1 + (2x - 1)(2y - 1)` on `[0, 1]`.
    Bilinear,
    /// Diagonal blocks of measure `2^-k` carrying `W = 2^k`, for `k = 1..=k_max`,
    /// closed by one extra atom of mass `2^-k_max` with weight `2^k_max`.
    NoncompactBlocks { k_max: u32 },
    /// Diagonal blocks of measure `a_m` carrying `W = 1/a_m`, with
    /// `a_m` proportional to `m^(-2/(1-epsilon))`, `m = 1..=blocks`.
    LpBlocks { epsilon: f64, blocks: usize },
    /// `W(x, y) = f(x - y)` on `[-1, 1]` with `f(x) = 1/(|x| (2 - ln|x|)^2)`
    /// extended with period 2.
    ConvolutionLog,
}

impl GraphonSpec {
    pub const NAMES: [&'static str; 5] = ["constant", "bilinear", "noncompact-blocks", "lp-blocks", "convolution-log"];

    /// Looks a spec up by name; parameters come from `params` (`K`, `epsilon`,
    /// `blocks`).
    pub fn from_name(name: &str, params: &Map<String, Value>) -> Result<Self> {
        let get_u64 = |key: &str, default: u64| -> Result<u64> {
            match params.get(key) {
                None => Ok(default),
                Some(v) => v
                    .as_u64()
                    .ok_or_else(|| Error::validation(format!("parameter {key} must be a nonnegative integer"))),
            }
        };
        match name {
            "constant" => Ok(GraphonSpec::Constant),
            "bilinear" => Ok(GraphonSpec::Bilinear),
            "noncompact-blocks" => {
                let k = get_u64("K", 10)?;
                if !(1..=60).contains(&k) {
                    return Err(Error::validation("K must lie in 1..=60"));
                }
                Ok(GraphonSpec::NoncompactBlocks { k_max: k as u32 })
            }
            "lp-blocks" => {
                let epsilon = params
                    .get("epsilon")
                    .map_or(Some(0.5), Value::as_f64)
                    .ok_or_else(|| Error::validation("epsilon must be a number"))?;
                if !(0.0..1.0).contains(&epsilon) {
                    return Err(Error::validation("epsilon must lie in [0, 1)"));
                }
                let blocks = get_u64("blocks", 16)? as usize;
                if blocks == 0 {
                    return Err(Error::validation("blocks must be positive"));
                }
                Ok(GraphonSpec::LpBlocks { epsilon, blocks })
            }
            "convolution-log" => Ok(GraphonSpec::ConvolutionLog),
            other => Err(Error::Unknown(format!("graphon spec {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GraphonSpec::Constant => "constant",
            GraphonSpec::Bilinear => "bilinear",
            GraphonSpec::NoncompactBlocks { .. } => "noncompact-blocks",
            GraphonSpec::LpBlocks { .. } => "lp-blocks",
            GraphonSpec::ConvolutionLog => "convolution-log",
        }
    }
}

/// Discretizes a spec into a finite space.
///
/// Interval specs use `n_atoms` equal cells and cell averages of `W`. Block
/// specs have one atom per block and ignore `n_atoms`.
pub fn discretize_graphon<T: Scalar>(spec: &GraphonSpec, n_atoms: usize) -> Result<FiniteMarkovSpace<T>> {
    if n_atoms == 0 {
        return Err(Error::validation("n_atoms must be positive"));
    }
    match *spec {
        GraphonSpec::Constant => {
            let n = n_atoms;
            FiniteMarkovSpace::from_flat(n, vec![T::one(); n * n], true)
        }
        GraphonSpec::Bilinear => {
            // Cell average of 2x - 1 over [i/n, (i+1)/n] is (2i + 1)/n - 1, so
            // the cell average of W factorizes.
            let n = n_atoms as i64;
            let c: Vec<T> = (0..n).map(|i| T::from_ratio(2 * i + 1 - n, n)).collect();
            let m = c.iter().flat_map(|ci| c.iter().map(move |cj| T::one() + ci.mul_ref(cj))).collect();
            FiniteMarkovSpace::from_flat(n_atoms, m, true)
        }
        GraphonSpec::NoncompactBlocks { k_max } => {
            let masses: Vec<T> = (1..=k_max)
                .map(|k| T::from_ratio(1, 1 << k))
                .chain(std::iter::once(T::from_ratio(1, 1 << k_max)))
                .collect();
            Ok(block_diagonal(masses))
        }
        GraphonSpec::LpBlocks { epsilon, blocks } => {
            let s = 2.0 / (1.0 - epsilon);
            let raw: Vec<f64> = (1..=blocks).map(|m| (m as f64).powf(-s)).collect();
            let total: f64 = raw.iter().sum();
            let masses = raw.iter().map(|a| T::from_f64(a / total)).collect::<Vec<_>>();
            FiniteMarkovSpace::from_flat(blocks, diagonal(masses), true)
        }
        GraphonSpec::ConvolutionLog => {
            let n = n_atoms;
            let h = 2.0 / n as f64;
            // Cell pairs depend only on the offset i - j.
            let by_offset: Vec<f64> =
                (0..2 * n - 1).map(|d| convolution_cell(d as f64 - (n as f64 - 1.0), h)).collect();
            let m = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| T::from_f64(by_offset[i + n - 1 - j]))
                .collect();
            FiniteMarkovSpace::from_flat(n, m, true)
        }
    }
}

/// Discretizes an arbitrary kernel on `[0, 1]^2` by a 32-point tensor
/// Gauss–Legendre rule per cell pair, then normalizes.
pub fn discretize_kernel<F: Fn(f64, f64) -> f64>(w: F, n_atoms: usize) -> Result<FiniteMarkovSpace<f64>> {
    let (x, wt) = gauss_legendre(32);
    let h = 1.0 / n_atoms as f64;
    let mut m = vec![0.0; n_atoms * n_atoms];
    for i in 0..n_atoms {
        for j in 0..n_atoms {
            let mut acc = 0.0;
            for (a, wa) in x.iter().zip(&wt) {
                let xa = (i as f64 + 0.5 + 0.5 * a) * h;
                for (b, wb) in x.iter().zip(&wt) {
                    let yb = (j as f64 + 0.5 + 0.5 * b) * h;
                    acc += wa * wb * w(xa, yb);
                }
            }
            m[i * n_atoms + j] = acc * 0.25;
        }
    }
    FiniteMarkovSpace::from_flat(n_atoms, m, true)
}

fn diagonal<T: Scalar>(masses: Vec<T>) -> Vec<T> {
    let n = masses.len();
    let mut m = vec![T::zero(); n * n];
    for (i, a) in masses.into_iter().enumerate() {
        m[i * n + i] = a;
    }
    m
}

fn block_diagonal<T: Scalar>(masses: Vec<T>) -> FiniteMarkovSpace<T> {
    let n = masses.len();
    FiniteMarkovSpace::from_flat(n, diagonal(masses), false).expect("block masses sum to one")
}

/// Antiderivative of `f(x) = 1/(|x| (2 - ln|x|)^2)` on `[-1, 1]`, extended so
/// that each period adds the full mass 1.
fn log_kernel_primitive(x: f64) -> f64 {
    let k = (x / 2.0).round();
    let y = x - 2.0 * k;
    let base = if y == 0.0 { 0.0 } else { y.signum() / (2.0 - y.abs().ln()) };
    k + base
}

/// Integral of `f(x - y)` over a pair of cells of width `h` whose left ends
/// differ by `offset * h`. Integration by parts reduces the double integral
/// to integrals of the bounded primitive.
fn convolution_cell(offset: f64, h: f64) -> f64 {
    let c = offset * h;
    let piece = |a: f64, b: f64| {
        let mut breaks = vec![a];
        breaks.extend([-2.0, 0.0, 2.0].into_iter().filter(|&p| p > a && p < b));
        breaks.push(b);
        integrate_panels(&log_kernel_primitive, &breaks, 1e-14, 4000).value
    };
    piece(c, c + h) - piece(c - h, c)
}
