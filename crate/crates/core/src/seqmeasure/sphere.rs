use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::{check_permutation, Graph};
use crate::spaces::sphere::{dot, sample_rng, SphereDraw, SphereSpace};

/// Histogram bins of width 0.05 on `[-1, 1]`.
pub const HIST_BINS: usize = 40;
/// `|<u1, u2>|` above `1 - MASS_AT_ONE_GAP` counts as collinear.
const MASS_AT_ONE_GAP: f64 = 1e-6;

/// A sampled map `V -> S^{d-1}`, or the vertex at which the anchors spanned
/// the whole space.
#[derive(Clone, Debug, PartialEq)]
pub enum SphereMap {
    Map(Vec<Vec<f64>>),
    Degenerate { vertex: usize },
}

/// Maps the vertices of a triangle-free `g` to `S^{d-1}` one at a time, each
/// uniformly on the subsphere orthogonal to its earlier neighbors' images.
/// Randomness is drawn from the stream `(seed, index)`.
pub fn sphere_sequential_sample(g: &Graph, d: usize, order: &[usize], seed: u64, index: u64) -> Result<SphereMap> {
    check_permutation(order, g.vertex_count())?;
    if !g.is_triangle_free() {
        return Err(Error::precondition("sequential sphere sampling needs a triangle-free graph"));
    }
    let sphere = SphereSpace::new(d)?;
    let mut rng = sample_rng(seed, index);
    let mut image: Vec<Option<Vec<f64>>> = vec![None; g.vertex_count()];
    for &v in order {
        let anchors: Vec<&[f64]> = g.neighbors(v).iter().filter_map(|&u| image[u].as_deref()).collect();
        match sphere.conditional_sample(&anchors, &mut rng)? {
            SphereDraw::Point(p) => image[v] = Some(p),
            SphereDraw::Degenerate => return Ok(SphereMap::Degenerate { vertex: v }),
        }
    }
    Ok(SphereMap::Map(image.into_iter().map(|p| p.expect("every vertex placed")).collect()))
}

/// Samples of `<u1, u2>` for `K_{2,2}` in `S^2` under two vertex orders.
#[derive(Clone, Debug, PartialEq)]
pub struct K22Report {
    pub d: usize,
    /// Order `(u1, u2, v1, v2)`.
    pub samples_a: Vec<f64>,
    /// Order `(u1, v1, v2, u2)`.
    pub samples_b: Vec<f64>,
    pub hist_order_a: Vec<usize>,
    pub hist_order_b: Vec<usize>,
    /// Kolmogorov–Smirnov distance of the order-A samples from `Uniform[-1, 1]`.
    pub ks_vs_uniform: f64,
    /// Fraction of order-B samples with `|<u1, u2>| > 1 - 1e-6`.
    pub mass_at_one: f64,
    /// Samples that hit a degenerate conditional (recorded as NaN).
    pub degenerate: usize,
}

/// Runs both orders `n_samples` times. Order A sample `i` uses stream `2i`,
/// order B uses `2i + 1`.
pub fn k22_order_experiment(d: usize, n_samples: usize, seed: u64) -> Result<K22Report> {
    if d != 3 {
        return Err(Error::validation(format!("the K_2,2 experiment is defined for d = 3 only, got {d}")));
    }
    if n_samples < 1000 {
        return Err(Error::validation(format!("need at least 1000 samples, got {n_samples}")));
    }
    // u1 = 0, u2 = 1, v1 = 2, v2 = 3.
    let g = Graph::complete_bipartite(2, 2);
    let run = |order: &[usize], offset: u64| -> Result<Vec<f64>> {
        (0..n_samples as u64)
            .into_par_iter()
            .map(|i| match sphere_sequential_sample(&g, d, order, seed, 2 * i + offset)? {
                SphereMap::Map(x) => Ok(dot(&x[0], &x[1])),
                SphereMap::Degenerate { .. } => Ok(f64::NAN),
            })
            .collect()
    };
    let samples_a = run(&[0, 1, 2, 3], 0)?;
    let samples_b = run(&[0, 2, 3, 1], 1)?;
    let degenerate = samples_a.iter().chain(&samples_b).filter(|x| x.is_nan()).count();
    let mass_at_one = samples_b.iter().filter(|x| x.abs() > 1.0 - MASS_AT_ONE_GAP).count() as f64 / n_samples as f64;
    Ok(K22Report {
        d,
        hist_order_a: histogram(&samples_a),
        hist_order_b: histogram(&samples_b),
        ks_vs_uniform: ks_uniform(&samples_a),
        mass_at_one,
        samples_a,
        samples_b,
        degenerate,
    })
}

/// Writes `order,sample_index,inner_product` rows, order A first.
pub fn write_k22_csv<W: Write>(report: &K22Report, mut out: W) -> Result<()> {
    writeln!(out, "order,sample_index,inner_product")?;
    for (label, xs) in [("A", &report.samples_a), ("B", &report.samples_b)] {
        for (i, x) in xs.iter().enumerate() {
            writeln!(out, "{label},{i},{x}")?;
        }
    }
    Ok(())
}

fn histogram(xs: &[f64]) -> Vec<usize> {
    let mut h = vec![0; HIST_BINS];
    for &x in xs.iter().filter(|x| !x.is_nan()) {
        let b = ((x + 1.0) / 2.0 * HIST_BINS as f64).floor().clamp(0.0, (HIST_BINS - 1) as f64);
        h[b as usize] += 1;
    }
    h
}

/// `sup |F_n - F|` for `F(x) = (x + 1) / 2`.
fn ks_uniform(xs: &[f64]) -> f64 {
    let mut v: Vec<f64> = xs.iter().copied().filter(|x| !x.is_nan()).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = ((x + 1.0) / 2.0).clamp(0.0, 1.0);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}
