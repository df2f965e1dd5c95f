use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_panels};

pub const MAX_CONVOLUTION_K: usize = 4096;
/// Cutoffs `K` at which partial sums `sum_{k <= K} lambda_k^l` are reported.
pub const CONVOLUTION_CHECKPOINTS: [usize; 4] = [64, 256, 1024, 4096];
/// Left end of the oscillatory part; below it the integral is done in `t = 1/(2 - ln x)`.
const SPLIT: f64 = 1e-3;
const HEAD_TOL: f64 = 1e-12;
const BODY_TOL: f64 = 1e-10;
/// Growth between checkpoints below this counts as a plateau.
pub const PLATEAU_TOL: f64 = 1e-6;

/// `f(x) = 1 / (x (2 - ln x)^2)`, integrable on `(0, 1]` with total 1/2.
fn kernel(x: f64) -> f64 {
    let l = 2.0 - x.ln();
    1.0 / (x * l * l)
}

/// `lambda_k = int_0^1 f(x) cos(k pi x) dx`.
pub fn convolution_eigenvalue(k: usize) -> Result<f64> {
    if k > MAX_CONVOLUTION_K {
        return Err(Error::validation(format!("k must be at most {MAX_CONVOLUTION_K}, got {k}")));
    }
    let kp = k as f64 * PI;
    // With t = 1/(2 - ln x), f(x) dx = dt and x = exp(2 - 1/t).
    let t_split = 1.0 / (2.0 - SPLIT.ln());
    let head = integrate(
        |t: f64| if t <= 0.0 { 1.0 } else { (kp * (2.0 - 1.0 / t).exp()).cos() },
        0.0,
        t_split,
        HEAD_TOL,
        10_000,
    );
    // Half-period breakpoints keep every panel free of sign changes in the cosine.
    let mut breaks = vec![SPLIT];
    breaks.extend([1e-2, 1e-1].into_iter().filter(|&b| k < 10 || b < 1.0 / k as f64));
    breaks.extend((1..k).map(|j| j as f64 / k as f64).filter(|&b| b > SPLIT * 1.5));
    breaks.push(1.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let body = integrate_panels(&|x: f64| kernel(x) * (kp * x).cos(), &breaks, BODY_TOL, 4 * breaks.len() + 2000);
    Ok(head.value + body.value)
}

/// `lambda_0..=lambda_{k_max}`, computed in parallel.
pub fn convolution_eigenvalues(k_max: usize) -> Result<Vec<f64>> {
    if k_max > MAX_CONVOLUTION_K {
        return Err(Error::validation(format!("k_max must be at most {MAX_CONVOLUTION_K}, got {k_max}")));
    }
    (0..=k_max).into_par_iter().map(convolution_eigenvalue).collect()
}

/// `1 / (4 sqrt 2 (2 + ln 4k))` for `k >= 1`.
pub fn convolution_lower_bound(k: usize) -> Option<f64> {
    (k >= 1).then(|| 1.0 / (4.0 * 2f64.sqrt() * (2.0 + (4.0 * k as f64).ln())))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvolutionRow {
    pub k: usize,
    pub lambda: f64,
    pub lower_bound: Option<f64>,
    pub ratio: Option<f64>,
}

/// Partial sums of `lambda_k^power` at the checkpoints not above `k_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialSums {
    pub power: u32,
    pub checkpoints: Vec<usize>,
    pub sums: Vec<f64>,
    pub strictly_increasing: bool,
    /// Every gap exceeds [`PLATEAU_TOL`].
    pub no_plateau: bool,
    /// Smallest gap between consecutive checkpoints.
    pub min_increment: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionReport {
    pub rows: Vec<ConvolutionRow>,
    pub partial_sums: Vec<PartialSums>,
    /// Smallest `k0` such that `lambda_k >= lower_bound(k)` for all `k0 <= k <= k_max`.
    pub bound_threshold: Option<usize>,
}

impl ConvolutionReport {
    pub fn lambdas(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.lambda)
    }
}

pub fn convolution_report(k_max: usize, powers: &[u32]) -> Result<ConvolutionReport> {
    if powers.contains(&0) {
        return Err(Error::validation("powers must be positive"));
    }
    let lambdas = convolution_eigenvalues(k_max)?;
    let rows: Vec<ConvolutionRow> = lambdas
        .iter()
        .enumerate()
        .map(|(k, &lambda)| {
            let lower_bound = convolution_lower_bound(k);
            ConvolutionRow { k, lambda, lower_bound, ratio: lower_bound.map(|b| lambda / b) }
        })
        .collect();
    let bound_threshold = {
        let last_fail = rows.iter().rev().find(|r| r.ratio.is_none_or(|q| q < 1.0)).map(|r| r.k);
        match last_fail {
            Some(k) if k == k_max => None,
            Some(k) => Some(k + 1),
            None => Some(1),
        }
    };
    let checkpoints: Vec<usize> = CONVOLUTION_CHECKPOINTS.iter().copied().filter(|&c| c <= k_max).collect();
    let partial_sums = powers
        .iter()
        .map(|&power| {
            let mut sums = Vec::new();
            let mut acc = 0.0;
            let mut next = 0;
            for (k, l) in lambdas.iter().enumerate() {
                acc += l.powi(power as i32);
                if next < checkpoints.len() && k == checkpoints[next] {
                    sums.push(acc);
                    next += 1;
                }
            }
            let increments: Vec<f64> = sums.windows(2).map(|w| w[1] - w[0]).collect();
            PartialSums {
                power,
                checkpoints: checkpoints.clone(),
                strictly_increasing: increments.iter().all(|&d| d > 0.0),
                no_plateau: increments.iter().all(|&d| d > PLATEAU_TOL),
                min_increment: increments.iter().copied().fold(f64::INFINITY, f64::min),
                sums,
            }
        })
        .collect();
    Ok(ConvolutionReport { rows, partial_sums, bound_threshold })
}

/// Writes `k,lambda,lower_bound,ratio`; the bound columns are empty at `k = 0`.
pub fn write_convolution_csv<W: Write>(report: &ConvolutionReport, mut out: W) -> Result<()> {
    writeln!(out, "k,lambda,lower_bound,ratio")?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in &report.rows {
        writeln!(out, "{},{},{},{}", r.k, r.lambda, opt(r.lower_bound), opt(r.ratio))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain composite Simpson in `t = 1/(2 - ln x)` over the whole of `(0, 1]`.
    fn simpson_oracle(k: usize, panels: usize) -> f64 {
        let (a, b) = (0.0, 0.5);
        let h = (b - a) / panels as f64;
        let g = |t: f64| if t <= 0.0 { 1.0 } else { (k as f64 * PI * (2.0 - 1.0 / t).exp()).cos() };
        let mut s = g(a) + g(b);
        for i in 1..panels {
            s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn lambda_zero_is_half() {
        assert!((convolution_eigenvalue(0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_simpson_oracle() {
        for k in [1, 2, 5, 11] {
            let oracle = simpson_oracle(k, 400_000);
            assert!((convolution_eigenvalue(k).unwrap() - oracle).abs() < 1e-8, "k = {k}");
        }
    }

    #[test]
    fn report_shape() {
        let r = convolution_report(70, &[2, 8]).unwrap();
        assert_eq!(r.rows.len(), 71);
        assert_eq!(r.rows[0].lower_bound, None);
        assert_eq!(r.partial_sums[0].checkpoints, vec![64]);
        assert!(r.lambdas().all(|l| l > 0.0));
        let mut csv = Vec::new();
        write_convolution_csv(&r, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert!(text.starts_with("k,lambda,lower_bound,ratio\n"));
        assert_eq!((first[0], first[2], first[3]), ("0", "", ""));
        assert!((first[1].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
        assert!(convolution_eigenvalue(MAX_CONVOLUTION_K + 1).is_err());
    }
}
