use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::expect::{Checker, Entry, Relation};
use super::{Params, Table};
use crate::densities::{density, density_with_budget, hom_count, normalized_density_finite_graph};
use crate::error::{Error, Result};
use crate::graphs::{chromatic_polynomial, Graph};
use crate::quadrature::gauss_legendre;
use crate::scalar::format_rational;
use crate::seqmeasure::{k22_order_experiment, HIST_BINS};
use crate::spaces::random::random_space;
use crate::spaces::sphere::sample_rng;
use crate::spaces::{discretize_graphon, FiniteMarkovSpace, GraphonSpec, RefinementSequence};
use crate::spectral::{convolution_report, spectrum, top_eigenvector_residual, CONVOLUTION_CHECKPOINTS};

type Output = (Map<String, Value>, Vec<Table>);

/// Elimination budget for the refinement trajectory: `C_4` on a 1024-atom
/// quotient needs about `1024^3` operations.
const REFINEMENT_BUDGET: f64 = 2e9;
const RANDOM_SPARSITY: f64 = 0.3;

fn rational(r: &BigRational) -> Value {
    json!(format_rational(r))
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

pub(super) fn cycle_spectral(params: &mut Params, seed: u64, ck: &mut Checker) -> Result<Output> {
    let n = params.usize("n", 16, 1, 64)?;
    let trials = params.usize("trials", 20, 1, 10_000)?;
    let k_max = params.usize("k_max", 8, 3, 16)?;
    let per_trial: Vec<(Vec<(f64, f64)>, f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = random_space(&mut sample_rng(seed, t), n, RANDOM_SPARSITY);
            let spec = spectrum(&s)?;
            let pairs = (3..=k_max)
                .map(|k| Ok((density(&Graph::cycle(k), &s, false)?, spec.power_sum(k as u32))))
                .collect::<Result<Vec<_>>>()?;
            Ok((pairs, (spec.values()[0] - 1.0).abs(), top_eigenvector_residual(&s)))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new("cycle_spectral.csv", &["trial", "n", "k", "contraction", "spectral", "abs_diff"]);
    let (mut max_dev, mut top_dev, mut top_res) = (0.0f64, 0.0f64, 0.0f64);
    for (t, (pairs, top, res)) in per_trial.iter().enumerate() {
        for (i, (c, s)) in pairs.iter().enumerate() {
            let d = (c - s).abs();
            max_dev = max_dev.max(d);
            table.push(vec![
                t.to_string(),
                n.to_string(),
                (i + 3).to_string(),
                c.to_string(),
                s.to_string(),
                d.to_string(),
            ]);
        }
        top_dev = top_dev.max(*top);
        top_res = top_res.max(*res);
    }
    ck.check("max_abs_deviation", json!(max_dev), || {
        Entry::derived(json!(0.0), 1e-9, Relation::Eq, "oracle:contraction")
    });
    ck.check("top_eigenvalue_deviation", json!(top_dev), || {
        Entry::derived(json!(0.0), 1e-9, Relation::Eq, "oracle:stationary-eigenvector")
    });
    ck.check("top_eigenvector_residual", json!(top_res), || {
        Entry::derived(json!(0.0), 1e-8, Relation::Le, "oracle:stationary-eigenvector")
    });
    let mut summary = Map::new();
    summary.insert("max_abs_deviation".into(), json!(max_dev));
    summary.insert("comparisons".into(), json!(table.rows.len()));
    Ok((summary, vec![table]))
}

/// `1 + mu^k` with `mu = int_0^1 (2x - 1)^2 dx`: the only nonconstant
/// eigenvalue of the bilinear graphon, by Gauss–Legendre quadrature.
fn bilinear_cycle_oracle(k: usize) -> f64 {
    let (x, w) = gauss_legendre(8);
    let mu: f64 = x.iter().zip(&w).map(|(x, w)| 0.5 * w * x * x).sum();
    1.0 + mu.powi(k as i32)
}

pub(super) fn partition_refinement(params: &mut Params, ck: &mut Checker) -> Result<Output> {
    let spec_name = params.string("spec", "bilinear")?;
    let spec_params = params.map("spec_params");
    let atoms = params.usize("atoms", 1024, 2, 4096)?;
    let levels = params.usize("levels", 10, 1, 12)?;
    let pattern_name = params.string("pattern", "C_4")?;
    let spec = GraphonSpec::from_name(&spec_name, &spec_params)?;
    let pattern = Graph::named(&pattern_name)?;
    let s: FiniteMarkovSpace<f64> = discretize_graphon(&spec, atoms)?;
    let seq = RefinementSequence::dyadic(s.n(), levels as u32)?;
    let trajectory: Vec<f64> = seq
        .partitions()
        .par_iter()
        .map(|p| density_with_budget(&pattern, &s.quotient(p)?, false, REFINEMENT_BUDGET))
        .collect::<Result<_>>()?;
    let mut table = Table::new("trajectory.csv", &["level", "blocks", "density"]);
    for (m, (p, t)) in seq.partitions().iter().zip(&trajectory).enumerate() {
        table.push(vec![(m + 1).to_string(), p.block_count().to_string(), t.to_string()]);
    }
    let worst_drop = trajectory.windows(2).map(|w| w[0] - w[1]).fold(0.0f64, f64::max);
    ck.check("nondecreasing", json!(worst_drop <= 1e-12), || {
        Entry::reference(json!(true), 0.0, Relation::Eq, "invariant:weak-step-sidorenko")
    });
    let last = *trajectory.last().expect("at least one level");
    let cycle_len = (pattern.edge_count() == pattern.vertex_count()
        && pattern.vertex_count() >= 3
        && (0..pattern.vertex_count()).all(|v| pattern.degree(v) == 2)
        && pattern.is_connected())
    .then_some(pattern.vertex_count());
    match (&spec, cycle_len) {
        (GraphonSpec::Bilinear, Some(k)) => {
            ck.check(&format!("final_t_{}", pattern_name.to_lowercase()), json!(last), || {
                Entry::derived(json!(bilinear_cycle_oracle(k)), 1e-3, Relation::Eq, "oracle:rank-one-spectrum")
            })
        }
        (GraphonSpec::Constant, _) => ck.check_live(
            "final_constant",
            json!(last),
            Entry::derived(json!(1.0), 1e-12, Relation::Eq, "oracle:constant-graphon"),
        ),
        _ => {}
    }
    let mut summary = Map::new();
    summary.insert("trajectory".into(), json!(trajectory));
    summary.insert("refinement_lower_bound".into(), json!(trajectory.iter().copied().fold(f64::MIN, f64::max)));
    summary.insert("max_drop".into(), json!(worst_drop));
    Ok((summary, vec![table]))
}

/// `t*(G, K_n)` from the closed-form chromatic polynomial of a cycle, or by
/// counting homomorphisms for other patterns.
fn tstar_oracle(g: &Graph, n: usize) -> Result<BigRational> {
    let (a, b) = (g.vertex_count(), g.edge_count());
    let is_cycle = a >= 3 && a == b && g.is_connected() && (0..a).all(|v| g.degree(v) == 2);
    let hom: BigInt = if is_cycle {
        let m = BigInt::from(n as i64 - 1);
        let sign = if a % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        num::pow(m.clone(), a) + sign * m
    } else {
        hom_count(g, &Graph::complete(n))?
    };
    // t* = hom * n^(2b - a) / (n (n - 1))^b.
    let nn = BigInt::from(n);
    let num = hom * num::pow(nn.clone(), 2 * b);
    let den = num::pow(nn.clone(), a) * num::pow(nn.clone() * (nn - 1), b);
    Ok(BigRational::new(num, den))
}

pub(super) fn product_complete(params: &mut Params, ck: &mut Checker) -> Result<Output> {
    let i_max = params.usize("i_max", 7, 2, 7)?;
    let patterns = params.strings("patterns", &["K_2", "C_4", "C_6"])?;
    let n_max = params.usize("n_max", 8, 2, 12)?;
    let brute_n_max = params.usize("brute_n_max", 5, 2, 8)?;
    let spectral_i_max = params.usize("spectral_i_max", 5, 2, 6)?;
    let graphs: Vec<Graph> = patterns.iter().map(|p| Graph::named(p)).collect::<Result<_>>()?;

    let mut products = Table::new("products.csv", &["i", "vertices", "edges", "t_k2"]);
    let mut h = Graph::complete(2);
    let mut spectral_graphs = vec![h.clone()];
    for i in 2..=i_max {
        if i > 2 {
            h = h.categorical_product(&Graph::complete(i));
            if i <= spectral_i_max {
                spectral_graphs.push(h.clone());
            }
        }
        let (v, e) = (h.vertex_count() as i64, h.edge_count() as i64);
        let t = ratio(2 * e, v * v);
        products.push(vec![i.to_string(), v.to_string(), e.to_string(), format_rational(&t)]);
        ck.check(&format!("t_k2_h{i}"), rational(&t), || {
            Entry::reference(rational(&ratio(1, i as i64)), 0.0, Relation::Eq, "reference:complete-graph-products")
        });
    }

    let mut tstar = Table::new("tstar.csv", &["pattern", "n", "tstar", "tstar_f64"]);
    for (name, g) in patterns.iter().zip(&graphs) {
        for n in 2..=n_max {
            let t = normalized_density_finite_graph(g, &Graph::complete(n))?;
            tstar.push(vec![
                name.clone(),
                n.to_string(),
                format_rational(&t),
                t.to_f64().unwrap_or(f64::NAN).to_string(),
            ]);
            let label = name.to_lowercase();
            let mut oracle_err = None;
            ck.check(&format!("tstar_{label}_k{n}"), rational(&t), || match tstar_oracle(g, n) {
                Ok(r) => Entry::derived(rational(&r), 1e-12, Relation::Eq, "oracle:chromatic-closed-form"),
                Err(e) => {
                    oracle_err = Some(e);
                    Entry::derived(Value::Null, 0.0, Relation::Eq, "oracle:chromatic-closed-form")
                }
            });
            if let Some(e) = oracle_err {
                return Err(e);
            }
            if n <= brute_n_max && g.edge_count() <= crate::graphs::CHROMATIC_EDGE_BUDGET {
                let chi = chromatic_polynomial(g)?.eval(n as i64);
                let brute = hom_count(g, &Graph::complete(n))?;
                ck.check_live(
                    &format!("hom_{label}_k{n}"),
                    json!(chi.to_string()),
                    Entry::derived(json!(brute.to_string()), 0.0, Relation::Eq, "oracle:brute-force-hom-count"),
                );
            }
        }
    }

    let mut spectral =
        Table::new("spectral.csv", &["i", "atoms", "t_c4_spectral", "t_c4_expected", "max_eigen_deviation"]);
    let factor_spectra = (2..=spectral_i_max)
        .map(|j| spectrum(&FiniteMarkovSpace::<f64>::from_graph(&Graph::complete(j))?))
        .collect::<Result<Vec<_>>>()?;
    let c4 = Graph::cycle(4);
    let mut expected_c4 = BigRational::one();
    for (idx, g) in spectral_graphs.iter().enumerate() {
        let i = idx + 2;
        expected_c4 *= tstar_oracle(&c4, i)?;
        let spec = spectrum(&FiniteMarkovSpace::<f64>::from_graph(g)?)?;
        let mut outer = factor_spectra[0].values().to_vec();
        for f in &factor_spectra[1..idx + 1] {
            let mut v: Vec<f64> = outer.iter().flat_map(|x| f.values().iter().map(move |y| x * y)).collect();
            v.sort_by(|a, b| b.total_cmp(a));
            outer = v;
        }
        let dev = spec.values().iter().zip(&outer).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
        let t4 = spec.power_sum(4);
        let exp4 = expected_c4.to_f64().unwrap_or(f64::NAN);
        spectral.push(vec![
            i.to_string(),
            g.vertex_count().to_string(),
            t4.to_string(),
            exp4.to_string(),
            dev.to_string(),
        ]);
        ck.check(&format!("spectral_product_h{i}"), json!(dev), || {
            Entry::derived(json!(0.0), 1e-9, Relation::Eq, "oracle:product-spectrum")
        });
        let expected = expected_c4.clone();
        ck.check(&format!("spectral_t_c4_h{i}"), json!(t4), || {
            Entry::derived(rational(&expected), 1e-9, Relation::Eq, "oracle:chromatic-closed-form")
        });
    }
    let mut summary = Map::new();
    summary.insert("largest_product_vertices".into(), json!(h.vertex_count()));
    summary.insert("largest_product_edges".into(), json!(h.edge_count()));
    Ok((summary, vec![products, tstar, spectral]))
}

/// `t(G) = sum_b m_b^(|V| - |E|)` for connected `G` on a block-diagonal space
/// whose blocks have masses `m_b` and constant weight `1/m_b`.
fn block_sum_oracle(g: &Graph, k_max: u32) -> BigRational {
    let e = g.vertex_count() as i64 - g.edge_count() as i64;
    let masses = (1..=k_max).map(|k| ratio(1, 1 << k)).chain(std::iter::once(ratio(1, 1 << k_max)));
    masses.map(|m| if e >= 0 { num::pow(m, e as usize) } else { num::pow(m.recip(), (-e) as usize) }).sum()
}

pub(super) fn noncompact_blocks(params: &mut Params, ck: &mut Checker) -> Result<Output> {
    let k = params.usize("K", 10, 1, 60)?;
    let patterns = params.strings("patterns", &["P_2", "S_3", "C_4", "C_6"])?;
    let k_min = params.usize("k_min", 5, 1, 60)?;
    let k_max = params.usize("k_max", 12, 1, 60)?;
    if k_min > k_max {
        return Err(Error::validation("k_min must not exceed k_max"));
    }
    let graphs: Vec<Graph> = patterns.iter().map(|p| Graph::named(p)).collect::<Result<_>>()?;
    if let Some(p) = patterns.iter().zip(&graphs).find(|(_, g)| !g.is_connected()).map(|(p, _)| p) {
        return Err(Error::validation(format!("pattern {p} must be connected")));
    }
    let space = |k: usize| discretize_graphon::<BigRational>(&GraphonSpec::NoncompactBlocks { k_max: k as u32 }, 1);
    let s = space(k)?;
    let mut densities = Table::new("densities.csv", &["K", "pattern", "density"]);
    for (name, g) in patterns.iter().zip(&graphs) {
        let t = density(g, &s, false)?;
        densities.push(vec![k.to_string(), name.clone(), format_rational(&t)]);
        ck.check(&format!("t_{}_K{k}", name.to_lowercase()), rational(&t), || {
            Entry::derived(rational(&block_sum_oracle(g, k as u32)), 0.0, Relation::Eq, "oracle:block-sum")
        });
    }
    let mut trajectory = Table::new("trajectory.csv", &["K", "pattern", "density"]);
    let cycles: Vec<(&String, &Graph)> =
        patterns.iter().zip(&graphs).filter(|(_, g)| g.edge_count() == g.vertex_count()).collect();
    let mut per_pattern: Vec<Vec<BigRational>> = vec![Vec::new(); cycles.len()];
    for kk in k_min..=k_max {
        let s = space(kk)?;
        for (c, (name, g)) in cycles.iter().enumerate() {
            let t = density(g, &s, false)?;
            trajectory.push(vec![kk.to_string(), (*name).clone(), format_rational(&t)]);
            per_pattern[c].push(t);
        }
    }
    for ((name, _), ts) in cycles.iter().zip(&per_pattern) {
        let worst = ts
            .windows(2)
            .map(|w| {
                let d = &w[1] - &w[0] - BigRational::one();
                if d < BigRational::zero() {
                    -d
                } else {
                    d
                }
            })
            .max()
            .unwrap_or_else(BigRational::zero);
        ck.check_live(
            &format!("slope_deviation_{}", name.to_lowercase()),
            rational(&worst),
            Entry::derived(json!("0"), 0.0, Relation::Eq, "oracle:block-sum"),
        );
    }
    let mut summary = Map::new();
    summary.insert("atoms".into(), json!(s.n()));
    Ok((summary, vec![densities, trajectory]))
}

pub(super) fn convolution_eigs(params: &mut Params, ck: &mut Checker) -> Result<Output> {
    let k_max = params.usize("k_max", 4096, 1, 4096)?;
    let powers = params.u32s("powers", &[2, 4, 8], 1, 64)?;
    let positivity_max = params.usize("positivity_max", 256, 0, 4096)?.min(k_max);
    let bound_min = params.usize("bound_min", 32, 1, 4096)?;
    let bound_max = params.usize("bound_max", 256, 1, 4096)?.min(k_max);
    let report = convolution_report(k_max, &powers)?;

    let mut rows = Table::new("eigenvalues.csv", &["k", "lambda", "lower_bound", "ratio"]);
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in &report.rows {
        rows.push(vec![r.k.to_string(), r.lambda.to_string(), opt(r.lower_bound), opt(r.ratio)]);
    }
    let mut sums = Table::new("partial_sums.csv", &["power", "K", "sum"]);
    for p in &report.partial_sums {
        for (c, s) in p.checkpoints.iter().zip(&p.sums) {
            sums.push(vec![p.power.to_string(), c.to_string(), s.to_string()]);
        }
    }

    ck.check("lambda_0", json!(report.rows[0].lambda), || {
        // 1/(2 - ln x) is an antiderivative of f vanishing at 0.
        Entry::derived(json!(1.0 / (2.0 - 1f64.ln())), 1e-8, Relation::Eq, "oracle:antiderivative")
    });
    let min_lambda = report.rows[..=positivity_max].iter().map(|r| r.lambda).fold(f64::INFINITY, f64::min);
    ck.check(&format!("min_lambda_upto_{positivity_max}"), json!(min_lambda), || {
        Entry::reference(json!(0.0), 1e-8, Relation::Ge, "reference:convolution-positive-semidefinite")
    });
    if bound_min <= bound_max {
        let min_ratio = report.rows[bound_min..=bound_max].iter().filter_map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        ck.check(&format!("min_bound_ratio_{bound_min}_{bound_max}"), json!(min_ratio), || {
            Entry::reference(json!(1.0), 0.0, Relation::Ge, "reference:convolution-log-lower-bound")
        });
    }
    for p in &report.partial_sums {
        if p.checkpoints.len() < 2 {
            continue;
        }
        ck.check(&format!("partial_sums_increasing_l{}", p.power), json!(p.strictly_increasing), || {
            Entry::reference(json!(true), 0.0, Relation::Eq, "reference:no-finite-trace")
        });
        ck.check(&format!("partial_sums_min_increment_l{}", p.power), json!(p.min_increment), || {
            Entry::reference(json!(crate::spectral::PLATEAU_TOL), 0.0, Relation::Ge, "reference:no-finite-trace")
        });
    }
    let mut summary = Map::new();
    summary.insert("bound_threshold".into(), json!(report.bound_threshold));
    summary.insert(
        "checkpoints".into(),
        json!(CONVOLUTION_CHECKPOINTS.iter().filter(|&&c| c <= k_max).collect::<Vec<_>>()),
    );
    Ok((summary, vec![rows, sums]))
}

pub(super) fn sphere_k22(params: &mut Params, seed: u64, ck: &mut Checker) -> Result<Output> {
    let samples = params.usize("samples", 10_000, 1000, 10_000_000)?;
    let d = params.usize("d", 3, 3, 3)?;
    let report = k22_order_experiment(d, samples, seed)?;
    let mut csv = Vec::new();
    crate::seqmeasure::write_k22_csv(&report, &mut csv)?;
    let text = String::from_utf8(csv).expect("CSV is ASCII");
    let mut samples_table = Table::new("samples.csv", &["order", "sample_index", "inner_product"]);
    for line in text.lines().skip(1) {
        samples_table.push(line.split(',').map(str::to_string).collect());
    }
    let mut hist = Table::new("histogram.csv", &["bin_lo", "bin_hi", "count_a", "count_b"]);
    let width = 2.0 / HIST_BINS as f64;
    for b in 0..HIST_BINS {
        let lo = -1.0 + b as f64 * width;
        hist.push(vec![
            lo.to_string(),
            (lo + width).to_string(),
            report.hist_order_a[b].to_string(),
            report.hist_order_b[b].to_string(),
        ]);
    }
    ck.check("mass_at_one_order_b", json!(report.mass_at_one), || {
        Entry::reference(json!(0.999), 0.0, Relation::Ge, "reference:orthogonality-order-dependence")
    });
    ck.check("ks_uniform_order_a", json!(report.ks_vs_uniform), || {
        Entry::reference(json!(0.03), 0.0, Relation::Le, "reference:orthogonality-order-dependence")
    });
    ck.check("degenerate_samples", json!(report.degenerate), || {
        Entry::derived(json!(0), 0.0, Relation::Eq, "oracle:general-position")
    });
    let mut summary = Map::new();
    summary.insert("mass_at_one".into(), json!(report.mass_at_one));
    summary.insert("ks_vs_uniform".into(), json!(report.ks_vs_uniform));
    Ok((summary, vec![samples_table, hist]))
}
