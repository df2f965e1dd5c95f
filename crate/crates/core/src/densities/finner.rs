use super::engine::{Factor, FactorGraph, DEFAULT_BUDGET};
use crate::error::{Error, Result};

/// Nonnegative factors over variables `0..var_count`, each variable ranging
/// over `0..weights.len()` with probability weights `weights`.
#[derive(Clone, Debug)]
pub struct FinnerSystem {
    weights: Vec<f64>,
    var_count: usize,
    factors: Vec<Factor<f64>>,
}

/// Both sides of `int prod f_k <= prod ||f_k||_p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FinnerReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl FinnerSystem {
    pub fn new(weights: Vec<f64>, var_count: usize) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::validation("weights must be a probability vector"));
        }
        Ok(FinnerSystem { weights, var_count, factors: Vec::new() })
    }

    pub fn add_factor(&mut self, vars: Vec<usize>, table: Vec<f64>) -> Result<()> {
        if table.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::validation("factor tables must be nonnegative and finite"));
        }
        if let Some(&v) = vars.iter().find(|&&v| v >= self.var_count) {
            return Err(Error::validation(format!("variable {v} out of range")));
        }
        self.factors.push(Factor::new(vars, table, self.weights.len())?);
        Ok(())
    }

    pub fn factors(&self) -> &[Factor<f64>] {
        &self.factors
    }

    /// Largest number of factor scopes any variable appears in.
    pub fn multiplicity(&self) -> usize {
        (0..self.var_count).map(|v| self.factors.iter().filter(|f| f.vars().contains(&v)).count()).max().unwrap_or(0)
    }

    /// `int prod_k f_k d pi^n`.
    pub fn integral(&self) -> Result<f64> {
        let n = self.weights.len();
        let mut fg = FactorGraph::new(n, self.var_count);
        for v in 0..self.var_count {
            fg.add(Factor::new(vec![v], self.weights.clone(), n)?)?;
        }
        for f in &self.factors {
            fg.add(f.clone())?;
        }
        fg.contract(DEFAULT_BUDGET)
    }

    /// `||f||_p` under the product of the weights over its scope.
    pub fn factor_norm(&self, index: usize, p: u32) -> f64 {
        let f = &self.factors[index];
        let n = self.weights.len();
        let k = f.vars().len();
        let mut digits = vec![0usize; k];
        let mut acc = 0.0;
        for &x in f.table() {
            let w: f64 = digits.iter().map(|&d| self.weights[d]).product();
            acc += w * x.powi(p as i32);
            for j in (0..k).rev() {
                digits[j] += 1;
                if digits[j] < n {
                    break;
                }
                digits[j] = 0;
            }
        }
        acc.powf(1.0 / p as f64)
    }
}

/// Checks Finner's inequality for a system in which every variable lies in at
/// most `p` factor scopes.
pub fn finner_check(system: &FinnerSystem, p: u32) -> Result<FinnerReport> {
    if p == 0 {
        return Err(Error::validation("p must be at least 1"));
    }
    let m = system.multiplicity();
    if m > p as usize {
        return Err(Error::precondition(format!("a variable lies in {m} factors, more than p = {p}")));
    }
    let lhs = system.integral()?;
    let rhs: f64 = (0..system.factors.len()).map(|i| system.factor_norm(i, p)).product();
    Ok(FinnerReport { lhs, rhs, holds: lhs <= rhs + 1e-12 })
}
