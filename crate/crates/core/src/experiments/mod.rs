//! Config-driven experiments that reproduce the worked examples and write CSV
//! tables plus a JSON summary of checked assertions.

mod expect;
mod runs;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

pub use expect::{evaluate, Assertion, Entry, Expectations, Relation};

/// A registered experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub description: &'static str,
}

const CATALOG: [ExperimentInfo; 6] = [
    ExperimentInfo {
        name: "cycle-spectral",
        description: "cycle densities by contraction against eigenvalue power sums on random spaces",
    },
    ExperimentInfo {
        name: "partition-refinement",
        description: "C_4 density along a dyadic refinement of a discretized graphon",
    },
    ExperimentInfo {
        name: "product-complete",
        description: "edge densities of products of complete graphs and normalized cycle densities",
    },
    ExperimentInfo {
        name: "noncompact-blocks",
        description: "tree and cycle densities on truncations of the unbounded block graphon",
    },
    ExperimentInfo {
        name: "convolution-eigs",
        description: "Fourier eigenvalues of the logarithmic convolution graphon and their power sums",
    },
    ExperimentInfo {
        name: "sphere-k22",
        description: "order dependence of sequential orthogonal sampling of K_2,2 on the 2-sphere",
    },
];

pub fn list_experiments() -> &'static [ExperimentInfo] {
    &CATALOG
}

/// `{"experiment": ..., "params": {...}, "seed": ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A CSV artifact: header plus rows of preformatted fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub(crate) fn new(file: &str, header: &[&str]) -> Self {
        Table { file: file.to_string(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub(crate) fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// LF-terminated CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub experiment: String,
    pub seed: u64,
    /// Parameters after defaults were filled in.
    pub params: Map<String, Value>,
    pub summary: Map<String, Value>,
    pub assertions: Vec<Assertion>,
    pub tables: Vec<Table>,
    /// Oracle-regenerated expectations, present in oracle mode.
    pub expectations: Option<Expectations>,
}

impl ExperimentResult {
    pub fn all_pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn table(&self, file: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.file == file)
    }

    /// Artifact file names, relative to the output directory.
    pub fn artifact_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.tables.iter().map(|t| t.file.clone()).collect();
        if self.expectations.is_some() {
            names.push(EXPECTATIONS_FILE.to_string());
        }
        names
    }

    pub fn summary_json(&self) -> Value {
        json!({
            "experiment": self.experiment,
            "seed": self.seed,
            "params": self.params,
            "summary": self.summary,
            "assertions": self.assertions,
            "artifacts": self.artifact_names(),
        })
    }
}

pub const SUMMARY_FILE: &str = "summary.json";
pub const EXPECTATIONS_FILE: &str = "expectations.json";

/// Runs an experiment against the bundled expectations. In oracle mode every
/// derived expected value is recomputed and the merged file is returned in
/// [`ExperimentResult::expectations`].
pub fn run_experiment(cfg: &ExperimentConfig, oracle: bool) -> Result<ExperimentResult> {
    run_experiment_with(cfg, &Expectations::bundled(), oracle)
}

pub fn run_experiment_with(cfg: &ExperimentConfig, file: &Expectations, oracle: bool) -> Result<ExperimentResult> {
    let info = CATALOG
        .iter()
        .find(|i| i.name == cfg.experiment)
        .ok_or_else(|| Error::Unknown(format!("experiment {:?}", cfg.experiment)))?;
    let mut params = Params::new(&cfg.params);
    let mut checker = expect::Checker::new(info.name, file, oracle);
    let (summary, tables) = match info.name {
        "cycle-spectral" => runs::cycle_spectral(&mut params, cfg.seed, &mut checker)?,
        "partition-refinement" => runs::partition_refinement(&mut params, &mut checker)?,
        "product-complete" => runs::product_complete(&mut params, &mut checker)?,
        "noncompact-blocks" => runs::noncompact_blocks(&mut params, &mut checker)?,
        "convolution-eigs" => runs::convolution_eigs(&mut params, &mut checker)?,
        "sphere-k22" => runs::sphere_k22(&mut params, cfg.seed, &mut checker)?,
        _ => unreachable!("catalog and dispatch agree"),
    };
    let resolved = params.finish()?;
    let expectations = oracle.then(|| {
        let mut merged = file.clone();
        merged.entries.extend(checker.regenerated.clone());
        merged
    });
    Ok(ExperimentResult {
        experiment: info.name.to_string(),
        seed: cfg.seed,
        params: resolved,
        summary,
        assertions: checker.assertions,
        tables,
        expectations,
    })
}

/// Writes every table, the summary and (in oracle mode) the regenerated
/// expectations into `dir`, which must be empty or absent unless `force`.
pub fn write_result(result: &ExperimentResult, dir: &Path, force: bool) -> Result<Vec<PathBuf>> {
    if dir.exists() {
        if !dir.is_dir() {
            return Err(Error::validation(format!("{} is not a directory", dir.display())));
        }
        if !force && fs::read_dir(dir)?.next().is_some() {
            return Err(Error::validation(format!(
                "output directory {} is not empty; pass --force to overwrite",
                dir.display()
            )));
        }
    }
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for t in &result.tables {
        let path = dir.join(&t.file);
        fs::write(&path, t.to_csv())?;
        written.push(path);
    }
    if let Some(e) = &result.expectations {
        let path = dir.join(EXPECTATIONS_FILE);
        fs::write(&path, e.to_json_string())?;
        written.push(path);
    }
    let path = dir.join(SUMMARY_FILE);
    let mut text = serde_json::to_string_pretty(&result.summary_json())?;
    text.push('\n');
    fs::write(&path, text)?;
    written.push(path);
    Ok(written)
}

/// Parameter access with defaults; unknown keys are rejected at the end.
pub(crate) struct Params<'a> {
    raw: &'a Map<String, Value>,
    resolved: Map<String, Value>,
}

impl<'a> Params<'a> {
    fn new(raw: &'a Map<String, Value>) -> Self {
        Params { raw, resolved: Map::new() }
    }

    fn invalid(key: &str, what: &str) -> Error {
        Error::validation(format!("parameter {key:?} must be {what}"))
    }

    pub(crate) fn usize(&mut self, key: &str, default: usize, min: usize, max: usize) -> Result<usize> {
        let v = match self.raw.get(key) {
            None => default,
            Some(v) => v.as_u64().ok_or_else(|| Self::invalid(key, "a nonnegative integer"))? as usize,
        };
        if !(min..=max).contains(&v) {
            return Err(Self::invalid(key, &format!("in {min}..={max}")));
        }
        self.resolved.insert(key.to_string(), json!(v));
        Ok(v)
    }

    pub(crate) fn string(&mut self, key: &str, default: &str) -> Result<String> {
        let v = match self.raw.get(key) {
            None => default.to_string(),
            Some(v) => v.as_str().ok_or_else(|| Self::invalid(key, "a string"))?.to_string(),
        };
        self.resolved.insert(key.to_string(), json!(v));
        Ok(v)
    }

    pub(crate) fn strings(&mut self, key: &str, default: &[&str]) -> Result<Vec<String>> {
        let v: Vec<String> = match self.raw.get(key) {
            None => default.iter().map(|s| s.to_string()).collect(),
            Some(Value::Array(xs)) => xs
                .iter()
                .map(|x| x.as_str().map(str::to_string).ok_or_else(|| Self::invalid(key, "a list of strings")))
                .collect::<Result<_>>()?,
            Some(_) => return Err(Self::invalid(key, "a list of strings")),
        };
        if v.is_empty() {
            return Err(Self::invalid(key, "nonempty"));
        }
        self.resolved.insert(key.to_string(), json!(v));
        Ok(v)
    }

    pub(crate) fn u32s(&mut self, key: &str, default: &[u32], min: u32, max: u32) -> Result<Vec<u32>> {
        let v: Vec<u32> = match self.raw.get(key) {
            None => default.to_vec(),
            Some(Value::Array(xs)) => xs
                .iter()
                .map(|x| x.as_u64().map(|u| u as u32).ok_or_else(|| Self::invalid(key, "a list of integers")))
                .collect::<Result<_>>()?,
            Some(_) => return Err(Self::invalid(key, "a list of integers")),
        };
        if v.is_empty() || v.iter().any(|x| !(min..=max).contains(x)) {
            return Err(Self::invalid(key, &format!("a nonempty list with entries in {min}..={max}")));
        }
        self.resolved.insert(key.to_string(), json!(v));
        Ok(v)
    }

    pub(crate) fn map(&mut self, key: &str) -> Map<String, Value> {
        let v = self.raw.get(key).and_then(Value::as_object).cloned().unwrap_or_default();
        self.resolved.insert(key.to_string(), Value::Object(v.clone()));
        v
    }

    fn finish(self) -> Result<Map<String, Value>> {
        if let Some(k) = self.raw.keys().find(|k| !self.resolved.contains_key(*k)) {
            return Err(Error::validation(format!("unknown parameter {k:?}")));
        }
        Ok(self.resolved)
    }
}
