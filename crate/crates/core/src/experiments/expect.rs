use std::collections::BTreeMap;
use std::str::FromStr;

use num::{BigRational, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

const BUNDLED: &str = include_str!("../../data/expectations.json");
const FORMAT_VERSION: u32 = 1;

/// How a measured value is compared with its expected value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `|measured - expected| <= tol`.
    Eq,
    /// `measured >= expected - tol`.
    Ge,
    /// `measured <= expected + tol`.
    Le,
}

/// One expected value. Numbers are compared in `f64`; strings hold exact
/// rationals (`"p/q"`); booleans must match.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub expected: Value,
    pub tol: f64,
    pub relation: Relation,
    pub provenance: String,
    /// Whether an oracle can regenerate the value.
    pub derived: bool,
}

impl Entry {
    pub fn derived(expected: Value, tol: f64, relation: Relation, provenance: &str) -> Self {
        Entry { expected, tol, relation, provenance: provenance.to_string(), derived: true }
    }

    pub fn reference(expected: Value, tol: f64, relation: Relation, provenance: &str) -> Self {
        Entry { expected, tol, relation, provenance: provenance.to_string(), derived: false }
    }
}

/// Expected values keyed by `experiment/assertion`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    pub version: u32,
    pub entries: BTreeMap<String, Entry>,
}

impl Expectations {
    /// The expectations file shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_json_str(BUNDLED).expect("bundled expectations parse")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let e: Expectations = serde_json::from_str(text)?;
        if e.version != FORMAT_VERSION {
            return Err(Error::validation(format!("unsupported expectations version {}", e.version)));
        }
        Ok(e)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("expectations serialize");
        s.push('\n');
        s
    }

    pub fn get(&self, experiment: &str, name: &str) -> Option<&Entry> {
        self.entries.get(&key(experiment, name))
    }
}

fn key(experiment: &str, name: &str) -> String {
    format!("{experiment}/{name}")
}

/// A checked assertion as it appears in the summary JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub measured: Value,
    pub expected: Value,
    pub tol: f64,
    pub relation: Relation,
    pub pass: bool,
    pub provenance: String,
}

/// Collects assertions for one run, resolving expected values from the file
/// or, in oracle mode or for entries the file lacks, from the oracle.
pub(crate) struct Checker<'a> {
    experiment: &'static str,
    file: &'a Expectations,
    oracle: bool,
    pub(crate) assertions: Vec<Assertion>,
    pub(crate) regenerated: BTreeMap<String, Entry>,
}

impl<'a> Checker<'a> {
    pub(crate) fn new(experiment: &'static str, file: &'a Expectations, oracle: bool) -> Self {
        Checker { experiment, file, oracle, assertions: Vec::new(), regenerated: BTreeMap::new() }
    }

    /// Checks `measured` against the entry `name`; `fallback` supplies the
    /// oracle value.
    pub(crate) fn check(&mut self, name: &str, measured: Value, fallback: impl FnOnce() -> Entry) {
        let stored = self.file.get(self.experiment, name);
        let entry = match stored {
            Some(e) if !(self.oracle && e.derived) => e.clone(),
            _ => {
                let e = fallback();
                if e.derived || stored.is_none() {
                    self.regenerated.insert(key(self.experiment, name), e.clone());
                }
                e
            }
        };
        self.push(name, measured, entry);
    }

    /// Checks against a value computed during the run; never stored.
    pub(crate) fn check_live(&mut self, name: &str, measured: Value, entry: Entry) {
        self.push(name, measured, entry);
    }

    fn push(&mut self, name: &str, measured: Value, entry: Entry) {
        let pass = evaluate(&measured, &entry.expected, entry.tol, entry.relation);
        self.assertions.push(Assertion {
            name: name.to_string(),
            measured,
            expected: entry.expected,
            tol: entry.tol,
            relation: entry.relation,
            pass,
            provenance: entry.provenance,
        });
    }
}

enum Num {
    Exact(BigRational),
    Float(f64),
}

fn as_num(v: &Value) -> Option<Num> {
    match v {
        Value::Number(n) => n.as_f64().map(Num::Float),
        Value::String(s) => BigRational::from_str(s.trim()).ok().map(Num::Exact),
        _ => None,
    }
}

/// Compares two values under `relation`. Two exact rationals with zero
/// tolerance must agree exactly.
pub fn evaluate(measured: &Value, expected: &Value, tol: f64, relation: Relation) -> bool {
    if let (Value::Bool(a), Value::Bool(b)) = (measured, expected) {
        return a == b;
    }
    let (Some(m), Some(e)) = (as_num(measured), as_num(expected)) else {
        return false;
    };
    let diff = match (m, e) {
        (Num::Exact(a), Num::Exact(b)) if tol == 0.0 => {
            let d = a - b;
            return match relation {
                Relation::Eq => d == BigRational::from_integer(0.into()),
                Relation::Ge => !d.is_negative(),
                Relation::Le => !d.is_positive(),
            };
        }
        (Num::Exact(a), Num::Exact(b)) => (a - b).to_f64().unwrap_or(f64::NAN),
        (a, b) => to_f64(a) - to_f64(b),
    };
    match relation {
        Relation::Eq => diff.abs() <= tol,
        Relation::Ge => diff >= -tol,
        Relation::Le => diff <= tol,
    }
}

fn to_f64(n: Num) -> f64 {
    match n {
        Num::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
        Num::Float(x) => x,
    }
}
