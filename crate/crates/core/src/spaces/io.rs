use std::fmt;
use std::str::FromStr;

use num::BigRational;
use serde_json::{json, Value};

use super::{FiniteMarkovSpace, RationalSpace};
use crate::error::{Error, Result};
use crate::scalar::{format_rational, Scalar};

/// Arithmetic used for a space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NumericMode {
    #[default]
    F64,
    Rational,
}

impl FromStr for NumericMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f64" => Ok(NumericMode::F64),
            "rational" => Ok(NumericMode::Rational),
            other => Err(Error::validation(format!("unknown mode {other:?}, expected \"f64\" or \"rational\""))),
        }
    }
}

impl fmt::Display for NumericMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NumericMode::F64 => "f64",
            NumericMode::Rational => "rational",
        })
    }
}

/// A space in whichever mode its file requested.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySpace {
    F64(FiniteMarkovSpace<f64>),
    Rational(RationalSpace),
}

/// Largest space accepted in rational mode.
pub const RATIONAL_MAX_ATOMS: usize = 64;

impl AnySpace {
    pub fn mode(&self) -> NumericMode {
        match self {
            AnySpace::F64(_) => NumericMode::F64,
            AnySpace::Rational(_) => NumericMode::Rational,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnySpace::F64(s) => s.n(),
            AnySpace::Rational(s) => s.n(),
        }
    }

    pub fn to_f64(&self) -> FiniteMarkovSpace<f64> {
        match self {
            AnySpace::F64(s) => s.clone(),
            AnySpace::Rational(s) => s.to_f64(),
        }
    }

    /// Parses `{"n": .., "eta": [[..]], "mode": "f64" | "rational"}`.
    ///
    /// Entries may be JSON numbers or strings (`"p/q"` or decimals). An
    /// optional `"normalize": true` rescales the matrix to total mass one.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::validation("space must be a JSON object"))?;
        let n = obj.get("n").and_then(Value::as_u64).ok_or_else(|| Error::validation("missing integer field \"n\""))?
            as usize;
        let mode = match obj.get("mode") {
            None => NumericMode::F64,
            Some(m) => m.as_str().ok_or_else(|| Error::validation("\"mode\" must be a string"))?.parse()?,
        };
        let normalize = obj
            .get("normalize")
            .map_or(Ok(false), |b| b.as_bool().ok_or_else(|| Error::validation("\"normalize\" must be a boolean")))?;
        let rows =
            obj.get("eta").and_then(Value::as_array).ok_or_else(|| Error::validation("missing array field \"eta\""))?;
        if rows.len() != n {
            return Err(Error::Mismatch { expected: n, found: rows.len() });
        }
        match mode {
            NumericMode::F64 => Ok(AnySpace::F64(FiniteMarkovSpace::from_flat(n, parse_entries(rows, n)?, normalize)?)),
            NumericMode::Rational => {
                if n > RATIONAL_MAX_ATOMS {
                    return Err(Error::resource(format!(
                        "rational mode supports at most {RATIONAL_MAX_ATOMS} atoms, got {n}"
                    )));
                }
                Ok(AnySpace::Rational(FiniteMarkovSpace::from_flat(n, parse_entries(rows, n)?, normalize)?))
            }
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnySpace::F64(s) => json!({
                "n": s.n(),
                "mode": "f64",
                "eta": rows_of(s, |x| json!(x)),
            }),
            AnySpace::Rational(s) => json!({
                "n": s.n(),
                "mode": "rational",
                "eta": rows_of(s, |x: &BigRational| json!(format_rational(x))),
            }),
        }
    }
}

impl From<FiniteMarkovSpace<f64>> for AnySpace {
    fn from(s: FiniteMarkovSpace<f64>) -> Self {
        AnySpace::F64(s)
    }
}

impl From<RationalSpace> for AnySpace {
    fn from(s: RationalSpace) -> Self {
        AnySpace::Rational(s)
    }
}

fn parse_entries<T: Scalar>(rows: &[Value], n: usize) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| Error::validation(format!("row {i} is not an array")))?;
        if row.len() != n {
            return Err(Error::validation(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        for (j, x) in row.iter().enumerate() {
            let text = match x {
                Value::Number(num) => num.to_string(),
                Value::String(s) => s.clone(),
                _ => return Err(Error::validation(format!("entry ({i}, {j}) is not a number"))),
            };
            out.push(
                T::parse_value(&text)
                    .ok_or_else(|| Error::validation(format!("entry ({i}, {j}) = {text:?} is not a number")))?,
            );
        }
    }
    Ok(out)
}

fn rows_of<T: Scalar>(s: &FiniteMarkovSpace<T>, f: impl Fn(&T) -> Value) -> Vec<Vec<Value>> {
    s.eta_flat().chunks(s.n()).map(|row| row.iter().map(&f).collect()).collect()
}
