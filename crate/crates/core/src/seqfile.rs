//! JSON serialization of coefficient sequences.
//!
//! ```json
//! {"dimension": 1, "n_max": 2, "kind": "exact", "values": ["1/2", "3/10", "1/5"]}
//! ```
//!
//! Exact entries are reduced fractions `p/q` (or `p` when `q = 1`); float
//! entries are shortest round-trip decimals.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::walk::{CoeffSeq, Values};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Exact,
    Float,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    pub dimension: usize,
    pub n_max: usize,
    pub kind: Kind,
    pub values: Vec<String>,
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q` or `p`; rejects zero or negative denominators and fractions
/// not in lowest terms.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("'{s}' is not a fraction p/q"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
    let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
    if !q.is_positive() {
        return Err(Error::Parse(format!("'{s}' needs a positive denominator")));
    }
    let r = Rational::new(p.clone(), q.clone());
    if r.numer() != &p || r.denom() != &q {
        return Err(Error::Parse(format!("'{s}' is not in lowest terms")));
    }
    Ok(r)
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

pub fn parse_float(s: &str) -> Result<f64> {
    let x = f64::from_str(s.trim()).map_err(|_| Error::Parse(format!("'{s}' is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("'{s}' is not finite")));
    }
    Ok(x)
}

impl SequenceFile {
    pub fn from_seq(seq: &CoeffSeq) -> Self {
        let (kind, values) = match seq.values() {
            Values::Exact(v) => (Kind::Exact, v.iter().map(format_rational).collect()),
            Values::Float(v) => (Kind::Float, v.iter().map(|x| format_float(*x)).collect()),
        };
        SequenceFile {
            dimension: seq.dimension(),
            n_max: seq.n_max(),
            kind,
            values,
        }
    }

    pub fn to_seq(&self) -> Result<CoeffSeq> {
        if self.values.len() != self.n_max + 1 {
            return Err(Error::Parse(format!(
                "n_max = {} but {} values given",
                self.n_max,
                self.values.len()
            )));
        }
        if self.dimension == 0 {
            return Err(Error::Parse("dimension must be at least 1".into()));
        }
        let values = match self.kind {
            Kind::Exact => Values::Exact(
                self.values
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<_>>()?,
            ),
            Kind::Float => Values::Float(
                self.values
                    .iter()
                    .map(|s| parse_float(s))
                    .collect::<Result<_>>()?,
            ),
        };
        CoeffSeq::new(self.dimension, values)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain struct serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn seq_to_json(seq: &CoeffSeq) -> String {
    SequenceFile::from_seq(seq).to_json()
}

pub fn seq_from_json(text: &str) -> Result<CoeffSeq> {
    SequenceFile::from_json(text)?.to_seq()
}

/// Flat `n,value` rows with a header line.
pub fn seq_to_csv(seq: &CoeffSeq) -> String {
    let file = SequenceFile::from_seq(seq);
    let mut out = String::from("n,value\n");
    for (n, v) in file.values.iter().enumerate() {
        out.push_str(&format!("{n},{v}\n"));
    }
    out
}

pub fn read_seq(path: &Path) -> Result<CoeffSeq> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    seq_from_json(&text)
}
