//! Truncated Schoenberg coefficient sequences and dimension walks.
//!
//! Two routes move a sequence from dimension `d` to `d + 2k`: iterating the
//! two-step recursion ([`step_up`]) and applying the closed-form weight rows
//! ([`walk_closed_form`]). Both shorten the sequence by `2k` entries; nothing
//! beyond the stored `n_max` is ever extrapolated.

use std::ops::{Add, Mul, Sub};

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{ratio, to_f64, Rational};
use crate::weights::{weights, Parity};

/// Relative tolerance for float-mode walk comparisons.
pub const FLOAT_REL_TOL: f64 = 1e-12;
/// Absolute floor below which float differences count as equal.
pub const FLOAT_ABS_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Exact(v) => v.len(),
            Values::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Coefficients `b_{0,d}, ..., b_{N,d}` of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeq {
    dimension: usize,
    values: Values,
}

impl CoeffSeq {
    pub fn new(dimension: usize, values: Values) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if values.is_empty() {
            return Err(Error::invalid("sequence must hold at least b_0"));
        }
        if let Values::Float(v) = &values {
            if let Some(n) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("non-finite coefficient at n = {n}")));
            }
        }
        Ok(CoeffSeq { dimension, values })
    }

    pub fn exact(dimension: usize, values: Vec<Rational>) -> Result<Self> {
        Self::new(dimension, Values::Exact(values))
    }

    pub fn float(dimension: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(dimension, Values::Float(values))
    }

    /// Exact unit sequence `e_m` with `n_max` entries past zero.
    pub fn delta(dimension: usize, m: usize, n_max: usize) -> Result<Self> {
        let values = (0..=n_max)
            .map(|n| {
                if n == m {
                    Rational::from_integer(1.into())
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Self::exact(dimension, values)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, Values::Exact(_))
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        match &self.values {
            Values::Exact(v) => v.iter().map(to_f64).collect(),
            Values::Float(v) => v.clone(),
        }
    }

    /// Float copy of this sequence.
    pub fn to_float(&self) -> CoeffSeq {
        CoeffSeq {
            dimension: self.dimension,
            values: Values::Float(self.to_f64_vec()),
        }
    }

    pub fn sum_f64(&self) -> f64 {
        self.to_f64_vec().iter().sum()
    }

    /// Indices of strictly negative entries.
    pub fn negative_entries(&self) -> Vec<usize> {
        match &self.values {
            Values::Exact(v) => v
                .iter()
                .enumerate()
                .filter(|(_, x)| x.is_negative())
                .map(|(n, _)| n)
                .collect(),
            Values::Float(v) => v
                .iter()
                .enumerate()
                .filter(|(_, x)| **x < 0.0)
                .map(|(n, _)| n)
                .collect(),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.negative_entries().is_empty()
    }
}

trait Scalar:
    Clone + Send + Sync + for<'a> Add<&'a Self, Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn zero_value() -> Self;
    fn from_rational(r: &Rational) -> Self;
}

impl Scalar for Rational {
    fn zero_value() -> Self {
        Rational::zero()
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl Scalar for f64 {
    fn zero_value() -> Self {
        0.0
    }

    fn from_rational(r: &Rational) -> Self {
        to_f64(r)
    }
}

/// Coefficients `(p, q)` with `b_{n,d+2} = p b_{n,d} - q b_{n+2,d}`.
pub fn step_coefficients(d: usize, n: usize) -> (Rational, Rational) {
    assert!(d >= 1);
    if d == 1 {
        if n == 0 {
            return (ratio(1, 1), ratio(1, 2));
        }
        let half = ratio(n as i64 + 1, 2);
        return (half.clone(), half);
    }
    let (n, d) = (n as i64, d as i64);
    (
        ratio((n + d - 1) * (n + d), d * (2 * n + d - 1)),
        ratio((n + 1) * (n + 2), d * (2 * n + d + 3)),
    )
}

fn step_values<T: Scalar>(d: usize, v: &[T]) -> Vec<T> {
    (0..v.len() - 2)
        .into_par_iter()
        .map(|n| {
            let (p, q) = step_coefficients(d, n);
            T::from_rational(&p) * v[n].clone() - T::from_rational(&q) * v[n + 2].clone()
        })
        .collect()
}

/// One recursion step `d -> d + 2`; the result has `n_max - 2`.
pub fn step_up(seq: &CoeffSeq) -> Result<CoeffSeq> {
    if seq.n_max() < 2 {
        return Err(Error::InsufficientLength {
            required: 2,
            actual: seq.n_max(),
        });
    }
    let d = seq.dimension;
    let values = match &seq.values {
        Values::Exact(v) => Values::Exact(step_values(d, v)),
        Values::Float(v) => Values::Float(step_values(d, v)),
    };
    Ok(CoeffSeq {
        dimension: d + 2,
        values,
    })
}

/// `k` recursion steps. Works from any starting dimension.
pub fn walk_recursive(seq: &CoeffSeq, k: usize) -> Result<CoeffSeq> {
    if k == 0 {
        return Err(Error::invalid("walk length k must be at least 1"));
    }
    if seq.n_max() < 2 * k {
        return Err(Error::InsufficientLength {
            required: 2 * k,
            actual: seq.n_max(),
        });
    }
    let mut cur = seq.clone();
    for _ in 0..k {
        cur = step_up(&cur)?;
    }
    Ok(cur)
}

fn check_walk(seq: &CoeffSeq, k: usize) -> Result<Parity> {
    if k == 0 {
        return Err(Error::invalid("walk length k must be at least 1"));
    }
    let parity = Parity::from_start_dimension(seq.dimension)?;
    if seq.n_max() < 2 * k {
        return Err(Error::InsufficientLength {
            required: 2 * k,
            actual: seq.n_max(),
        });
    }
    Ok(parity)
}

fn closed_values<T: Scalar>(parity: Parity, k: usize, v: &[T]) -> Result<Vec<T>> {
    (0..v.len() - 2 * k)
        .into_par_iter()
        .map(|n| {
            let row = weights(parity, n, k)?;
            Ok(row
                .weights
                .iter()
                .enumerate()
                .fold(T::zero_value(), |acc, (i, w)| {
                    acc + &(T::from_rational(w) * v[n + 2 * i].clone())
                }))
        })
        .collect()
}

/// Closed-form walk from `d = 1` (odd targets) or `d = 2` (even targets) to
/// `d + 2k`. Entry `n` of the result is `sum_i w_i(n,k) b_{n+2i,d}`.
pub fn walk_closed_form(seq: &CoeffSeq, k: usize) -> Result<CoeffSeq> {
    let parity = check_walk(seq, k)?;
    let values = match &seq.values {
        Values::Exact(v) => Values::Exact(closed_values(parity, k, v)?),
        Values::Float(v) => Values::Float(closed_values(parity, k, v)?),
    };
    Ok(CoeffSeq {
        dimension: seq.dimension + 2 * k,
        values,
    })
}

/// Outcome of running both walk routes on one input.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkComparison {
    pub closed: CoeffSeq,
    pub recursive: CoeffSeq,
    /// Largest per-entry relative difference (0 when identical).
    pub max_discrepancy: f64,
    pub agree: bool,
}

/// Float equality at the walk tolerance.
pub fn floats_close(a: f64, b: f64) -> bool {
    let diff = (a - b).abs();
    diff <= FLOAT_ABS_FLOOR || diff <= FLOAT_REL_TOL * a.abs().max(b.abs())
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let diff = (a - b).abs();
    if diff <= FLOAT_ABS_FLOOR {
        0.0
    } else {
        diff / a.abs().max(b.abs())
    }
}

/// Runs both routes and compares them entry by entry.
pub fn compare_walks(seq: &CoeffSeq, k: usize) -> Result<WalkComparison> {
    let closed = walk_closed_form(seq, k)?;
    let recursive = walk_recursive(seq, k)?;
    let (agree, max_discrepancy) = match (&closed.values, &recursive.values) {
        (Values::Exact(a), Values::Exact(b)) => {
            let gap = a
                .iter()
                .zip(b)
                .map(|(x, y)| relative_gap(to_f64(x), to_f64(y)))
                .fold(0.0, f64::max);
            (a == b, gap)
        }
        (Values::Float(a), Values::Float(b)) => {
            let agree = a.iter().zip(b).all(|(x, y)| floats_close(*x, *y));
            let gap = a
                .iter()
                .zip(b)
                .map(|(x, y)| relative_gap(*x, *y))
                .fold(0.0, f64::max);
            (agree, gap)
        }
        _ => unreachable!("both routes keep the input kind"),
    };
    Ok(WalkComparison {
        closed,
        recursive,
        max_discrepancy,
        agree,
    })
}

/// True iff iterating [`step_up`] `k` times reproduces [`walk_closed_form`]
/// (exactly for rational input, within [`FLOAT_REL_TOL`] for floats).
pub fn verify_walk_equivalence(seq: &CoeffSeq, k: usize) -> Result<bool> {
    compare_walks(seq, k).map(|c| c.agree)
}

/// Checks the `n = 0` output of [`step_up`] against
/// `b_{0,d+2} = b_{0,d} - 2 / (d (d + 3)) b_{2,d}`.
pub fn zero_row_identity_check(seq: &CoeffSeq) -> Result<bool> {
    let stepped = step_up(seq)?;
    let d = seq.dimension as i64;
    let c = ratio(2, d * (d + 3));
    Ok(match (&seq.values, &stepped.values) {
        (Values::Exact(v), Values::Exact(s)) => s[0] == &v[0] - &c * &v[2],
        (Values::Float(v), Values::Float(s)) => s[0] == v[0] - to_f64(&c) * v[2],
        _ => unreachable!(),
    })
}
