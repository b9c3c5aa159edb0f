//! Closed-form walk weights.
//!
//! For a jump of `2k` dimensions the walked coefficient is a finite linear
//! combination of the starting coefficients at indices `n, n + 2, ..., n + 2k`:
//!
//! ```text
//! b_{n,2k+1} = sum_i a_i(n,k) b_{n+2i,1}      (odd target, Fourier start)
//! b_{n,2k+2} = sum_i u_i(n,k) b_{n+2i,2}      (even target, Legendre start)
//! ```
//!
//! Rows are computed exactly and memoized per `(n, k, parity)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{binomial, double_factorial, pochhammer_int, to_f64, HalfInteger, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    /// Weights `a_i(n,k)` taking `d = 1` to `d = 2k + 1`.
    OddTarget,
    /// Weights `u_i(n,k)` taking `d = 2` to `d = 2k + 2`.
    EvenTarget,
}

impl Parity {
    /// Dimension the walk starts from.
    pub fn start_dimension(self) -> usize {
        match self {
            Parity::OddTarget => 1,
            Parity::EvenTarget => 2,
        }
    }

    pub fn from_start_dimension(d: usize) -> Result<Parity> {
        match d {
            1 => Ok(Parity::OddTarget),
            2 => Ok(Parity::EvenTarget),
            other => Err(Error::UnsupportedDimension(other)),
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::OddTarget => "odd",
            Parity::EvenTarget => "even",
        })
    }
}

/// One weight row `w_0(n,k), ..., w_k(n,k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkWeights {
    pub n: usize,
    pub k: usize,
    pub parity: Parity,
    pub weights: Vec<Rational>,
}

impl WalkWeights {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.weights.iter().map(to_f64).collect()
    }

    /// Exact sum of the row, regardless of parity.
    pub fn total(&self) -> Rational {
        self.weights.iter().fold(Rational::zero(), |acc, w| acc + w)
    }
}

type Key = (usize, usize, Parity);

fn memo() -> &'static RwLock<HashMap<Key, Arc<WalkWeights>>> {
    static MEMO: OnceLock<RwLock<HashMap<Key, Arc<WalkWeights>>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cached(key: Key, build: impl FnOnce() -> WalkWeights) -> Arc<WalkWeights> {
    if let Some(row) = memo().read().ok().and_then(|m| m.get(&key).cloned()) {
        return row;
    }
    // Computed outside the lock; a concurrent fill of the same key stores an
    // identical row.
    let row = Arc::new(build());
    if let Ok(mut m) = memo().write() {
        m.entry(key).or_insert_with(|| row.clone());
    }
    row
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("walk weights need k >= 1"));
    }
    Ok(())
}

/// Weight row for either parity.
pub fn weights(parity: Parity, n: usize, k: usize) -> Result<Arc<WalkWeights>> {
    check_k(k)?;
    Ok(match parity {
        Parity::OddTarget => cached((n, k, parity), || odd_row(n, k)),
        Parity::EvenTarget => cached((n, k, parity), || even_row(n, k)),
    })
}

/// `a_0(n,k), ..., a_k(n,k)` expressing `b_{n,2k+1}` through Fourier
/// coefficients `b_{n,1}, ..., b_{n+2k,1}`.
pub fn odd_weights(n: usize, k: usize) -> Result<WalkWeights> {
    weights(Parity::OddTarget, n, k).map(|row| (*row).clone())
}

/// `u_0(n,k), ..., u_k(n,k)` expressing `b_{n,2k+2}` through Legendre
/// coefficients `b_{n,2}, ..., b_{n+2k,2}`.
pub fn even_weights(n: usize, k: usize) -> Result<WalkWeights> {
    weights(Parity::EvenTarget, n, k).map(|row| (*row).clone())
}

fn odd_row(n: usize, k: usize) -> WalkWeights {
    // common factor (n+k) (n+1)_(2k-1) / (2^k (2k-1)!!)
    let common = Rational::new(
        BigInt::from(n + k) * pochhammer_int(n as i64 + 1, 2 * k - 1),
        BigInt::one() << k,
    ) / double_factorial(k);
    let weights = (0..=k)
        .map(|i| {
            if n == 0 && i == 0 {
                return Rational::one();
            }
            let w = &common
                * binomial(k, i as i64)
                * Rational::new(
                    BigInt::from(n + 2 * i),
                    pochhammer_int((n + i) as i64, k + 1),
                );
            if i % 2 == 1 {
                -w
            } else {
                w
            }
        })
        .collect();
    WalkWeights {
        n,
        k,
        parity: Parity::OddTarget,
        weights,
    }
}

fn even_row(n: usize, k: usize) -> WalkWeights {
    // (2k-1)!! / 2^k * C(2k+n, n)
    let common = double_factorial(k) * binomial(2 * k + n, n as i64)
        / Rational::from_integer(BigInt::one() << k);
    let weights = (0..=k)
        .map(|i| {
            let lower = HalfInteger::from_twice(2 * (n + i) as i64 + 1).pochhammer(k - i);
            let upper = HalfInteger::from_twice(2 * (n + k) as i64 + 3).pochhammer(i);
            let w = &common * binomial(k, i as i64) / (lower * upper);
            if i % 2 == 1 {
                -w
            } else {
                w
            }
        })
        .collect();
    WalkWeights {
        n,
        k,
        parity: Parity::EvenTarget,
        weights,
    }
}

/// The simplified end weights `(a_0(n,k), a_k(n,k))`:
///
/// ```text
/// a_0(n,k) = (n+k)_(k) / (2^k (2k-1)!!)
/// a_k(n,k) = (-1/2)^k (n+1)_(k) / (2k-1)!!
/// ```
///
/// The `a_0` form holds for `n >= 1`.
pub fn odd_weight_endpoints(n: usize, k: usize) -> Result<(Rational, Rational)> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::invalid("endpoint form of a_0 needs n >= 1"));
    }
    let scale = Rational::from_integer(BigInt::one() << k) * double_factorial(k);
    let first = Rational::from_integer(pochhammer_int((n + k) as i64, k)) / &scale;
    let mut last = Rational::from_integer(pochhammer_int(n as i64 + 1, k)) / scale;
    if k % 2 == 1 {
        last = -last;
    }
    Ok((first, last))
}

/// Exact row sum of an odd-target row: `0` for `n > 0`, `1/2` for `n = 0`.
///
/// No closed form is known for even-target rows; use
/// [`WalkWeights::total`] to inspect those.
pub fn weight_row_sum(w: &WalkWeights) -> Result<Rational> {
    if w.parity != Parity::OddTarget {
        return Err(Error::invalid(
            "row sum identity only holds for odd-target weights",
        ));
    }
    Ok(w.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, ratio};
    use num_traits::Signed;

    #[test]
    fn odd_examples() {
        assert_eq!(odd_weights(3, 1).unwrap().weights, vec![int(2), int(-2)]);
        assert_eq!(
            odd_weights(0, 2).unwrap().weights,
            vec![int(1), ratio(-2, 3), ratio(1, 6)]
        );
        assert_eq!(
            odd_weights(1, 2).unwrap().weights,
            vec![int(1), ratio(-3, 2), ratio(1, 2)]
        );
        assert_eq!(odd_weights(1, 4).unwrap().weights[0], int(1));
        assert_eq!(
            odd_weights(0, 1).unwrap().weights,
            vec![int(1), ratio(-1, 2)]
        );
    }

    #[test]
    fn odd_rejects_zero_k() {
        assert!(odd_weights(3, 0).is_err());
        assert!(even_weights(3, 0).is_err());
    }

    #[test]
    fn even_examples() {
        assert_eq!(
            even_weights(0, 1).unwrap().weights,
            vec![int(1), ratio(-1, 5)]
        );
        assert_eq!(
            even_weights(0, 2).unwrap().weights,
            vec![int(1), ratio(-2, 7), ratio(1, 21)]
        );
        assert_eq!(
            even_weights(1, 1).unwrap().weights,
            vec![int(1), ratio(-3, 7)]
        );
    }

    #[test]
    fn endpoints() {
        assert_eq!(odd_weight_endpoints(1, 2).unwrap(), (int(1), ratio(1, 2)));
        assert_eq!(odd_weight_endpoints(1, 4).unwrap().0, int(1));
        assert_eq!(
            odd_weight_endpoints(2, 1).unwrap(),
            (ratio(3, 2), ratio(-3, 2))
        );
        assert!(odd_weight_endpoints(0, 2).is_err());
        for n in 1..=40 {
            for k in 1..=8 {
                let row = odd_weights(n, k).unwrap();
                let (a0, ak) = odd_weight_endpoints(n, k).unwrap();
                assert_eq!(a0, row.weights[0]);
                assert_eq!(ak, row.weights[k]);
            }
        }
    }

    #[test]
    fn row_sums() {
        assert_eq!(weight_row_sum(&odd_weights(5, 3).unwrap()).unwrap(), int(0));
        assert_eq!(
            weight_row_sum(&odd_weights(0, 7).unwrap()).unwrap(),
            ratio(1, 2)
        );
        assert_eq!(weight_row_sum(&odd_weights(1, 1).unwrap()).unwrap(), int(0));
        assert!(weight_row_sum(&even_weights(1, 1).unwrap()).is_err());
    }

    #[test]
    fn row_sums_grid() {
        for n in 0..=40 {
            for k in 1..=10 {
                let s = weight_row_sum(&odd_weights(n, k).unwrap()).unwrap();
                let expected = if n == 0 { ratio(1, 2) } else { int(0) };
                assert_eq!(s, expected, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn signs_alternate() {
        for n in 0..=40 {
            for k in 1..=10 {
                for row in [odd_weights(n, k).unwrap(), even_weights(n, k).unwrap()] {
                    assert_eq!(row.len(), k + 1);
                    for (i, w) in row.weights.iter().enumerate() {
                        assert!(!w.is_zero());
                        assert_eq!(
                            w.is_negative(),
                            i % 2 == 1,
                            "{:?} n={n} k={k} i={i}",
                            row.parity
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn k4_example_polynomials() {
        let kappa = ratio(1, 1680);
        for n in [1i64, 2, 3, 5, 10] {
            let row = odd_weights(n as usize, 4).unwrap().weights;
            let p = |v: i64| int(v);
            let expected = [
                &kappa * p((n + 4) * (n + 5) * (n + 6) * (n + 7)),
                &kappa * p(-4 * (n + 2) * (n + 4) * (n + 6) * (n + 7)),
                &kappa * p(6 * (n + 1) * (n + 4) * (n + 4) * (n + 7)),
                &kappa * p(-4 * (n + 1) * (n + 2) * (n + 4) * (n + 6)),
                &kappa * p((n + 1) * (n + 2) * (n + 3) * (n + 4)),
            ];
            assert_eq!(row, expected, "n={n}");
        }
    }

    #[test]
    fn memo_is_transparent() {
        let a = odd_weights(7, 3).unwrap();
        let b = odd_weights(7, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, odd_row(7, 3));
        let handles: Vec<_> = (0..4)
            .map(|_| std::thread::spawn(|| even_weights(11, 5).unwrap()))
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), even_row(11, 5));
        }
    }
}
