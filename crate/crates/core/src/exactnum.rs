//! Exact rational arithmetic and the combinatorial functions used by the
//! weight formulas.
//!
//! [`Rational`] is `num_rational::BigRational`, which keeps every value in
//! lowest terms with a positive denominator. Integer-valued results (double
//! factorials, binomials) are returned as rationals with denominator one.

use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Integer-valued rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `p / q` in lowest terms. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Checked division.
pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

/// Nearest `f64` to an exact rational.
///
/// Numerator and denominator are scaled down before conversion so values with
/// very large parts still convert without overflowing to infinity.
pub fn to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let nbits = r.numer().bits() as i64;
    let dbits = r.denom().bits() as i64;
    let shift_n = (nbits - 900).max(0);
    let shift_d = (dbits - 900).max(0);
    let n = (r.numer() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n - shift_d) as i32)
}

/// Exact half-integer `twice_value / 2`, e.g. `n + 1/2` or `n + k + 3/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInteger {
    twice_value: BigInt,
}

impl HalfInteger {
    pub fn from_twice(twice_value: impl Into<BigInt>) -> Self {
        HalfInteger {
            twice_value: twice_value.into(),
        }
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Self {
        HalfInteger {
            twice_value: v.into() * 2,
        }
    }

    pub fn twice_value(&self) -> &BigInt {
        &self.twice_value
    }

    pub fn is_integer(&self) -> bool {
        self.twice_value.is_even()
    }

    pub fn is_positive(&self) -> bool {
        self.twice_value.is_positive()
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.twice_value.clone(), BigInt::from(2))
    }

    pub fn to_f64(&self) -> f64 {
        self.twice_value.to_f64().unwrap_or(f64::NAN) / 2.0
    }

    /// `(self)_(m)` computed as a product of integers over `2^m`.
    pub fn pochhammer(&self, m: usize) -> Rational {
        let mut num = BigInt::one();
        let mut t = self.twice_value.clone();
        for _ in 0..m {
            num *= &t;
            t += 2;
        }
        Rational::new(num, BigInt::one() << m)
    }
}

impl Add<i64> for &HalfInteger {
    type Output = HalfInteger;

    fn add(self, rhs: i64) -> HalfInteger {
        HalfInteger::from_twice(&self.twice_value + 2 * rhs)
    }
}

impl From<HalfInteger> for Rational {
    fn from(h: HalfInteger) -> Rational {
        h.to_rational()
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", &self.twice_value / 2)
        } else {
            write!(f, "{}/2", self.twice_value)
        }
    }
}

/// `(2k - 1)!! = 1 * 3 * ... * (2k - 1)`, with `(-1)!! = 1`.
pub fn double_factorial(k: usize) -> Rational {
    let mut acc = BigInt::one();
    for i in 1..=k {
        acc *= 2 * i - 1;
    }
    Rational::from_integer(acc)
}

/// `n!`
pub fn factorial(n: usize) -> Rational {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    Rational::from_integer(acc)
}

/// Rising factorial `(x)_(m) = x (x + 1) ... (x + m - 1)`; `(x)_(0) = 1`.
pub fn pochhammer(x: impl Into<Rational>, m: usize) -> Rational {
    let x = x.into();
    let one = Rational::one();
    let mut acc = Rational::one();
    let mut term = x;
    for _ in 0..m {
        acc *= &term;
        term += &one;
    }
    acc
}

/// Rising factorial of an integer argument, kept in `BigInt`.
pub fn pochhammer_int(x: i64, m: usize) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..m as i64 {
        acc *= x + j;
    }
    acc
}

pub(crate) fn binomial_int(a: usize, b: i64) -> BigInt {
    if b < 0 || b as usize > a {
        return BigInt::zero();
    }
    let b = (b as usize).min(a - b as usize);
    let mut acc = BigInt::one();
    for j in 0..b {
        acc *= a - j;
        acc /= j + 1;
    }
    acc
}

/// `C(a, b)`, zero when `b < 0` or `b > a`.
pub fn binomial(a: usize, b: i64) -> Rational {
    Rational::from_integer(binomial_int(a, b))
}

/// Checks `(x)_(k) (x + k)_(l) = (x)_(k + l)` exactly.
pub fn pochhammer_split_identity(x: &Rational, k: usize, l: usize) -> bool {
    let shifted = x + Rational::from_integer(BigInt::from(k));
    pochhammer(x.clone(), k) * pochhammer(shifted, l) == pochhammer(x.clone(), k + l)
}

/// Both sides of the alternating binomial-reciprocal sum
///
/// `sum_{i=0}^k (-1)^i C(k, i) / C(b + i, c) = c / (k + c) / C(k + b, b - c)`
///
/// for positive integers `b >= c`. The left side is summed term by term.
pub fn frisch_identity_sides(k: usize, b: usize, c: usize) -> Result<(Rational, Rational)> {
    if c == 0 || b < c {
        return Err(Error::invalid(format!(
            "alternating binomial identity needs b >= c >= 1, got b = {b}, c = {c}"
        )));
    }
    let mut lhs = Rational::zero();
    for i in 0..=k {
        let term = Rational::new(binomial_int(k, i as i64), binomial_int(b + i, c as i64));
        if i % 2 == 0 {
            lhs += term;
        } else {
            lhs -= term;
        }
    }
    let rhs = Rational::new(
        BigInt::from(c),
        BigInt::from(k + c) * binomial_int(k + b, (b - c) as i64),
    );
    Ok((lhs, rhs))
}

/// Exact Beta function for the argument shapes whose value is rational:
/// two positive integers, or one positive integer with one positive
/// half-integer. Uses `B(x, m) = (m - 1)! / (x)_(m)` for integer `m`.
pub fn beta_exact(x: &HalfInteger, y: &HalfInteger) -> Result<Rational> {
    if !x.is_positive() || !y.is_positive() {
        return Err(Error::invalid(format!(
            "Beta arguments must be positive, got ({x}, {y})"
        )));
    }
    let (other, m) = if y.is_integer() {
        (x, y)
    } else if x.is_integer() {
        (y, x)
    } else {
        return Err(Error::invalid(format!(
            "exact Beta at two half-integers ({x}, {y}) is not rational"
        )));
    };
    let m: BigInt = m.twice_value() / 2;
    let m = m
        .to_usize()
        .ok_or_else(|| Error::invalid("Beta argument too large"))?;
    Ok(factorial(m - 1) / other.pochhammer(m))
}

/// Below this argument log-gamma and log-beta shift upward before using the
/// asymptotic series.
const STIRLING_MIN: f64 = 10.0;

/// `sum_j B_{2j} / (2j (2j - 1) z^(2j - 1))`, the Stirling series remainder
/// after `(z - 1/2) ln z - z + ln(2 pi) / 2`.
fn stirling_tail(z: f64) -> f64 {
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let r = 1.0 / z;
    let r2 = r * r;
    C.iter().rev().fold(0.0, |acc, c| acc * r2 + c) * r
}

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < STIRLING_MIN {
        let mut shift = 0.0;
        let mut z = x;
        let mut prod = 1.0;
        while z < STIRLING_MIN {
            prod *= z;
            z += 1.0;
            if !(1e-250..=1e250).contains(&prod) {
                shift += prod.ln();
                prod = 1.0;
            }
        }
        return ln_gamma(z) - shift - prod.ln();
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_tail(x)
}

/// Floating-point Beta function.
pub fn beta_float(x: f64, y: f64) -> Result<f64> {
    Ok(ln_beta(x, y)?.exp())
}

/// `ln B(x, y)` for `x, y > 0`.
///
/// Small arguments are shifted with `B(x, y) = B(x + 1, y) (x + y) / x`; the
/// large-argument form is arranged so the `x ln x` sized terms cancel
/// analytically rather than in floating point.
pub fn ln_beta(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::invalid(format!(
            "Beta arguments must be positive and finite, got ({x}, {y})"
        )));
    }
    let (mut x, mut y) = (x, y);
    let mut acc = 0.0;
    while x < STIRLING_MIN {
        acc += ((x + y) / x).ln();
        x += 1.0;
    }
    while y < STIRLING_MIN {
        acc += ((x + y) / y).ln();
        y += 1.0;
    }
    let s = x + y;
    // ln(x / s) = -ln(1 + y / x)
    let main =
        HALF_LN_2PI - 0.5 * s.ln() - (x - 0.5) * (y / x).ln_1p() - (y - 0.5) * (x / y).ln_1p();
    Ok(acc + main + stirling_tail(x) + stirling_tail(y) - stirling_tail(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half(twice: i64) -> HalfInteger {
        HalfInteger::from_twice(twice)
    }

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial(0), int(1));
        assert_eq!(double_factorial(1), int(1));
        assert_eq!(double_factorial(4), int(105));
    }

    #[test]
    fn double_factorial_matches_factorial_ratio() {
        for k in 0..=20 {
            let rhs =
                factorial(2 * k) / (factorial(k) * Rational::from_integer(BigInt::one() << k));
            assert_eq!(double_factorial(k), rhs, "k = {k}");
        }
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(int(3), 3), int(60));
        assert_eq!(pochhammer(ratio(-7, 3), 0), int(1));
        assert_eq!(pochhammer(ratio(1, 2), 2), ratio(3, 4));
        assert_eq!(half(1).pochhammer(2), ratio(3, 4));
        assert_eq!(
            half(-3).pochhammer(3),
            ratio(-3, 2) * ratio(-1, 2) * ratio(1, 2)
        );
        assert_eq!(pochhammer_int(3, 3), BigInt::from(60));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), int(6));
        assert_eq!(binomial(5, 0), int(1));
        assert_eq!(binomial(3, 5), int(0));
        assert_eq!(binomial(3, -1), int(0));
        assert_eq!(binomial(30, 15), int(155_117_520));
    }

    #[test]
    fn split_identity_examples() {
        assert!(pochhammer_split_identity(&int(2), 2, 3));
        assert!(pochhammer_split_identity(&ratio(1, 2), 1, 1));
        assert!(pochhammer_split_identity(&int(-3), 2, 2));
    }

    #[test]
    fn frisch_examples() {
        assert_eq!(
            frisch_identity_sides(1, 2, 1).unwrap(),
            (ratio(1, 6), ratio(1, 6))
        );
        assert_eq!(
            frisch_identity_sides(0, 3, 2).unwrap(),
            (ratio(1, 3), ratio(1, 3))
        );
        assert_eq!(
            frisch_identity_sides(2, 2, 2).unwrap(),
            (ratio(1, 2), ratio(1, 2))
        );
        assert!(frisch_identity_sides(2, 1, 2).is_err());
        assert!(frisch_identity_sides(2, 3, 0).is_err());
    }

    #[test]
    fn frisch_grid() {
        for k in 0..=12 {
            for b in 1..=12 {
                for c in 1..=b {
                    let (l, r) = frisch_identity_sides(k, b, c).unwrap();
                    assert_eq!(l, r, "k={k} b={b} c={c}");
                }
            }
        }
    }

    #[test]
    fn beta_exact_values() {
        let one = HalfInteger::from_integer(1);
        let two = HalfInteger::from_integer(2);
        assert_eq!(beta_exact(&one, &one).unwrap(), int(1));
        assert_eq!(beta_exact(&two, &two).unwrap(), ratio(1, 6));
        assert_eq!(beta_exact(&half(1), &two).unwrap(), ratio(4, 3));
        assert_eq!(beta_exact(&two, &half(1)).unwrap(), ratio(4, 3));
        assert!(beta_exact(&half(1), &half(3)).is_err());
        assert!(beta_exact(&HalfInteger::from_integer(0), &two).is_err());
    }

    #[test]
    fn beta_float_rejects_nonpositive() {
        assert!(beta_float(0.0, 1.0).is_err());
        assert!(beta_float(1.0, -2.0).is_err());
        assert!(beta_float(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn beta_float_matches_exact() {
        let mut worst: f64 = 0.0;
        for twice_x in 1..=100i64 {
            for y in 1..=50i64 {
                let exact = beta_exact(&half(twice_x), &HalfInteger::from_integer(y)).unwrap();
                let e = to_f64(&exact);
                let f = beta_float(twice_x as f64 / 2.0, y as f64).unwrap();
                worst = worst.max(((f - e) / e).abs());
            }
        }
        assert!(worst <= 1e-13, "worst relative error {worst:e}");
    }

    #[test]
    fn ln_gamma_values() {
        // ln Gamma(n) = ln (n-1)!
        let mut lf = 0.0f64;
        for n in 1..=170 {
            if n > 1 {
                lf += ((n - 1) as f64).ln();
            }
            let g = ln_gamma(n as f64);
            assert!(
                (g - lf).abs() <= 1e-14 * lf.abs().max(1.0),
                "n={n} {g} {lf}"
            );
        }
        let sqrt_pi_ln = 0.5 * std::f64::consts::PI.ln();
        assert!(((ln_gamma(0.5) - sqrt_pi_ln) / sqrt_pi_ln).abs() < 1e-14);
        // Gamma(1e6) via Stirling reference
        let x = 1e6f64;
        let reference =
            (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x);
        assert!(((ln_gamma(x) - reference) / reference).abs() < 1e-14);
    }

    #[test]
    fn to_f64_handles_huge_parts() {
        let big = Rational::new(
            BigInt::from(3) * (BigInt::one() << 2000),
            BigInt::from(4) * (BigInt::one() << 2000) + 1,
        );
        assert!((to_f64(&big) - 0.75).abs() < 1e-15);
        assert_eq!(to_f64(&ratio(-1, 3)), -1.0 / 3.0);
    }

    #[test]
    fn half_integer_display() {
        assert_eq!(half(5).to_string(), "5/2");
        assert_eq!(half(6).to_string(), "3");
        assert_eq!((&half(1) + 2).to_string(), "5/2");
    }

    #[test]
    fn checked_div_by_zero() {
        assert_eq!(checked_div(&int(1), &int(0)), Err(Error::DivisionByZero));
        assert_eq!(checked_div(&int(1), &int(2)).unwrap(), ratio(1, 2));
    }
}
