#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use schoenberg::Rational;

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(d))
}

/// `b_{n,d}` as a formal combination of starting coefficients `b_{m,d0}`.
pub type Formal = BTreeMap<usize, Rational>;

/// Two-step recursion coefficients written out from the recursion itself:
/// `b_{n,d+2} = p b_{n,d} - r b_{n+2,d}`.
fn recursion(d: i64, n: i64) -> (Rational, Rational) {
    if d == 1 {
        if n == 0 {
            (q(1, 1), q(1, 2))
        } else {
            (q(n + 1, 2), q(n + 1, 2))
        }
    } else {
        (
            q((n + d - 1) * (n + d), d * (2 * n + d - 1)),
            q((n + 1) * (n + 2), d * (2 * n + d + 3)),
        )
    }
}

/// Symbolically iterates the recursion `k` times from `start_dim` and returns
/// the weight row of `b_{n, start_dim + 2k}` on `b_{n + 2i, start_dim}`.
pub fn recursion_oracle_row(start_dim: usize, n: usize, k: usize) -> Vec<Rational> {
    // level[j] = formal expression of b_{n + 2j, current d}
    let mut level: Vec<Formal> = (0..=k)
        .map(|j| {
            let mut f = Formal::new();
            f.insert(n + 2 * j, q(1, 1));
            f
        })
        .collect();
    let mut d = start_dim as i64;
    for _ in 0..k {
        let next: Vec<Formal> = (0..level.len() - 1)
            .map(|j| {
                let idx = (n + 2 * j) as i64;
                let (p, r) = recursion(d, idx);
                let mut out = Formal::new();
                for (m, c) in &level[j] {
                    *out.entry(*m).or_insert_with(Rational::zero) += &p * c;
                }
                for (m, c) in &level[j + 1] {
                    *out.entry(*m).or_insert_with(Rational::zero) -= &r * c;
                }
                out
            })
            .collect();
        level = next;
        d += 2;
    }
    let top = &level[0];
    (0..=k)
        .map(|i| {
            top.get(&(n + 2 * i))
                .cloned()
                .unwrap_or_else(Rational::zero)
        })
        .collect()
}
