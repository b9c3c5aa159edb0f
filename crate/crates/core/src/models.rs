//! Concrete coefficient families.
//!
//! * `example31`: Fourier coefficients `b_0 = 0`, `b_n = 6 / (pi^2 n^2)`, whose
//!   odd-dimensional walks have a Beta-function closed form.
//! * `hs`: Legendre coefficients `b_n = c_n / n^(2 + eps) * (2n + 1) / 2` of
//!   a mean-square differentiable family on the two-sphere.
//! * `one`, `cos`: trivial members of every class, handy for checks.

use std::f64::consts::PI;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactnum::{beta_exact, ln_beta, to_f64, HalfInteger, Rational};
use crate::series::SphericalModel;
use crate::walk::CoeffSeq;
use crate::weights::odd_weights;

/// Above this `n` the closed form switches from exact Beta values to
/// log-gamma floats.
pub const EXACT_BETA_LIMIT: usize = 1000;

/// Terms used when evaluating the `hs` model as a function.
pub const HS_EVAL_TERMS: usize = 10_000;

pub const MODEL_NAMES: &[&str] = &["example31", "hs", "one", "cos"];

pub fn example_fourier_coefficient(n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        6.0 / (PI * PI * (n as f64).powi(2))
    }
}

/// `b_0 = 0`, `b_n = 6 / (pi^2 n^2)` for `n = 1..=n_max`.
pub fn example_fourier_seq(n_max: usize) -> Result<CoeffSeq> {
    if n_max < 1 {
        return Err(Error::invalid("example31 needs n_max >= 1"));
    }
    CoeffSeq::float(1, (0..=n_max).map(example_fourier_coefficient).collect())
}

/// `psi(t) = 1 - 3t/pi + 3t^2 / (2 pi^2)`, the sum of the `example31` series.
pub fn example_psi(theta: f64) -> f64 {
    1.0 - 3.0 * theta / PI + 1.5 * theta * theta / (PI * PI)
}

/// `pi^2 b_{n,2k+1}` for the `example31` family, exactly:
/// `3k (n+k) B(n/2, k)^2 / (n (n+2k)^2 B(n, 2k))`.
pub fn example_closed_form_scaled(n: usize, k: usize) -> Result<Rational> {
    if n == 0 || k == 0 {
        return Err(Error::invalid("closed form needs n >= 1 and k >= 1"));
    }
    let half_n = HalfInteger::from_twice(n as i64);
    let b_half = beta_exact(&half_n, &HalfInteger::from_integer(k as i64))?;
    let b_full = beta_exact(
        &HalfInteger::from_integer(n as i64),
        &HalfInteger::from_integer(2 * k as i64),
    )?;
    let num = Rational::from_integer(BigInt::from(3 * k * (n + k))) * &b_half * &b_half;
    let den = Rational::from_integer(BigInt::from(n) * BigInt::from(n + 2 * k).pow(2)) * b_full;
    Ok(num / den)
}

/// `b_{n,2k+1}` of the `example31` family from its Beta closed form.
pub fn example_closed_form(n: usize, k: usize) -> Result<f64> {
    if n == 0 || k == 0 {
        return Err(Error::invalid("closed form needs n >= 1 and k >= 1"));
    }
    if n <= EXACT_BETA_LIMIT {
        return Ok(to_f64(&example_closed_form_scaled(n, k)?) / (PI * PI));
    }
    let (nf, kf) = (n as f64, k as f64);
    let ln = (3.0 * kf * (nf + kf)).ln() + 2.0 * ln_beta(nf / 2.0, kf)?
        - nf.ln()
        - 2.0 * (nf + 2.0 * kf).ln()
        - ln_beta(nf, 2.0 * kf)?;
    Ok(ln.exp() / (PI * PI))
}

/// `b_{n,2k+1}`, `n = 0..=n_max`, of the `example31` family. Entries
/// `n >= 1` come from the closed form, `b_{0,2k+1}` from the weight row
/// `a_i(0,k)` (the closed form has no `n = 0` case).
pub fn example_walked_seq(n_max: usize, k: usize) -> Result<CoeffSeq> {
    let row = odd_weights(0, k)?;
    let b0 = row
        .to_f64()
        .iter()
        .enumerate()
        .map(|(i, w)| w * example_fourier_coefficient(2 * i))
        .sum();
    let mut values = vec![b0];
    for n in 1..=n_max {
        values.push(example_closed_form(n, k)?);
    }
    CoeffSeq::float(2 * k + 1, values)
}

pub fn example_model() -> SphericalModel {
    SphericalModel::new("example31", example_psi).with_oracle(|n, d| match d {
        1 => Some(example_fourier_coefficient(n)),
        d if d % 2 == 1 && n >= 1 => example_closed_form(n, (d - 1) / 2).ok(),
        _ => None,
    })
}

/// How the bounded factors `c_n` of the `hs` family are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum CnRule {
    /// `c_n = c` for every `n >= 1`.
    Constant(f64),
    /// `c_1, c_2, ...` from a table, then `limit` once the table runs out.
    Table {
        values: Vec<f64>,
        lambda1: f64,
        lambda2: f64,
        limit: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HSModelSpec {
    pub epsilon: f64,
    pub c0: f64,
    pub rule: CnRule,
}

impl HSModelSpec {
    /// `c_n = c` for all `n`, including `c_0`.
    pub fn constant(epsilon: f64, c: f64) -> Self {
        HSModelSpec {
            epsilon,
            c0: c,
            rule: CnRule::Constant(c),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::invalid(format!("c0 must be > 0, got {}", self.c0)));
        }
        match &self.rule {
            CnRule::Constant(c) => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(Error::invalid(format!("c must be > 0, got {c}")));
                }
            }
            CnRule::Table {
                values,
                lambda1,
                lambda2,
                limit,
            } => {
                if !(*lambda1 > 0.0 && lambda1 <= lambda2) {
                    return Err(Error::invalid("need 0 < lambda1 <= lambda2"));
                }
                let in_bounds = |c: f64| c >= *lambda1 && c <= *lambda2;
                if !in_bounds(*limit) {
                    return Err(Error::invalid(format!(
                        "limit {limit} outside [lambda1, lambda2]"
                    )));
                }
                if let Some((i, c)) = values.iter().enumerate().find(|(_, c)| !in_bounds(**c)) {
                    return Err(Error::invalid(format!(
                        "c_{} = {c} outside [{lambda1}, {lambda2}]",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// `c_n`; `c_0` for `n = 0`.
    pub fn c(&self, n: usize) -> f64 {
        if n == 0 {
            return self.c0;
        }
        match &self.rule {
            CnRule::Constant(c) => *c,
            CnRule::Table { values, limit, .. } => values.get(n - 1).copied().unwrap_or(*limit),
        }
    }

    /// `b_{n,2} = c(n) (2n + 1) / 2` with `c(0) = c_0`, `c(n) = c_n / n^(2+eps)`.
    pub fn coefficient(&self, n: usize) -> f64 {
        if n == 0 {
            return self.c0 / 2.0;
        }
        let nf = n as f64;
        self.c(n) / nf.powf(2.0 + self.epsilon) * (2.0 * nf + 1.0) / 2.0
    }
}

pub fn hs_model_seq(spec: &HSModelSpec, n_max: usize) -> Result<CoeffSeq> {
    spec.validate()?;
    CoeffSeq::float(2, (0..=n_max).map(|n| spec.coefficient(n)).collect())
}

/// The `hs` series as a function, truncated at [`HS_EVAL_TERMS`].
pub fn hs_model(spec: &HSModelSpec) -> Result<SphericalModel> {
    let seq = hs_model_seq(spec, HS_EVAL_TERMS)?;
    let spec = spec.clone();
    let series = SphericalModel::from_series("hs", &seq);
    Ok(SphericalModel::new("hs", move |t| series.eval(t))
        .with_oracle(move |n, d| (d == 2).then(|| spec.coefficient(n))))
}

/// Parameters accepted by the model registry.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelParams {
    pub epsilon: Option<f64>,
    pub c: Option<f64>,
    pub c0: Option<f64>,
}

impl ModelParams {
    pub fn hs_spec(&self) -> Result<HSModelSpec> {
        let epsilon = self
            .epsilon
            .ok_or_else(|| Error::invalid("model hs needs --epsilon"))?;
        let c = self.c.unwrap_or(1.0);
        let mut spec = HSModelSpec::constant(epsilon, c);
        if let Some(c0) = self.c0 {
            spec.c0 = c0;
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Registered model by name.
pub fn model_by_name(name: &str, params: &ModelParams) -> Result<SphericalModel> {
    match name {
        "example31" => Ok(example_model()),
        "hs" => hs_model(&params.hs_spec()?),
        "one" => Ok(SphericalModel::new("one", |_| 1.0)
            .with_oracle(|n, _| Some(if n == 0 { 1.0 } else { 0.0 }))),
        "cos" => Ok(SphericalModel::new("cos", f64::cos)
            .with_oracle(|n, _| Some(if n == 1 { 1.0 } else { 0.0 }))),
        other => Err(Error::invalid(format!(
            "unknown model '{other}' (known: {})",
            MODEL_NAMES.join(", ")
        ))),
    }
}

/// Least-squares slope `s` of `ln b_n` against `ln n` over `n_lo..=n_hi`,
/// reported as `gamma = -s - 1`.
///
/// Coefficients decaying like `n^(-gamma-1)` with `gamma` in `(0, 1)` belong
/// to functions of fractal index `gamma`. This is a plain diagnostic.
pub fn fractal_index_estimate(seq: &CoeffSeq, fit_range: (usize, usize)) -> Result<f64> {
    let (lo, hi) = fit_range;
    if seq.dimension() != 1 {
        return Err(Error::invalid(
            "fractal index is read off Fourier (d = 1) coefficients",
        ));
    }
    if lo == 0 || lo >= hi || hi > seq.n_max() {
        return Err(Error::invalid(format!(
            "fit range ({lo}, {hi}) must satisfy 1 <= lo < hi <= n_max = {}",
            seq.n_max()
        )));
    }
    let v = seq.to_f64_vec();
    if let Some(n) = (lo..=hi).find(|&n| v[n] <= 0.0) {
        return Err(Error::invalid(format!(
            "nonpositive coefficient at n = {n}"
        )));
    }
    let pts: Vec<(f64, f64)> = (lo..=hi).map(|n| ((n as f64).ln(), v[n].ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Ok(-sxy / sxx - 1.0)
}
