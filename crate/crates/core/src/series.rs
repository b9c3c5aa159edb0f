//! Gegenbauer series on `[0, pi]`, coefficient extraction and membership
//! checks.
//!
//! The basis of dimension `d` is the normalized Gegenbauer polynomial
//! `C_n^{(d-1)/2}(cos t) / C_n^{(d-1)/2}(1)`: cosines for `d = 1`, Legendre
//! polynomials for `d = 2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::walk::CoeffSeq;

/// Name of the generator behind [`gram_psd_check`] samples.
pub const GRAM_RNG: &str = "ChaCha8";

/// Entries below this count as negative in membership reports.
pub const NEGATIVE_TOL: f64 = 1e-12;

/// Slack allowed above one for the truncated coefficient sum.
pub const NORMALIZATION_TOL: f64 = 1e-9;

type Evaluator = dyn Fn(f64) -> f64 + Send + Sync;
type CoefficientOracle = dyn Fn(usize, usize) -> Option<f64> + Send + Sync;

/// A function `psi` on `[0, pi]`, optionally with known Schoenberg
/// coefficients `(n, d) -> b_{n,d}`.
#[derive(Clone)]
pub struct SphericalModel {
    name: String,
    evaluator: Arc<Evaluator>,
    coefficient_oracle: Option<Arc<CoefficientOracle>>,
}

impl SphericalModel {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SphericalModel {
            name: name.into(),
            evaluator: Arc::new(f),
            coefficient_oracle: None,
        }
    }

    pub fn with_oracle(
        mut self,
        oracle: impl Fn(usize, usize) -> Option<f64> + Send + Sync + 'static,
    ) -> Self {
        self.coefficient_oracle = Some(Arc::new(oracle));
        self
    }

    /// The truncated series of `seq` as a model; its oracle returns the
    /// stored coefficients at the sequence's own dimension.
    pub fn from_series(name: impl Into<String>, seq: &CoeffSeq) -> Self {
        let d = seq.dimension();
        let values = seq.to_f64_vec();
        let eval_seq = seq.to_float();
        SphericalModel::new(name, move |t| {
            evaluate_series(&eval_seq, t).unwrap_or(f64::NAN)
        })
        .with_oracle(move |n, dim| {
            if dim == d {
                values.get(n).copied()
            } else {
                None
            }
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `psi(theta)`; `theta` is expected in `[0, pi]`.
    pub fn eval(&self, theta: f64) -> f64 {
        (self.evaluator)(theta)
    }

    /// Known coefficient `b_{n,d}`, if the model carries one.
    pub fn coefficient(&self, n: usize, d: usize) -> Option<f64> {
        self.coefficient_oracle.as_ref().and_then(|o| o(n, d))
    }
}

impl fmt::Debug for SphericalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SphericalModel")
            .field("name", &self.name)
            .field("has_oracle", &self.coefficient_oracle.is_some())
            .finish()
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::invalid(format!("theta = {theta} outside [0, pi]")));
    }
    Ok(())
}

/// Recurrence coefficients of the normalized basis:
/// `g_n = alpha_n x g_{n-1} - beta_n g_{n-2}` for `n >= 2`.
///
/// From `n C_n = 2 (n + l - 1) x C_{n-1} - (n + 2l - 2) C_{n-2}` and
/// `C_n(1) = (2l)_(n) / n!` with `l = (d - 1) / 2`.
fn recurrence(d: usize, n: usize) -> (f64, f64) {
    let two_l = (d - 1) as f64;
    let n = n as f64;
    let denom = n + two_l - 1.0;
    ((2.0 * n + two_l - 2.0) / denom, (n - 1.0) / denom)
}

/// `g_0(x), ..., g_N(x)` for dimension `d`.
pub fn basis_values(d: usize, n_max: usize, x: f64) -> Vec<f64> {
    let mut g = Vec::with_capacity(n_max + 1);
    g.push(1.0);
    if n_max >= 1 {
        g.push(x);
    }
    for n in 2..=n_max {
        let (a, b) = recurrence(d, n);
        g.push(a * x * g[n - 1] - b * g[n - 2]);
    }
    g
}

/// `C_n^{(d-1)/2}(cos theta) / C_n^{(d-1)/2}(1)`.
pub fn normalized_basis(d: usize, n: usize, theta: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    check_theta(theta)?;
    if d == 1 {
        return Ok((n as f64 * theta).cos());
    }
    Ok(basis_values(d, n, theta.cos())[n])
}

/// `sum_n b_{n,d} g_n(cos theta)`; Clenshaw summation for `d >= 2`.
pub fn evaluate_series(seq: &CoeffSeq, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let b = seq.to_f64_vec();
    let d = seq.dimension();
    if d == 1 {
        return Ok(b
            .iter()
            .enumerate()
            .map(|(n, c)| c * (n as f64 * theta).cos())
            .sum());
    }
    let x = theta.cos();
    let n_max = b.len() - 1;
    // y_n = b_n + alpha_{n+1} x y_{n+1} - beta_{n+2} y_{n+2}
    let mut y1 = 0.0; // y_{n+1}
    let mut y2 = 0.0; // y_{n+2}
    for n in (1..=n_max).rev() {
        let a = if n < n_max {
            recurrence(d, n + 1).0
        } else {
            0.0
        };
        let bb = if n + 1 < n_max {
            recurrence(d, n + 2).1
        } else {
            0.0
        };
        let y = b[n] + a * x * y1 - bb * y2;
        y2 = y1;
        y1 = y;
    }
    let beta2 = if n_max >= 2 { recurrence(d, 2).1 } else { 0.0 };
    Ok(b[0] + x * y1 - beta2 * y2)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let j = j as f64;
        let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = if n == 0 {
        0.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p, dp)
}

/// Gauss-Legendre rule of the given order: nodes are roots of `P_order`
/// found by Newton iteration, `w_i = 2 / ((1 - x_i^2) P'(x_i)^2)`.
pub fn gauss_legendre_rule(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::invalid("quadrature order must be at least 1"));
    }
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let m = order.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(order, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            // Newton oscillating between neighbouring floats is fine.
            let (p, _) = legendre_with_derivative(order, x);
            if p.abs() > 1e-12 {
                return Err(Error::NoConvergence(format!(
                    "Newton iteration for root {i} of P_{order}"
                )));
            }
        }
        let (_, dp) = legendre_with_derivative(order, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // descending cosines give descending nodes; store ascending
        nodes[order - 1 - i] = x;
        nodes[i] = -x;
        weights[order - 1 - i] = w;
        weights[i] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        order,
    })
}

/// Fourier-cosine coefficients from samples of `psi` on the uniform grid
/// `theta_j = j pi / (M - 1)`, `j = 0..M`, by the trapezoid rule.
pub fn extract_fourier_samples(samples: &[f64], n_max: usize) -> Result<CoeffSeq> {
    let m = samples.len();
    if m < 2 * n_max + 1 || m < 2 {
        return Err(Error::InsufficientResolution(format!(
            "{m} grid points cannot resolve n_max = {n_max} (need at least {})",
            (2 * n_max + 1).max(2)
        )));
    }
    let l = m - 1;
    let values = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut acc = 0.0;
            for (j, s) in samples.iter().enumerate() {
                // cos(n j pi / L), with the phase reduced mod 2L first
                let phase = (n * j) % (2 * l);
                let c = (phase as f64 * PI / l as f64).cos();
                let w = if j == 0 || j == l { 0.5 } else { 1.0 };
                acc += w * s * c;
            }
            let scale = if n == 0 { 1.0 } else { 2.0 };
            scale * acc / l as f64
        })
        .collect();
    CoeffSeq::float(1, values)
}

/// Fourier-cosine (`d = 1`) coefficients of a model:
/// `b_0 = (1/pi) int psi`, `b_n = (2/pi) int psi(t) cos(n t) dt`.
pub fn extract_fourier(model: &SphericalModel, n_max: usize, grid_size: usize) -> Result<CoeffSeq> {
    if grid_size < 2 * n_max + 1 || grid_size < 2 {
        return Err(Error::InsufficientResolution(format!(
            "grid_size {grid_size} < 2 n_max + 1 = {}",
            2 * n_max + 1
        )));
    }
    let l = (grid_size - 1) as f64;
    let samples: Vec<f64> = (0..grid_size)
        .map(|j| model.eval((j as f64 * PI / l).min(PI)))
        .collect();
    extract_fourier_samples(&samples, n_max)
}

/// Legendre (`d = 2`) coefficients
/// `b_n = (2n + 1)/2 int_{-1}^{1} psi(arccos x) P_n(x) dx` by Gauss-Legendre.
pub fn extract_legendre(model: &SphericalModel, n_max: usize, order: usize) -> Result<CoeffSeq> {
    if order < n_max + 1 {
        return Err(Error::InsufficientResolution(format!(
            "quadrature order {order} < n_max + 1 = {}",
            n_max + 1
        )));
    }
    let rule = gauss_legendre_rule(order)?;
    let mut acc = vec![0.0; n_max + 1];
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let f = w * model.eval(x.clamp(-1.0, 1.0).acos());
        for (a, p) in acc.iter_mut().zip(basis_values(2, n_max, *x)) {
            *a += f * p;
        }
    }
    let values = acc
        .into_iter()
        .enumerate()
        .map(|(n, a)| (2 * n + 1) as f64 / 2.0 * a)
        .collect();
    CoeffSeq::float(2, values)
}

/// Evidence that a truncated sequence belongs to `Psi_d` (and `Psi_d^+`).
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub dimension: usize,
    pub n_max: usize,
    /// `(n, b_n)` for every entry below `-NEGATIVE_TOL`.
    pub negative_entries: Vec<(usize, f64)>,
    pub sum: f64,
    /// `|sum - 1|`; truncation alone leaves the tail mass here.
    pub normalization_defect: f64,
    pub positive_even: usize,
    pub positive_odd: usize,
    pub strict: bool,
}

impl MembershipReport {
    pub fn nonnegative(&self) -> bool {
        self.negative_entries.is_empty()
    }

    /// Truncation can only lose mass, so the sum may fall short of one but
    /// must not exceed it.
    pub fn sum_within_bound(&self) -> bool {
        self.sum <= 1.0 + NORMALIZATION_TOL
    }

    /// Positive entries of both parities exist at this truncation. Necessary
    /// evidence for strict positive definiteness, never a proof.
    pub fn strict_evidence(&self) -> bool {
        self.positive_even > 0 && self.positive_odd > 0
    }

    pub fn passes(&self) -> bool {
        self.nonnegative() && self.sum_within_bound()
    }
}

impl fmt::Display for MembershipReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dimension: {}", self.dimension)?;
        writeln!(f, "n_max: {}", self.n_max)?;
        if self.nonnegative() {
            writeln!(f, "nonnegative: pass")?;
        } else {
            let idx: Vec<String> = self
                .negative_entries
                .iter()
                .map(|(n, v)| format!("n={n} ({v:e})"))
                .collect();
            writeln!(f, "nonnegative: FAIL at {}", idx.join(", "))?;
        }
        writeln!(f, "sum: {:?}", self.sum)?;
        writeln!(
            f,
            "normalization_defect: {:e} ({})",
            self.normalization_defect,
            if self.sum_within_bound() {
                "within bound"
            } else {
                "FAIL: sum exceeds 1"
            }
        )?;
        if self.strict {
            writeln!(
                f,
                "strict_evidence: {} (positive even = {}, positive odd = {})",
                if self.strict_evidence() {
                    "present"
                } else {
                    "missing"
                },
                self.positive_even,
                self.positive_odd
            )?;
        }
        Ok(())
    }
}

pub fn check_membership(seq: &CoeffSeq, strict: bool) -> MembershipReport {
    let v = seq.to_f64_vec();
    let negative_entries = v
        .iter()
        .enumerate()
        .filter(|(_, b)| **b < -NEGATIVE_TOL)
        .map(|(n, b)| (n, *b))
        .collect();
    let sum: f64 = v.iter().sum();
    let positive = |parity: usize| {
        v.iter()
            .enumerate()
            .filter(|(n, b)| n % 2 == parity && **b > 0.0)
            .count()
    };
    MembershipReport {
        dimension: seq.dimension(),
        n_max: seq.n_max(),
        negative_entries,
        sum,
        normalization_defect: (sum - 1.0).abs(),
        positive_even: positive(0),
        positive_odd: positive(1),
        strict,
    }
}

/// Result of the quadratic-form check on sampled points.
#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    pub point_count: usize,
    pub dimension: usize,
    pub min_eigen_estimate: f64,
    pub tolerance: f64,
    pub psd_pass: bool,
    pub seed: u64,
    pub rng: &'static str,
}

impl fmt::Display for GramReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "gram: sphere S^{}, {} points, seed {} ({})",
            self.dimension, self.point_count, self.seed, self.rng
        )?;
        writeln!(f, "min_eigenvalue: {:e}", self.min_eigen_estimate)?;
        writeln!(
            f,
            "psd: {} (tolerance {:e})",
            if self.psd_pass { "pass" } else { "FAIL" },
            self.tolerance
        )
    }
}

/// Deterministic points on `S^dimension` (unit vectors in `R^{dimension+1}`),
/// pairwise distinct.
pub fn sample_sphere(dimension: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(count);
    while points.len() < count {
        let v: Vec<f64> = (0..=dimension)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            continue;
        }
        let v: Vec<f64> = v.into_iter().map(|x| x / norm).collect();
        if points.iter().any(|p| dot(p, &v) > 1.0 - 1e-12) {
            continue;
        }
        points.push(v);
    }
    points
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(matrix: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(matrix).eigenvalues.min()
}

/// Samples points on `S^dimension`, forms `h(x_i, x_j) = psi(arccos <x_i, x_j>)`
/// and passes iff its smallest eigenvalue is at least `-1e-9 * point_count`.
pub fn gram_psd_check(
    model: &SphericalModel,
    dimension: usize,
    point_count: usize,
    seed: u64,
) -> Result<GramReport> {
    if dimension == 0 {
        return Err(Error::invalid("sphere dimension must be at least 1"));
    }
    if point_count < 2 {
        return Err(Error::invalid("Gram check needs at least 2 points"));
    }
    let points = sample_sphere(dimension, point_count, seed);
    let mut gram = DMatrix::zeros(point_count, point_count);
    for i in 0..point_count {
        for j in i..point_count {
            let theta = dot(&points[i], &points[j]).clamp(-1.0, 1.0).acos();
            let h = if i == j {
                model.eval(0.0)
            } else {
                model.eval(theta)
            };
            gram[(i, j)] = h;
            gram[(j, i)] = h;
        }
    }
    let min_eigen_estimate = min_eigenvalue(gram);
    let tolerance = 1e-9 * point_count as f64;
    Ok(GramReport {
        point_count,
        dimension,
        min_eigen_estimate,
        tolerance,
        psd_pass: min_eigen_estimate >= -tolerance,
        seed,
        rng: GRAM_RNG,
    })
}
