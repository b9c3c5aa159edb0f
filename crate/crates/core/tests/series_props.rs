use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schoenberg::series::{
    basis_values, check_membership, evaluate_series, extract_fourier, extract_legendre,
    gram_psd_check, SphericalModel,
};
use schoenberg::walk::walk_closed_form;
use schoenberg::CoeffSeq;

fn random_normalized(rng: &mut ChaCha8Rng, n_max: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..=n_max).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

#[test]
fn fourier_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let b = random_normalized(&mut rng, 50);
        let seq = CoeffSeq::float(1, b.clone()).unwrap();
        let model = SphericalModel::from_series("r", &seq);
        let back = extract_fourier(&model, 50, 101).unwrap().to_f64_vec();
        for (x, y) in b.iter().zip(&back) {
            assert!((x - y).abs() <= 1e-11, "{x} vs {y}");
        }
    }
}

#[test]
fn legendre_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let b = random_normalized(&mut rng, 40);
        let seq = CoeffSeq::float(2, b.clone()).unwrap();
        let model = SphericalModel::from_series("r", &seq);
        let back = extract_legendre(&model, 40, 41).unwrap().to_f64_vec();
        for (x, y) in b.iter().zip(&back) {
            assert!((x - y).abs() <= 1e-11, "{x} vs {y}");
        }
    }
}

#[test]
fn series_at_zero_is_the_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in 1..=7 {
        let b: Vec<f64> = (0..=60).map(|_| rng.random::<f64>()).collect();
        let seq = CoeffSeq::float(d, b.clone()).unwrap();
        let s: f64 = b.iter().sum();
        assert!((evaluate_series(&seq, 0.0).unwrap() - s).abs() <= 1e-13 * s.max(1.0));
    }
}

/// Gegenbauer coefficient of dimension `d` (odd) by the trapezoid rule in
/// theta with weight sin^(d-1); exact for trigonometric polynomials below the
/// grid's aliasing degree.
fn gegenbauer_coefficient(psi: &dyn Fn(f64) -> f64, d: usize, n: usize, grid: usize) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..=grid {
        let t = PI * j as f64 / grid as f64;
        let w = if j == 0 || j == grid { 0.5 } else { 1.0 } * t.sin().powi(d as i32 - 1);
        let g = basis_values(d, n, t.cos())[n];
        num += w * psi(t) * g;
        den += w * g * g;
    }
    num / den
}

#[test]
fn walk_commutes_with_extraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n_max = 30;
    let b = random_normalized(&mut rng, n_max);
    let seq = CoeffSeq::float(1, b).unwrap();
    let model = SphericalModel::from_series("band", &seq);
    let extracted = extract_fourier(&model, n_max, 2 * n_max + 1).unwrap();
    let psi = |t: f64| model.eval(t);
    for k in 1..=3 {
        let walked = walk_closed_form(&extracted, k).unwrap();
        let d = 1 + 2 * k;
        for (n, w) in walked.to_f64_vec().iter().enumerate() {
            let direct = gegenbauer_coefficient(&psi, d, n, 512);
            assert!((w - direct).abs() <= 1e-10, "k={k} n={n}: {w} vs {direct}");
        }
    }
}

#[test]
fn nonnegative_sequences_give_psd_gram_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..50u64 {
        let d = 2 + (trial % 3) as usize;
        let n_max = 5 + (trial % 20) as usize;
        let seq = CoeffSeq::float(d, random_normalized(&mut rng, n_max)).unwrap();
        assert!(check_membership(&seq, false).passes());
        let model = SphericalModel::from_series("t", &seq);
        let report = gram_psd_check(&model, d, 25, trial).unwrap();
        assert!(report.psd_pass, "trial {trial}: {report}");
    }
}

#[test]
fn gram_detects_negative_coefficient() {
    let seq = CoeffSeq::float(2, vec![0.2, 0.0, 0.0, -0.8]).unwrap();
    assert!(!check_membership(&seq, false).passes());
    let model = SphericalModel::from_series("neg", &seq);
    assert!(!gram_psd_check(&model, 2, 40, 0).unwrap().psd_pass);
}
