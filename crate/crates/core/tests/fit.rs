// SPDX-License-Identifier: Apache-2.0

use gp3d_core::fit::{fit_monomial, fit_posynomial, FitConfig, FitDataset, FitError, COEFF_FLOOR};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn sample_points(n: usize, vars: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..vars).map(|_| rng.gen_range(-1.5f64..1.5).exp()).collect())
        .collect()
}

fn posy(c: &[f64], a: &[Vec<f64>], x: &[f64]) -> f64 {
    c.iter()
        .zip(a)
        .map(|(c, a)| c * a.iter().zip(x).map(|(e, v)| v.powf(*e)).product::<f64>())
        .sum()
}

#[test]
fn exact_monomial_is_recovered() {
    let x = sample_points(40, 3, 1);
    let f = x.iter().map(|p| posy(&[2.5], &[vec![1.2, -0.7, 0.3]], p)).collect();
    let fit = fit_monomial(&FitDataset::new(x, f).unwrap()).unwrap();
    assert!(fit.residual <= 1e-10);
    assert!((fit.coeffs[0] - 2.5).abs() < 1e-9);
    for (e, t) in fit.exponents[0].iter().zip([1.2, -0.7, 0.3]) {
        assert!((e - t).abs() < 1e-9);
    }
    assert!(fit.to_monomial().unwrap().is_ok());
}

#[test]
fn noisy_monomial_exponents_close() {
    let x = sample_points(200, 2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0f64, 0.01).unwrap();
    let f = x
        .iter()
        .map(|p| posy(&[0.8], &[vec![-1.0, 2.0]], p) * noise.sample(&mut rng).exp())
        .collect();
    let fit = fit_monomial(&FitDataset::new(x, f).unwrap()).unwrap();
    for (e, t) in fit.exponents[0].iter().zip([-1.0, 2.0]) {
        assert!((e - t).abs() <= 0.05, "{e} vs {t}");
    }
    assert!(fit.residual < 0.02);
}

#[test]
fn collinear_columns_are_named() {
    let x: Vec<Vec<f64>> = (1..10).map(|i| vec![i as f64, (i * i) as f64]).collect();
    let f = x.iter().map(|p| p[0]).collect();
    match fit_monomial(&FitDataset::new(x, f).unwrap()) {
        Err(FitError::RankDeficient(cols)) => assert!(!cols.is_empty()),
        other => panic!("expected rank deficiency, got {other:?}"),
    }
}

#[test]
fn two_term_data_fits_with_two_terms() {
    let c = [1.0, 2.0];
    let a = vec![vec![1.0, 0.0], vec![-1.0, 0.5]];
    let x = sample_points(60, 2, 4);
    let f = x.iter().map(|p| posy(&c, &a, p)).collect();
    let d = FitDataset::new(x, f).unwrap();
    let fit = fit_posynomial(&d, 2, &FitConfig::default()).unwrap();
    assert!(fit.residual <= 1e-6, "residual {}", fit.residual);
    assert!(fit_posynomial(&d, 1, &FitConfig::default()).unwrap().residual > 1e-3);
}

#[test]
fn residual_never_grows_with_more_terms() {
    let x = sample_points(50, 2, 5);
    let f = x
        .iter()
        .map(|p| (p[0] + p[1]).recip() + p[0].sqrt() * p[1] + 0.3 / p[0])
        .collect();
    let d = FitDataset::new(x, f).unwrap();
    let cfg = FitConfig::default();
    let mut prev = f64::INFINITY;
    for k in 1..=4 {
        let fit = fit_posynomial(&d, k, &cfg).unwrap();
        assert!(fit.residual <= prev, "K = {k}: {} after {prev}", fit.residual);
        assert!(fit.coeffs.iter().all(|&c| c >= COEFF_FLOOR));
        assert_eq!(fit.coeffs.len(), k);
        assert!(fit.to_posynomial().is_ok());
        prev = fit.residual;
    }
}

#[test]
fn fits_are_bitwise_reproducible() {
    let x = sample_points(30, 2, 6);
    let f = x.iter().map(|p| p[0] * p[0] + 1.0 / p[1]).collect();
    let d = FitDataset::new(x, f).unwrap();
    let cfg = FitConfig { seed: 9, ..FitConfig::default() };
    let a = fit_posynomial(&d, 3, &cfg).unwrap();
    let b = fit_posynomial(&d, 3, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bad_inputs_rejected() {
    assert!(FitDataset::new(vec![vec![1.0]], vec![-1.0]).and_then(|d| fit_monomial(&d)).is_err());
    assert!(FitDataset::new(vec![vec![0.0]], vec![1.0]).and_then(|d| fit_monomial(&d)).is_err());
    let d = FitDataset::new(sample_points(5, 1, 0), vec![1.0; 5]).unwrap();
    assert!(matches!(fit_posynomial(&d, 0, &FitConfig::default()), Err(FitError::ZeroTerms)));
}

#[test]
fn csv_round_trip_feeds_fit() {
    let text = "x1,x2,f\n1,1,3\n2,1,6\n1,2,1.5\n2,2,3\n";
    let d = FitDataset::from_csv(text).unwrap();
    let fit = fit_monomial(&d).unwrap();
    assert!((fit.coeffs[0] - 3.0).abs() < 1e-12);
    assert!((fit.exponents[0][0] - 1.0).abs() < 1e-12);
    assert!((fit.exponents[0][1] + 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_exact_monomial_fits_to_roundoff(
        c in 0.01f64..100.0,
        a in prop::collection::vec(-3.0f64..3.0, 1..4),
        seed in 0u64..1000,
    ) {
        let x = sample_points(20 + 5 * a.len(), a.len(), seed);
        let f = x.iter().map(|p| posy(&[c], std::slice::from_ref(&a), p)).collect();
        let fit = fit_monomial(&FitDataset::new(x, f).unwrap()).unwrap();
        prop_assert!(fit.residual <= 1e-10);
        for (e, t) in fit.exponents[0].iter().zip(&a) {
            prop_assert!((e - t).abs() < 1e-8);
        }
    }
}
