use super::*;
use alloc::vec;
use statrs::distribution::{ContinuousCDF, Normal};

fn normal() -> Normal {
    Normal::standard()
}

#[test]
fn standardize_examples() {
    let s = standardize(&[0.0, 1.0], 1).unwrap();
    assert!((s.values()[0] + 1.0).abs() < 1e-15 && (s.values()[1] - 1.0).abs() < 1e-15);
    assert!(matches!(standardize(&[3.0, 3.0, 3.0], 1), Err(Error::ZeroVariance)));
    assert!(standardize(&[1.0], 1).is_err());
    let raw = [1.0, 4.0, 2.0, 8.0, 5.0, 7.0];
    let a = standardize(&raw, 6).unwrap();
    assert!(a.mean().abs() < 1e-12 && (a.variance() - 1.0).abs() < 1e-9);
    let b = standardize(a.values(), 6).unwrap();
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x - y).abs() < 1e-12);
    }
    assert!(a.values().windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn moments_use_divisor_n() {
    let s = EmpiricalSample::new(vec![0.0, 2.0, 4.0], 1).unwrap();
    assert_eq!(s.mean(), 2.0);
    assert!((s.variance() - 8.0 / 3.0).abs() < 1e-15);
    assert!(s.central_moment(1).abs() < 1e-15);
    assert!((s.central_moment(4) - 32.0 / 3.0).abs() < 1e-12);
}

#[test]
fn kolmogorov_examples() {
    let nd = normal();
    let one = EmpiricalSample::new(vec![0.0], 1).unwrap();
    assert!((d_kolmogorov(&one, |t| nd.cdf(t)) - 0.5).abs() < 1e-15);

    let n = 1000;
    let q: Vec<f64> = (0..n).map(|i| nd.inverse_cdf((i as f64 + 0.5) / n as f64)).collect();
    let s = EmpiricalSample::new(q, n).unwrap();
    let dk = d_kolmogorov(&s, |t| nd.cdf(t));
    assert!(dk <= 0.5 / n as f64 + 1e-9, "{dk}");
    assert!(d_wasserstein1(&s, |p| nd.inverse_cdf(p)) < 1e-12);

    let raw = EmpiricalSample::new(vec![1.0, 1.0, 2.0, 5.0, 5.0, 5.0, 9.0], 7).unwrap();
    let own = raw.clone();
    assert_eq!(d_kolmogorov(&raw, |t| own.ecdf(t)), 0.0);
    assert_eq!(d_kolmogorov_two_sample(&raw, &own), 0.0);
}

#[test]
fn two_sample_kolmogorov() {
    let a = EmpiricalSample::new(vec![1.0, 2.0, 3.0, 4.0], 1).unwrap();
    let b = EmpiricalSample::new(vec![3.0, 4.0, 5.0, 6.0], 1).unwrap();
    assert_eq!(d_kolmogorov_two_sample(&a, &b), 0.5);
    let c = EmpiricalSample::new(vec![10.0], 1).unwrap();
    assert_eq!(d_kolmogorov_two_sample(&a, &c), 1.0);
}

#[test]
fn wasserstein_examples() {
    let zero = EmpiricalSample::new(vec![0.0; 5], 1).unwrap();
    assert_eq!(d_wasserstein1(&zero, |_| 1.0), 1.0);
    // Simulated standard normals via inverse transform of a fixed LCG.
    let nd = normal();
    let mut state = 12345u64;
    let draws: Vec<f64> = (0..100_000)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            nd.inverse_cdf(((state >> 11) as f64 + 0.5) / (1u64 << 53) as f64)
        })
        .collect();
    let s = EmpiricalSample::new(draws, 1).unwrap();
    assert!(d_wasserstein1(&s, |p| nd.inverse_cdf(p)) < 0.01);
}

#[test]
fn dk_dw_relation() {
    assert!(check_dk_dw_relation(0.0, 0.0, NORMAL_DENSITY_BOUND, 0.0));
    assert!((dk_dw_threshold(0.02, NORMAL_DENSITY_BOUND) - 0.126_33).abs() < 1e-5);
    assert!(!check_dk_dw_relation(0.2, 0.02, NORMAL_DENSITY_BOUND, 0.0));
    assert!((NORMAL_DENSITY_BOUND - 1.0 / (2.0 * core::f64::consts::PI).sqrt()).abs() < 1e-16);
}

#[test]
fn gamma_examples() {
    let one = LetterDistribution::uniform(1).unwrap();
    let g = estimate_gamma(&one, 50, 10, SeedSpec::new(0, 0)).unwrap();
    assert_eq!((g.gamma_hat, g.std_error), (1.0, 0.0));

    // n = 2, binary: LCS over the 16 pairs sums to 18, so E LC_2 / 2 = 9/16.
    let mut total = 0;
    for a in 0..4u32 {
        for b in 0..4u32 {
            let x = [1 + (a & 1), 1 + (a >> 1)];
            let y = [1 + (b & 1), 1 + (b >> 1)];
            total += lcs_bitparallel(&x, &y);
        }
    }
    assert_eq!(total, 18);
    let exact = total as f64 / 32.0;
    let bin = LetterDistribution::uniform(2).unwrap();
    let g = estimate_gamma(&bin, 2, 20_000, SeedSpec::new(1, 0)).unwrap();
    assert!((g.gamma_hat - exact).abs() < 3.0 * g.std_error, "{g:?}");

    let t = estimate_gamma_tilde(&bin, 2, 1.0, 20_000, SeedSpec::new(1, 0)).unwrap();
    assert_eq!(t, g);
}

#[test]
fn gamma_tilde_single_letter_y() {
    // |y| = 1: E LCS = P(y_1 occurs in x) = 1 - 2^{-n} for uniform binary.
    let bin = LetterDistribution::uniform(2).unwrap();
    let n = 4;
    let g = estimate_gamma_tilde(&bin, n, 1e-6, 20_000, SeedSpec::new(2, 0)).unwrap();
    assert_eq!(g.s, 0.25);
    let exact = (1.0 - 0.5f64.powi(n as i32)) / ((n + 1) as f64 / 2.0);
    assert!((g.gamma_hat - exact).abs() < 3.0 * g.std_error, "{g:?} {exact}");
}

#[test]
fn delta_default() {
    assert!((default_delta(0.8, 0.7, 0.75) - 0.05).abs() < 1e-15);
}

fn table() -> TwTable {
    tw_build_table(0.05, -10.0, 6.0).unwrap()
}

#[test]
fn tw_table_invariants() {
    let t = table();
    assert_eq!(t.grid.len(), 321);
    assert!(t.grid[0].1 < 1e-10);
    assert!(t.grid[320].1 > 1.0 - 1e-10);
    assert!(t.grid.windows(2).all(|w| w[0].1 <= w[1].1));
    assert!(t.grid.iter().all(|p| p.2 >= 0.0));
    assert!((t.density_integral() - 1.0).abs() < 1e-6, "{}", t.density_integral());
    assert!((t.mean() + 1.771).abs() < 1e-2, "{}", t.mean());
    assert!((t.sd() - 0.902).abs() < 1e-2, "{}", t.sd());
}

#[test]
fn tw_halving_converges() {
    let a = table();
    let b = tw_build_table(0.025, -10.0, 6.0).unwrap();
    for (k, p) in a.grid.iter().enumerate() {
        let q = b.grid[2 * k];
        assert!((p.0 - q.0).abs() < 1e-12);
        assert!((p.1 - q.1).abs() < 1e-6, "t={} {} {}", p.0, p.1, q.1);
    }
    assert!((a.mean() - b.mean()).abs() < 1e-2 && (a.sd() - b.sd()).abs() < 1e-2);
}

#[test]
fn tw_cdf_interpolation() {
    let a = table();
    assert_eq!(tw_cdf(&a, 6.0), a.grid[320].1);
    assert!(tw_cdf(&a, -10.0) < 1e-10);
    assert_eq!(tw_cdf(&a, 7.0), 1.0);
    assert_eq!(tw_cdf(&a, -11.0), 0.0);
    // Midpoints of the coarse grid are nodes of the halved table.
    let fine = tw_build_table(0.025, -10.0, 6.0).unwrap();
    for k in 0..320 {
        let mid = fine.grid[2 * k + 1];
        let err = a.error_estimate[k].max(a.error_estimate[k + 1]).max(fine.error_estimate[2 * k + 1]);
        assert!((tw_cdf(&a, mid.0) - mid.1).abs() <= err + 1e-9, "t={}", mid.0);
    }
    let m = a.quantile(0.5);
    assert!((tw_cdf(&a, m) - 0.5).abs() < 1e-9);
}

#[test]
fn tw_build_rejects_bad_grids() {
    assert!(tw_build_table(0.1, -10.0, 6.0).is_err());
    assert!(tw_build_table(0.05, 1.0, 1.0).is_err());
    assert!(tw_build_table(0.05, -10.0, 5.99).is_err());
    assert!(tw_build_table(0.05, -5.0, 4.0).is_ok());
}

#[test]
fn lis_standardize_examples() {
    let s = lis_standardize(&[20.0, 20.0 + 100f64.powf(1.0 / 6.0)], 100).unwrap();
    assert!(s.values()[0].abs() < 1e-12 && (s.values()[1] - 1.0).abs() < 1e-12);
    assert!(!s.standardized);
}
