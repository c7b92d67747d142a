//! Empirical samples, distances to reference laws and the growth constants.
//!
//! Sample variances use divisor `N` throughout.

mod tracy_widom;

pub use tracy_widom::{airy_ai_pair, lis_scale, tw_build_table, tw_cdf, TwTable, X0};

use alloc::vec::Vec;

use crate::engines::lcs_bitparallel;
use crate::error::{Error, Result};
use crate::math;
use crate::models::{sample_word_with, LetterDistribution, SeedSpec};

/// Sorted sample values with their source length.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
    pub n_source: usize,
    pub standardized: bool,
}

impl EmpiricalSample {
    /// Sorts `values`; NaNs are rejected.
    pub fn new(mut values: Vec<f64>, n_source: usize) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("sample contains NaN"));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self {
            values,
            n_source,
            standardized: false,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        math::mean_var(&self.values).0
    }

    pub fn variance(&self) -> f64 {
        math::mean_var(&self.values).1
    }

    /// `(1/N) sum (x - mean)^r`.
    pub fn central_moment(&self, r: i32) -> f64 {
        let m = self.mean();
        self.values.iter().map(|v| (v - m).powi(r)).sum::<f64>() / self.len() as f64
    }

    /// Right-continuous empirical cdf.
    pub fn ecdf(&self, t: f64) -> f64 {
        self.values.partition_point(|&v| v <= t) as f64 / self.len() as f64
    }
}

/// `(x - mean) / sd`, sorted.
pub fn standardize(values: &[f64], n_source: usize) -> Result<EmpiricalSample> {
    if values.len() < 2 {
        return Err(Error::Domain("standardize needs at least two values"));
    }
    let (mean, var) = math::mean_var(values);
    if !(var > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let sd = math::sqrt(var);
    let mut s = EmpiricalSample::new(values.iter().map(|v| (v - mean) / sd).collect(), n_source)?;
    s.standardized = true;
    Ok(s)
}

/// LIS lengths on the edge scale `(L - 2 sqrt(n)) / n^{1/6}`.
pub fn lis_standardize(values: &[f64], n: usize) -> Result<EmpiricalSample> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1"));
    }
    EmpiricalSample::new(values.iter().map(|&v| lis_scale(v, n)).collect(), n)
}

/// `sup |F_hat - F|`, checked on both sides of every jump. The reference's
/// left limit is read just below each sample point.
pub fn d_kolmogorov(sample: &EmpiricalSample, cdf: impl Fn(f64) -> f64) -> f64 {
    let v = sample.values();
    let n = v.len() as f64;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < v.len() {
        let x = v[i];
        let mut j = i;
        while j < v.len() && v[j] == x {
            j += 1;
        }
        let below = i as f64 / n;
        let at = j as f64 / n;
        worst = worst.max(math::abs(cdf(x.next_down()) - below)).max(math::abs(cdf(x) - at));
        i = j;
    }
    worst
}

/// Two-sample Kolmogorov distance `sup_t |F_a(t) - F_b(t)|`.
pub fn d_kolmogorov_two_sample(a: &EmpiricalSample, b: &EmpiricalSample) -> f64 {
    let (va, vb) = (a.values(), b.values());
    let (na, nb) = (va.len() as f64, vb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut worst: f64 = 0.0;
    while i < va.len() || j < vb.len() {
        let x = match (va.get(i), vb.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        while i < va.len() && va[i] == x {
            i += 1;
        }
        while j < vb.len() && vb[j] == x {
            j += 1;
        }
        worst = worst.max(math::abs(i as f64 / na - j as f64 / nb));
    }
    worst
}

/// Quantile-coupling `W_1`: `(1/N) sum |x_(i) - Q((i - 1/2) / N)|`.
pub fn d_wasserstein1(sample: &EmpiricalSample, quantile: impl Fn(f64) -> f64) -> f64 {
    let n = sample.len() as f64;
    sample
        .values()
        .iter()
        .enumerate()
        .map(|(i, &x)| math::abs(x - quantile((i as f64 + 0.5) / n)))
        .sum::<f64>()
        / n
}

/// Density bound of the standard normal, `1 / sqrt(2 pi)`.
pub const NORMAL_DENSITY_BOUND: f64 = 0.398_942_280_401_432_7;

/// `sqrt(2 C d_W)`, the Kolmogorov bound implied by a Wasserstein distance
/// when the reference density is at most `C`.
pub fn dk_dw_threshold(dw: f64, density_bound: f64) -> f64 {
    math::sqrt(2.0 * density_bound * dw)
}

/// `dk <= sqrt(2 C dw) + slack`. Negative inputs fail.
pub fn check_dk_dw_relation(dk: f64, dw: f64, density_bound: f64, slack: f64) -> bool {
    if dk < 0.0 || dw < 0.0 || density_bound < 0.0 {
        return false;
    }
    dk <= dk_dw_threshold(dw, density_bound) + slack
}

/// `E LCS / normalizer` over a batch of word pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEstimate {
    pub m: usize,
    pub n: usize,
    /// Length ratio `|y| / n`; 1 in the symmetric case.
    pub s: f64,
    pub gamma_hat: f64,
    pub std_error: f64,
}

/// `E LC_n / n` from `reps` independent pairs; replication `r` uses
/// `seed.child(r)`.
pub fn estimate_gamma(dist: &LetterDistribution, n: usize, reps: usize, seed: SeedSpec) -> Result<GammaEstimate> {
    estimate_gamma_tilde(dist, n, 1.0, reps, seed)
}

/// `E LCS(x_1..x_n, y_1..y_{sn}) / (n (1 + s) / 2)` with `sn` rounded and at
/// least 1. The reported `s` is the realized ratio.
pub fn estimate_gamma_tilde(
    dist: &LetterDistribution,
    n: usize,
    s: f64,
    reps: usize,
    seed: SeedSpec,
) -> Result<GammaEstimate> {
    if n == 0 || reps == 0 {
        return Err(Error::Domain("need n >= 1 and reps >= 1"));
    }
    if !(s > 0.0) {
        return Err(Error::Domain("length ratio must be positive"));
    }
    let len_y = (math::round(s * n as f64) as usize).max(1);
    let norm = (n + len_y) as f64 / 2.0;
    let values: Vec<f64> = (0..reps)
        .map(|r| {
            let mut rng = seed.child(r as u64).rng();
            let x = sample_word_with(dist, n, &mut rng);
            let y = sample_word_with(dist, len_y, &mut rng);
            lcs_bitparallel(x.letters(), y.letters()) as f64 / norm
        })
        .collect();
    let (mean, var) = math::mean_var(&values);
    let std_error = if reps < 2 { 0.0 } else { math::sqrt(var / (reps - 1) as f64) };
    Ok(GammaEstimate {
        m: dist.m(),
        n,
        s: len_y as f64 / n as f64,
        gamma_hat: mean,
        std_error,
    })
}

/// Half the larger gap `gamma* - gamma~(s)` over the two side ratios.
pub fn default_delta(gamma_star: f64, gamma_s1: f64, gamma_s2: f64) -> f64 {
    0.5 * (gamma_star - gamma_s1).max(gamma_star - gamma_s2)
}

#[cfg(test)]
mod tests;
