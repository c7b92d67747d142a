//! Chatterjee's normal-approximation statistic for `f(W) = LCS(X, Y)` with
//! `W = (X, Y)` of length `2n`.
//!
//! Coordinates here are 0-based indices into `W`. `W^A` takes the
//! coordinates in `A` from an independent copy `W'`, and
//! `Delta_j f(W) = f(W) - f(W^{j})`. With `w(A) = 1 / (C(2n, |A|) (2n - |A|))`,
//!
//! `T = 1/2 sum_{A != [2n]} w(A) sum_{j not in A} Delta_j f(W) Delta_j f(W^A)`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;
use rand::seq::index;
use rand::Rng;

use crate::engines::lcs_bitparallel;
use crate::error::{Error, Result};
use crate::math;
use crate::models::{sample_word_with, LetterDistribution, SeedSpec};

/// Largest `2n` for which [`t_exact`] enumerates all subsets.
pub const EXACT_MAX_COORDS: usize = 12;
/// Largest `2n` accepted by [`weight_identity_check`].
pub const WEIGHT_MAX_COORDS: usize = 8;
/// Cap on the number of `(W, W')` pairs [`stein_exhaustive`] will visit.
pub const EXHAUSTIVE_MAX_PAIRS: usize = 1 << 20;

fn f(w: &[u32]) -> usize {
    let n = w.len() / 2;
    lcs_bitparallel(&w[..n], &w[n..])
}

fn check_pair(w: &[u32], w_prime: &[u32]) -> Result<usize> {
    if w.len() != w_prime.len() {
        return Err(Error::LengthMismatch {
            left: w.len(),
            right: w_prime.len(),
        });
    }
    if w.len() % 2 != 0 {
        return Err(Error::Domain("W must have even length"));
    }
    Ok(w.len())
}

/// A realization `(W, W', A, j)` with `j` outside `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbedPair<'a> {
    pub w: &'a [u32],
    pub w_prime: &'a [u32],
    pub subset: Vec<usize>,
    pub j: usize,
}

/// Both increments of one term of `T_A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SteinSample {
    pub delta_j_w: i32,
    pub delta_j_wa: i32,
    pub s: usize,
}

impl<'a> PerturbedPair<'a> {
    pub fn new(w: &'a [u32], w_prime: &'a [u32], mut subset: Vec<usize>, j: usize) -> Result<Self> {
        let len = check_pair(w, w_prime)?;
        subset.sort_unstable();
        subset.dedup();
        if let Some(&bad) = subset.iter().chain(core::iter::once(&j)).find(|&&i| i >= len) {
            return Err(Error::CoordinateOutOfRange { index: bad, len });
        }
        if subset.binary_search(&j).is_ok() {
            return Err(Error::Domain("j must lie outside A"));
        }
        Ok(Self {
            w,
            w_prime,
            subset,
            j,
        })
    }

    /// `W^A`.
    pub fn perturbed(&self) -> Vec<u32> {
        let mut out = self.w.to_vec();
        for &i in &self.subset {
            out[i] = self.w_prime[i];
        }
        out
    }

    pub fn sample(&self) -> SteinSample {
        let mut w = self.w.to_vec();
        let f_w = f(&w) as i32;
        w[self.j] = self.w_prime[self.j];
        let delta_j_w = f_w - f(&w) as i32;
        let mut wa = self.perturbed();
        let f_a = f(&wa) as i32;
        wa[self.j] = self.w_prime[self.j];
        SteinSample {
            delta_j_w,
            delta_j_wa: f_a - f(&wa) as i32,
            s: self.subset.len(),
        }
    }
}

fn binomials(m: usize) -> Vec<u64> {
    let mut c = vec![1u64; m + 1];
    for s in 1..=m {
        c[s] = c[s - 1] * (m - s + 1) as u64 / s as u64;
    }
    c
}

/// `T` by enumeration of all `2^{2n}` subsets.
pub fn t_exact(w: &[u32], w_prime: &[u32]) -> Result<f64> {
    let m = check_pair(w, w_prime)?;
    if m > EXACT_MAX_COORDS {
        return Err(Error::TooLarge("t_exact enumerates at most 12 coordinates"));
    }
    if m == 0 {
        return Ok(0.0);
    }
    let full = 1usize << m;
    let mut buf = w.to_vec();
    let fv: Vec<i32> = (0..full)
        .map(|mask| {
            for (i, b) in buf.iter_mut().enumerate() {
                *b = if mask >> i & 1 == 1 { w_prime[i] } else { w[i] };
            }
            f(&buf) as i32
        })
        .collect();
    let binom = binomials(m);
    let mut total = 0.0;
    for a in 0..full - 1 {
        let s = a.count_ones() as usize;
        let mut inner = 0i64;
        for j in (0..m).filter(|&j| a >> j & 1 == 0) {
            let bit = 1 << j;
            inner += ((fv[0] - fv[bit]) * (fv[a] - fv[a | bit])) as i64;
        }
        if inner != 0 {
            total += inner as f64 / (binom[s] as f64 * (m - s) as f64);
        }
    }
    Ok(total / 2.0)
}

/// Monte Carlo estimate of `T` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TEstimate {
    pub mean: f64,
    /// Standard deviation of the draws over `sqrt(draws)`; `NaN` for one
    /// draw.
    pub se: f64,
    pub draws: usize,
}

/// Estimates `T` as `n E[Delta_j f(W) Delta_j f(W^A)]` with `j` uniform,
/// `|A|` uniform on `0..2n` and `A` a uniform subset of that size avoiding `j`.
pub fn t_sampled(w: &[u32], w_prime: &[u32], num_draws: usize, seed: SeedSpec) -> Result<TEstimate> {
    t_sampled_with(w, w_prime, num_draws, &mut seed.rng())
}

pub fn t_sampled_with<R: Rng + ?Sized>(w: &[u32], w_prime: &[u32], num_draws: usize, rng: &mut R) -> Result<TEstimate> {
    let m = check_pair(w, w_prime)?;
    if num_draws == 0 {
        return Err(Error::Domain("need at least one draw"));
    }
    if m == 0 {
        return Ok(TEstimate {
            mean: 0.0,
            se: 0.0,
            draws: num_draws,
        });
    }
    let n = (m / 2) as f64;
    let f_w = f(w) as i32;
    let mut delta_w: Vec<Option<i32>> = vec![None; m];
    let mut buf = w.to_vec();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..num_draws {
        let j = rng.random_range(0..m);
        let s = rng.random_range(0..m);
        let subset = index::sample(rng, m - 1, s);
        let dj = *delta_w[j].get_or_insert_with(|| {
            if w[j] == w_prime[j] {
                return 0;
            }
            let mut wj = w.to_vec();
            wj[j] = w_prime[j];
            f_w - f(&wj) as i32
        });
        if dj == 0 {
            continue;
        }
        buf.copy_from_slice(w);
        for i in subset.iter() {
            let i = if i >= j { i + 1 } else { i };
            buf[i] = w_prime[i];
        }
        let f_a = f(&buf) as i32;
        buf[j] = w_prime[j];
        let value = n * (dj * (f_a - f(&buf) as i32)) as f64;
        sum += value;
        sum_sq += value * value;
    }
    let k = num_draws as f64;
    let mean = sum / k;
    let se = if num_draws < 2 {
        f64::NAN
    } else {
        math::sqrt(((sum_sq - k * mean * mean) / (k - 1.0)).max(0.0) / k)
    };
    Ok(TEstimate {
        mean,
        se,
        draws: num_draws,
    })
}

/// How each outer replication of [`var_t`] evaluates `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerMode {
    Exact,
    Sampled(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarTEstimate {
    /// `raw_var - inner_bias`, floored at 0.
    pub var_t: f64,
    /// Unbiased sample variance of the per-replication estimates.
    pub raw_var: f64,
    /// Mean squared inner standard error: the inflation of `raw_var` caused
    /// by using sampled rather than exact `T`.
    pub inner_bias: f64,
    /// Standard error of the bias-corrected variance.
    pub se: f64,
    pub mean_t: f64,
    pub outer_reps: usize,
}

/// Monte Carlo `Var T` over `(W, W')` drawn from `dist^{2n}`. Replication
/// `r` runs on `seed.child(r)`.
pub fn var_t(
    dist: &LetterDistribution,
    n: usize,
    outer_reps: usize,
    inner: InnerMode,
    seed: SeedSpec,
) -> Result<VarTEstimate> {
    if outer_reps < 2 || n == 0 {
        return Err(Error::Domain("need n >= 1 and at least two outer replications"));
    }
    if let InnerMode::Sampled(k) = inner {
        if k < 2 {
            return Err(Error::Domain("sampled inner mode needs at least two draws"));
        }
    }
    let mut ts = Vec::with_capacity(outer_reps);
    let mut inner_var = Vec::with_capacity(outer_reps);
    for r in 0..outer_reps {
        let mut rng = seed.child(r as u64).rng();
        let w = sample_word_with(dist, 2 * n, &mut rng);
        let wp = sample_word_with(dist, 2 * n, &mut rng);
        match inner {
            InnerMode::Exact => {
                ts.push(t_exact(w.letters(), wp.letters())?);
                inner_var.push(0.0);
            }
            InnerMode::Sampled(k) => {
                let est = t_sampled_with(w.letters(), wp.letters(), k, &mut rng)?;
                ts.push(est.mean);
                inner_var.push(est.se * est.se);
            }
        }
    }
    let k = outer_reps as f64;
    let (mean_t, var_n) = math::mean_var(&ts);
    let raw_var = var_n * k / (k - 1.0);
    let inner_bias = inner_var.iter().sum::<f64>() / k;
    // Per-replication contributions whose mean is the corrected estimate.
    let q: Vec<f64> = ts
        .iter()
        .zip(&inner_var)
        .map(|(t, iv)| (t - mean_t) * (t - mean_t) * k / (k - 1.0) - iv)
        .collect();
    let (_, q_var) = math::mean_var(&q);
    Ok(VarTEstimate {
        var_t: (raw_var - inner_bias).max(0.0),
        raw_var,
        inner_bias,
        se: math::sqrt(q_var / k),
        mean_t,
        outer_reps,
    })
}

/// Exact moments over every `(W, W')` pair, weighted by the product law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExhaustiveStein {
    pub mean_t: f64,
    pub var_t: f64,
    /// `Var f(W)`; equals `mean_t`.
    pub var_f: f64,
}

pub fn stein_exhaustive(dist: &LetterDistribution, n: usize) -> Result<ExhaustiveStein> {
    let m = 2 * n;
    if m > EXACT_MAX_COORDS {
        return Err(Error::TooLarge("exhaustive enumeration limited to 12 coordinates"));
    }
    let k = dist.m();
    let words = (k as u128).pow(m as u32);
    if words * words > EXHAUSTIVE_MAX_PAIRS as u128 {
        return Err(Error::TooLarge("too many (W, W') pairs to enumerate"));
    }
    let words = words as usize;
    let probs = dist.probs();
    let decode = |mut code: usize| -> (Vec<u32>, f64) {
        let mut w = vec![0u32; m];
        let mut p = 1.0;
        for slot in w.iter_mut() {
            let l = code % k;
            code /= k;
            *slot = l as u32 + 1;
            p *= probs[l];
        }
        (w, p)
    };
    let all: Vec<(Vec<u32>, f64)> = (0..words).map(decode).collect();
    let (mut e_f, mut e_f2) = (0.0, 0.0);
    for (w, p) in &all {
        let v = f(w) as f64;
        e_f += p * v;
        e_f2 += p * v * v;
    }
    let (mut e_t, mut e_t2) = (0.0, 0.0);
    for (w, p) in &all {
        for (wp, q) in &all {
            let t = t_exact(w, wp)?;
            e_t += p * q * t;
            e_t2 += p * q * t * t;
        }
    }
    Ok(ExhaustiveStein {
        mean_t: e_t,
        var_t: (e_t2 - e_t * e_t).max(0.0),
        var_f: (e_f2 - e_f * e_f).max(0.0),
    })
}

/// The plug-in value of `sqrt(Var T) / sigma^2 + (1 / (2 sigma^3)) sum_j E|Delta_j f|^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChatterjeeBound {
    pub sigma2: f64,
    pub var_t: f64,
    pub addend1: f64,
    pub addend2: f64,
    pub rhs: f64,
    /// Standard error of `var_t`.
    pub se: f64,
}

/// Splits a budget of `reps` into `reps^0.8` outer replications of
/// `reps^0.2` inner draws.
pub fn budget_split(reps: usize) -> (usize, usize) {
    let b = reps.max(1) as f64;
    let outer = math::round(math::powf(b, 0.8)) as usize;
    let inner = math::round(math::powf(b, 0.2)) as usize;
    (outer.max(2), inner.max(2))
}

/// Estimates the bound with `reps` draws of `f(W)` (for `sigma^2` and the
/// third absolute increments) and a [`budget_split`] of `reps` for `Var T`.
pub fn chatterjee_rhs(dist: &LetterDistribution, n: usize, reps: usize, seed: SeedSpec) -> Result<ChatterjeeBound> {
    if n == 0 || reps < 2 {
        return Err(Error::Domain("need n >= 1 and at least two replications"));
    }
    let m = 2 * n;
    let base = seed.child(0);
    let mut values = Vec::with_capacity(reps);
    let mut abs3 = 0.0;
    for r in 0..reps {
        let mut rng = base.child(r as u64).rng();
        let w = sample_word_with(dist, m, &mut rng).into_letters();
        let wp = sample_word_with(dist, m, &mut rng).into_letters();
        let j = rng.random_range(0..m);
        let fw = f(&w);
        values.push(fw as f64);
        if w[j] != wp[j] {
            let mut wj = w;
            wj[j] = wp[j];
            let d = fw as i32 - f(&wj) as i32;
            debug_assert!(d.abs() <= 1);
            abs3 += (d.abs() as f64).powi(3);
        }
    }
    let (_, sigma2) = math::mean_var(&values);
    if sigma2 == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let (outer, inner) = budget_split(reps);
    let vt = var_t(dist, n, outer, InnerMode::Sampled(inner), seed.child(1))?;
    let sigma = math::sqrt(sigma2);
    let addend1 = math::sqrt(vt.var_t) / sigma2;
    let addend2 = m as f64 * (abs3 / reps as f64) / (2.0 * sigma2 * sigma);
    Ok(ChatterjeeBound {
        sigma2,
        var_t: vt.var_t,
        addend1,
        addend2,
        rhs: addend1 + addend2,
        se: vt.se,
    })
}

/// Exact sum of `w(A) w(B)` over `(A, B, j, k)` with `(j, k)` in `pairs`,
/// `j` outside `A` and `k` outside `B`. Repeated pairs count once.
pub fn weight_identity_check(two_n: usize, pairs: &[(usize, usize)]) -> Result<Ratio<i128>> {
    if two_n > WEIGHT_MAX_COORDS {
        return Err(Error::TooLarge("weight identity enumerates at most 8 coordinates"));
    }
    let set: BTreeSet<(usize, usize)> = pairs.iter().copied().collect();
    if let Some(&(j, k)) = set.iter().find(|&&(j, k)| j >= two_n || k >= two_n) {
        return Err(Error::CoordinateOutOfRange {
            index: j.max(k),
            len: two_n,
        });
    }
    let binom = binomials(two_n);
    let weight: Vec<Ratio<i128>> = (0..1usize << two_n)
        .map(|a| {
            let s = a.count_ones() as usize;
            if s == two_n {
                Ratio::from_integer(0)
            } else {
                Ratio::new(1, binom[s] as i128 * (two_n - s) as i128)
            }
        })
        .collect();
    let mut total = Ratio::from_integer(0);
    for &(j, k) in &set {
        let avoiding = |c: usize| weight.iter().enumerate().filter(move |(a, _)| a >> c & 1 == 0).map(|(_, w)| w);
        for wa in avoiding(j) {
            for wb in avoiding(k) {
                total += wa * wb;
            }
        }
    }
    Ok(total)
}
