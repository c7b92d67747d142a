//! Alphabets, letter laws, words, permutations and the seeding contract.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math;

const SUM_TOLERANCE: f64 = 1e-12;

/// An i.i.d. letter law on the alphabet `1..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LetterDistribution {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
    dominant: Option<usize>,
}

impl LetterDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::build(probs, None)
    }

    /// Like [`new`](Self::new) but pins the dominant letter (0-based index),
    /// which must carry the largest probability.
    pub fn with_dominant(probs: Vec<f64>, dominant: usize) -> Result<Self> {
        Self::build(probs, Some(dominant))
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDistribution("alphabet must be nonempty"));
        }
        Self::new(alloc::vec![1.0 / m as f64; m])
    }

    /// Two letters with `P(letter 1) = p`.
    pub fn biased_binary(p: f64) -> Result<Self> {
        Self::new(alloc::vec![p, 1.0 - p])
    }

    fn build(probs: Vec<f64>, dominant: Option<usize>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("alphabet must be nonempty"));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidDistribution("probabilities must lie in [0, 1]"));
        }
        let total: f64 = probs.iter().sum();
        if math::abs(total - 1.0) > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution("probabilities must sum to 1"));
        }
        if let Some(j) = dominant {
            let max = probs.iter().cloned().fold(f64::MIN, f64::max);
            if j >= probs.len() || probs[j] != max {
                return Err(Error::InvalidDistribution(
                    "dominant index must carry the largest probability",
                ));
            }
        }
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Ok(Self {
            probs,
            cumulative,
            dominant,
        })
    }

    pub fn m(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// The pinned dominant index, or the first argmax.
    pub fn dominant_index(&self) -> usize {
        self.dominant.unwrap_or_else(|| {
            let mut best = 0;
            for (k, &p) in self.probs.iter().enumerate() {
                if p > self.probs[best] {
                    best = k;
                }
            }
            best
        })
    }

    /// Draws one letter in `1..=m`.
    pub fn sample_letter<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        let k = self.cumulative.partition_point(|&c| c <= u);
        (k.min(self.probs.len() - 1) + 1) as u32
    }
}

/// Per-condition slack of the CLT hypotheses. Constants are handled as
/// base-10 logarithms because `e^-67` times small probabilities leaves the
/// comfortable range of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub satisfied: bool,
    pub dominant_index: usize,
    /// `p_{j0} - 1/2`; positive when the first condition holds.
    pub dominant_margin: f64,
    pub log10_k: f64,
    /// `log10 min(2^-2 e^-5 K / m, K / (2 m^2))`.
    pub log10_minority_bound: f64,
    /// `log10 max_{j != j0} p_j`; `-inf` for a one-letter alphabet.
    pub log10_max_minority: f64,
    /// `log10_minority_bound - log10_max_minority`; nonnegative when the
    /// second condition holds.
    pub minority_margin_log10: f64,
}

pub fn check_clt_hypotheses(dist: &LetterDistribution) -> HypothesisReport {
    const LN10: f64 = core::f64::consts::LN_10;
    const LN2: f64 = core::f64::consts::LN_2;
    let m = dist.m() as f64;
    let j0 = dist.dominant_index();
    let p0 = dist.probs()[j0];

    let ln_k1 = -4.0 * LN2 - 2.0 * LN10 - 67.0;
    let ln_k2 = -math::ln(800.0 * m);
    let ln_k = ln_k1.min(ln_k2);
    let ln_bound_a = -2.0 * LN2 - 5.0 + ln_k - math::ln(m);
    let ln_bound_b = ln_k - LN2 - 2.0 * math::ln(m);
    let ln_bound = ln_bound_a.min(ln_bound_b);

    let max_minority = dist
        .probs()
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j0)
        .map(|(_, &p)| p)
        .fold(0.0_f64, f64::max);
    let ln_minority = if max_minority > 0.0 {
        math::ln(max_minority)
    } else {
        f64::NEG_INFINITY
    };

    let dominant_margin = p0 - 0.5;
    let minority_margin_log10 = (ln_bound - ln_minority) / LN10;
    HypothesisReport {
        satisfied: dominant_margin > 0.0 && minority_margin_log10 >= 0.0,
        dominant_index: j0,
        dominant_margin,
        log10_k: ln_k / LN10,
        log10_minority_bound: ln_bound / LN10,
        log10_max_minority: ln_minority / LN10,
        minority_margin_log10,
    }
}

/// A word over `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<u32>,
}

impl Word {
    pub fn new(letters: Vec<u32>, m: usize) -> Result<Self> {
        if let Some(&letter) = letters.iter().find(|&&l| l == 0 || l as usize > m) {
            return Err(Error::LetterOutOfRange { letter, m });
        }
        Ok(Self { letters })
    }

    /// Wraps letters without an alphabet bound, only rejecting 0.
    pub fn from_letters(letters: Vec<u32>) -> Result<Self> {
        Self::new(letters, u32::MAX as usize)
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn into_letters(self) -> Vec<u32> {
        self.letters
    }
}

impl AsRef<[u32]> for Word {
    fn as_ref(&self) -> &[u32] {
        &self.letters
    }
}

/// A bijection of `1..=n` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    entries: Vec<u32>,
}

impl Permutation {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::EmptyPermutation);
        }
        let mut seen = alloc::vec![false; n + 1];
        for &e in &entries {
            let e = e as usize;
            if e == 0 || e > n || seen[e] {
                return Err(Error::NotAPermutation(n));
            }
            seen[e] = true;
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new((1..=n as u32).collect())
    }

    pub fn reversed(n: usize) -> Result<Self> {
        Self::new((1..=n as u32).rev().collect())
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl AsRef<[u32]> for Permutation {
    fn as_ref(&self) -> &[u32] {
        &self.entries
    }
}

/// Keys one ChaCha8 stream. Distinct `stream_id`s under the same
/// `base_seed` are independent counter-mode streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SeedSpec {
    pub base_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub const fn new(base_seed: u64, stream_id: u64) -> Self {
        Self {
            base_seed,
            stream_id,
        }
    }

    pub fn with_stream(self, stream_id: u64) -> Self {
        Self { stream_id, ..self }
    }

    /// Independent sub-stream number `index`, for work split inside one
    /// computation.
    pub fn child(&self, index: u64) -> Self {
        Self {
            base_seed: splitmix64(self.base_seed ^ splitmix64(self.stream_id)),
            stream_id: index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn sample_word(dist: &LetterDistribution, n: usize, seed: SeedSpec) -> Word {
    let mut rng = seed.rng();
    sample_word_with(dist, n, &mut rng)
}

pub fn sample_word_with<R: Rng + ?Sized>(dist: &LetterDistribution, n: usize, rng: &mut R) -> Word {
    let letters = if dist.m() == 1 {
        alloc::vec![1; n]
    } else {
        (0..n).map(|_| dist.sample_letter(rng)).collect()
    };
    Word { letters }
}

pub fn sample_permutation(n: usize, seed: SeedSpec) -> Result<Permutation> {
    let mut rng = seed.rng();
    sample_permutation_with(n, &mut rng)
}

/// Fisher-Yates shuffle of the identity.
pub fn sample_permutation_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Permutation> {
    if n == 0 {
        return Err(Error::EmptyPermutation);
    }
    let mut entries: Vec<u32> = (1..=n as u32).collect();
    entries.shuffle(rng);
    Ok(Permutation { entries })
}
