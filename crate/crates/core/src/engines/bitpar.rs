use alloc::vec;
use alloc::vec::Vec;

const DENSE_LIMIT: u32 = 1 << 20;
const NO_SLOT: u32 = u32::MAX;

/// Per-letter match masks of a pattern, one bit per pattern position.
#[derive(Debug, Clone)]
pub struct BitPattern {
    len: usize,
    words: usize,
    masks: Vec<u64>,
    lookup: Lookup,
}

#[derive(Debug, Clone)]
enum Lookup {
    Dense(Vec<u32>),
    Sorted(Vec<u32>),
}

impl BitPattern {
    pub fn new(pattern: &[u32]) -> Self {
        let len = pattern.len();
        let words = len.div_ceil(64).max(1);
        let mut letters: Vec<u32> = pattern.to_vec();
        letters.sort_unstable();
        letters.dedup();
        let mut masks = vec![0u64; letters.len() * words];
        let max = letters.last().copied().unwrap_or(0);
        let lookup = if max < DENSE_LIMIT {
            let mut slots = vec![NO_SLOT; max as usize + 1];
            for (k, &c) in letters.iter().enumerate() {
                slots[c as usize] = k as u32;
            }
            Lookup::Dense(slots)
        } else {
            Lookup::Sorted(letters)
        };
        let mut this = Self {
            len,
            words,
            masks: Vec::new(),
            lookup,
        };
        for (pos, &c) in pattern.iter().enumerate() {
            let slot = this.slot(c).expect("pattern letter has a slot");
            masks[slot * words + pos / 64] |= 1u64 << (pos % 64);
        }
        this.masks = masks;
        this
    }

    fn slot(&self, c: u32) -> Option<usize> {
        match &self.lookup {
            Lookup::Dense(slots) => slots
                .get(c as usize)
                .copied()
                .filter(|&s| s != NO_SLOT)
                .map(|s| s as usize),
            Lookup::Sorted(letters) => letters.binary_search(&c).ok(),
        }
    }

    pub fn mask(&self, c: u32) -> Option<&[u64]> {
        self.slot(c)
            .map(|s| &self.masks[s * self.words..(s + 1) * self.words])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> usize {
        self.words
    }
}

/// One DP row over the pattern positions, stored as a bit vector.
///
/// After feeding text `t`, a zero bit at position `p` marks an increment of
/// `LCS(pattern[..=p], t)` over `LCS(pattern[..p], t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitRow {
    bits: Vec<u64>,
    len: usize,
}

impl BitRow {
    pub fn new(pattern: &BitPattern) -> Self {
        Self {
            bits: vec![u64::MAX; pattern.words],
            len: pattern.len,
        }
    }

    pub fn reset(&mut self) {
        self.bits.iter_mut().for_each(|b| *b = u64::MAX);
    }

    /// Feeds one text letter: `V <- (V + (V & M)) | (V & !M)`.
    #[inline]
    pub fn step(&mut self, pattern: &BitPattern, c: u32) {
        let Some(mask) = pattern.mask(c) else {
            return;
        };
        let mut carry = false;
        for (v, &m) in self.bits.iter_mut().zip(mask) {
            let old = *v;
            let u = old & m;
            let (s1, c1) = old.overflowing_add(u);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            carry = c1 | c2;
            *v = s2 | (old & !m);
        }
    }

    /// `LCS(pattern, text fed so far)`.
    pub fn score(&self) -> usize {
        self.prefix_score(self.len)
    }

    /// `LCS(pattern[..r], text fed so far)`.
    pub fn prefix_score(&self, r: usize) -> usize {
        debug_assert!(r <= self.len);
        let full = r / 64;
        let mut ones: usize = self.bits[..full].iter().map(|b| b.count_ones() as usize).sum();
        let rem = r % 64;
        if rem > 0 {
            ones += (self.bits[full] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        r - ones
    }

    /// All prefix scores `LCS(pattern[..r], text)` for `r = 0..=len`.
    pub fn prefix_scores(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len + 1);
        let mut acc = 0u32;
        out.push(0);
        for p in 0..self.len {
            if self.bits[p / 64] >> (p % 64) & 1 == 0 {
                acc += 1;
            }
            out.push(acc);
        }
        out
    }
}

/// Word-parallel LCS length (Allison-Dix / Hyyro recurrence). The shorter
/// input becomes the bit pattern; letters are arbitrary `u32` symbols.
pub fn lcs_bitparallel(x: &[u32], y: &[u32]) -> usize {
    let (pattern, text) = if x.len() <= y.len() { (x, y) } else { (y, x) };
    if pattern.is_empty() {
        return 0;
    }
    let pat = BitPattern::new(pattern);
    let mut row = BitRow::new(&pat);
    for &c in text {
        row.step(&pat, c);
    }
    row.score()
}
