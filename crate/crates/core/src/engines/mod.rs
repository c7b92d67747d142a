//! LCS and LIS engines and the dualities built on them.
//!
//! Three LCS engines share one contract: [`lcs_dp`] (full table, witness),
//! [`lcs_linear_space`] (divide and conquer, same witness) and
//! [`lcs_bitparallel`] (word-parallel, length only). All operate on `u32`
//! symbol slices so words and permutations go through the same code.

mod bitpar;
mod dp;
mod linear;
mod lis;

use alloc::vec::Vec;

pub use bitpar::{lcs_bitparallel, BitPattern, BitRow};
pub use dp::{lcs_dp, lcs_scalar_length};
pub use linear::lcs_linear_space;
pub use lis::{lcs_two_permutations, lis_patience, lis_via_lcs};

use crate::error::{Error, Result};

/// Matched index pairs, 1-based into `x` and `y`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Alignment {
    pub pairs: Vec<(usize, usize)>,
}

impl Alignment {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Self { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks strict monotonicity, bounds and letter equality.
    pub fn validate(&self, x: &[u32], y: &[u32]) -> Result<()> {
        let mut prev = (0usize, 0usize);
        for &(i, j) in &self.pairs {
            if i <= prev.0 || j <= prev.1 || i > x.len() || j > y.len() {
                return Err(Error::InvalidBreakpoints("alignment pairs not strictly increasing"));
            }
            if x[i - 1] != y[j - 1] {
                return Err(Error::InvalidBreakpoints("aligned letters differ"));
            }
            prev = (i, j);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcsResult {
    pub length: usize,
    pub alignment: Option<Alignment>,
}

/// Indel-only edit distance `|x| + |y| - 2 LCS`.
pub fn edit_distance_indel(x: &[u32], y: &[u32]) -> usize {
    x.len() + y.len() - 2 * lcs_bitparallel(x, y)
}

/// Shortest common supersequence length `|x| + |y| - LCS`.
pub fn scs_length(x: &[u32], y: &[u32]) -> usize {
    x.len() + y.len() - lcs_bitparallel(x, y)
}
