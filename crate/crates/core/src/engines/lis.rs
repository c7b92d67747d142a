use alloc::vec::Vec;

use super::lcs_bitparallel;
use crate::error::{Error, Result};
use crate::models::Permutation;

/// Longest increasing subsequence by patience sorting, `O(n log n)`.
pub fn lis_patience(p: &Permutation) -> usize {
    let mut tails: Vec<u32> = Vec::new();
    for &x in p.entries() {
        let k = tails.partition_point(|&t| t < x);
        if k == tails.len() {
            tails.push(x);
        } else {
            tails[k] = x;
        }
    }
    tails.len()
}

/// `LCS((1..n), p)`, which coincides with the LIS of `p`.
pub fn lis_via_lcs(p: &Permutation) -> usize {
    let id: Vec<u32> = (1..=p.len() as u32).collect();
    lcs_bitparallel(&id, p.entries())
}

pub fn lcs_two_permutations(rho: &Permutation, pi: &Permutation) -> Result<usize> {
    if rho.len() != pi.len() {
        return Err(Error::LengthMismatch {
            left: rho.len(),
            right: pi.len(),
        });
    }
    Ok(lcs_bitparallel(rho.entries(), pi.entries()))
}
