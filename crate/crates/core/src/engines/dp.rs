use alloc::vec;
use alloc::vec::Vec;

use super::{Alignment, LcsResult};

/// Full-table LCS with the lexicographically smallest optimal pair sequence.
///
/// The table holds suffix lengths `L[i][j] = LCS(x[i..], y[j..])`. At
/// `(i, j)` the letter `x[i]` is usable iff its first occurrence `j*` in
/// `y[j..]` leaves `L[i+1][j*+1] = L[i][j] - 1`; then `(i, j*)` is the next
/// pair, otherwise `x[i]` is dropped and `j` stays put.
pub fn lcs_dp(x: &[u32], y: &[u32]) -> LcsResult {
    let (n, m) = (x.len(), y.len());
    let w = m + 1;
    let mut table = vec![0u32; (n + 1) * w];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            table[i * w + j] = if x[i] == y[j] {
                table[(i + 1) * w + j + 1] + 1
            } else {
                table[(i + 1) * w + j].max(table[i * w + j + 1])
            };
        }
    }
    let length = table[0] as usize;
    let mut pairs = Vec::with_capacity(length);
    let (mut i, mut j) = (0, 0);
    while pairs.len() < length {
        let here = table[i * w + j];
        let hit = y[j..].iter().position(|&c| c == x[i]).map(|d| j + d);
        match hit {
            Some(js) if table[(i + 1) * w + js + 1] + 1 == here => {
                pairs.push((i + 1, js + 1));
                j = js + 1;
            }
            _ => {}
        }
        i += 1;
    }
    LcsResult {
        length,
        alignment: Some(Alignment { pairs }),
    }
}

/// Rolling-row scalar DP, length only. Baseline for throughput comparisons.
pub fn lcs_scalar_length(x: &[u32], y: &[u32]) -> usize {
    let mut prev = vec![0u32; y.len() + 1];
    let mut cur = vec![0u32; y.len() + 1];
    for &a in x {
        for (j, &b) in y.iter().enumerate() {
            cur[j + 1] = if a == b {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[y.len()] as usize
}
