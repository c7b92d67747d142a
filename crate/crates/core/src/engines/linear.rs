use alloc::vec::Vec;

use super::{Alignment, LcsResult};

/// Hirschberg-style LCS in `O(|y|)` working memory returning the same
/// lexicographically smallest witness as [`super::lcs_dp`].
///
/// Splitting `x` at `mid`, the smallest witness puts as many pairs as
/// possible above the split, so the upper half is solved against the
/// longest admissible `y` prefix. The lower half then starts right after
/// the last column the upper half used.
pub fn lcs_linear_space(x: &[u32], y: &[u32]) -> LcsResult {
    let mut pairs = Vec::new();
    let mut scratch = Scratch::default();
    solve(x, y, 0, 0, &mut scratch, &mut pairs);
    LcsResult {
        length: pairs.len(),
        alignment: Some(Alignment { pairs }),
    }
}

#[derive(Default)]
struct Scratch {
    fwd: Vec<u32>,
    bwd: Vec<u32>,
    tmp: Vec<u32>,
}

/// Appends the smallest optimal witness of `x` vs `y`, offset by `(ox, oy)`.
fn solve(x: &[u32], y: &[u32], ox: usize, oy: usize, s: &mut Scratch, out: &mut Vec<(usize, usize)>) {
    if x.is_empty() || y.is_empty() {
        return;
    }
    if x.len() == 1 {
        if let Some(j) = y.iter().position(|&c| c == x[0]) {
            out.push((ox + 1, oy + j + 1));
        }
        return;
    }
    let mid = x.len() / 2;
    forward_row(&x[..mid], y, &mut s.fwd, &mut s.tmp);
    backward_row(&x[mid..], y, &mut s.bwd, &mut s.tmp);
    let total = (0..=y.len()).map(|k| s.fwd[k] + s.bwd[k]).max().unwrap_or(0);
    if total == 0 {
        return;
    }
    let split = (0..=y.len())
        .rev()
        .find(|&k| s.fwd[k] + s.bwd[k] == total)
        .expect("some split attains the maximum");
    let before = out.len();
    solve(&x[..mid], &y[..split], ox, oy, s, out);
    let next = if out.len() > before {
        out[out.len() - 1].1 - oy
    } else {
        0
    };
    solve(&x[mid..], &y[next..], ox + mid, oy + next, s, out);
}

/// `row[k] = LCS(x, y[..k])`.
fn forward_row(x: &[u32], y: &[u32], row: &mut Vec<u32>, tmp: &mut Vec<u32>) {
    row.clear();
    row.resize(y.len() + 1, 0);
    tmp.clear();
    tmp.resize(y.len() + 1, 0);
    for &a in x {
        for (j, &b) in y.iter().enumerate() {
            tmp[j + 1] = if a == b { row[j] + 1 } else { row[j + 1].max(tmp[j]) };
        }
        core::mem::swap(row, tmp);
    }
}

/// `row[k] = LCS(x, y[k..])`.
fn backward_row(x: &[u32], y: &[u32], row: &mut Vec<u32>, tmp: &mut Vec<u32>) {
    let m = y.len();
    row.clear();
    row.resize(m + 1, 0);
    tmp.clear();
    tmp.resize(m + 1, 0);
    for &a in x.iter().rev() {
        tmp[m] = 0;
        for j in (0..m).rev() {
            tmp[j] = if a == y[j] { row[j + 1] + 1 } else { row[j].max(tmp[j + 1]) };
        }
        core::mem::swap(row, tmp);
    }
}
