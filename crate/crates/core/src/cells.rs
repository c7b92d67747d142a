//! Blockwise optimal breakpoints, the genericity events and restricted
//! increments.
//!
//! `x` is cut into `d` blocks of width `v`; breakpoints `0 = r_0 <= ... <=
//! r_d = n` cut `y`, and a breakpoint vector is optimal when the blockwise
//! LCS scores add up to the global LCS. Block `i`'s `x` part together with
//! `y[r_{i-1}..r_i]` is a cell.

use alloc::vec;
use alloc::vec::Vec;

use crate::engines::{lcs_bitparallel, lcs_dp, Alignment, BitPattern, BitRow};
use crate::error::{Error, Result};
use crate::math;

/// Decompositions with `d * n` above this run events in canonical mode.
pub const EXHAUSTIVE_STATE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellDecomposition {
    v: usize,
    x_bounds: Vec<usize>,
    breakpoints: Vec<usize>,
    block_scores: Vec<usize>,
    lcs: usize,
}

/// One cell, borrowing its parts from the decomposed words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell<'a> {
    /// 1-based cell index.
    pub index: usize,
    pub x_start: usize,
    pub y_start: usize,
    pub x_part: &'a [u32],
    pub y_part: &'a [u32],
}

impl CellDecomposition {
    pub fn v(&self) -> usize {
        self.v
    }

    pub fn d(&self) -> usize {
        self.block_scores.len()
    }

    pub fn n(&self) -> usize {
        *self.x_bounds.last().unwrap_or(&0)
    }

    pub fn breakpoints(&self) -> &[usize] {
        &self.breakpoints
    }

    pub fn block_scores(&self) -> &[usize] {
        &self.block_scores
    }

    /// Boundaries `b_0 = 0 < ... < b_d = n` of the `x` blocks.
    pub fn x_bounds(&self) -> &[usize] {
        &self.x_bounds
    }

    pub fn lcs(&self) -> usize {
        self.lcs
    }

    pub fn total_score(&self) -> usize {
        self.block_scores.iter().sum()
    }

    /// Whether the block scores reach the global LCS.
    pub fn is_optimal(&self) -> bool {
        self.total_score() == self.lcs
    }

    /// `y` widths `r_i - r_{i-1}`.
    pub fn gaps(&self) -> impl Iterator<Item = usize> + '_ {
        self.breakpoints.windows(2).map(|w| w[1] - w[0])
    }

    pub fn cells<'a>(&self, x: &'a [u32], y: &'a [u32]) -> Vec<Cell<'a>> {
        (0..self.d()).map(|k| self.cell(x, y, k)).collect()
    }

    fn cell<'a>(&self, x: &'a [u32], y: &'a [u32], k: usize) -> Cell<'a> {
        let (xs, xe) = (self.x_bounds[k], self.x_bounds[k + 1]);
        let (ys, ye) = (self.breakpoints[k], self.breakpoints[k + 1]);
        Cell {
            index: k + 1,
            x_start: xs,
            y_start: ys,
            x_part: &x[xs..xe],
            y_part: &y[ys..ye],
        }
    }

    /// 0-based index of the cell holding coordinate `coord` (1-based into
    /// the concatenation `W = (x, y)`).
    pub fn cell_of(&self, coord: usize) -> Result<usize> {
        let n = self.n();
        if coord == 0 || coord > 2 * n {
            return Err(Error::CoordinateOutOfRange {
                index: coord,
                len: 2 * n,
            });
        }
        let bounds = if coord <= n { &self.x_bounds } else { &self.breakpoints };
        let pos = if coord <= n { coord } else { coord - n };
        // First k with bounds[k + 1] >= pos, i.e. bounds[k] < pos <= bounds[k + 1].
        Ok(bounds[1..].partition_point(|&b| b < pos))
    }

    /// Builds a decomposition from given breakpoints without requiring
    /// optimality; check [`is_optimal`](Self::is_optimal).
    pub fn from_breakpoints(x: &[u32], y: &[u32], v: usize, breakpoints: Vec<usize>) -> Result<Self> {
        let n = check_lengths(x, y)?;
        let x_bounds = uniform_bounds(n, v)?;
        let d = x_bounds.len() - 1;
        if breakpoints.len() != d + 1 {
            return Err(Error::InvalidBreakpoints("need d + 1 breakpoints"));
        }
        if breakpoints[0] != 0 || breakpoints[d] != n {
            return Err(Error::InvalidBreakpoints("breakpoints must run from 0 to n"));
        }
        if breakpoints.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidBreakpoints("breakpoints must be nondecreasing"));
        }
        let block_scores = (0..d)
            .map(|k| {
                lcs_bitparallel(
                    &x[x_bounds[k]..x_bounds[k + 1]],
                    &y[breakpoints[k]..breakpoints[k + 1]],
                )
            })
            .collect();
        Ok(Self {
            v,
            x_bounds,
            breakpoints,
            block_scores,
            lcs: lcs_bitparallel(x, y),
        })
    }
}

fn check_lengths(x: &[u32], y: &[u32]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.len())
}

fn uniform_bounds(n: usize, v: usize) -> Result<Vec<usize>> {
    if v == 0 || n % v != 0 {
        return Err(Error::BlockWidth { v, n });
    }
    Ok((0..=n / v).map(|k| k * v).collect())
}

/// Block width `max(1, floor(n^alpha))`.
pub fn block_width(n: usize, alpha: f64) -> usize {
    (math::floor(math::powf(n as f64, alpha)) as usize).max(1)
}

/// Canonical optimal decomposition with block width `v | n`: the
/// lexicographically smallest optimal breakpoint vector.
pub fn decompose(x: &[u32], y: &[u32], v: usize) -> Result<CellDecomposition> {
    let n = check_lengths(x, y)?;
    let bounds = uniform_bounds(n, v)?;
    Ok(canonical(x, y, v, bounds))
}

/// Like [`decompose`] for any `n`: `d = max(1, floor(n / v))` blocks of width
/// `v`, the last one absorbing the remainder.
pub fn decompose_ragged(x: &[u32], y: &[u32], v: usize) -> Result<CellDecomposition> {
    let n = check_lengths(x, y)?;
    if v == 0 {
        return Err(Error::BlockWidth { v, n });
    }
    let d = (n / v).max(1);
    let mut bounds: Vec<usize> = (0..d).map(|k| k * v).collect();
    bounds.push(n);
    if n == 0 {
        bounds.truncate(1);
    }
    Ok(canonical(x, y, v, bounds))
}

/// Suffix rows `S_k(r) = LCS(x[b_k..], y[r..])` kept as bit rows over
/// reversed `y`.
struct SuffixRows {
    n: usize,
    rows: Vec<BitRow>,
}

impl SuffixRows {
    fn new(x: &[u32], y: &[u32], bounds: &[usize]) -> Self {
        let n = y.len();
        let rev_y: Vec<u32> = y.iter().rev().copied().collect();
        let pat = BitPattern::new(&rev_y);
        let mut row = BitRow::new(&pat);
        let d = bounds.len() - 1;
        let mut rows = vec![row.clone(); d + 1];
        for k in (0..d).rev() {
            for &c in x[bounds[k]..bounds[k + 1]].iter().rev() {
                row.step(&pat, c);
            }
            rows[k] = row.clone();
        }
        Self { n, rows }
    }

    fn at(&self, k: usize, r: usize) -> usize {
        if self.n == 0 {
            return 0;
        }
        self.rows[k].prefix_score(self.n - r)
    }

    fn all(&self, k: usize) -> Vec<u32> {
        if self.n == 0 {
            return vec![0];
        }
        let mut p = self.rows[k].prefix_scores();
        p.reverse();
        p
    }
}

fn canonical(x: &[u32], y: &[u32], v: usize, bounds: Vec<usize>) -> CellDecomposition {
    let n = y.len();
    let d = bounds.len() - 1;
    let suffix = SuffixRows::new(x, y, &bounds);
    let lcs = suffix.at(0, 0);
    let mut breakpoints = vec![0usize; d + 1];
    let mut block_scores = vec![0usize; d];
    let mut start = 0usize;
    for k in 0..d {
        let target = suffix.at(k, start);
        let block = &x[bounds[k]..bounds[k + 1]];
        if k + 1 == d {
            breakpoints[d] = n;
            block_scores[k] = target;
            debug_assert_eq!(target, lcs_bitparallel(block, &y[start..]));
            break;
        }
        let pat = BitPattern::new(block);
        let mut row = BitRow::new(&pat);
        let mut r = start;
        let mut score = 0usize;
        // S_{k+1}(r) drops by one exactly at zero bits of the suffix row.
        let mut rest = suffix.at(k + 1, r);
        while score + rest != target {
            row.step(&pat, y[r]);
            score = row.score();
            r += 1;
            rest = suffix.at(k + 1, r);
        }
        breakpoints[k + 1] = r;
        block_scores[k] = score;
        start = r;
    }
    CellDecomposition {
        v,
        x_bounds: bounds,
        breakpoints,
        block_scores,
        lcs,
    }
}

/// The alignment thresholds `alpha, s1, s2, delta, c1` and, once bound to an
/// `n`, the induced `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericityParams {
    pub alpha: f64,
    pub s1: f64,
    pub s2: f64,
    pub delta: f64,
    pub c1: f64,
    pub epsilon: Option<f64>,
}

impl GenericityParams {
    pub fn new(alpha: f64, s1: f64, s2: f64, delta: f64, c1: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain("alpha must lie in (0, 1)"));
        }
        if !(s1 > 0.0 && s1 < 1.0 && s2 > 1.0) {
            return Err(Error::Domain("need 0 < s1 < 1 < s2"));
        }
        if !(delta > 0.0) || !(c1 >= 0.0) {
            return Err(Error::Domain("delta must be positive and c1 nonnegative"));
        }
        Ok(Self {
            alpha,
            s1,
            s2,
            delta,
            c1,
            epsilon: None,
        })
    }

    /// Sets `epsilon = c1 sqrt((1 + log(n^alpha + 1)) / n^alpha)`.
    pub fn bind(mut self, n: usize) -> Result<Self> {
        self.epsilon = Some(epsilon_for(n, self.alpha, self.c1)?);
        Ok(self)
    }

    /// Fixes `epsilon` directly.
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    fn eps(&self) -> Result<f64> {
        self.epsilon.ok_or(Error::Domain("genericity parameters not bound to n"))
    }
}

pub fn epsilon_for(n: usize, alpha: f64, c1: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain("alpha must lie in (0, 1)"));
    }
    if !(c1 >= 0.0) {
        return Err(Error::Domain("c1 must be nonnegative"));
    }
    let v = math::powf(n as f64, alpha);
    Ok(c1 * math::sqrt((1.0 + math::ln_1p(v)) / v))
}

/// Lower bound `1 - exp(-n (delta^2 eps^2 / 16 - (1 + log(v+1)) / v))` on
/// the probability of the event E, or the vacuous 0 when the block width
/// condition fails.
pub fn hm_bound(n: f64, v: f64, delta: f64, epsilon: f64) -> f64 {
    let entropy = (1.0 + math::ln_1p(v)) / v;
    let gain = delta * delta * epsilon * epsilon / 16.0;
    if entropy > gain {
        return 0.0;
    }
    1.0 - math::exp(-n * (gain - entropy))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventMode {
    /// Minimum over every optimal breakpoint vector.
    Exhaustive,
    /// Only the canonical decomposition was examined.
    Canonical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventReport {
    pub holds: bool,
    pub mode: EventMode,
    /// Cells with `v s1 <= width <= v s2` (minimum over vectors in
    /// exhaustive mode).
    pub good_cells: usize,
    pub required: f64,
}

fn is_good(gap: usize, v: usize, s1: f64, s2: f64) -> bool {
    let g = gap as f64;
    let v = v as f64;
    v * s1 <= g && g <= v * s2
}

/// Event E: at least `(1 - eps) d` cells have `y` width in `[v s1, v s2]`,
/// for every optimal breakpoint vector when `d n` is within
/// [`EXHAUSTIVE_STATE_LIMIT`], else for the canonical one.
pub fn check_event_e(
    x: &[u32],
    y: &[u32],
    decomp: &CellDecomposition,
    params: &GenericityParams,
) -> Result<EventReport> {
    let eps = params.eps()?;
    let d = decomp.d();
    let required = (1.0 - eps) * d as f64;
    if d * decomp.n() <= EXHAUSTIVE_STATE_LIMIT {
        let good = min_good_cells(x, y, decomp, params)?;
        Ok(EventReport {
            holds: good as f64 >= required,
            mode: EventMode::Exhaustive,
            good_cells: good,
            required,
        })
    } else {
        check_event_e_canonical(decomp, params)
    }
}

pub fn check_event_e_canonical(decomp: &CellDecomposition, params: &GenericityParams) -> Result<EventReport> {
    let eps = params.eps()?;
    let required = (1.0 - eps) * decomp.d() as f64;
    let good = decomp
        .gaps()
        .filter(|&g| is_good(g, decomp.v, params.s1, params.s2))
        .count();
    Ok(EventReport {
        holds: good as f64 >= required,
        mode: EventMode::Canonical,
        good_cells: good,
        required,
    })
}

/// Minimum number of good cells over all optimal breakpoint vectors, by a
/// shortest-path pass over the states `(k, r)` lying on some optimum.
pub fn min_good_cells(
    x: &[u32],
    y: &[u32],
    decomp: &CellDecomposition,
    params: &GenericityParams,
) -> Result<usize> {
    let n = check_lengths(x, y)?;
    let bounds = decomp.x_bounds();
    let d = bounds.len() - 1;
    let suffix = SuffixRows::new(x, y, bounds);
    let lcs = suffix.at(0, 0);

    let prefix: Vec<Vec<u32>> = {
        let mut out = Vec::with_capacity(d + 1);
        if n == 0 {
            out.resize(d + 1, vec![0]);
        } else {
            let pat = BitPattern::new(y);
            let mut row = BitRow::new(&pat);
            out.push(row.prefix_scores());
            for k in 0..d {
                for &c in &x[bounds[k]..bounds[k + 1]] {
                    row.step(&pat, c);
                }
                out.push(row.prefix_scores());
            }
        }
        out
    };
    let suffixes: Vec<Vec<u32>> = (0..=d).map(|k| suffix.all(k)).collect();
    let on_optimum = |k: usize, r: usize| (prefix[k][r] + suffixes[k][r]) as usize == lcs;

    const UNREACHED: usize = usize::MAX;
    let mut best = vec![UNREACHED; n + 1];
    best[0] = 0;
    for k in 0..d {
        let mut next = vec![UNREACHED; n + 1];
        let pat = BitPattern::new(&x[bounds[k]..bounds[k + 1]]);
        let mut row = BitRow::new(&pat);
        for start in 0..=n {
            if best[start] == UNREACHED || !on_optimum(k, start) {
                continue;
            }
            row.reset();
            let base = prefix[k][start] as usize;
            let width = bounds[k + 1] - bounds[k];
            let mut score = 0usize;
            for r in start..=n {
                // Block scores never exceed the width and S_{k+1} only falls.
                if base + width + (suffixes[k + 1][r] as usize) < lcs {
                    break;
                }
                if r > start {
                    row.step(&pat, y[r - 1]);
                    score = row.score();
                }
                if (k + 1 < d || r == n)
                    && on_optimum(k + 1, r)
                    && base + score == prefix[k + 1][r] as usize
                {
                    let cand = best[start] + is_good(r - start, decomp.v, params.s1, params.s2) as usize;
                    if cand < next[r] {
                        next[r] = cand;
                    }
                }
            }
        }
        best = next;
    }
    debug_assert_ne!(best[n], UNREACHED);
    Ok(best[n])
}

/// Event H: every pair lies strictly below `j = s2 i + s2 n eps + s2 n^alpha`.
pub fn check_event_h(alignment: &Alignment, params: &GenericityParams, n: usize) -> Result<bool> {
    let eps = params.eps()?;
    let nf = n as f64;
    let offset = params.s2 * nf * eps + params.s2 * math::powf(nf, params.alpha);
    Ok(alignment
        .pairs
        .iter()
        .all(|&(i, j)| (j as f64) < params.s2 * i as f64 + offset))
}

/// Event K: pairs with `i <= n^alpha` land in `y[..2 s2 n^alpha + s2 n eps]`.
pub fn check_event_k(alignment: &Alignment, params: &GenericityParams, n: usize) -> Result<bool> {
    let eps = params.eps()?;
    let nf = n as f64;
    let width = math::powf(nf, params.alpha);
    let limit = 2.0 * params.s2 * width + params.s2 * nf * eps;
    Ok(alignment
        .pairs
        .iter()
        .filter(|&&(i, _)| i as f64 <= width)
        .all(|&(_, j)| j as f64 <= limit))
}

/// Optimal alignment induced by a decomposition: the smallest witness inside
/// each cell, concatenated.
pub fn decomposition_alignment(x: &[u32], y: &[u32], decomp: &CellDecomposition) -> Alignment {
    let mut pairs = Vec::with_capacity(decomp.total_score());
    for cell in decomp.cells(x, y) {
        if let Some(a) = lcs_dp(cell.x_part, cell.y_part).alignment {
            pairs.extend(
                a.pairs
                    .into_iter()
                    .map(|(i, j)| (i + cell.x_start, j + cell.y_start)),
            );
        }
    }
    Alignment { pairs }
}

/// Outcome of the genericity events on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericityReport {
    pub n: usize,
    pub v: usize,
    pub d: usize,
    pub lcs: usize,
    pub epsilon: f64,
    /// E as [`check_event_e`] evaluates it.
    pub event_e: EventReport,
    /// E on the canonical decomposition alone.
    pub event_e_canonical: EventReport,
    pub event_h: bool,
    pub event_k: bool,
}

/// Decomposes with `v = floor(n^alpha)` (ragged tail absorbed) and evaluates
/// E, H and K. H and K are judged on the decomposition's alignment; cells
/// whose corners already satisfy the inequalities skip witness extraction.
pub fn evaluate_genericity(x: &[u32], y: &[u32], params: &GenericityParams) -> Result<GenericityReport> {
    let n = check_lengths(x, y)?;
    let params = params.bind(n.max(1))?;
    let eps = params.eps()?;
    let v = block_width(n, params.alpha);
    let decomp = decompose_ragged(x, y, v)?;
    let event_e = check_event_e(x, y, &decomp, &params)?;
    let event_e_canonical = check_event_e_canonical(&decomp, &params)?;

    let nf = n as f64;
    let width = math::powf(nf, params.alpha);
    let h_offset = params.s2 * nf * eps + params.s2 * width;
    let k_limit = 2.0 * params.s2 * width + params.s2 * nf * eps;
    let mut event_h = true;
    let mut event_k = true;
    for cell in decomp.cells(x, y) {
        if cell.y_part.is_empty() || cell.x_part.is_empty() {
            continue;
        }
        let (i_lo, j_hi) = ((cell.x_start + 1) as f64, (cell.y_start + cell.y_part.len()) as f64);
        let h_sure = j_hi < params.s2 * i_lo + h_offset;
        let k_sure = j_hi <= k_limit || i_lo > width;
        if h_sure && k_sure {
            continue;
        }
        let local = lcs_dp(cell.x_part, cell.y_part).alignment.unwrap_or_default();
        let shifted = Alignment::new(
            local
                .pairs
                .into_iter()
                .map(|(i, j)| (i + cell.x_start, j + cell.y_start))
                .collect(),
        );
        event_h &= check_event_h(&shifted, &params, n)?;
        event_k &= check_event_k(&shifted, &params, n)?;
    }
    Ok(GenericityReport {
        n,
        v,
        d: decomp.d(),
        lcs: decomp.lcs(),
        epsilon: eps,
        event_e,
        event_e_canonical,
        event_h,
        event_k,
    })
}

/// Restricted increment: cell LCS minus cell LCS with coordinate `coord`
/// (1-based into `W = (x, y)`) replaced.
pub fn delta_tilde(
    x: &[u32],
    y: &[u32],
    decomp: &CellDecomposition,
    coord: usize,
    replacement: u32,
) -> Result<i32> {
    let n = check_lengths(x, y)?;
    let k = decomp.cell_of(coord)?;
    let cell = decomp.cell(x, y, k);
    let before = decomp.block_scores[k] as i32;
    let after = if coord <= n {
        let mut part = cell.x_part.to_vec();
        part[coord - 1 - cell.x_start] = replacement;
        lcs_bitparallel(&part, cell.y_part)
    } else {
        let mut part = cell.y_part.to_vec();
        part[coord - n - 1 - cell.y_start] = replacement;
        lcs_bitparallel(cell.x_part, &part)
    } as i32;
    let delta = before - after;
    debug_assert!((-1..=1).contains(&delta));
    Ok(delta)
}

/// Global increment `LCS(W) - LCS(W^coord)`.
pub fn delta_full(x: &[u32], y: &[u32], coord: usize, replacement: u32) -> Result<i32> {
    let n = check_lengths(x, y)?;
    if coord == 0 || coord > 2 * n {
        return Err(Error::CoordinateOutOfRange {
            index: coord,
            len: 2 * n,
        });
    }
    let before = lcs_bitparallel(x, y) as i32;
    let after = if coord <= n {
        let mut x2 = x.to_vec();
        x2[coord - 1] = replacement;
        lcs_bitparallel(&x2, y)
    } else {
        let mut y2 = y.to_vec();
        y2[coord - n - 1] = replacement;
        lcs_bitparallel(x, &y2)
    } as i32;
    Ok(before - after)
}

#[cfg(test)]
mod tests;
