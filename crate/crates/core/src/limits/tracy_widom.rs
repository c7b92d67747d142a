//! The GUE Tracy-Widom law `F_2` through the Hastings-McLeod solution of
//! Painleve II, `u'' = 2u^3 + x u` with `u(x) ~ Ai(x)` as `x -> +inf`.
//!
//! `F_2(t) = exp(-I_2(t))` where `I_1(t) = int_t^inf u^2` and
//! `I_2(t) = int_t^inf (x - t) u^2 dx = int_t^inf I_1`, so the density is
//! `F_2 I_1`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Start of the backward integration. `u` is seeded with `Ai` here.
pub const X0: f64 = 6.0;
const RTOL: f64 = 1e-13;
const ATOL: f64 = 1e-20;
const BLOWUP: f64 = 1e6;

/// `e^z K_nu(z)` from `int_0^inf exp(-z (cosh t - 1)) cosh(nu t) dt`. The
/// trapezoid rule converges geometrically for this analytic, rapidly
/// decaying integrand.
fn scaled_bessel_k(nu: f64, z: f64) -> f64 {
    let h = 0.02;
    let mut sum = 0.5;
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let term = math::exp(-z * (math::cosh(t) - 1.0)) * math::cosh(nu * t);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        k += 1;
    }
    sum * h
}

/// `(Ai(x), Ai'(x))` for `x >= 1`.
pub fn airy_ai_pair(x: f64) -> Result<(f64, f64)> {
    if !(x >= 1.0) {
        return Err(Error::Domain("Airy evaluation implemented for x >= 1"));
    }
    let zeta = 2.0 / 3.0 * x * math::sqrt(x);
    let decay = math::exp(-zeta);
    let pi = core::f64::consts::PI;
    let ai = math::sqrt(x / 3.0) / pi * scaled_bessel_k(1.0 / 3.0, zeta) * decay;
    let aip = -x / (pi * math::sqrt(3.0)) * scaled_bessel_k(2.0 / 3.0, zeta) * decay;
    Ok((ai, aip))
}

fn rhs(x: f64, y: [f64; 2]) -> [f64; 2] {
    [y[1], 2.0 * y[0] * y[0] * y[0] + x * y[0]]
}

/// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One trial step; returns the fifth-order state and the scaled error.
fn dp_step(x: f64, y: [f64; 2], h: f64) -> ([f64; 2], f64) {
    let mut k = [[0.0; 2]; 7];
    for s in 0..7 {
        let mut ys = y;
        for (r, a) in A[s].iter().enumerate().take(s) {
            ys[0] += h * a * k[r][0];
            ys[1] += h * a * k[r][1];
        }
        k[s] = rhs(x + C[s] * h, ys);
    }
    let mut y5 = y;
    let mut err: f64 = 0.0;
    for i in 0..2 {
        let (mut hi, mut lo) = (0.0, 0.0);
        for s in 0..7 {
            hi += B5[s] * k[s][i];
            lo += B4[s] * k[s][i];
        }
        y5[i] += h * hi;
        let scale = ATOL + RTOL * math::abs(y[i]).max(math::abs(y5[i]));
        err = err.max(math::abs(h * (hi - lo)) / scale);
    }
    (y5, err)
}

/// Integrates from `(x, y)` to `x_end` adaptively, updating the step guess.
fn advance(x: f64, y: [f64; 2], x_end: f64, h_guess: &mut f64) -> Result<[f64; 2]> {
    let dir = if x_end < x { -1.0 } else { 1.0 };
    let (mut x, mut y) = (x, y);
    while (x_end - x) * dir > 0.0 {
        let mut h = h_guess.min(math::abs(x_end - x)) * dir;
        loop {
            let (y5, err) = dp_step(x, y, h);
            let factor = if err == 0.0 { 5.0 } else { (0.9 * math::powf(err, -0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 && y5.iter().all(|v| v.is_finite()) {
                x += h;
                y = y5;
                if math::abs(x_end - x) < 1e-14 {
                    x = x_end;
                }
                *h_guess = math::abs(h) * factor;
                break;
            }
            h *= factor.min(0.5);
            if math::abs(h) < 1e-12 {
                return Err(Error::OdeBlowup { x });
            }
        }
        if math::abs(y[0]) > BLOWUP {
            return Err(Error::OdeBlowup { x });
        }
    }
    Ok(y)
}

/// `u(x)` on the points `x0, x0 - dx, ..., x0 - steps dx`.
fn hastings_mcleod(x0: f64, dx: f64, steps: usize) -> Result<Vec<f64>> {
    let (ai, aip) = airy_ai_pair(x0)?;
    let mut y = [ai, aip];
    let mut out = Vec::with_capacity(steps + 1);
    out.push(ai);
    let mut h_guess = dx;
    for k in 0..steps {
        let x = x0 - k as f64 * dx;
        y = advance(x, y, x - dx, &mut h_guess)?;
        out.push(y[0]);
    }
    Ok(out)
}

/// `(I_1(x0), I_2(x0))` using `u = Ai` beyond `x0`:
/// `int_x^inf Ai^2 = Ai'^2 - x Ai^2` and
/// `int_x^inf (s - x) Ai(s)^2 ds = (2x^2 Ai^2 - 2x Ai'^2 - Ai Ai') / 3`.
fn airy_tails(x0: f64) -> Result<(f64, f64)> {
    let (a, ap) = airy_ai_pair(x0)?;
    let i1 = ap * ap - x0 * a * a;
    let i2 = (2.0 * x0 * x0 * a * a - 2.0 * x0 * ap * ap - a * ap) / 3.0;
    Ok((i1, i2))
}

/// Tabulated `F_2` with density and a per-point error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct TwTable {
    /// `(t, F_2(t), density)` in increasing `t`.
    pub grid: Vec<(f64, f64, f64)>,
    pub step: f64,
    /// Richardson error estimate of `F_2` at each grid point.
    pub error_estimate: Vec<f64>,
}

/// Cumulative trapezoid from the right end: `out[k] = tail + int_{x_k}^{x_0}`
/// for samples taken at decreasing `x` with spacing `dx`.
fn cumulate(values: &[f64], dx: f64, tail: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = tail;
    out.push(acc);
    for w in values.windows(2) {
        acc += 0.5 * dx * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// `(I_1, I_2)` at spacing `dx` from `u^2` samples.
fn integrals(u2: &[f64], dx: f64, tails: (f64, f64)) -> (Vec<f64>, Vec<f64>) {
    let i1 = cumulate(u2, dx, tails.0);
    let i2 = cumulate(&i1, dx, tails.1);
    (i1, i2)
}

/// Builds the table on `t_max, t_max - h, ..., t_min`. Painleve II is solved
/// from `max(X0, t_max)` at spacing `h / 2`; the quadratures at `h` and
/// `h / 2` are Richardson-combined.
pub fn tw_build_table(h: f64, t_min: f64, t_max: f64) -> Result<TwTable> {
    if !(h > 0.0 && h <= 0.05) {
        return Err(Error::Domain("grid step must lie in (0, 0.05]"));
    }
    if !(t_min < t_max) {
        return Err(Error::Domain("need t_min < t_max"));
    }
    let x0 = t_max.max(X0);
    let lead = (x0 - t_max) / h;
    let span = (t_max - t_min) / h;
    if math::abs(lead - math::round(lead)) > 1e-9 || math::abs(span - math::round(span)) > 1e-9 {
        return Err(Error::Domain("t_min and t_max must sit on the grid through 6"));
    }
    let (lead, span) = (math::round(lead) as usize, math::round(span) as usize);
    let coarse_steps = lead + span;
    let fine = hastings_mcleod(x0, h / 2.0, 2 * coarse_steps)?;
    let u2_fine: Vec<f64> = fine.iter().map(|u| u * u).collect();
    let u2_coarse: Vec<f64> = u2_fine.iter().step_by(2).copied().collect();
    let tails = airy_tails(x0)?;
    let (i1_f, i2_f) = integrals(&u2_fine, h / 2.0, tails);
    let (i1_c, i2_c) = integrals(&u2_coarse, h, tails);

    let mut grid = Vec::with_capacity(span + 1);
    let mut error_estimate = Vec::with_capacity(span + 1);
    for k in (lead..=coarse_steps).rev() {
        let t = x0 - k as f64 * h;
        let i1 = (4.0 * i1_f[2 * k] - i1_c[k]) / 3.0;
        let i2 = (4.0 * i2_f[2 * k] - i2_c[k]) / 3.0;
        let f2 = math::exp(-i2);
        grid.push((t, f2, f2 * i1.max(0.0)));
        error_estimate.push(math::abs(math::exp(-i2_f[2 * k]) - math::exp(-i2_c[k])) / 3.0);
    }
    Ok(TwTable {
        grid,
        step: h,
        error_estimate,
    })
}

impl TwTable {
    pub fn t_min(&self) -> f64 {
        self.grid[0].0
    }

    pub fn t_max(&self) -> f64 {
        self.grid[self.grid.len() - 1].0
    }

    /// Trapezoid rule for `int t^k density`.
    fn moment(&self, k: i32) -> f64 {
        self.grid
            .windows(2)
            .map(|w| 0.5 * self.step * (w[0].2 * w[0].0.powi(k) + w[1].2 * w[1].0.powi(k)))
            .sum()
    }

    pub fn density_integral(&self) -> f64 {
        self.moment(0)
    }

    pub fn mean(&self) -> f64 {
        self.moment(1) / self.moment(0)
    }

    pub fn sd(&self) -> f64 {
        let m = self.mean();
        math::sqrt(self.moment(2) / self.moment(0) - m * m)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        tw_cdf(self, t)
    }

    /// Smallest `t` with `F_2(t) >= p`, by bisection on the interpolant.
    pub fn quantile(&self, p: f64) -> f64 {
        let (mut lo, mut hi) = (self.t_min(), self.t_max());
        if p <= tw_cdf(self, lo) {
            return lo;
        }
        if p >= tw_cdf(self, hi) {
            return hi;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if tw_cdf(self, mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Cubic Hermite interpolation of `F_2` with the density as slopes, limited
/// (Fritsch-Carlson) so each interval stays monotone. Clamped to 0 and 1
/// outside the grid.
pub fn tw_cdf(table: &TwTable, t: f64) -> f64 {
    let g = &table.grid;
    if t <= g[0].0 {
        return if t < g[0].0 { 0.0 } else { g[0].1 };
    }
    let last = g.len() - 1;
    if t >= g[last].0 {
        return if t > g[last].0 { 1.0 } else { g[last].1 };
    }
    let h = table.step;
    let k = (((t - g[0].0) / h) as usize).min(last - 1);
    let (t0, f0, mut d0) = g[k];
    let (_, f1, mut d1) = g[k + 1];
    let secant = (f1 - f0) / h;
    if secant <= 0.0 {
        d0 = 0.0;
        d1 = 0.0;
    } else {
        let (a, b) = (d0 / secant, d1 / secant);
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / math::sqrt(r);
            d0 *= tau;
            d1 *= tau;
        }
    }
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let v = (2.0 * s3 - 3.0 * s2 + 1.0) * f0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * f1
        + (s3 - s2) * h * d1;
    v.clamp(f0.min(f1), f0.max(f1))
}

/// Edge scaling `(L - 2 sqrt(n)) / n^{1/6}` for LIS lengths.
pub fn lis_scale(value: f64, n: usize) -> f64 {
    let nf = n as f64;
    (value - 2.0 * math::sqrt(nf)) / math::powf(nf, 1.0 / 6.0)
}
