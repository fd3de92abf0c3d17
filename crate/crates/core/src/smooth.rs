//! The Dickman function and densities of smooth numbers and smooth pairs.
//!
//! `rho(u) = 1` on `[0, 1]` and `u rho(u) = int_{u-1}^{u} rho(t) dt` for
//! `u > 1`; on `[1, 2]` this gives `rho(u) = 1 - ln u`. An integer `n` is
//! `y`-smooth when its largest prime factor is at most `y` (so `1` is always
//! smooth).

use num_bigint::BigUint;

use crate::error::{invalid, Result};
use crate::walk::fold_pairs;

/// Largest grid step accepted for the Dickman table.
pub const MAX_STEP: f64 = 1e-3;
pub const MIN_X: u64 = 1_000;

/// `rho` on the grid `0, h, 2h, ...` with `h = 1/N`.
///
/// The delay integral is advanced by the composite trapezoid rule. The
/// integer points where `rho` loses smoothness fall on grid nodes, so the
/// error is `O(h^2)` throughout. Off-grid values use linear interpolation,
/// which is also `O(h^2)`.
#[derive(Debug, Clone)]
pub struct DickmanTable {
    per_unit: usize,
    values: Vec<f64>,
}

impl DickmanTable {
    /// Table up to `u_max` with a step no larger than `step` (the step is
    /// rounded down to the nearest `1/N`).
    pub fn new(u_max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step <= MAX_STEP) {
            return invalid(format!("step = {step} must lie in (0, {MAX_STEP}]"));
        }
        if !(u_max >= 0.0 && u_max.is_finite()) {
            return invalid(format!("u_max = {u_max} must be finite and nonnegative"));
        }
        let n = (1.0 / step).ceil() as usize;
        Ok(Self::with_per_unit(u_max, n))
    }

    fn with_per_unit(u_max: f64, n: usize) -> Self {
        let h = 1.0 / n as f64;
        let len = ((u_max * n as f64).ceil() as usize + 2).max(n + 2);
        let mut values = vec![1.0; n + 1];
        values.reserve(len - values.len());
        // Sum of rho over the open interior (i - N, i) of the current window.
        let mut inner: f64 = values[1..n].iter().sum();
        for i in n + 1..len {
            inner += values[i - 1];
            inner -= values[i - n];
            let u = i as f64 * h;
            let rhs = h * (0.5 * values[i - n] + inner);
            let r = rhs / (u - 0.5 * h);
            values.push(r);
        }
        DickmanTable {
            per_unit: n,
            values,
        }
    }

    pub fn step(&self) -> f64 {
        1.0 / self.per_unit as f64
    }

    pub fn u_max(&self) -> f64 {
        (self.values.len() - 1) as f64 / self.per_unit as f64
    }

    /// Value at grid node `i`, standing for `u = i h`.
    pub fn node(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return invalid(format!("u = {u} must be nonnegative"));
        }
        if u > self.u_max() {
            return invalid(format!("u = {u} is beyond the table end {}", self.u_max()));
        }
        let t = u * self.per_unit as f64;
        let i = (t.floor() as usize).min(self.values.len() - 2);
        let frac = t - i as f64;
        Ok(self.values[i] * (1.0 - frac) + self.values[i + 1] * frac)
    }
}

/// `rho(u)` from a table with the given step.
pub fn dickman_rho(u: f64, step: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return invalid(format!("u = {u} must be nonnegative"));
    }
    DickmanTable::new(u.max(1.0), step)?.eval(u)
}

/// Continued-fraction approximation of `u` by `a/b` with `b <= max_den`.
fn rational_approx(u: f64, max_den: u64) -> (u64, u64) {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut v = u;
    loop {
        let a = v.floor();
        let ai = a as u64;
        let p2 = ai.saturating_mul(p1).saturating_add(p0);
        let q2 = ai.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let f = v - a;
        if f < 1e-12 || (p1 as f64 / q1 as f64 - u).abs() < 1e-15 * u {
            break;
        }
        v = 1.0 / f;
    }
    (p1, q1)
}

/// The largest integer `Y` with `Y <= x^(1/u)`.
///
/// `u` is read as the nearest fraction `a/b` with `b <= 10^4`, and the
/// comparison `Y^a <= x^b` is done in exact integer arithmetic, so a prime
/// sitting exactly at `x^(1/u)` counts as smooth.
pub fn smooth_threshold(x: u64, u: f64) -> Result<u64> {
    if !(u >= 1.0 && u.is_finite()) {
        return invalid(format!("u = {u} must be at least 1"));
    }
    if x == 0 {
        return invalid("x must be positive");
    }
    let (a, b) = rational_approx(u, 10_000);
    let xb = BigUint::from(x).pow(b as u32);
    let fits = |y: u64| BigUint::from(y).pow(a as u32) <= xb;
    let mut y = (x as f64).powf(1.0 / u).floor() as u64;
    y = y.max(1);
    while y > 1 && !fits(y) {
        y -= 1;
    }
    while fits(y + 1) {
        y += 1;
    }
    Ok(y)
}

fn check_u(x: u64, u: f64) -> Result<()> {
    let top = (x as f64).log2();
    if !(u >= 1.0 && u <= top) {
        return invalid(format!("u = {u} must lie in [1, log2 x = {top:.6}]"));
    }
    Ok(())
}

/// Counts of smooth `n` and smooth pairs `(n, n + 1)` over `n <= x` for
/// every threshold on the two lists.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothCounts {
    pub x: u64,
    pub us: Vec<f64>,
    pub vs: Vec<f64>,
    /// `n` with `lpf(n) <= Y(u)`, one per `u`.
    pub single_u: Vec<u64>,
    /// `n` with `lpf(n) <= Y(v)`, one per `v`.
    pub single_v: Vec<u64>,
    /// `pair[i][j]`: `n` with `lpf(n) <= Y(u_i)` and `lpf(n+1) <= Y(v_j)`.
    pub pair: Vec<Vec<u64>>,
}

impl SmoothCounts {
    pub fn smooth_u(&self, i: usize) -> f64 {
        self.single_u[i] as f64 / self.x as f64
    }

    pub fn smooth_v(&self, j: usize) -> f64 {
        self.single_v[j] as f64 / self.x as f64
    }

    pub fn pair_density(&self, i: usize, j: usize) -> f64 {
        self.pair[i][j] as f64 / self.x as f64
    }
}

/// One sieve pass for all `(u, v)` combinations.
pub fn smooth_counts(x: u64, us: &[f64], vs: &[f64]) -> Result<SmoothCounts> {
    if x < MIN_X {
        return invalid(format!("x = {x} is below {MIN_X}"));
    }
    if us.is_empty() || vs.is_empty() {
        return invalid("u and v lists must be nonempty");
    }
    for &u in us.iter().chain(vs) {
        check_u(x, u)?;
    }
    let yu: Vec<u64> = us.iter().map(|&u| smooth_threshold(x, u)).collect::<Result<_>>()?;
    let yv: Vec<u64> = vs.iter().map(|&v| smooth_threshold(x, v)).collect::<Result<_>>()?;
    let (nu, nv) = (yu.len(), yv.len());
    let zero = || (vec![0u64; nu], vec![0u64; nv], vec![0u64; nu * nv]);
    let (su, sv, sp) = fold_pairs(
        1,
        x,
        zero,
        |acc, _, a, b| {
            for (j, &y) in yv.iter().enumerate() {
                acc.1[j] += (a.lpf <= y) as u64;
            }
            for (i, &y) in yu.iter().enumerate() {
                if a.lpf <= y {
                    acc.0[i] += 1;
                    for (j, &w) in yv.iter().enumerate() {
                        acc.2[i * nv + j] += (b.lpf <= w) as u64;
                    }
                }
            }
        },
        |mut a, b| {
            a.0.iter_mut().zip(&b.0).for_each(|(s, t)| *s += t);
            a.1.iter_mut().zip(&b.1).for_each(|(s, t)| *s += t);
            a.2.iter_mut().zip(&b.2).for_each(|(s, t)| *s += t);
            a
        },
    )?;
    Ok(SmoothCounts {
        x,
        us: us.to_vec(),
        vs: vs.to_vec(),
        single_u: su,
        single_v: sv,
        pair: sp.chunks(nv).map(|c| c.to_vec()).collect(),
    })
}

/// Fraction of `n <= x` that are `x^(1/u)`-smooth.
pub fn smooth_density(x: u64, u: f64) -> Result<f64> {
    Ok(smooth_counts(x, &[u], &[u])?.smooth_u(0))
}

/// Fraction of `n <= x` with `n` `x^(1/u)`-smooth and `n + 1`
/// `x^(1/v)`-smooth.
pub fn pair_density(x: u64, u: f64, v: f64) -> Result<f64> {
    Ok(smooth_counts(x, &[u], &[v])?.pair_density(0, 0))
}
