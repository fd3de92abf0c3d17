//! Bounded multiplicative functions and the quantities used to measure how
//! they correlate: pretentious distance to twisted Dirichlet characters,
//! shifted two-point averages, and equidistribution in progressions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, LabError, Result};
use crate::sieve::{factor, primes_in, primes_up_to, FactorWindow, Sieve};

/// Largest modulus for which character tables are built.
pub const MAX_MODULUS: u64 = 100;
const CHUNK: u64 = 1 << 18;

/// Built-in 1-bounded multiplicative functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MultFn {
    One,
    Liouville,
    Moebius,
    /// `n -> e(alpha Omega(n))`.
    ExpAlphaBigOmega(f64),
    /// `n -> e(alpha omega(n))`.
    ExpAlphaOmega(f64),
    /// Completely multiplicative with `g(p) = 0` for `p` in `[lo, hi]` and
    /// `g(p) = 1` otherwise.
    SmoothBand { lo: u64, hi: u64 },
}

fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

impl MultFn {
    /// Value at a prime.
    pub fn at_prime(&self, p: u64) -> Complex64 {
        match *self {
            MultFn::One => Complex64::new(1.0, 0.0),
            MultFn::Liouville | MultFn::Moebius => Complex64::new(-1.0, 0.0),
            MultFn::ExpAlphaBigOmega(a) | MultFn::ExpAlphaOmega(a) => e(a),
            MultFn::SmoothBand { lo, hi } => {
                Complex64::new(if (lo..=hi).contains(&p) { 0.0 } else { 1.0 }, 0.0)
            }
        }
    }

    /// Value at any `n >= 1`, by trial division.
    pub fn eval(&self, n: u64) -> Result<Complex64> {
        let w = Sieve::new(n).window(n, n)?;
        Ok(self.eval_window(&w)[0])
    }

    /// Values at every integer of a sieved window.
    pub fn eval_window(&self, w: &FactorWindow) -> Vec<Complex64> {
        match *self {
            MultFn::SmoothBand { lo, hi } => {
                let mut v = vec![Complex64::new(1.0, 0.0); w.len()];
                for p in primes_in(lo, hi.min(w.hi)) {
                    let first = w.lo.div_ceil(p) * p;
                    let mut m = first;
                    while m <= w.hi {
                        v[(m - w.lo) as usize] = Complex64::new(0.0, 0.0);
                        m += p;
                    }
                }
                v
            }
            _ => w.iter().map(|(_, en)| self.eval_entry(en)).collect(),
        }
    }

    fn eval_entry(&self, en: crate::sieve::Entry) -> Complex64 {
        match *self {
            MultFn::One => Complex64::new(1.0, 0.0),
            MultFn::Liouville => Complex64::new(en.liouville() as f64, 0.0),
            MultFn::Moebius => Complex64::new(en.moebius() as f64, 0.0),
            MultFn::ExpAlphaBigOmega(a) => e(a * en.big_omega as f64),
            MultFn::ExpAlphaOmega(a) => e(a * en.omega as f64),
            MultFn::SmoothBand { .. } => unreachable!("handled by eval_window"),
        }
    }

    pub fn is_real(&self) -> bool {
        !matches!(self, MultFn::ExpAlphaBigOmega(_) | MultFn::ExpAlphaOmega(_))
    }
}

impl fmt::Display for MultFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultFn::One => write!(f, "one"),
            MultFn::Liouville => write!(f, "liouville"),
            MultFn::Moebius => write!(f, "moebius"),
            MultFn::ExpAlphaBigOmega(a) => write!(f, "exp_bigomega:{a}"),
            MultFn::ExpAlphaOmega(a) => write!(f, "exp_omega:{a}"),
            MultFn::SmoothBand { lo, hi } => write!(f, "band:{lo}:{hi}"),
        }
    }
}

impl FromStr for MultFn {
    type Err = LabError;
    /// `one`, `liouville`, `moebius`, `exp_bigomega:ALPHA`, `exp_omega:ALPHA`,
    /// `band:LO:HI`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| -> Result<f64> {
            t.parse::<f64>()
                .map_err(|_| LabError::InvalidInput(format!("bad number {t:?} in {s:?}")))
        };
        let int = |t: &str| -> Result<u64> {
            t.parse::<u64>()
                .map_err(|_| LabError::InvalidInput(format!("bad integer {t:?} in {s:?}")))
        };
        match (parts[0].to_ascii_lowercase().as_str(), parts.len()) {
            ("one" | "1", 1) => Ok(MultFn::One),
            ("liouville" | "lambda", 1) => Ok(MultFn::Liouville),
            ("moebius" | "mobius" | "mu", 1) => Ok(MultFn::Moebius),
            ("exp_bigomega", 2) => Ok(MultFn::ExpAlphaBigOmega(num(parts[1])?)),
            ("exp_omega", 2) => Ok(MultFn::ExpAlphaOmega(num(parts[1])?)),
            ("band", 3) => {
                let (lo, hi) = (int(parts[1])?, int(parts[2])?);
                if lo < 2 || lo > hi {
                    return invalid(format!("band [{lo}, {hi}] must satisfy 2 <= lo <= hi"));
                }
                Ok(MultFn::SmoothBand { lo, hi })
            }
            _ => invalid(format!("unknown function {s:?}")),
        }
    }
}

/// `D(f, g n^{it}; X)`, i.e. the square root of
/// `sum_{p <= X} (1 - Re(f(p) conj(g(p)) p^{-it})) / p`.
pub fn pretentious_distance(f: &MultFn, g: &MultFn, x: u64, t: f64) -> Result<f64> {
    if x < 10 {
        return invalid(format!("X = {x} is below 10"));
    }
    let s: f64 = primes_up_to(x)
        .into_iter()
        .rev()
        .map(|p| {
            let tw = Complex64::from_polar(1.0, -t * (p as f64).ln());
            (1.0 - (f.at_prime(p) * g.at_prime(p).conj() * tw).re) / p as f64
        })
        .sum();
    Ok(s.max(0.0).sqrt())
}

/// All Dirichlet characters modulo `q`, as value tables on `0..q`.
pub fn dirichlet_characters(q: u64) -> Result<Vec<Vec<Complex64>>> {
    if q == 0 {
        return invalid("modulus must be positive");
    }
    if q > MAX_MODULUS {
        return Err(LabError::Budget {
            what: "character tables",
            required: q,
            budget: MAX_MODULUS,
            unit: "modulus",
        });
    }
    let mut comps: Vec<Component> = Vec::new();
    for (p, k) in factor(q)?.factors {
        let m = p.pow(k);
        if p == 2 {
            if k >= 2 {
                comps.push(Component::Sign { m });
            }
            if k >= 3 {
                comps.push(Component::Cyclic { m, g: 5, order: m / 4, signed: true });
            }
        } else {
            let g = primitive_root(p, m);
            comps.push(Component::Cyclic { m, g, order: m / p * (p - 1), signed: false });
        }
    }
    let units: Vec<u64> = (0..q).filter(|&a| gcd(a, q) == 1).collect();
    let logs: Vec<Vec<u64>> = units
        .iter()
        .map(|&a| comps.iter().map(|c| c.log(a)).collect())
        .collect();
    let total: u64 = comps.iter().map(Component::order).product();
    let mut out = Vec::with_capacity(total as usize);
    for idx in 0..total {
        // Mixed-radix digits of idx pick one exponent per component.
        let mut js = Vec::with_capacity(comps.len());
        let mut r = idx;
        for c in &comps {
            js.push(r % c.order());
            r /= c.order();
        }
        let mut table = vec![Complex64::new(0.0, 0.0); q as usize];
        for (&u, lg) in units.iter().zip(&logs) {
            let phase: f64 = comps
                .iter()
                .zip(&js)
                .zip(lg)
                .map(|((c, &j), &l)| (j * l % c.order()) as f64 / c.order() as f64)
                .sum();
            table[u as usize] = e(phase);
        }
        out.push(table);
    }
    Ok(out)
}

/// A cyclic factor of `(Z/q)^*` coming from one prime power `m`.
enum Component {
    /// `{+1, -1}` inside `(Z/2^k)^*`, `k >= 2`.
    Sign { m: u64 },
    /// Powers of `g` modulo `m`; for `m = 2^k` the sign is removed first.
    Cyclic { m: u64, g: u64, order: u64, signed: bool },
}

impl Component {
    fn order(&self) -> u64 {
        match self {
            Component::Sign { .. } => 2,
            Component::Cyclic { order, .. } => *order,
        }
    }

    fn log(&self, a: u64) -> u64 {
        match *self {
            Component::Sign { m } => (a % m % 4 == 3) as u64,
            Component::Cyclic { m, g, order, signed } => {
                let mut target = a % m;
                if signed && target % 4 == 3 {
                    target = m - target;
                }
                let mut x = 1 % m;
                for j in 0..order {
                    if x == target {
                        return j;
                    }
                    x = x * g % m;
                }
                unreachable!("{a} has no discrete log base {g} mod {m}")
            }
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// A generator of `(Z/p^e)^*` for odd `p`.
fn primitive_root(p: u64, pe: u64) -> u64 {
    let phi_p = p - 1;
    let fac = factor(phi_p).expect("p - 1 >= 2").factors;
    let g = (2..p)
        .find(|&g| fac.iter().all(|&(r, _)| pow_mod(g, phi_p / r, p) != 1))
        .expect("primitive root exists");
    if pe == p || pow_mod(g, p - 1, p * p) != 1 {
        g
    } else {
        g + p
    }
}

/// Grid of `t` values: `0` followed by `+t_1, -t_1, +t_2, -t_2, ...` where
/// `ln t_j` runs through a van der Corput sequence on `[ln t_lo, ln X]`.
/// Grids of different sizes are nested.
pub fn t_grid(x: u64, size: usize) -> Vec<f64> {
    let (lo, hi) = (T_LO.ln(), (x as f64).ln());
    let mut out = Vec::with_capacity(size);
    if size == 0 {
        return out;
    }
    out.push(0.0);
    let mut j = 1u64;
    while out.len() < size {
        let mag = (lo + van_der_corput(j) * (hi - lo)).exp();
        out.push(mag);
        if out.len() < size {
            out.push(-mag);
        }
        j += 1;
    }
    out
}

const T_LO: f64 = 0.01;

fn van_der_corput(mut j: u64) -> f64 {
    let (mut v, mut denom) = (0.0, 1.0);
    while j > 0 {
        denom *= 2.0;
        v += (j & 1) as f64 / denom;
        j >>= 1;
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MMeasure {
    /// Minimum of the squared distance over the grid and the characters.
    pub value: f64,
    /// `ln X` times the largest half-gap of the grid inside `[-X, X]`: the
    /// squared distance is `ln X`-Lipschitz in `t`, so the infimum over the
    /// continuum is at least `value - error_cap`.
    pub error_cap: f64,
    pub t: f64,
    pub q: u64,
    /// Index of the minimizing character in [`dirichlet_characters`]`(q)`.
    pub character: usize,
}

/// Grid approximation of the infimum over `|t| <= X`, `q <= Q` and every
/// character `chi` mod `q` of `D(g, chi(n) n^{it}; X)^2`.
pub fn m_measure(g: &MultFn, x: u64, t_grid_size: usize, q_max: u64) -> Result<MMeasure> {
    if x < 10 {
        return invalid(format!("X = {x} is below 10"));
    }
    if q_max < 1 || t_grid_size < 1 {
        return invalid("Q and the grid size must be at least 1");
    }
    let tables: Vec<Vec<Vec<Complex64>>> =
        (1..=q_max).map(dirichlet_characters).collect::<Result<_>>()?;
    let primes = primes_up_to(x);
    let inv: f64 = primes.iter().rev().map(|&p| 1.0 / p as f64).sum();
    let gp: Vec<Complex64> = primes
        .iter()
        .map(|&p| g.at_prime(p) / p as f64)
        .collect();
    let grid = t_grid(x, t_grid_size);
    let best = grid
        .par_iter()
        .map(|&t| {
            let twisted: Vec<Complex64> = primes
                .iter()
                .zip(&gp)
                .map(|(&p, &v)| v * Complex64::from_polar(1.0, -t * (p as f64).ln()))
                .collect();
            let mut best = (f64::INFINITY, t, 1u64, 0usize);
            for (qi, chars) in tables.iter().enumerate() {
                let q = qi as u64 + 1;
                let mut by_class = vec![Complex64::new(0.0, 0.0); q as usize];
                for (&p, &v) in primes.iter().zip(&twisted).rev() {
                    by_class[(p % q) as usize] += v;
                }
                for (ci, chi) in chars.iter().enumerate() {
                    let corr: f64 = by_class
                        .iter()
                        .zip(chi)
                        .map(|(a, c)| (a * c.conj()).re)
                        .sum();
                    let d2 = inv - corr;
                    if d2 < best.0 {
                        best = (d2, t, q, ci);
                    }
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, 0.0, 1, 0),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1.abs() < a.1.abs()) { b } else { a },
        );
    let mut pts = grid.clone();
    pts.push(x as f64);
    pts.push(-(x as f64));
    pts.sort_by(f64::total_cmp);
    let gap = pts.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    Ok(MMeasure {
        value: best.0.max(0.0),
        error_cap: (x as f64).ln() * gap / 2.0,
        t: best.1,
        q: best.2,
        character: best.3,
    })
}

/// Parameters of a shifted two-point average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationQuery {
    pub n: u64,
    pub w: u64,
    pub b: u64,
    pub h1: i64,
    pub h2: i64,
    pub delta: f64,
}

impl CorrelationQuery {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1000 {
            return invalid(format!("N = {} is below 1000", self.n));
        }
        if self.w < 1 || self.b < 1 || self.b > self.w {
            return invalid(format!("need W >= 1 and b in [1, W], got W = {}, b = {}", self.w, self.b));
        }
        if self.h1 == self.h2 {
            return invalid("shifts h1 and h2 must differ");
        }
        let hmin = self.h1.min(self.h2);
        if (self.n as i64) + 1 + hmin < 1 {
            return invalid("shifted window reaches below 1");
        }
        Ok(())
    }
}

/// Values of `g` over `[lo, hi]`, sieved in one window.
fn values(g: &MultFn, lo: u64, hi: u64) -> Result<Vec<Complex64>> {
    let w = Sieve::with_budget(hi, hi - lo + 1).window(lo, hi)?;
    Ok(g.eval_window(&w))
}

/// `(W/N) sum_{N < n <= 2N, n = b mod W} (g1(n+h1) - delta) g2(n+h2)`.
pub fn two_point_correlation(g1: &MultFn, g2: &MultFn, q: &CorrelationQuery) -> Result<Complex64> {
    q.validate()?;
    let hmin = q.h1.min(q.h2);
    let hmax = q.h1.max(q.h2);
    let starts: Vec<u64> = (q.n + 1..=2 * q.n).step_by(CHUNK as usize).collect();
    let sum = starts
        .into_par_iter()
        .map(|a| -> Result<Complex64> {
            let b = (2 * q.n).min(a + CHUNK - 1);
            let lo = (a as i64 + hmin) as u64;
            let hi = (b as i64 + hmax) as u64;
            let v1 = values(g1, lo, hi)?;
            let v2 = if g1 == g2 { v1.clone() } else { values(g2, lo, hi)? };
            let mut s = Complex64::new(0.0, 0.0);
            for n in a..=b {
                if n % q.w != q.b % q.w {
                    continue;
                }
                let i1 = (n as i64 + q.h1) as u64 - lo;
                let i2 = (n as i64 + q.h2) as u64 - lo;
                s += (v1[i1 as usize] - q.delta) * v2[i2 as usize];
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(Complex64::new(0.0, 0.0), |x, y| x + y);
    Ok(sum * (q.w as f64 / q.n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquidistReport {
    pub defect: f64,
    pub q: u64,
    pub a: u64,
}

/// `max_{q <= q_max, a mod q} |sum_{N < n <= 2N, n = a mod q} g(n) - (N/q) delta| / N`.
pub fn equidist_defect(g: &MultFn, n: u64, delta: f64, q_max: u64) -> Result<EquidistReport> {
    if n < 1000 {
        return invalid(format!("N = {n} is below 1000"));
    }
    if q_max < 1 {
        return invalid("q_max must be at least 1");
    }
    let sums = class_sums(g, n, q_max)?;
    let mut best = EquidistReport {
        defect: -1.0,
        q: 1,
        a: 0,
    };
    for (qi, row) in sums.iter().enumerate() {
        let q = qi as u64 + 1;
        for (a, s) in row.iter().enumerate() {
            let d = (s - n as f64 / q as f64 * delta).norm() / n as f64;
            if d > best.defect {
                best = EquidistReport { defect: d, q, a: a as u64 };
            }
        }
    }
    Ok(best)
}

/// `sums[q-1][a] = sum_{N < n <= 2N, n = a mod q} g(n)`.
fn class_sums(g: &MultFn, n: u64, q_max: u64) -> Result<Vec<Vec<Complex64>>> {
    let zero = || -> Vec<Vec<Complex64>> {
        (1..=q_max)
            .map(|q| vec![Complex64::new(0.0, 0.0); q as usize])
            .collect()
    };
    let starts: Vec<u64> = (n + 1..=2 * n).step_by(CHUNK as usize).collect();
    starts
        .into_par_iter()
        .map(|a| -> Result<Vec<Vec<Complex64>>> {
            let b = (2 * n).min(a + CHUNK - 1);
            let v = values(g, a, b)?;
            let mut acc = zero();
            for (i, &val) in v.iter().enumerate() {
                let m = a + i as u64;
                for (qi, row) in acc.iter_mut().enumerate() {
                    row[(m % (qi as u64 + 1)) as usize] += val;
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()
        .map(|parts| {
            // Fixed chunk order keeps the float sums independent of scheduling.
            parts.into_iter().fold(zero(), |mut x, y| {
                for (rx, ry) in x.iter_mut().zip(&y) {
                    for (s, t) in rx.iter_mut().zip(ry) {
                        *s += t;
                    }
                }
                x
            })
        })
}

/// Mean of `g` over `(N, 2N]`.
pub fn mean_value(g: &MultFn, n: u64) -> Result<Complex64> {
    let s = class_sums(g, n, 1)?;
    Ok(s[0][0] / n as f64)
}
