//! Segmented multiplicative-function sieve.
//!
//! A window `[lo, hi]` is sieved by smallest-prime-factor peeling: every
//! prime `p <= sqrt(hi)` is divided out of its multiples, recording the
//! exponent as it goes. Whatever cofactor survives is either 1 or a single
//! prime larger than `sqrt(hi)`, which is then the largest prime factor.
//! One pass therefore yields omega, Omega, tau and the largest prime factor
//! of every integer in the window.

use crate::error::{invalid, LabError, Result};

/// Default cap on the number of integers held by one window.
pub const DEFAULT_MAX_WINDOW: u64 = 1 << 24;

const PRIME_SEGMENT: u64 = 1 << 18;

/// Primes in `[2, limit]`, ascending.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(prime_count_estimate(limit));
    for_each_prime_in(2, limit, |p| out.push(p));
    out
}

/// Primes in `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_prime_in(lo, hi, |p| out.push(p));
    out
}

/// Upper bound on pi(limit), good enough to size buffers.
pub fn prime_count_estimate(limit: u64) -> usize {
    if limit < 17 {
        return 6;
    }
    let x = limit as f64;
    // Rosser–Schoenfeld: pi(x) < 1.25506 x / ln x for x > 1.
    (1.25506 * x / x.ln()) as usize + 1
}

/// Calls `f` on every prime in `[lo, hi]` in increasing order, using a
/// segmented odd-only sieve so memory stays O(sqrt(hi)).
pub fn for_each_prime_in(lo: u64, hi: u64, mut f: impl FnMut(u64)) {
    if hi < 2 || lo > hi {
        return;
    }
    let lo = lo.max(2);
    if lo == 2 {
        f(2);
    }
    let root = isqrt(hi);
    let base = small_odd_primes(root);
    // Odd numbers only: index i stands for start + 2i.
    let mut start = if lo <= 3 { 3 } else { lo | 1 };
    let mut seg = vec![true; PRIME_SEGMENT as usize];
    while start <= hi {
        let end = hi.min(start + 2 * (PRIME_SEGMENT - 1));
        let count = ((end - start) / 2 + 1) as usize;
        seg[..count].iter_mut().for_each(|b| *b = true);
        for &p in &base {
            let sq = p * p;
            if sq > end {
                break;
            }
            let mut m = if sq >= start {
                sq
            } else {
                let r = start % p;
                let first = if r == 0 { start } else { start + (p - r) };
                if first % 2 == 0 {
                    first + p
                } else {
                    first
                }
            };
            while m <= end {
                seg[((m - start) / 2) as usize] = false;
                m += 2 * p;
            }
        }
        for (i, &alive) in seg[..count].iter().enumerate() {
            if alive {
                let n = start + 2 * i as u64;
                if n > 1 {
                    f(n);
                }
            }
        }
        start = match end.checked_add(2) {
            Some(s) => s,
            None => break,
        };
    }
}

fn small_odd_primes(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    let mut i = 3;
    while i <= n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

/// Floor of the square root, exact for all `u64`.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// The sieved data for one integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Entry {
    pub omega: u8,
    pub big_omega: u8,
    pub tau: u32,
    /// Largest prime factor; 1 for n = 1.
    pub lpf: u64,
}

impl Entry {
    /// omega <= log2(tau) <= Omega, with equality on either side exactly when
    /// the integer is squarefree (omega == Omega).
    pub fn tau_bound_holds(&self) -> bool {
        let lower = 1u128 << self.omega;
        let upper = 1u128 << self.big_omega;
        let tau = self.tau as u128;
        if !(lower <= tau && tau <= upper) {
            return false;
        }
        let squarefree = self.omega == self.big_omega;
        (lower == tau) == squarefree && (tau == upper) == squarefree
    }

    /// `(-1)^Omega`.
    pub fn liouville(&self) -> i8 {
        if self.big_omega % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn moebius(&self) -> i8 {
        if self.omega != self.big_omega {
            0
        } else if self.omega % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// omega, Omega, tau and the largest prime factor for every n in `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorWindow {
    pub lo: u64,
    pub hi: u64,
    pub omega: Vec<u8>,
    pub big_omega: Vec<u8>,
    pub tau: Vec<u32>,
    pub lpf: Vec<u64>,
}

impl FactorWindow {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn entry(&self, n: u64) -> Option<Entry> {
        if !self.contains(n) {
            return None;
        }
        let i = (n - self.lo) as usize;
        Some(self.entry_at(i))
    }

    /// Entry at offset `i` from `lo`; panics if out of range.
    #[inline]
    pub fn entry_at(&self, i: usize) -> Entry {
        Entry {
            omega: self.omega[i],
            big_omega: self.big_omega[i],
            tau: self.tau[i],
            lpf: self.lpf[i],
        }
    }

    /// Iterates `(n, entry)` over the window.
    pub fn iter(&self) -> impl Iterator<Item = (u64, Entry)> + '_ {
        (0..self.len()).map(move |i| (self.lo + i as u64, self.entry_at(i)))
    }

    /// Concatenates two adjacent windows.
    pub fn concat(mut self, other: FactorWindow) -> Result<FactorWindow> {
        if other.lo != self.hi + 1 {
            return invalid(format!(
                "windows [{}, {}] and [{}, {}] are not adjacent",
                self.lo, self.hi, other.lo, other.hi
            ));
        }
        self.hi = other.hi;
        self.omega.extend(other.omega);
        self.big_omega.extend(other.big_omega);
        self.tau.extend(other.tau);
        self.lpf.extend(other.lpf);
        Ok(self)
    }
}

/// Sieve with a precomputed table of base primes.
#[derive(Debug, Clone)]
pub struct Sieve {
    base: Vec<u64>,
    max_hi: u64,
    max_window: u64,
}

impl Sieve {
    /// A sieve able to handle any window with `hi <= max_hi`.
    pub fn new(max_hi: u64) -> Self {
        Self::with_budget(max_hi, DEFAULT_MAX_WINDOW)
    }

    pub fn with_budget(max_hi: u64, max_window: u64) -> Self {
        Sieve {
            base: primes_up_to(isqrt(max_hi)),
            max_hi,
            max_window,
        }
    }

    pub fn max_hi(&self) -> u64 {
        self.max_hi
    }

    pub fn max_window(&self) -> u64 {
        self.max_window
    }

    pub fn window(&self, lo: u64, hi: u64) -> Result<FactorWindow> {
        if lo == 0 {
            return invalid("window must start at 1 or later");
        }
        if lo > hi {
            return invalid(format!("inverted range [{lo}, {hi}]"));
        }
        if hi > self.max_hi {
            return invalid(format!(
                "hi = {hi} exceeds the sieve limit {}",
                self.max_hi
            ));
        }
        let len = hi - lo + 1;
        if len > self.max_window {
            return Err(LabError::Budget {
                what: "sieve window",
                required: len,
                budget: self.max_window,
                unit: "integers",
            });
        }
        Ok(self.sieve_unchecked(lo, hi))
    }

    fn sieve_unchecked(&self, lo: u64, hi: u64) -> FactorWindow {
        let len = (hi - lo + 1) as usize;
        let mut omega = vec![0u8; len];
        let mut big_omega = vec![0u8; len];
        let mut tau = vec![1u32; len];
        let mut lpf = vec![1u64; len];
        let mut rest: Vec<u64> = (lo..=hi).collect();

        for &p in &self.base {
            if p.saturating_mul(p) > hi {
                break;
            }
            let first = lo.div_ceil(p) * p;
            let mut m = first;
            while m <= hi {
                let i = (m - lo) as usize;
                let mut r = rest[i] / p;
                let mut e: u8 = 1;
                while r % p == 0 {
                    r /= p;
                    e += 1;
                }
                rest[i] = r;
                omega[i] += 1;
                big_omega[i] += e;
                tau[i] *= e as u32 + 1;
                lpf[i] = p;
                m = match m.checked_add(p) {
                    Some(v) => v,
                    None => break,
                };
            }
        }
        for i in 0..len {
            let r = rest[i];
            if r > 1 {
                omega[i] += 1;
                big_omega[i] += 1;
                tau[i] *= 2;
                lpf[i] = r;
            }
        }
        FactorWindow {
            lo,
            hi,
            omega,
            big_omega,
            tau,
            lpf,
        }
    }
}

/// Sieves `[lo, hi]` with the default window budget.
pub fn sieve_window(lo: u64, hi: u64) -> Result<FactorWindow> {
    if lo > hi {
        return invalid(format!("inverted range [{lo}, {hi}]"));
    }
    Sieve::new(hi).window(lo, hi)
}

/// True iff every prime factor of `n` is at most `y`. `n = 1` is smooth for
/// every `y`.
pub fn is_smooth(window: &FactorWindow, n: u64, y: f64) -> Result<bool> {
    if y.is_nan() || y < 2.0 {
        return invalid(format!("smoothness bound y = {y} must be at least 2"));
    }
    let e = window.entry(n).ok_or_else(|| {
        LabError::InvalidInput(format!(
            "{n} lies outside the window [{}, {}]",
            window.lo, window.hi
        ))
    })?;
    Ok((e.lpf as f64) <= y)
}

/// Prime factorization `n = prod p^e`, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Exponent of `p` in `n`.
    pub fn nu(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn tau(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    pub fn largest_prime(&self) -> u64 {
        self.factors.last().map_or(1, |&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn entry(&self) -> Entry {
        Entry {
            omega: self.omega() as u8,
            big_omega: self.big_omega() as u8,
            tau: self.tau() as u32,
            lpf: self.largest_prime(),
        }
    }
}

/// Trial-division factorization; the ground truth the sieve is tested against.
pub fn factor(n: u64) -> Result<Factorization> {
    if n == 0 {
        return invalid("cannot factor 0");
    }
    let mut factors = Vec::new();
    let mut m = n;
    let mut d = 2u64;
    while d.saturating_mul(d) <= m {
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(Factorization { n, factors })
}
