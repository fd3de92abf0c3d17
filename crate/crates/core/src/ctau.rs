//! The probability `c_tau` that `tau(n+1)/tau(n)` is a power of two.
//!
//! Three routes are provided:
//!
//! * a Monte Carlo simulation of the independent prime-pair model, where for
//!   each prime `p` the pair `(a0, a1)` mimics `(nu_p(n), nu_p(n+1))`;
//! * the exact lower-bound products for the events "both tau values are
//!   powers of two" and "both are three times powers of two";
//! * direct counts over sieved integers, together with the larger events
//!   `nu_q(tau(n)) = nu_q(tau(n+1))` for small odd primes `q`.
//!
//! The power-of-two event is always decided exactly, by comparing odd parts
//! of integers, never through floating-point logarithms.

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constants::{PrimeSumResult, SumKind};
use crate::error::{invalid, Result};
use crate::sieve::primes_up_to;
use crate::walk::{fold_pairs, fold_pairs_at};

/// Reference value of `c_tau` used to normalize densities.
pub const CTAU_REFERENCE: f64 = 0.4888;

/// Smallest truncation point for the model and the lower-bound products.
pub const MIN_P_MAX: u64 = 1_000;
/// Smallest Monte Carlo sample count.
pub const MIN_SAMPLES: u64 = 10_000;
/// Smallest `x` for the sieve-based estimates.
pub const MIN_X: u64 = 1_000;

/// Samples per independently seeded shard. Fixed, so results do not depend
/// on the number of worker threads.
const SHARD: u64 = 1 << 14;

/// One draw of the pair model at prime `p`; at most one of `a0`, `a1` is
/// nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSample {
    pub p: u64,
    pub a0: u32,
    pub a1: u32,
}

/// Inverse-CDF sampler for the pair model at one prime, driven by a single
/// uniform 64-bit word.
///
/// With `U = u / 2^64`: `U < 1/p` selects `(0, j)`, `1/p <= U < 2/p` selects
/// `(j, 0)`, anything else `(0, 0)`. Inside a side, `j >= J` exactly when the
/// offset is below `p^-J`, since `P(side, j >= J) = p^-J`. Thresholds that
/// round to zero are dropped, which caps `j` where its mass falls below
/// `2^-64` and leaves the residual on the largest kept `j`.
#[derive(Debug, Clone)]
pub struct PairSampler {
    p: u64,
    side: u64,
    nonzero_last: u64,
    /// floor(2^64 / p^J) for J = 2, 3, ... while nonzero.
    deeper: Vec<u64>,
}

impl PairSampler {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return invalid(format!("p = {p} is not a prime"));
        }
        let two64 = 1u128 << 64;
        let side = (two64 / p as u128) as u64;
        let nonzero_last = (2 * side as u128 - 1) as u64;
        let mut deeper = Vec::new();
        let mut pow = p as u128 * p as u128;
        while pow <= two64 {
            deeper.push((two64 / pow) as u64);
            pow = match pow.checked_mul(p as u128) {
                Some(v) => v,
                None => break,
            };
        }
        Ok(PairSampler {
            p,
            side,
            nonzero_last,
            deeper,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Maps a uniform word to `(a0, a1)`.
    #[inline]
    pub fn draw_from(&self, u: u64) -> (u32, u32) {
        if u > self.nonzero_last {
            return (0, 0);
        }
        self.draw_nonzero(u)
    }

    #[inline]
    fn draw_nonzero(&self, u: u64) -> (u32, u32) {
        let (offset, upper) = if u < self.side {
            (u, true)
        } else {
            (u - self.side, false)
        };
        let j = 1 + self.deeper.iter().take_while(|&&t| offset < t).count() as u32;
        if upper {
            (0, j)
        } else {
            (j, 0)
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> PairSample {
        let (a0, a1) = self.draw_from(rng.next_u64());
        PairSample { p: self.p, a0, a1 }
    }
}

/// Exact model probability of `(a0, a1)` at prime `p`.
pub fn pair_probability(p: u64, a0: u32, a1: u32) -> f64 {
    let p = p as f64;
    match (a0, a1) {
        (0, 0) => 1.0 - 2.0 / p,
        (0, j) | (j, 0) if a0 == 0 || a1 == 0 => (1.0 - 1.0 / p) * p.powi(-(j as i32)),
        _ => 0.0,
    }
}

/// Draws one pair at prime `p`.
pub fn sample_pair<R: RngCore + ?Sized>(p: u64, rng: &mut R) -> Result<PairSample> {
    Ok(PairSampler::new(p)?.sample(rng))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtauEstimate {
    pub point: f64,
    pub mc_stderr: f64,
    /// Bound on the probability that some prime above `p_max` contributes.
    pub tail_bound: f64,
    pub p_max: u64,
    pub samples: u64,
    pub seed: u64,
}

impl CtauEstimate {
    /// `point +- (k * stderr + tail_bound)`.
    pub fn interval(&self, k: f64) -> (f64, f64) {
        let r = k * self.mc_stderr + self.tail_bound;
        (self.point - r, self.point + r)
    }
}

/// Odd part of a product of small integers, exact at any size.
#[derive(Debug, Clone)]
enum OddProduct {
    Small(u128),
    Big(BigUint),
}

impl OddProduct {
    fn one() -> Self {
        OddProduct::Small(1)
    }

    fn mul_odd_part(&mut self, v: u64) {
        let odd = v >> v.trailing_zeros();
        if odd == 1 {
            return;
        }
        match self {
            OddProduct::Small(s) => match s.checked_mul(odd as u128) {
                Some(r) => *s = r,
                None => *self = OddProduct::Big(BigUint::from(*s) * odd),
            },
            OddProduct::Big(b) => *b *= odd,
        }
    }

    fn equals(&self, other: &OddProduct) -> bool {
        match (self, other) {
            (OddProduct::Small(a), OddProduct::Small(b)) => a == b,
            (OddProduct::Small(a), OddProduct::Big(b)) | (OddProduct::Big(b), OddProduct::Small(a)) => {
                BigUint::from(*a) == *b
            }
            (OddProduct::Big(a), OddProduct::Big(b)) => a == b,
        }
    }
}

/// Whether `prod (1 + a1) / prod (1 + a0)` over one model draw is a power
/// of two, with `draw(i, u)` returning the pair for the `i`-th prime.
fn sample_event<R, D>(rng: &mut R, n_primes: usize, draw: &D) -> bool
where
    R: RngCore,
    D: Fn(usize, u64) -> Option<(u32, u32)>,
{
    let mut num = OddProduct::one();
    let mut den = OddProduct::one();
    for i in 0..n_primes {
        if let Some((a0, a1)) = draw(i, rng.next_u64()) {
            num.mul_odd_part(1 + a1 as u64);
            den.mul_odd_part(1 + a0 as u64);
        }
    }
    num.equals(&den)
}

fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Runs the sharded simulation; `draw` returns `None` for a `(0, 0)` pair.
fn simulate<D>(n_primes: usize, samples: u64, seed: u64, draw: D) -> u64
where
    D: Fn(usize, u64) -> Option<(u32, u32)> + Sync,
{
    let shards = samples.div_ceil(SHARD);
    (0..shards)
        .into_par_iter()
        .map(|k| {
            let count = SHARD.min(samples - k * SHARD);
            let mut rng = shard_rng(seed, k);
            (0..count)
                .filter(|_| sample_event(&mut rng, n_primes, &draw))
                .count() as u64
        })
        .sum()
}

fn estimate(successes: u64, samples: u64, p_max: u64, seed: u64) -> CtauEstimate {
    let point = successes as f64 / samples as f64;
    CtauEstimate {
        point,
        mc_stderr: (point * (1.0 - point) / samples as f64).sqrt(),
        // sum_{p > P} 2/p^2 <= 2 / (P - 1)
        tail_bound: 2.0 / (p_max as f64 - 1.0),
        p_max,
        samples,
        seed,
    }
}

fn check_mc_args(p_max: u64, samples: u64) -> Result<()> {
    if p_max < MIN_P_MAX {
        return invalid(format!("p_max = {p_max} is below {MIN_P_MAX}"));
    }
    if samples < MIN_SAMPLES {
        return invalid(format!("samples = {samples} is below {MIN_SAMPLES}"));
    }
    Ok(())
}

/// Monte Carlo estimate of `c_tau` from the pair model over all `p <= p_max`.
/// Every prime is drawn independently for every sample.
pub fn ctau_monte_carlo(p_max: u64, samples: u64, seed: u64) -> Result<CtauEstimate> {
    check_mc_args(p_max, samples)?;
    let samplers: Vec<PairSampler> = primes_up_to(p_max)
        .into_iter()
        .map(PairSampler::new)
        .collect::<Result<_>>()?;
    let successes = simulate(samplers.len(), samples, seed, |i, u| {
        let s = &samplers[i];
        (u <= s.nonzero_last).then(|| s.draw_nonzero(u))
    });
    Ok(estimate(successes, samples, p_max, seed))
}

/// The same simulation with every pair forced to `(0, 0)`.
pub fn ctau_monte_carlo_degenerate(p_max: u64, samples: u64, seed: u64) -> Result<CtauEstimate> {
    check_mc_args(p_max, samples)?;
    let n = primes_up_to(p_max).len();
    let successes = simulate(n, samples, seed, |_, _| None);
    Ok(estimate(successes, samples, p_max, seed))
}

/// Per-prime probability that `1 + a0` and `1 + a1` are both powers of two:
/// `1 - 2/p^2 + sum_{j>=2} 2 (p^-(2^j - 1) - p^-(2^j))`.
pub fn both_pow2_factor(p: u64) -> f64 {
    let p = p as f64;
    let mut s = 1.0 - 2.0 / (p * p);
    let mut j = 2;
    loop {
        let e = (1u64 << j) as f64;
        let t = 2.0 * (p.powf(-(e - 1.0)) - p.powf(-e));
        s += t;
        if t.abs() < 1e-30 || j >= 62 {
            break;
        }
        j += 1;
    }
    s
}

/// Probability that `1 + a` is three times a power of two on a fixed side:
/// `sum_{j>=0} p^-(3*2^j - 1) - p^-(3*2^j)`.
pub fn three_pow2_side_mass(p: u64) -> f64 {
    let p = p as f64;
    let mut s = 0.0;
    let mut j = 0;
    loop {
        let e = 3.0 * (1u64 << j) as f64;
        let t = p.powf(-(e - 1.0)) - p.powf(-e);
        s += t;
        if t < 1e-30 || j >= 60 {
            break;
        }
        j += 1;
    }
    s
}

/// Lower bound `c_tau^(1)`: the product of [`both_pow2_factor`] over
/// `p <= p_max`. Every factor lies in `[1 - 2/p^2, 1]`, so the infinite
/// product lies in `[value (1 - 2/P), value]`.
pub fn ctau_lower_c1(p_max: u64) -> Result<PrimeSumResult> {
    if p_max < MIN_P_MAX {
        return invalid(format!("p_max = {p_max} is below {MIN_P_MAX}"));
    }
    let value: f64 = primes_up_to(p_max)
        .into_iter()
        .map(both_pow2_factor)
        .product();
    Ok(PrimeSumResult {
        value,
        p_max,
        tail_bound: value * 2.0 / p_max as f64,
        kind: SumKind::CtauC1,
    })
}

/// The next contribution `c_tau^(3)`: `c_tau^(1)` times the sum over ordered
/// pairs of distinct primes `p0 != p1` of `r(p0) r(p1)`, where
/// `r(p) = three_pow2_side_mass(p) / both_pow2_factor(p)`. The double sum is
/// evaluated as `S^2 - sum r^2` with `S = sum r`.
pub fn ctau_lower_c3(p_max: u64) -> Result<PrimeSumResult> {
    if p_max < MIN_P_MAX {
        return invalid(format!("p_max = {p_max} is below {MIN_P_MAX}"));
    }
    let c1 = ctau_lower_c1(p_max)?;
    let ratios: Vec<f64> = primes_up_to(p_max)
        .into_iter()
        .map(|p| three_pow2_side_mass(p) / both_pow2_factor(p))
        .collect();
    let s: f64 = ratios.iter().rev().sum();
    let s2: f64 = ratios.iter().rev().map(|r| r * r).sum();
    let pair_sum = s * s - s2;
    let value = c1.value * pair_sum;
    // r(p) <= 1/(p^2 - 2) <= 1/(p(p-1)), so the omitted part of S is <= 1/P.
    // Extending the range can raise the pair sum by at most 2 S dS + dS^2 and
    // lowers c1 by at most a factor (1 - 2/P).
    let ds = 1.0 / p_max as f64;
    let up = c1.value * (2.0 * s * ds + ds * ds);
    let down = c1.value * (2.0 / p_max as f64) * pair_sum;
    Ok(PrimeSumResult {
        value,
        p_max,
        tail_bound: up.max(down),
        kind: SumKind::CtauC3,
    })
}

/// Odd part of `v`.
#[inline]
pub fn odd_part(v: u64) -> u64 {
    if v == 0 {
        0
    } else {
        v >> v.trailing_zeros()
    }
}

/// True iff `a / b` is an integral power of two (possibly negative).
#[inline]
pub fn is_pow2_ratio(a: u64, b: u64) -> bool {
    odd_part(a) == odd_part(b)
}

/// Exponent of the prime `q` in `v`.
#[inline]
pub fn nu(q: u64, mut v: u64) -> u32 {
    let mut e = 0;
    while v != 0 && v % q == 0 {
        v /= q;
        e += 1;
    }
    e
}

/// Fraction of `n <= x` with `tau(n+1)/tau(n)` a power of two.
pub fn ctau_empirical(x: u64) -> Result<f64> {
    if x < MIN_X {
        return invalid(format!("x = {x} is below {MIN_X}"));
    }
    Ok(count_pow2_ratio(1, x)? as f64 / x as f64)
}

/// Number of `n` in `[lo, hi]` with `tau(n+1)/tau(n)` a power of two.
pub fn count_pow2_ratio(lo: u64, hi: u64) -> Result<u64> {
    fold_pairs(
        lo,
        hi,
        || 0u64,
        |acc, _, a, b| *acc += is_pow2_ratio(a.tau as u64, b.tau as u64) as u64,
        |x, y| x + y,
    )
}

/// Fraction of `n <= x` with `nu_q(tau(n)) = nu_q(tau(n+1))` for every `q` in
/// `primes`. Each such event contains the power-of-two event, so these are
/// upper bounds for it, shrinking as the set grows.
pub fn nu_match_upper(x: u64, primes: &[u64]) -> Result<f64> {
    if x < MIN_X {
        return invalid(format!("x = {x} is below {MIN_X}"));
    }
    if primes.is_empty() {
        return invalid("the prime set is empty");
    }
    if primes.iter().any(|&q| q < 2) {
        return invalid("prime set contains a non-prime");
    }
    let count = fold_pairs(
        1,
        x,
        || 0u64,
        |acc, _, a, b| {
            let ok = primes
                .iter()
                .all(|&q| nu(q, a.tau as u64) == nu(q, b.tau as u64));
            *acc += ok as u64;
        },
        |x, y| x + y,
    )?;
    Ok(count as f64 / x as f64)
}

/// Counts behind every empirical curve of the `c_tau` figure, for `n <= x`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CtauCounts {
    pub x: u64,
    pub pow2_ratio: u64,
    pub nu3: u64,
    pub nu35: u64,
    pub nu357: u64,
    pub both_pow2: u64,
    pub both_pow2_or_3pow2: u64,
}

impl CtauCounts {
    fn merge(self, o: CtauCounts) -> CtauCounts {
        CtauCounts {
            x: self.x + o.x,
            pow2_ratio: self.pow2_ratio + o.pow2_ratio,
            nu3: self.nu3 + o.nu3,
            nu35: self.nu35 + o.nu35,
            nu357: self.nu357 + o.nu357,
            both_pow2: self.both_pow2 + o.both_pow2,
            both_pow2_or_3pow2: self.both_pow2_or_3pow2 + o.both_pow2_or_3pow2,
        }
    }

    fn visit(&mut self, ta: u64, tb: u64) {
        self.x += 1;
        let (oa, ob) = (odd_part(ta), odd_part(tb));
        self.pow2_ratio += (oa == ob) as u64;
        let m3 = nu(3, ta) == nu(3, tb);
        let m5 = m3 && nu(5, ta) == nu(5, tb);
        let m7 = m5 && nu(7, ta) == nu(7, tb);
        self.nu3 += m3 as u64;
        self.nu35 += m5 as u64;
        self.nu357 += m7 as u64;
        let both1 = oa == 1 && ob == 1;
        self.both_pow2 += both1 as u64;
        self.both_pow2_or_3pow2 += (both1 || (oa == 3 && ob == 3)) as u64;
    }

    /// `(name, count)` for each curve.
    pub fn series(&self) -> [(&'static str, u64); 6] {
        [
            ("pow2_ratio", self.pow2_ratio),
            ("nu_3", self.nu3),
            ("nu_3_5", self.nu35),
            ("nu_3_5_7", self.nu357),
            ("both_pow2", self.both_pow2),
            ("both_pow2_or_3pow2", self.both_pow2_or_3pow2),
        ]
    }
}

/// Cumulative [`CtauCounts`] at each checkpoint of an increasing grid.
pub fn ctau_scan(grid: &[u64]) -> Result<Vec<CtauCounts>> {
    fold_pairs_at(
        grid,
        CtauCounts::default,
        |acc, _, a, b| acc.visit(a.tau as u64, b.tau as u64),
        CtauCounts::merge,
    )
}
