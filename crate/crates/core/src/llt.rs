//! Exact distribution of a sum of independent prime-indexed steps, compared
//! with the Gaussian local limit.
//!
//! For each prime `p` the step `b` is symmetric around zero with
//! `P(b = 0) = 1 - 2/p`. In the big-omega variant `P(b = +-j) = (1 - 1/p) p^-j`
//! for every `j >= 1`; in the small-omega variant only `+-1` occur, each with
//! mass `1/p`.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, LabError, Result};
use crate::sieve::{for_each_prime_in, prime_count_estimate};

/// Total mass the support clipping of [`sum_pmf`] may discard.
///
/// Far below the `1e-10` ceiling so the clipped tail also leaves the second
/// moment intact to `1e-9`.
pub const CLIP_TOTAL: f64 = 1e-14;
/// Kernel entries beyond the point where the remaining tail is below this are
/// dropped and booked as truncated mass.
const KERNEL_TAIL: f64 = 1e-30;
/// Default cap on the number of primes one convolution may consume.
pub const DEFAULT_MAX_PRIMES: u64 = 200_000_000;

/// A finitely supported distribution on the integers, plus the mass that was
/// dropped to keep it finite.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegerPMF {
    pub offset: i64,
    pub mass: Vec<f64>,
    pub truncated_mass: f64,
}

impl IntegerPMF {
    pub fn point(m: i64) -> Self {
        IntegerPMF {
            offset: m,
            mass: vec![1.0],
            truncated_mass: 0.0,
        }
    }

    pub fn min(&self) -> i64 {
        self.offset
    }

    pub fn max(&self) -> i64 {
        self.offset + self.mass.len() as i64 - 1
    }

    pub fn at(&self, m: i64) -> f64 {
        let i = m - self.offset;
        if i < 0 || i >= self.mass.len() as i64 {
            0.0
        } else {
            self.mass[i as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .map(move |(i, &q)| (self.offset + i as i64, q))
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Mean of the retained mass.
    pub fn mean(&self) -> f64 {
        self.iter().map(|(m, q)| m as f64 * q).sum()
    }

    /// Second central moment of the retained mass.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.iter()
            .map(|(m, q)| {
                let d = m as f64 - mu;
                d * d * q
            })
            .sum()
    }

    /// Largest `|P(m) - P(-m)|`.
    pub fn asymmetry(&self) -> f64 {
        let r = self.max().max(-self.min());
        (0..=r)
            .map(|m| (self.at(m) - self.at(-m)).abs())
            .fold(0.0, f64::max)
    }

    /// Distribution of the sum of independent draws from `self` and `other`.
    pub fn convolve(&self, other: &IntegerPMF) -> IntegerPMF {
        let mut mass = vec![0.0; self.mass.len() + other.mass.len() - 1];
        for (i, &a) in self.mass.iter().enumerate() {
            for (j, &b) in other.mass.iter().enumerate() {
                mass[i + j] += a * b;
            }
        }
        IntegerPMF {
            offset: self.offset + other.offset,
            mass,
            truncated_mass: combine_truncated(self.truncated_mass, other.truncated_mass),
        }
    }
}

fn combine_truncated(a: f64, b: f64) -> f64 {
    a + b - a * b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BpVariant {
    BigOmega,
    SmallOmega,
}

impl BpVariant {
    pub fn name(&self) -> &'static str {
        match self {
            BpVariant::BigOmega => "BIG_OMEGA",
            BpVariant::SmallOmega => "SMALL_OMEGA",
        }
    }

    /// `Var(b)` at prime `p`.
    pub fn step_variance(&self, p: u64) -> f64 {
        let p = p as f64;
        match self {
            BpVariant::BigOmega => 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0)),
            BpVariant::SmallOmega => 2.0 / p,
        }
    }
}

impl fmt::Display for BpVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BpVariant {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "BIG_OMEGA" | "BIGOMEGA" => Ok(BpVariant::BigOmega),
            "SMALL_OMEGA" | "SMALLOMEGA" | "OMEGA" => Ok(BpVariant::SmallOmega),
            _ => invalid(format!("unknown variant {s:?}")),
        }
    }
}

/// Kernel `k[j] = P(b = j) = P(b = -j)` for `j = 0..=J`, and the dropped mass.
fn half_kernel(p: u64, variant: BpVariant, j_max: u32, tail_cut: f64) -> (Vec<f64>, f64) {
    let pf = p as f64;
    let mut k = vec![1.0 - 2.0 / pf];
    match variant {
        BpVariant::SmallOmega => {
            k.push(1.0 / pf);
            (k, 0.0)
        }
        BpVariant::BigOmega => {
            let side = 1.0 - 1.0 / pf;
            let mut pj = 1.0;
            let mut j = 0;
            loop {
                j += 1;
                pj /= pf;
                k.push(side * pj);
                // Both tails beyond j: 2 sum_{i>j} (1 - 1/p) p^-i = 2 p^-(j+1).
                let rest = 2.0 * pj / pf;
                if j >= j_max || rest < tail_cut {
                    return (k, rest);
                }
            }
        }
    }
}

/// The step distribution at prime `p`, with `|b| > j_max` booked as truncated.
pub fn bp_pmf(p: u64, variant: BpVariant, j_max: u32) -> Result<IntegerPMF> {
    if p < 2 {
        return invalid(format!("p = {p} is not a prime"));
    }
    if j_max < 1 {
        return invalid("j_max must be at least 1");
    }
    let (k, truncated_mass) = half_kernel(p, variant, j_max, 0.0);
    let r = k.len() - 1;
    let mut mass = vec![0.0; 2 * r + 1];
    for (j, &q) in k.iter().enumerate() {
        mass[r + j] = q;
        mass[r - j] = q;
    }
    Ok(IntegerPMF {
        offset: -(r as i64),
        mass,
        truncated_mass,
    })
}

/// Convolves a symmetric kernel into `mass` (held in `out`'s buffer).
///
/// Written as `sum_j k_j (a[m-j] + a[m+j]) + k0 a[m]` so that symmetric input
/// gives bit-for-bit symmetric output. The small terms are summed first,
/// from the far tail inward: added one by one onto `k0 a[m]` they would fall
/// below its rounding unit for large `p` and be lost, always in the same
/// direction.
fn convolve_symmetric(a: &[f64], k: &[f64], out: &mut Vec<f64>) {
    let r = k.len() - 1;
    let n = a.len();
    out.clear();
    out.resize(n + 2 * r, 0.0);
    let get = |i: isize| -> f64 {
        if i < 0 || i >= n as isize {
            0.0
        } else {
            a[i as usize]
        }
    };
    for (idx, slot) in out.iter_mut().enumerate() {
        // out[idx] stands for a-index idx - r.
        let c = idx as isize - r as isize;
        let mut s = 0.0;
        for j in (1..=r).rev() {
            s += k[j] * (get(c - j as isize) + get(c + j as isize));
        }
        *slot = s + k[0] * get(c);
    }
}

/// Exact distribution of `sum_{w < p <= z} b_p`, convolving in increasing `p`.
///
/// After each step the two outermost entries are removed in pairs while the
/// running clipped mass stays below a per-prime share of [`CLIP_TOTAL`].
pub fn sum_pmf(w: f64, z: f64, variant: BpVariant, j_max: u32) -> Result<IntegerPMF> {
    sum_pmf_with_budget(w, z, variant, j_max, DEFAULT_MAX_PRIMES)
}

pub fn sum_pmf_with_budget(
    w: f64,
    z: f64,
    variant: BpVariant,
    j_max: u32,
    max_primes: u64,
) -> Result<IntegerPMF> {
    if !(w >= 2.0 && z > w && z.is_finite()) {
        return invalid(format!("need 2 <= w < z, got w = {w}, z = {z}"));
    }
    if j_max < 1 {
        return invalid("j_max must be at least 1");
    }
    let lo = w.floor() as u64 + 1;
    let hi = z.floor() as u64;
    let est = prime_count_estimate(hi) as u64;
    if est > max_primes {
        return Err(LabError::Budget {
            what: "prime convolution",
            required: est,
            budget: max_primes,
            unit: "primes",
        });
    }
    let share = CLIP_TOTAL / est.max(1) as f64;
    let mut mass = vec![1.0];
    let mut buf = Vec::new();
    let mut offset = 0i64;
    let mut truncated = 0.0;
    let mut clipped = 0.0;
    let mut steps = 0u64;
    for_each_prime_in(lo, hi, |p| {
        let (k, cut) = half_kernel(p, variant, j_max, KERNEL_TAIL);
        convolve_symmetric(&mass, &k, &mut buf);
        std::mem::swap(&mut mass, &mut buf);
        offset -= (k.len() - 1) as i64;
        truncated = combine_truncated(truncated, cut);
        steps += 1;
        let allowed = share * steps as f64;
        let (mut a, mut b) = (0, mass.len());
        while b - a > 2 {
            let edge = mass[a] + mass[b - 1];
            if clipped + edge > allowed {
                break;
            }
            clipped += edge;
            truncated += edge;
            a += 1;
            b -= 1;
        }
        if a > 0 {
            mass.copy_within(a..b, 0);
            mass.truncate(b - a);
            offset += a as i64;
        }
    });
    Ok(IntegerPMF {
        offset,
        mass,
        truncated_mass: truncated,
    })
}

/// `e^{-m^2/(4L)} / (2 sqrt(pi L))`.
pub fn gaussian_local(m: i64, l: f64) -> f64 {
    assert!(l > 0.0, "L must be positive");
    let m = m as f64;
    (-m * m / (4.0 * l)).exp() / (2.0 * (std::f64::consts::PI * l).sqrt())
}

/// Choice of the scale `L` in the Gaussian comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GaussianScale {
    /// Half the exact variance of the computed distribution.
    #[default]
    HalfVariance,
    /// `ln ln z`.
    LogLog,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LltDeviation {
    /// `sup_m |P(m) - gaussian_local(m, L)|` over the support.
    pub deviation: f64,
    pub l: f64,
    /// Gaussian peak `1 / (2 sqrt(pi L))`.
    pub peak: f64,
    /// `|P(0) - peak| / peak`.
    pub center_relative: f64,
}

pub fn deviation_of(pmf: &IntegerPMF, l: f64) -> Result<LltDeviation> {
    if !(l > 0.0) {
        return invalid(format!("L = {l} must be positive"));
    }
    let deviation = pmf
        .iter()
        .map(|(m, q)| (q - gaussian_local(m, l)).abs())
        .fold(0.0, f64::max);
    let peak = gaussian_local(0, l);
    Ok(LltDeviation {
        deviation,
        l,
        peak,
        center_relative: (pmf.at(0) - peak).abs() / peak,
    })
}

/// Compares [`sum_pmf`] with the Gaussian local limit.
pub fn llt_deviation(
    w: f64,
    z: f64,
    variant: BpVariant,
    scale: GaussianScale,
) -> Result<(IntegerPMF, LltDeviation)> {
    let pmf = sum_pmf(w, z, variant, 64)?;
    let l = match scale {
        GaussianScale::HalfVariance => pmf.variance() / 2.0,
        GaussianScale::LogLog => z.ln().ln(),
    };
    let dev = deviation_of(&pmf, l)?;
    Ok((pmf, dev))
}

/// `sum_{w < p <= z} Var(b_p)` from the closed form of each step.
pub fn termwise_variance(w: f64, z: f64, variant: BpVariant) -> f64 {
    let mut terms = Vec::new();
    for_each_prime_in(w.floor() as u64 + 1, z.floor() as u64, |p| {
        terms.push(variant.step_variance(p))
    });
    terms.iter().rev().sum()
}
