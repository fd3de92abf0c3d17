//! Prime sums and series constants with rigorous truncation bounds.
//!
//! Every truncated sum over primes `p <= P` is reported together with a
//! bound on the omitted tail. The bounds come from comparing each omitted
//! term with `c / (m (m - 1))` or `c / (m - 1)^2` summed over all integers
//! `m > P`, so they are overestimates and never heuristic.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, LabError, Result};
use crate::fixed::Fixed;
use crate::sieve::{primes_up_to, sieve_window};

/// Euler–Mascheroni constant (30 digits, OEIS A001620).
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;
/// zeta(2) = pi^2 / 6 (30 digits, OEIS A013661).
pub const ZETA_2: f64 = 1.644_934_066_848_226_436_472_415_166_646;

/// Published four-digit values of the shifts used to normalize the `omega`
/// and `Omega` equality densities. Computed values come from [`constant`].
pub const B5: f64 = -1.3834;
pub const B6: f64 = 2.1398;

/// Smallest truncation point accepted by [`constant`].
pub const MIN_P_MAX: u64 = 1_000;

/// Which prime sum or product a [`PrimeSumResult`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SumKind {
    /// Meissel–Mertens constant.
    B1,
    B2,
    B3,
    B4,
    B5,
    B6,
    /// sum 1/p^2
    InvPSq,
    /// sum 1/(p-1)^2
    InvPm1Sq,
    /// Probability that tau(n) and tau(n+1) are both powers of two.
    CtauC1,
    /// Probability that both are three times a power of two.
    CtauC3,
}

impl SumKind {
    /// The eight kinds evaluated by [`constant`].
    pub const CONSTANTS: [SumKind; 8] = [
        SumKind::B1,
        SumKind::B2,
        SumKind::B3,
        SumKind::B4,
        SumKind::B5,
        SumKind::B6,
        SumKind::InvPSq,
        SumKind::InvPm1Sq,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SumKind::B1 => "B1",
            SumKind::B2 => "B2",
            SumKind::B3 => "B3",
            SumKind::B4 => "B4",
            SumKind::B5 => "B5",
            SumKind::B6 => "B6",
            SumKind::InvPSq => "INV_P_SQ",
            SumKind::InvPm1Sq => "INV_PM1_SQ",
            SumKind::CtauC1 => "CTAU_C1",
            SumKind::CtauC3 => "CTAU_C3",
        }
    }
}

impl fmt::Display for SumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SumKind {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        let all = SumKind::CONSTANTS
            .iter()
            .chain(&[SumKind::CtauC1, SumKind::CtauC3]);
        for k in all {
            if k.name().eq_ignore_ascii_case(s) {
                return Ok(*k);
            }
        }
        invalid(format!("unknown constant kind `{s}`"))
    }
}

/// A truncated prime sum (or product) with a bound on what was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimeSumResult {
    pub value: f64,
    pub p_max: u64,
    pub tail_bound: f64,
    pub kind: SumKind,
}

impl PrimeSumResult {
    /// True when `other` lies inside `value +- tail_bound`.
    pub fn brackets(&self, other: f64) -> bool {
        (other - self.value).abs() <= self.tail_bound
    }
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `ln(1 - 1/p) + 1/p`, accurate to a few ulps even for large `p`.
pub fn mertens_term(p: f64) -> f64 {
    let x = 1.0 / p;
    if p < 100.0 {
        return (-x).ln_1p() + x;
    }
    // -sum_{k>=2} x^k / k
    let mut acc = 0.0;
    let mut pow = x * x;
    let mut k = 2.0;
    while pow / k > 1e-20 * x * x {
        acc += pow / k;
        pow *= x;
        k += 1.0;
    }
    -acc
}

/// The raw truncated prime sums every constant is built from.
#[derive(Debug, Clone, Copy)]
pub struct PrimeSums {
    pub p_max: u64,
    /// sum ln(1 - 1/p) + 1/p
    pub mertens: f64,
    /// sum 1/(p(p-1))
    pub inv_p_pm1: f64,
    /// sum 1/p^2
    pub inv_p_sq: f64,
    /// sum (2p-1)/(p(p-1)^2)
    pub b4_term: f64,
    /// sum 1/(p-1)^2
    pub inv_pm1_sq: f64,
}

impl PrimeSums {
    pub fn new(p_max: u64) -> Result<Self> {
        if p_max < MIN_P_MAX {
            return invalid(format!("p_max = {p_max} is below {MIN_P_MAX}"));
        }
        let primes = primes_up_to(p_max);
        let mut s = [CompensatedSum::default(); 5];
        // Smallest terms first.
        for &p in primes.iter().rev() {
            let p = p as f64;
            let pm1 = p - 1.0;
            s[0].add(mertens_term(p));
            s[1].add(1.0 / (p * pm1));
            s[2].add(1.0 / (p * p));
            s[3].add((2.0 * p - 1.0) / (p * pm1 * pm1));
            s[4].add(1.0 / (pm1 * pm1));
        }
        Ok(PrimeSums {
            p_max,
            mertens: s[0].value(),
            inv_p_pm1: s[1].value(),
            inv_p_sq: s[2].value(),
            b4_term: s[3].value(),
            inv_pm1_sq: s[4].value(),
        })
    }

    pub fn result(&self, kind: SumKind) -> Result<PrimeSumResult> {
        let p = self.p_max as f64;
        // Omitted tails, each bounded over all integers m > P:
        //   |ln(1-1/m) + 1/m| <= 1/(2m(m-1))  -> 1/(2P)
        //   1/(m(m-1)), 1/m^2                 -> 1/P
        //   (2m-1)/(m(m-1)^2) <= 2/(m-1)^2     -> 2/(P-1)
        //   1/(m-1)^2                          -> 1/(P-1)
        let t_mertens = 1.0 / (2.0 * p);
        let t_recip = 1.0 / p;
        let t_b4 = 2.0 / (p - 1.0);
        let t_pm1 = 1.0 / (p - 1.0);
        let b1 = EULER_GAMMA + self.mertens;
        let b3 = b1 - ZETA_2 - self.inv_p_sq;
        let b4 = b1 - ZETA_2 + self.b4_term;
        let (value, tail_bound) = match kind {
            SumKind::B1 => (b1, t_mertens),
            SumKind::B2 => (b1 + self.inv_p_pm1, t_mertens + t_recip),
            SumKind::B3 => (b3, t_mertens + t_recip),
            SumKind::B4 => (b4, t_mertens + t_b4),
            // The sum over 1/p^2 cancels exactly at a common truncation point.
            SumKind::B5 => (b3 + self.inv_p_sq, t_mertens),
            SumKind::B6 => (b4 + self.inv_pm1_sq, t_mertens + t_b4 + t_pm1),
            SumKind::InvPSq => (self.inv_p_sq, t_recip),
            SumKind::InvPm1Sq => (self.inv_pm1_sq, t_pm1),
            SumKind::CtauC1 | SumKind::CtauC3 => {
                return invalid(format!(
                    "{kind} is a product over the pair model; use the ctau module"
                ))
            }
        };
        Ok(PrimeSumResult {
            value,
            p_max: self.p_max,
            tail_bound,
            kind,
        })
    }
}

/// Evaluates one of the eight prime-sum constants truncated at `p_max`.
pub fn constant(kind: SumKind, p_max: u64) -> Result<PrimeSumResult> {
    PrimeSums::new(p_max)?.result(kind)
}

/// Series over powers of one half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    /// sum_p 1/(2^p - 1) = sum_n omega(n)/2^n
    OmegaHalves,
    /// sum_n 1/(2^n - 1) = sum_n tau(n)/2^n
    ErdosBorwein,
    /// sum over prime powers q of 1/(2^q - 1) = sum_n Omega(n)/2^n
    BigOmegaHalves,
}

impl SeriesKind {
    pub const ALL: [SeriesKind; 3] = [
        SeriesKind::OmegaHalves,
        SeriesKind::ErdosBorwein,
        SeriesKind::BigOmegaHalves,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SeriesKind::OmegaHalves => "OMEGA_HALVES",
            SeriesKind::ErdosBorwein => "ERDOS_BORWEIN",
            SeriesKind::BigOmegaHalves => "BIG_OMEGA_HALVES",
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    pub n_terms: u64,
    pub tail_bound: f64,
    pub kind: SeriesKind,
}

impl SeriesResult {
    pub fn brackets(&self, other: f64) -> bool {
        (other - self.value).abs() <= self.tail_bound
    }
}

pub const MIN_SERIES_TERMS: u64 = 50;
const SERIES_FRAC_BITS: u32 = 160;

/// Sums `1/(2^q - 1)` over the index set of `kind` up to `n_terms`.
pub fn series(kind: SeriesKind, n_terms: u64) -> Result<SeriesResult> {
    if n_terms < MIN_SERIES_TERMS {
        return invalid(format!(
            "n_terms = {n_terms} is below {MIN_SERIES_TERMS}"
        ));
    }
    if n_terms > u32::MAX as u64 {
        return invalid("n_terms does not fit the exponent range");
    }
    let indices: Vec<u64> = match kind {
        SeriesKind::ErdosBorwein => (1..=n_terms).collect(),
        SeriesKind::OmegaHalves => primes_up_to(n_terms),
        SeriesKind::BigOmegaHalves => {
            let mut v = Vec::new();
            for p in primes_up_to(n_terms) {
                let mut q = p;
                while q <= n_terms {
                    v.push(q);
                    q = match q.checked_mul(p) {
                        Some(q) => q,
                        None => break,
                    };
                }
            }
            v
        }
    };
    let mut acc = Fixed::zero(SERIES_FRAC_BITS);
    for &q in &indices {
        if q > SERIES_FRAC_BITS as u64 {
            // Below one ulp; covered by the tail bound.
            continue;
        }
        acc += Fixed::recip_pow2_minus_one(q as u32, SERIES_FRAC_BITS);
    }
    // Omitted indices are distinct integers q > n_terms, and
    // 1/(2^q - 1) <= 2^(1-q); each kept term is rounded down by < 1 ulp.
    let rounding = indices.len() as f64 * acc.ulp();
    let tail_bound = crate::fixed::ldexp(1.0, 1 - n_terms as i64) + rounding;
    Ok(SeriesResult {
        value: acc.to_f64(),
        n_terms,
        tail_bound,
        kind,
    })
}

/// `|sum_{n<=N} omega(n)/2^n - sum_{p<=N} 1/(2^p - 1)|`, evaluated with
/// `N + 64` fractional bits.
pub fn check_series_identity(n: u64) -> Result<f64> {
    let (lhs, bits) = weighted_halves(n, |e| e.omega as u64)?;
    let mut rhs = Fixed::zero(bits);
    for p in primes_up_to(n) {
        rhs += Fixed::recip_pow2_minus_one(p as u32, bits);
    }
    Ok((lhs - rhs).abs().to_f64())
}

/// The divisor-function analogue:
/// `|sum_{n<=N} tau(n)/2^n - sum_{n<=N} 1/(2^n - 1)|`.
pub fn check_tau_series_identity(n: u64) -> Result<f64> {
    let (lhs, bits) = weighted_halves(n, |e| e.tau as u64)?;
    let mut rhs = Fixed::zero(bits);
    for m in 1..=n {
        rhs += Fixed::recip_pow2_minus_one(m as u32, bits);
    }
    Ok((lhs - rhs).abs().to_f64())
}

/// The Omega analogue, against the sum over prime powers.
pub fn check_big_omega_series_identity(n: u64) -> Result<f64> {
    let (lhs, bits) = weighted_halves(n, |e| e.big_omega as u64)?;
    let mut rhs = Fixed::zero(bits);
    for p in primes_up_to(n) {
        let mut q = p;
        while q <= n {
            rhs += Fixed::recip_pow2_minus_one(q as u32, bits);
            q *= p;
        }
    }
    Ok((lhs - rhs).abs().to_f64())
}

fn weighted_halves(
    n: u64,
    weight: impl Fn(&crate::sieve::Entry) -> u64,
) -> Result<(Fixed, u32)> {
    if n < MIN_SERIES_TERMS {
        return invalid(format!("N = {n} is below {MIN_SERIES_TERMS}"));
    }
    if n > 1 << 20 {
        return invalid(format!("N = {n} is too large for exact evaluation"));
    }
    let bits = n as u32 + 64;
    let w = sieve_window(1, n)?;
    let mut acc = Fixed::zero(bits);
    for (m, e) in w.iter() {
        acc += Fixed::scaled_pow2(weight(&e), m as u32, bits);
    }
    Ok((acc, bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_constants_at_ten_million() {
        let sums = PrimeSums::new(10_000_000).unwrap();
        let expect = [
            (SumKind::B1, 0.26149, 1e-4),
            (SumKind::B3, -1.83568, 1e-4),
            (SumKind::B6, 2.1398, 1e-3),
            (SumKind::InvPSq, 0.45224, 1e-4),
            (SumKind::InvPm1Sq, 1.37506, 1e-4),
        ];
        for (kind, want, tol) in expect {
            let r = sums.result(kind).unwrap();
            assert!((r.value - want).abs() <= tol, "{kind}: {}", r.value);
            assert!(r.tail_bound < 1e-6);
        }
    }

    #[test]
    fn cross_identities_hold_at_any_truncation() {
        for p_max in [1_000, 12_345, 100_000] {
            let s = PrimeSums::new(p_max).unwrap();
            let get = |k| s.result(k).unwrap().value;
            assert!((get(SumKind::B2) - get(SumKind::B1) - s.inv_p_pm1).abs() < 1e-14);
            assert!((get(SumKind::B5) - get(SumKind::B3) - s.inv_p_sq).abs() < 1e-14);
            assert!((get(SumKind::B6) - get(SumKind::B4) - s.inv_pm1_sq).abs() < 1e-14);
        }
    }

    #[test]
    fn tail_bounds_bracket_refinements() {
        let coarse = PrimeSums::new(10_000).unwrap();
        let fine = PrimeSums::new(1_000_000).unwrap();
        for kind in SumKind::CONSTANTS {
            let c = coarse.result(kind).unwrap();
            let f = fine.result(kind).unwrap();
            assert!(c.brackets(f.value), "{kind}");
            assert!(f.tail_bound < c.tail_bound);
        }
    }

    #[test]
    fn rejects_small_p_max_and_product_kinds() {
        assert!(constant(SumKind::B1, 999).is_err());
        assert!(constant(SumKind::CtauC1, 10_000).is_err());
        assert!("B7".parse::<SumKind>().is_err());
        assert_eq!("inv_p_sq".parse::<SumKind>().unwrap(), SumKind::InvPSq);
    }

    #[test]
    fn mertens_term_series_matches_direct_formula() {
        for p in [101.0f64, 997.0, 7919.0] {
            let direct = (-1.0 / p).ln_1p() + 1.0 / p;
            let series = mertens_term(p);
            assert!(((direct - series) / series).abs() < 1e-9);
        }
    }

    #[test]
    fn half_series_values() {
        let cases = [
            (SeriesKind::OmegaHalves, 0.5169428, 1e-7),
            (SeriesKind::ErdosBorwein, 1.606695, 1e-6),
            (SeriesKind::BigOmegaHalves, 0.5895033, 1e-6),
        ];
        for (kind, want, tol) in cases {
            let r = series(kind, 200).unwrap();
            assert!((r.value - want).abs() <= tol, "{kind}: {}", r.value);
            let coarse = series(kind, 60).unwrap();
            assert!(coarse.brackets(r.value));
        }
        assert!(series(SeriesKind::OmegaHalves, 49).is_err());
    }

    #[test]
    fn series_identities_hold_to_high_precision() {
        let d = check_series_identity(60).unwrap();
        assert!(d >= 0.0);
        assert!(d <= 2f64.powi(-50), "{d}");
        // Contract: (log log N + 2) N 2^-N.
        for n in [50u64, 60, 100, 200] {
            let nf = n as f64;
            let bound = (nf.ln().ln() + 2.0) * nf * 2f64.powi(-(n as i32));
            assert!(check_series_identity(n).unwrap() <= bound, "N = {n}");
        }
        assert!(check_tau_series_identity(60).unwrap() <= 2f64.powi(-45));
        assert!(check_big_omega_series_identity(60).unwrap() <= 2f64.powi(-50));
        assert!(check_series_identity(49).is_err());
    }

    #[test]
    fn partial_identity_matches_series_value() {
        // The truncated omega-weighted sum converges to the same constant.
        let r = series(SeriesKind::OmegaHalves, 200).unwrap();
        let (lhs, _) = weighted_halves(200, |e| e.omega as u64).unwrap();
        assert!((lhs.to_f64() - r.value).abs() < 1e-15);
    }
}
