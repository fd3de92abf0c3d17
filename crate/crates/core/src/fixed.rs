//! Binary fixed-point numbers with an explicit fractional bit budget.
//!
//! A value is stored as an arbitrary-size integer `raw` standing for
//! `raw * 2^-frac_bits`. Addition and subtraction are exact; the only
//! rounding happens when a quotient is formed, and it is always toward
//! negative infinity by at most one unit in the last place.

use std::ops::{Add, AddAssign, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixed {
    raw: BigInt,
    frac_bits: u32,
}

impl Fixed {
    pub fn zero(frac_bits: u32) -> Self {
        Fixed {
            raw: BigInt::zero(),
            frac_bits,
        }
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    /// `k * 2^-n`, exact whenever `n <= frac_bits`.
    pub fn scaled_pow2(k: u64, n: u32, frac_bits: u32) -> Self {
        let raw = if n <= frac_bits {
            BigInt::from(k) << (frac_bits - n) as usize
        } else {
            BigInt::from(k) >> (n - frac_bits) as usize
        };
        Fixed { raw, frac_bits }
    }

    /// `1 / (2^n - 1)` rounded down, for `n >= 1`.
    pub fn recip_pow2_minus_one(n: u32, frac_bits: u32) -> Self {
        assert!(n >= 1);
        let num = BigUint::one() << frac_bits as usize;
        let den = (BigUint::one() << n as usize) - BigUint::one();
        Fixed {
            raw: BigInt::from_biguint(Sign::Plus, num / den),
            frac_bits,
        }
    }

    pub fn abs(&self) -> Self {
        Fixed {
            raw: self.raw.abs(),
            frac_bits: self.frac_bits,
        }
    }

    /// One unit in the last place.
    pub fn ulp(&self) -> f64 {
        ldexp(1.0, -(self.frac_bits as i64))
    }

    /// Nearest `f64` (correct to within one f64 rounding).
    pub fn to_f64(&self) -> f64 {
        let bits = self.raw.bits();
        if bits == 0 {
            return 0.0;
        }
        // Keep the top 64 significant bits, then rescale.
        let shift = bits.saturating_sub(64);
        let top = (&self.raw.abs() >> shift as usize)
            .to_u64_digits()
            .1
            .first()
            .copied()
            .unwrap_or(0);
        let mag = ldexp(top as f64, shift as i64 - self.frac_bits as i64);
        if self.raw.is_negative() {
            -mag
        } else {
            mag
        }
    }

    fn check(&self, other: &Fixed) {
        assert_eq!(self.frac_bits, other.frac_bits, "mixed fixed-point scales");
    }
}

impl Add for Fixed {
    type Output = Fixed;
    fn add(mut self, rhs: Fixed) -> Fixed {
        self += rhs;
        self
    }
}

impl AddAssign for Fixed {
    fn add_assign(&mut self, rhs: Fixed) {
        self.check(&rhs);
        self.raw += rhs.raw;
    }
}

impl Sub for Fixed {
    type Output = Fixed;
    fn sub(self, rhs: Fixed) -> Fixed {
        self.check(&rhs);
        Fixed {
            raw: self.raw - rhs.raw,
            frac_bits: self.frac_bits,
        }
    }
}

/// `m * 2^e` without intermediate overflow or underflow.
pub fn ldexp(m: f64, e: i64) -> f64 {
    let mut v = m;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}
