//! Scans for barrier-type integers.
//!
//! `n` is an omega barrier when `omega(n - k) <= k` for every `1 <= k <= n - 1`.
//! Writing `m = n - k`, that is `m + omega(m) <= n` for all `m < n`, so one
//! running maximum decides every `n`. The divisor-count variant asks for
//! `tau(n - k) <= k + 2`, i.e. `m + tau(m) - 2 <= n`.

use std::fmt;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::sieve::{Entry, Sieve};

const CHUNK: u64 = 1 << 18;
const DIRECT_RECHECK: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BarrierKind {
    OmegaBarrier,
    TauKPlus2,
}

impl BarrierKind {
    pub fn name(&self) -> &'static str {
        match self {
            BarrierKind::OmegaBarrier => "OMEGA_BARRIER",
            BarrierKind::TauKPlus2 => "TAU_K_PLUS_2",
        }
    }

    /// The bound `m + f(m) - c` that must stay `<= n` for all `m < n`.
    fn reach(&self, m: u64, e: Entry) -> u64 {
        match self {
            BarrierKind::OmegaBarrier => m + e.omega as u64,
            BarrierKind::TauKPlus2 => m + e.tau as u64 - 2,
        }
    }

    /// Direct check of the defining inequalities for one `n`.
    pub fn holds_at(&self, n: u64, entries: impl Fn(u64) -> Entry) -> bool {
        (1..n).all(|k| {
            let e = entries(n - k);
            match self {
                BarrierKind::OmegaBarrier => e.omega as u64 <= k,
                BarrierKind::TauKPlus2 => e.tau as u64 <= k + 2,
            }
        })
    }
}

impl fmt::Display for BarrierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarrierReport {
    pub x: u64,
    pub kind: BarrierKind,
    pub barriers: Vec<u64>,
}

impl BarrierReport {
    /// Rechecks the report against a freshly sieved window: the listed set
    /// must equal the running-maximum set, and for `x <= 10^5` every member
    /// is also checked by the direct quadratic definition.
    pub fn verify(&self) -> Result<bool> {
        let w = Sieve::with_budget(self.x, self.x).window(1, self.x)?;
        let at = |m: u64| w.entry(m).expect("inside window");
        let members_ok =
            self.x > DIRECT_RECHECK || self.barriers.iter().all(|&n| self.kind.holds_at(n, at));
        let mut reach = 0u64;
        let mut found = Vec::new();
        for n in 1..=self.x {
            if reach <= n && (self.kind == BarrierKind::OmegaBarrier || n > 24) {
                found.push(n);
            }
            reach = reach.max(self.kind.reach(n, at(n)));
        }
        Ok(members_ok && found == self.barriers)
    }
}

/// All `n` in `[lo_report, x]` with running reach `<= n`, using
/// range-partitioned candidate lists merged through the prefix maximum.
fn scan(kind: BarrierKind, x: u64, lo_report: u64) -> Result<Vec<u64>> {
    let sieve = Sieve::with_budget(x, CHUNK);
    let starts: Vec<u64> = (1..=x).step_by(CHUNK as usize).collect();
    let parts = starts
        .into_par_iter()
        .map(|a| -> Result<(u64, Vec<(u64, u64)>)> {
            let b = x.min(a + CHUNK - 1);
            let w = sieve.window(a, b)?;
            let mut local = 0u64;
            let mut cands = Vec::new();
            for (n, e) in w.iter() {
                if local <= n && n >= lo_report {
                    cands.push((n, local));
                }
                local = local.max(kind.reach(n, e));
            }
            Ok((local, cands))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut prefix = 0u64;
    let mut out = Vec::new();
    for (local_max, cands) in parts {
        out.extend(
            cands
                .into_iter()
                .filter(|&(n, before)| prefix.max(before) <= n)
                .map(|(n, _)| n),
        );
        prefix = prefix.max(local_max);
    }
    Ok(out)
}

/// Every omega barrier `n <= x` (`n = 1` qualifies vacuously).
pub fn omega_barriers(x: u64) -> Result<BarrierReport> {
    if x < 2 {
        return invalid(format!("x = {x} is below 2"));
    }
    Ok(BarrierReport {
        x,
        kind: BarrierKind::OmegaBarrier,
        barriers: scan(BarrierKind::OmegaBarrier, x, 1)?,
    })
}

/// Every `24 < n <= x` with `tau(n - k) <= k + 2` for all `1 <= k <= n - 1`.
pub fn tau_k2_scan(x: u64) -> Result<BarrierReport> {
    if x < 25 {
        return invalid(format!("x = {x} is below 25"));
    }
    Ok(BarrierReport {
        x,
        kind: BarrierKind::TauKPlus2,
        barriers: scan(BarrierKind::TauKPlus2, x, 25)?,
    })
}

/// Result of [`linear_profile`]: the smallest `C` such that
/// `Omega(n + k) <= C k` for all `1 <= k <= K` at some `n <= x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearProfile {
    /// `best_c = num / den` exactly.
    pub num: u64,
    pub den: u64,
    /// Smallest `n` attaining the minimum.
    pub argmin: u64,
}

impl LinearProfile {
    pub fn best_c(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// `min_{n <= x} max_{1 <= k <= K} Omega(n + k) / k`, compared as exact
/// fractions.
pub fn linear_profile(x: u64, k_max: u64) -> Result<LinearProfile> {
    if x < 1000 {
        return invalid(format!("x = {x} is below 1000"));
    }
    if k_max < 2 {
        return invalid(format!("K = {k_max} is below 2"));
    }
    linear_profile_unchecked(x, k_max)
}

fn linear_profile_unchecked(x: u64, k_max: u64) -> Result<LinearProfile> {
    let starts: Vec<u64> = (1..=x).step_by(CHUNK as usize).collect();
    let sieve = Sieve::with_budget(x + k_max, CHUNK + k_max);
    let best = starts
        .into_par_iter()
        .map(|a| -> Result<LinearProfile> {
            let b = x.min(a + CHUNK - 1);
            let w = sieve.window(a + 1, b + k_max)?;
            let mut best: Option<LinearProfile> = None;
            for n in a..=b {
                // max over k of Omega(n + k) / k as a fraction.
                let (mut num, mut den) = (0u64, 1u64);
                for k in 1..=k_max {
                    let om = w.entry_at((n + k - a - 1) as usize).big_omega as u64;
                    if om * den > num * k {
                        (num, den) = (om, k);
                    }
                }
                let cand = LinearProfile { num, den, argmin: n };
                best = Some(match best {
                    Some(cur) if !better(&cand, &cur) => cur,
                    _ => cand,
                });
            }
            Ok(best.expect("nonempty chunk"))
        })
        .try_reduce_with(|p, q| Ok(if better(&q, &p) { q } else { p }))
        .expect("x >= 1")?;
    Ok(best)
}

/// Strictly smaller value, or equal value with a smaller witness.
fn better(a: &LinearProfile, b: &LinearProfile) -> bool {
    let (l, r) = (a.num * b.den, b.num * a.den);
    l < r || (l == r && a.argmin < b.argmin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::factor;

    fn entry(n: u64) -> Entry {
        factor(n).unwrap().entry()
    }

    fn oracle(kind: BarrierKind, x: u64, lo: u64) -> Vec<u64> {
        (lo..=x).filter(|&n| kind.holds_at(n, entry)).collect()
    }

    #[test]
    fn seven_is_not_a_barrier() {
        assert_eq!(entry(6).omega, 2);
        assert!(!BarrierKind::OmegaBarrier.holds_at(7, entry));
        assert!(!omega_barriers(10).unwrap().barriers.contains(&7));
    }

    #[test]
    fn omega_scanner_matches_oracle() {
        for x in [2u64, 10, 100, 1000] {
            let r = omega_barriers(x).unwrap();
            assert_eq!(r.barriers, oracle(BarrierKind::OmegaBarrier, x, 1), "x={x}");
            assert!(r.verify().unwrap());
            for &n in &r.barriers {
                if n > 1 {
                    assert!(entry(n - 1).omega <= 1);
                }
            }
        }
        assert!(omega_barriers(1).is_err());
    }

    #[test]
    fn twenty_four_satisfies_the_tau_property() {
        assert_eq!(entry(20).tau, 6);
        assert!(BarrierKind::TauKPlus2.holds_at(24, entry));
        assert!(!tau_k2_scan(100).unwrap().barriers.contains(&24));
    }

    #[test]
    fn tau_scanner_matches_oracle() {
        for x in [25u64, 100, 1000] {
            let r = tau_k2_scan(x).unwrap();
            assert_eq!(r.barriers, oracle(BarrierKind::TauKPlus2, x, 25));
            assert!(r.verify().unwrap());
        }
        assert!(tau_k2_scan(24).is_err());
    }

    #[test]
    fn partitions_merge_across_chunks() {
        let x = 2 * CHUNK + 1000;
        let r = omega_barriers(x).unwrap();
        assert!(r.verify().unwrap());
    }

    #[test]
    fn verify_rejects_tampered_report() {
        let mut r = omega_barriers(200).unwrap();
        r.barriers.push(7);
        r.barriers.sort();
        assert!(!r.verify().unwrap());
    }

    fn profile_oracle(x: u64, k_max: u64) -> (f64, u64) {
        let mut best = (f64::INFINITY, 0);
        for n in 1..=x {
            let v = (1..=k_max)
                .map(|k| entry(n + k).big_omega as f64 / k as f64)
                .fold(0.0, f64::max);
            if v < best.0 {
                best = (v, n);
            }
        }
        best
    }

    #[test]
    fn profile_matches_oracle() {
        for (x, k) in [(1000u64, 2u64), (1000, 5), (3000, 20)] {
            let p = linear_profile(x, k).unwrap();
            let (v, n) = profile_oracle(x, k);
            assert_eq!(p.best_c(), v, "x={x} K={k}");
            assert_eq!(p.argmin, n);
            assert!(p.best_c() >= 1.0 / k as f64);
        }
    }

    #[test]
    fn profile_is_nonincreasing_in_x() {
        let mut prev = f64::INFINITY;
        for x in [1000u64, 5000, 20_000, 300_000] {
            let c = linear_profile(x, 6).unwrap().best_c();
            assert!(c <= prev);
            prev = c;
        }
        assert!(linear_profile(999, 6).is_err());
        assert!(linear_profile(1000, 1).is_err());
    }
}
