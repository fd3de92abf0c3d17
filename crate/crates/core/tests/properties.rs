//! Cross-module invariants checked on random inputs.

use erdoslab_core::barrier::{omega_barriers, tau_k2_scan, BarrierKind};
use erdoslab_core::consecutive::{diff_histogram, impute_b, normalized_density, Func};
use erdoslab_core::constants::{PrimeSums, SumKind};
use erdoslab_core::correlation::{equidist_defect, mean_value, two_point_correlation, CorrelationQuery, MultFn};
use erdoslab_core::ctau::count_pow2_ratio;
use erdoslab_core::llt::{sum_pmf, BpVariant};
use erdoslab_core::sieve::{factor, primes_up_to, sieve_window, Entry, Sieve};
use erdoslab_core::smooth::{pair_density, smooth_density};
use proptest::prelude::*;

fn entries(lo: u64, hi: u64) -> Vec<(u64, Entry)> {
    sieve_window(lo, hi).unwrap().iter().collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn split_windows_agree(lo in 1u64..50_000, len in 2u64..5_000, cut in 0.0f64..1.0) {
        let hi = lo + len;
        let mid = lo + ((len as f64 * cut) as u64).min(len - 1);
        let sieve = Sieve::new(hi);
        let joined = sieve.window(lo, mid).unwrap().concat(sieve.window(mid + 1, hi).unwrap()).unwrap();
        let whole = entries(lo, hi);
        prop_assert_eq!(joined.iter().collect::<Vec<_>>(), whole);
    }

    #[test]
    fn multiplicative_on_coprime_pairs(a in 1u64..=1000, b in 1u64..=1000) {
        prop_assume!(gcd(a, b) == 1);
        let w = sieve_window(1, a * b).unwrap();
        let (ea, eb, eab) = (w.entry(a).unwrap(), w.entry(b).unwrap(), w.entry(a * b).unwrap());
        prop_assert_eq!(eab.tau, ea.tau * eb.tau);
        prop_assert_eq!(eab.omega, ea.omega + eb.omega);
        prop_assert_eq!(eab.big_omega, ea.big_omega + eb.big_omega);
    }

    #[test]
    fn normalization_and_imputation_invert(d in 1e-4f64..0.5, x in 1e3f64..1e12, c in 0.1f64..1.0) {
        let b = impute_b(d, x, c).unwrap();
        let back = normalized_density(d, x, b, c).unwrap();
        prop_assert!((back - 1.0).abs() < 1e-9, "{}", back);
    }

    #[test]
    fn pair_density_bounded_by_marginals(x in 1000u64..20_000, u in 1.0f64..5.0, v in 1.0f64..5.0) {
        let p = pair_density(x, u, v).unwrap();
        let su = smooth_density(x, u).unwrap();
        let sv = smooth_density(x, v).unwrap();
        prop_assert!(p <= su.min(sv) + 1.0 / x as f64);
        // The pair count is over n <= x, the v-marginal shifted by one.
        prop_assert!(p <= su);
    }

    #[test]
    fn correlation_swap_symmetry(h1 in -5i64..5, h2 in -5i64..5, w in 1u64..4) {
        prop_assume!(h1 != h2);
        let q = CorrelationQuery { n: 2000, w, b: 1, h1, h2, delta: 0.0 };
        let s = CorrelationQuery { h1: h2, h2: h1, ..q };
        let a = two_point_correlation(&MultFn::Liouville, &MultFn::Moebius, &q).unwrap();
        let b = two_point_correlation(&MultFn::Moebius, &MultFn::Liouville, &s).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn equidist_modulus_one_is_mean_gap(n in 1000u64..20_000, delta in -1.0f64..1.0) {
        for g in [MultFn::Liouville, MultFn::Moebius] {
            let r = equidist_defect(&g, n, delta, 1).unwrap();
            let m = mean_value(&g, n).unwrap();
            prop_assert!((r.defect - (m - delta).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn prime_sum_cross_identities(p_max in 1000u64..100_000) {
        let s = PrimeSums::new(p_max).unwrap();
        let v = |k| s.result(k).unwrap().value;
        let primes = primes_up_to(p_max);
        let recip = |f: &dyn Fn(f64) -> f64| primes.iter().rev().map(|&p| f(p as f64)).sum::<f64>();
        prop_assert!((v(SumKind::B2) - v(SumKind::B1) - recip(&|p| 1.0 / (p * (p - 1.0)))).abs() < 1e-13);
        prop_assert!((v(SumKind::B5) - v(SumKind::B3) - recip(&|p| 1.0 / (p * p))).abs() < 1e-13);
        prop_assert!((v(SumKind::B6) - v(SumKind::B4) - recip(&|p| 1.0 / ((p - 1.0) * (p - 1.0)))).abs() < 1e-13);
    }

    #[test]
    fn walk_is_normalized_and_symmetric(w in 2.0f64..50.0, span in 10.0f64..5000.0) {
        for v in [BpVariant::BigOmega, BpVariant::SmallOmega] {
            let pmf = sum_pmf(w, w + span, v, 64).unwrap();
            prop_assert!((pmf.total() + pmf.truncated_mass - 1.0).abs() < 1e-12);
            prop_assert!(pmf.asymmetry() < 1e-12);
        }
    }

    #[test]
    fn barrier_scanners_match_definition(x in 25u64..=1000) {
        let at = |n: u64| factor(n).unwrap().entry();
        let om: Vec<u64> = (1..=x).filter(|&n| BarrierKind::OmegaBarrier.holds_at(n, at)).collect();
        prop_assert_eq!(omega_barriers(x).unwrap().barriers, om);
        let tk: Vec<u64> = (25..=x).filter(|&n| BarrierKind::TauKPlus2.holds_at(n, at)).collect();
        prop_assert_eq!(tau_k2_scan(x).unwrap().barriers, tk);
    }
}

#[test]
fn tau_histogram_total_is_pow2_ratio_count() {
    for x in [1000u64, 54_321, 300_000] {
        let h = diff_histogram(Func::Tau, x).unwrap();
        assert_eq!(h.total(), count_pow2_ratio(1, x).unwrap());
    }
}

#[test]
fn refinement_stays_within_tail_bound() {
    let coarse = PrimeSums::new(1_000_000).unwrap();
    let fine = PrimeSums::new(10_000_000).unwrap();
    for k in SumKind::CONSTANTS {
        let (a, b) = (coarse.result(k).unwrap(), fine.result(k).unwrap());
        assert!((a.value - b.value).abs() <= a.tail_bound, "{k}");
    }
}

#[test]
fn builtin_functions_are_one_bounded() {
    let w = sieve_window(1, 100_000).unwrap();
    let fns = [
        MultFn::One,
        MultFn::Liouville,
        MultFn::Moebius,
        MultFn::ExpAlphaBigOmega(0.3),
        MultFn::ExpAlphaOmega(0.7),
        MultFn::SmoothBand { lo: 3, hi: 50 },
    ];
    for g in fns {
        assert!(g.eval_window(&w).iter().all(|z| z.norm() <= 1.0 + 1e-12), "{g}");
    }
}
