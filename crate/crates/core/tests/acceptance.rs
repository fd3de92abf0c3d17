//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test -p erdoslab-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use erdoslab_core::barrier::{linear_profile, omega_barriers, tau_k2_scan, BarrierKind};
use erdoslab_core::consecutive::{
    diff_histogram, equal_density, impute_b, moment_check, neighbor_covariance, Func,
};
use erdoslab_core::constants::{
    check_series_identity, series, PrimeSums, SeriesKind, SumKind,
};
use erdoslab_core::correlation::{equidist_defect, two_point_correlation, CorrelationQuery, MultFn};
use erdoslab_core::ctau::{
    ctau_empirical, ctau_lower_c1, ctau_lower_c3, ctau_monte_carlo, nu_match_upper, CtauEstimate,
    CTAU_REFERENCE,
};
use erdoslab_core::llt::{llt_deviation, termwise_variance, BpVariant, GaussianScale, IntegerPMF, LltDeviation};
use erdoslab_core::sieve::{factor, isqrt, sieve_window};
use erdoslab_core::smooth::{smooth_counts, SmoothCounts};
use erdoslab_core::Result;

const X: u64 = 10_000_000;
const SEED: u64 = 20_240_917;
const SMOOTH_US: [f64; 3] = [1.5, 2.0, 3.0];

struct Suite {
    failed: usize,
    total: usize,
}

impl Suite {
    fn check(&mut self, name: &str, f: impl FnOnce() -> Result<(bool, String)>) {
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        self.total += 1;
        if !ok {
            self.failed += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag}  {name}  [{detail}]  ({:.1}s)", start.elapsed().as_secs_f64());
    }
}

fn within(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

/// Lazily computed values shared by several criteria.
#[derive(Default)]
struct Shared {
    mc: Option<CtauEstimate>,
    empirical: Option<f64>,
    walks: Vec<(f64, IntegerPMF, LltDeviation)>,
    smooth: Option<SmoothCounts>,
}

impl Shared {
    fn mc(&mut self) -> Result<CtauEstimate> {
        if self.mc.is_none() {
            self.mc = Some(ctau_monte_carlo(100_000, 1_000_000, SEED)?);
        }
        Ok(self.mc.unwrap())
    }

    fn empirical(&mut self) -> Result<f64> {
        if self.empirical.is_none() {
            self.empirical = Some(ctau_empirical(X)?);
        }
        Ok(self.empirical.unwrap())
    }

    fn walks(&mut self) -> Result<&[(f64, IntegerPMF, LltDeviation)]> {
        if self.walks.is_empty() {
            for z in [1e4, 1e6, 1e8] {
                let (pmf, dev) = llt_deviation(2.0, z, BpVariant::BigOmega, GaussianScale::HalfVariance)?;
                self.walks.push((z, pmf, dev));
            }
        }
        Ok(&self.walks)
    }

    fn smooth(&mut self) -> Result<&SmoothCounts> {
        if self.smooth.is_none() {
            self.smooth = Some(smooth_counts(X, &SMOOTH_US, &SMOOTH_US)?);
        }
        Ok(self.smooth.as_ref().unwrap())
    }
}

/// Squarefree flags for `1..=x` from crossing out multiples of `p^2`.
fn squarefree_table(x: u64) -> Vec<bool> {
    let mut sf = vec![true; x as usize + 1];
    let r = isqrt(x);
    let mut composite = vec![false; r as usize + 1];
    for p in 2..=r {
        if composite[p as usize] {
            continue;
        }
        for q in (p * p..=r).step_by(p as usize) {
            composite[q as usize] = true;
        }
        for m in (p * p..=x).step_by((p * p) as usize) {
            sf[m as usize] = false;
        }
    }
    sf
}

fn main() -> ExitCode {
    let mut s = Suite { failed: 0, total: 0 };
    let mut sh = Shared::default();

    // Prime-sum constants.
    let sums = PrimeSums::new(X);
    let published = [
        (SumKind::B1, 0.26149),
        (SumKind::B2, 1.03465),
        (SumKind::B3, -1.83568),
        (SumKind::B4, 0.76478),
        (SumKind::B5, -1.3834),
        (SumKind::B6, 2.1398),
    ];
    s.check("constants B1..B6 at p_max=1e7 within 1e-3", || {
        let sums = sums.clone()?;
        let mut ok = true;
        let mut out = Vec::new();
        for (k, want) in published {
            let v = sums.result(k)?.value;
            ok &= within(v, want, 1e-3);
            out.push(format!("{k}={v:.6}"));
        }
        Ok((ok, out.join(" ")))
    });
    s.check("prime sums 1/p^2 and 1/(p-1)^2 within 1e-4", || {
        let sums = sums.clone()?;
        let a = sums.result(SumKind::InvPSq)?.value;
        let b = sums.result(SumKind::InvPm1Sq)?.value;
        Ok((within(a, 0.45224, 1e-4) && within(b, 1.37506, 1e-4), format!("{a:.6} {b:.6}")))
    });

    // High-precision series.
    s.check("series values within 1e-6", || {
        let want = [0.5169428, 1.606695, 0.5895033];
        let mut ok = true;
        let mut out = Vec::new();
        for (k, w) in SeriesKind::ALL.iter().zip(want) {
            let v = series(*k, 200)?.value;
            ok &= within(v, w, 1e-6);
            out.push(format!("{}={v:.8}", k.name()));
        }
        Ok((ok, out.join(" ")))
    });
    s.check("series identity at N=60 within 2^-50", || {
        let d = check_series_identity(60)?;
        Ok((d <= 2f64.powi(-50), format!("discrepancy {d:e}")))
    });

    // Tau-equality density.
    s.check("c_tau Monte Carlo (p_max=1e5, 1e6 samples) within 0.005 and 3 stderr + tail of 0.4888", || {
        let e = sh.mc()?;
        let (lo, hi) = e.interval(3.0);
        let ok = within(e.point, CTAU_REFERENCE, 0.005) && lo <= CTAU_REFERENCE && CTAU_REFERENCE <= hi;
        Ok((ok, format!("{:.5} +- {:.5} (tail {:.1e})", e.point, e.mc_stderr, e.tail_bound)))
    });
    s.check("c_tau lower bound c1 = 0.44446 +- 1e-4", || {
        let v = ctau_lower_c1(X)?.value;
        Ok((within(v, 0.44446, 1e-4), format!("{v:.6}")))
    });
    s.check("c_tau lower bound c3 = 0.04358 +- 1e-3", || {
        let v = ctau_lower_c3(10_000)?.value;
        Ok((within(v, 0.04358, 1e-3), format!("{v:.6}")))
    });
    s.check("c_tau empirical density at x=1e7 within 0.01 of 0.4888", || {
        let v = sh.empirical()?;
        Ok((within(v, CTAU_REFERENCE, 0.01), format!("{v:.6}")))
    });
    s.check("c_tau Monte Carlo vs empirical within 0.02", || {
        let (m, e) = (sh.mc()?.point, sh.empirical()?);
        Ok((within(m, e, 0.02), format!("|{m:.5} - {e:.5}|")))
    });
    s.check("c_tau ordering: c1 <= c1 + c3 <= estimates <= nu upper bounds", || {
        let c1 = ctau_lower_c1(X)?.value;
        let c13 = c1 + ctau_lower_c3(X)?.value;
        let (m, e) = (sh.mc()?.point, sh.empirical()?);
        let mut ok = c1 <= c13 && c13 <= m.min(e);
        let mut out = vec![format!("{c1:.5} <= {c13:.5} <= {:.5}", m.min(e))];
        for set in [&[3u64][..], &[3, 5], &[3, 5, 7]] {
            let u = nu_match_upper(X, set)?;
            ok &= m.max(e) <= u;
            out.push(format!("nu{set:?}={u:.5}"));
        }
        Ok((ok, out.join(" ")))
    });

    // Sieve.
    s.check("sieve equals trial division for all n <= 1e5", || {
        let w = sieve_window(1, 100_000)?;
        let bad = w.iter().filter(|&(n, e)| factor(n).map(|f| f.entry() != e).unwrap_or(true)).count();
        Ok((bad == 0, format!("{bad} mismatches")))
    });
    s.check("2^omega <= tau <= 2^Omega with equality iff squarefree, n <= 1e7", || {
        let sf = squarefree_table(X);
        let w = sieve_window(1, X)?;
        let bad = w
            .iter()
            .filter(|&(n, e)| {
                let (lo, hi, t) = (1u64 << e.omega, 1u64 << e.big_omega, e.tau as u64);
                let chain = lo <= t && t <= hi;
                let eq = sf[n as usize];
                !(chain && (t == lo) == eq && (t == hi) == eq && e.tau_bound_holds())
            })
            .count();
        Ok((bad == 0, format!("{bad} violations")))
    });

    // Local limit of the prime-indexed walk.
    s.check("walk normalization and symmetry within 1e-12 (z = 1e4, 1e6, 1e8)", || {
        let mut worst = 0f64;
        for (_, pmf, _) in sh.walks()? {
            worst = worst
                .max((pmf.total() + pmf.truncated_mass - 1.0).abs())
                .max(pmf.asymmetry());
        }
        Ok((worst <= 1e-12, format!("worst {worst:e}")))
    });
    s.check("walk variance equals the termwise sum within 1e-9", || {
        let mut worst = 0f64;
        for (z, pmf, _) in sh.walks()? {
            worst = worst.max((pmf.variance() - termwise_variance(2.0, *z, BpVariant::BigOmega)).abs());
        }
        Ok((worst <= 1e-9, format!("worst {worst:e}")))
    });
    s.check("walk sup deviation at z=1e8 below 10% of the Gaussian peak", || {
        let (_, _, d) = &sh.walks()?[2];
        Ok((d.deviation < 0.1 * d.peak, format!("{:.4} of peak", d.deviation / d.peak)))
    });
    s.check("walk deviation decreasing over z = 1e4, 1e6, 1e8", || {
        let r: Vec<f64> = sh.walks()?.iter().map(|(_, _, d)| d.deviation / d.peak).collect();
        let c: Vec<f64> = sh.walks()?.iter().map(|(_, _, d)| d.center_relative).collect();
        let ok = r.windows(2).all(|p| p[1] < p[0]) && c.windows(2).all(|p| p[1] < p[0]);
        Ok((ok, format!("sup {r:.4?} center {c:.4?}")))
    });

    // Consecutive values.
    s.check("moment check at 1e7 within (0.05, 0.05, 0.25, 0.25) of B1..B4", || {
        let m = moment_check(X)?.as_array();
        let want = [0.26149, 1.03465, -1.83568, 0.76478];
        let tol = [0.05, 0.05, 0.25, 0.25];
        let ok = (0..4).all(|i| within(m[i], want[i], tol[i]));
        Ok((ok, format!("{m:.4?}")))
    });
    s.check("neighbor covariances at 1e7 near -0.45224 (0.15) and -1.37506 (0.3)", || {
        let a = neighbor_covariance(Func::Omega, X)?;
        let b = neighbor_covariance(Func::BigOmega, X)?;
        Ok((within(a, -0.45224, 0.15) && within(b, -1.37506, 0.3), format!("{a:.4} {b:.4}")))
    });
    s.check("difference variance at 1e7 within 15% of 2(loglog x + B5|B6)", || {
        let mut ok = true;
        let mut out = Vec::new();
        for f in [Func::Omega, Func::BigOmega] {
            let h = diff_histogram(f, X)?;
            let (v, p) = (h.variance(), h.predicted_variance());
            ok &= (v - p).abs() <= 0.15 * p;
            out.push(format!("{f}: {v:.3} vs {p:.3}"));
        }
        Ok((ok, out.join(", ")))
    });
    s.check("imputed tau shift at 1e7 is negative", || {
        let b = impute_b(equal_density(Func::Tau, X)?, X as f64, CTAU_REFERENCE)?;
        Ok((b < 0.0, format!("{b:.4}")))
    });

    // Smooth pairs: one sieve pass for every (u, v).
    let rho2 = 1.0 - std::f64::consts::LN_2;
    s.check("smooth density at 1e7, u=2 within 0.01 of 1 - ln 2", || {
        let c = sh.smooth()?;
        let d = c.smooth_u(1);
        Ok((within(d, rho2, 0.01), format!("{d:.5} vs {rho2:.5}")))
    });
    s.check("smooth pair density at 1e7, u=v=2 within 0.01 of (1 - ln 2)^2", || {
        let c = sh.smooth()?;
        let d = c.pair_density(1, 1);
        Ok((within(d, rho2 * rho2, 0.01), format!("{d:.5} vs {:.5}", rho2 * rho2)))
    });
    s.check("smooth independence defect at 1e7 <= 0.01 for u, v in {1.5, 2, 3}", || {
        let c = sh.smooth()?;
        let mut worst = 0f64;
        for i in 0..SMOOTH_US.len() {
            for j in 0..SMOOTH_US.len() {
                worst = worst.max((c.pair_density(i, j) - c.smooth_u(i) * c.smooth_v(j)).abs());
            }
        }
        Ok((worst <= 0.01, format!("worst {worst:.5}")))
    });

    // Correlations.
    let n = 1_000_000;
    s.check("|two-point correlation of Liouville, shift 1| <= 0.01 at N=1e6", || {
        let q = CorrelationQuery { n, w: 1, b: 1, h1: 0, h2: 1, delta: 0.0 };
        let c = two_point_correlation(&MultFn::Liouville, &MultFn::Liouville, &q)?;
        Ok((c.norm() <= 0.01, format!("{:.5}", c.norm())))
    });
    s.check("Liouville equidistribution defect (q <= 10) <= 0.01 at N=1e6", || {
        let r = equidist_defect(&MultFn::Liouville, n, 0.0, 10)?;
        Ok((r.defect <= 0.01, format!("{:.5} at q={} a={}", r.defect, r.q, r.a)))
    });

    // Barriers.
    s.check("tau(n-k) <= k+2 scan empty on (24, 1e5]; n=24 satisfies it", || {
        let r = tau_k2_scan(100_000)?;
        let at = |m: u64| factor(m).unwrap().entry();
        let ok = r.barriers.is_empty() && BarrierKind::TauKPlus2.holds_at(24, at) && r.verify()?;
        Ok((ok, format!("{} found", r.barriers.len())))
    });
    s.check("omega barriers and linear profile equal quadratic oracles on x <= 1e3", || {
        let x = 1000;
        let at = |m: u64| factor(m).unwrap().entry();
        let oracle: Vec<u64> = (1..=x).filter(|&m| BarrierKind::OmegaBarrier.holds_at(m, at)).collect();
        let got = omega_barriers(x)?;
        let k = 20;
        let (mut best, mut arg) = (f64::INFINITY, 0);
        for m in 1..=x {
            let v = (1..=k).map(|j| at(m + j).big_omega as f64 / j as f64).fold(0.0, f64::max);
            if v < best {
                (best, arg) = (v, m);
            }
        }
        let p = linear_profile(x, k)?;
        let ok = got.barriers == oracle && got.verify()? && p.best_c() == best && p.argmin == arg;
        Ok((ok, format!("{} barriers, C={} at n={}", oracle.len(), p.best_c(), p.argmin)))
    });

    println!("{} of {} criteria passed", s.total - s.failed, s.total);
    if s.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
