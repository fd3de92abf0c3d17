//! Statistics of `f(n)` against `f(n + 1)` for `f` one of `omega`, `Omega`,
//! `tau`: equality densities and their normalizations, imputed constants,
//! difference histograms, and the first two moments with the neighbor
//! covariance.
//!
//! Throughout, `loglog x` is `ln ln x`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::constants::{B5, B6};
use crate::ctau::{odd_part, CTAU_REFERENCE};
use crate::error::{invalid, LabError, Result};
use crate::sieve::Entry;
use crate::walk::{fold_entries, fold_pairs, fold_pairs_at};

pub fn loglog(x: f64) -> f64 {
    x.ln().ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Omega,
    BigOmega,
    Tau,
}

impl Func {
    pub const ALL: [Func; 3] = [Func::Omega, Func::BigOmega, Func::Tau];

    pub fn name(&self) -> &'static str {
        match self {
            Func::Omega => "OMEGA",
            Func::BigOmega => "BIG_OMEGA",
            Func::Tau => "TAU",
        }
    }

    #[inline]
    pub fn eval(&self, e: Entry) -> u64 {
        match self {
            Func::Omega => e.omega as u64,
            Func::BigOmega => e.big_omega as u64,
            Func::Tau => e.tau as u64,
        }
    }

    fn index(&self) -> usize {
        *self as usize
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Func {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "omega" => Ok(Func::Omega),
            "bigomega" => Ok(Func::BigOmega),
            "tau" => Ok(Func::Tau),
            _ => invalid(format!("unknown function {s:?}")),
        }
    }
}

/// How a density is normalized: `density * 2 sqrt(pi (loglog x + b_shift)) / c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convention {
    pub b_shift: f64,
    pub c: f64,
}

impl Convention {
    /// `omega` uses `B5`, `Omega` uses `B6`, `tau` uses no shift and the
    /// reference value of `c_tau`.
    pub fn default_for(f: Func) -> Self {
        match f {
            Func::Omega => Convention { b_shift: B5, c: 1.0 },
            Func::BigOmega => Convention { b_shift: B6, c: 1.0 },
            Func::Tau => Convention {
                b_shift: 0.0,
                c: CTAU_REFERENCE,
            },
        }
    }
}

/// `density * 2 sqrt(pi (loglog x + b_shift)) / c`, or `None` where the root
/// argument is not positive.
pub fn normalized_density(density: f64, x: f64, b_shift: f64, c: f64) -> Option<f64> {
    let arg = loglog(x) + b_shift;
    if !(arg > 0.0) {
        return None;
    }
    Some(density * 2.0 * (std::f64::consts::PI * arg).sqrt() / c)
}

/// The `B` for which `c / (2 sqrt(pi (loglog x + B)))` equals `density`.
pub fn impute_b(density: f64, x: f64, c: f64) -> Result<f64> {
    if !(density > 0.0) {
        return invalid(format!("density = {density} must be positive"));
    }
    Ok(c * c / (4.0 * std::f64::consts::PI * density * density) - loglog(x))
}

/// Number of `n <= x` with `f(n) = f(n+1)`, for each function at once.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EqualCounts {
    pub x: u64,
    pub equal: [u64; 3],
}

impl EqualCounts {
    fn visit(&mut self, a: Entry, b: Entry) {
        self.x += 1;
        for f in Func::ALL {
            self.equal[f.index()] += (f.eval(a) == f.eval(b)) as u64;
        }
    }

    fn merge(self, o: EqualCounts) -> EqualCounts {
        EqualCounts {
            x: self.x + o.x,
            equal: [
                self.equal[0] + o.equal[0],
                self.equal[1] + o.equal[1],
                self.equal[2] + o.equal[2],
            ],
        }
    }

    pub fn count(&self, f: Func) -> u64 {
        self.equal[f.index()]
    }

    pub fn density(&self, f: Func) -> f64 {
        self.count(f) as f64 / self.x as f64
    }
}

fn equal_counts(x: u64) -> Result<EqualCounts> {
    fold_pairs(
        1,
        x,
        EqualCounts::default,
        |acc, _, a, b| acc.visit(a, b),
        EqualCounts::merge,
    )
}

/// `|{n <= x : f(n) = f(n+1)}| / x`.
pub fn equal_density(f: Func, x: u64) -> Result<f64> {
    if x < 10 {
        return invalid(format!("x = {x} is below 10"));
    }
    Ok(equal_counts(x)?.density(f))
}

/// Checkpoints: multiples of 10 up to 10^3, of 100 up to 10^4, then
/// `round(10^(4 + k/8))` up to `x_max`.
pub fn scan_grid(x_max: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = (1..=100u64).map(|k| 10 * k).collect();
    grid.extend((11..=100u64).map(|k| 100 * k));
    for k in 1.. {
        let g = 10f64.powf(4.0 + k as f64 / 8.0).round() as u64;
        if g > x_max {
            break;
        }
        grid.push(g);
    }
    grid.retain(|&g| g <= x_max);
    grid
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub x: u64,
    pub f: Func,
    pub density: f64,
    pub normalized: Option<f64>,
    pub imputed_b: Option<f64>,
    pub convention: Convention,
}

/// Equality densities on [`scan_grid`] for the requested functions, with the
/// default normalization conventions.
pub fn scan(funcs: &[Func], x_max: u64) -> Result<Vec<ScanRow>> {
    if x_max < 10 {
        return invalid(format!("x_max = {x_max} is below 10"));
    }
    let grid = scan_grid(x_max);
    let counts = fold_pairs_at(
        &grid,
        EqualCounts::default,
        |acc, _, a, b| acc.visit(a, b),
        EqualCounts::merge,
    )?;
    let mut rows = Vec::with_capacity(grid.len() * funcs.len());
    for c in &counts {
        for &f in funcs {
            let conv = Convention::default_for(f);
            let density = c.density(f);
            let xf = c.x as f64;
            rows.push(ScanRow {
                x: c.x,
                f,
                density,
                normalized: normalized_density(density, xf, conv.b_shift, conv.c),
                imputed_b: impute_b(density, xf, conv.c).ok(),
                convention: conv,
            });
        }
    }
    Ok(rows)
}

/// Histogram of `f(n+1) - f(n)` over `n <= x`. For `tau` only the `n` with
/// `tau(n+1)/tau(n)` a power of two are counted, at `m = log2` of the ratio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffHistogram {
    pub f: Func,
    pub x: u64,
    pub counts: BTreeMap<i64, u64>,
}

impl DiffHistogram {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn mean(&self) -> f64 {
        let (s, n) = self.sums();
        s as f64 / n as f64
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        let n = self.total() as i128;
        let (s, _) = self.sums();
        let s2: i128 = self
            .counts
            .iter()
            .map(|(&m, &c)| m as i128 * m as i128 * c as i128)
            .sum();
        (n * s2 - s * s) as f64 / (n * n) as f64
    }

    fn sums(&self) -> (i128, i128) {
        let s = self.counts.iter().map(|(&m, &c)| m as i128 * c as i128).sum();
        (s, self.total() as i128)
    }

    /// Variance predicted for large `x`: `2 (loglog x + B)` with `B5` for
    /// `omega`, `B6` for `Omega`, and no shift for `tau`.
    pub fn predicted_variance(&self) -> f64 {
        let shift = match self.f {
            Func::Omega => B5,
            Func::BigOmega => B6,
            Func::Tau => 0.0,
        };
        2.0 * (loglog(self.x as f64) + shift)
    }

    /// Expected count at `m` under a centered Gaussian with the predicted
    /// variance, scaled to the histogram total.
    pub fn gaussian_pred(&self, m: i64) -> Option<f64> {
        gaussian_count(self.total(), 0.0, self.predicted_variance(), m)
    }

    /// Same with the empirical mean and variance.
    pub fn gaussian_empirical(&self, m: i64) -> Option<f64> {
        gaussian_count(self.total(), self.mean(), self.variance(), m)
    }
}

fn gaussian_count(total: u64, mean: f64, var: f64, m: i64) -> Option<f64> {
    if !(var > 0.0) {
        return None;
    }
    let d = m as f64 - mean;
    Some(total as f64 * (-d * d / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt())
}

pub fn diff_histogram(f: Func, x: u64) -> Result<DiffHistogram> {
    if x < 1000 {
        return invalid(format!("x = {x} is below 1000"));
    }
    let counts = fold_pairs(
        1,
        x,
        BTreeMap::new,
        |acc: &mut BTreeMap<i64, u64>, _, a, b| {
            let (va, vb) = (f.eval(a), f.eval(b));
            let m = match f {
                Func::Tau => {
                    if odd_part(va) != odd_part(vb) {
                        return;
                    }
                    vb.trailing_zeros() as i64 - va.trailing_zeros() as i64
                }
                _ => vb as i64 - va as i64,
            };
            *acc.entry(m).or_insert(0) += 1;
        },
        |mut a, b| {
            for (m, c) in b {
                *a.entry(m).or_insert(0) += c;
            }
            a
        },
    )?;
    Ok(DiffHistogram { f, x, counts })
}

/// Deviations of the empirical moments over `n <= x` from `loglog x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCheck {
    pub mean_omega: f64,
    pub mean_big_omega: f64,
    pub var_omega: f64,
    pub var_big_omega: f64,
}

impl MomentCheck {
    pub fn as_array(&self) -> [f64; 4] {
        [
            self.mean_omega,
            self.mean_big_omega,
            self.var_omega,
            self.var_big_omega,
        ]
    }
}

/// Exact power sums of one statistic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Sums {
    n: u128,
    s: u128,
    s2: u128,
}

impl Sums {
    fn add(&mut self, v: u64) {
        self.n += 1;
        self.s += v as u128;
        self.s2 += v as u128 * v as u128;
    }

    fn merge(self, o: Sums) -> Sums {
        Sums {
            n: self.n + o.n,
            s: self.s + o.s,
            s2: self.s2 + o.s2,
        }
    }

    fn mean(&self) -> f64 {
        self.s as f64 / self.n as f64
    }

    fn variance(&self) -> f64 {
        let num = self.n as f64 * self.s2 as f64 - (self.s as f64) * (self.s as f64);
        let exact = self.n.checked_mul(self.s2).and_then(|a| {
            self.s
                .checked_mul(self.s)
                .map(|b| (a - b) as f64)
        });
        exact.unwrap_or(num) / (self.n as f64 * self.n as f64)
    }
}

pub fn moment_check(x: u64) -> Result<MomentCheck> {
    if x < 1000 {
        return invalid(format!("x = {x} is below 1000"));
    }
    let (so, sb) = fold_entries(
        1,
        x,
        || (Sums::default(), Sums::default()),
        |acc, _, e| {
            acc.0.add(e.omega as u64);
            acc.1.add(e.big_omega as u64);
        },
        |a, b| (a.0.merge(b.0), a.1.merge(b.1)),
    )?;
    let ll = loglog(x as f64);
    Ok(MomentCheck {
        mean_omega: so.mean() - ll,
        mean_big_omega: sb.mean() - ll,
        var_omega: so.variance() - ll,
        var_big_omega: sb.variance() - ll,
    })
}

/// Exact sums behind a covariance of paired integer observations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairSums {
    pub n: u128,
    pub sa: u128,
    pub sb: u128,
    pub sab: u128,
}

impl PairSums {
    pub fn add(&mut self, a: u64, b: u64) {
        self.n += 1;
        self.sa += a as u128;
        self.sb += b as u128;
        self.sab += a as u128 * b as u128;
    }

    pub fn merge(self, o: PairSums) -> PairSums {
        PairSums {
            n: self.n + o.n,
            sa: self.sa + o.sa,
            sb: self.sb + o.sb,
            sab: self.sab + o.sab,
        }
    }

    /// `(1/n) sum a b - mean(a) mean(b)`.
    pub fn covariance(&self) -> f64 {
        let n = self.n as i128;
        let num = n * self.sab as i128 - self.sa as i128 * self.sb as i128;
        num as f64 / (n * n) as f64
    }
}

/// Covariance of `(f(n), f(n+1))` over `n <= x - 1`.
pub fn neighbor_covariance(f: Func, x: u64) -> Result<f64> {
    if x < 1000 {
        return invalid(format!("x = {x} is below 1000"));
    }
    if f == Func::Tau {
        return invalid("neighbor covariance is defined for OMEGA and BIG_OMEGA only");
    }
    let sums = fold_pairs(
        1,
        x - 1,
        PairSums::default,
        |acc, _, a, b| acc.add(f.eval(a), f.eval(b)),
        PairSums::merge,
    )?;
    Ok(sums.covariance())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctau::count_pow2_ratio;
    use crate::sieve::factor;

    fn oracle(f: Func, n: u64) -> u64 {
        f.eval(factor(n).unwrap().entry())
    }

    #[test]
    fn omega_density_at_ten() {
        let hits: Vec<u64> = (1..=10)
            .filter(|&n| oracle(Func::Omega, n) == oracle(Func::Omega, n + 1))
            .collect();
        assert_eq!(hits, vec![2, 3, 4, 7, 8]);
        assert_eq!(equal_density(Func::Omega, 10).unwrap(), 0.5);
        assert!(equal_density(Func::Omega, 9).is_err());
    }

    #[test]
    fn densities_match_brute_force() {
        for f in Func::ALL {
            for x in [10u64, 1000, 4321] {
                let brute = (1..=x).filter(|&n| oracle(f, n) == oracle(f, n + 1)).count();
                assert_eq!(equal_density(f, x).unwrap(), brute as f64 / x as f64, "{f} {x}");
            }
        }
    }

    #[test]
    fn normalization_round_trips() {
        let x = 123_456.0;
        for b in [-0.5, 0.0, 1.7] {
            let d = 1.0 / (2.0 * (std::f64::consts::PI * (loglog(x) + b)).sqrt());
            let n = normalized_density(d, x, b, 1.0).unwrap();
            assert!((n - 1.0).abs() < 1e-15);
            assert!((impute_b(d, x, 1.0).unwrap() - b).abs() < 1e-12);
        }
        // loglog(50) + B5 < 0.
        assert_eq!(normalized_density(0.3, 50.0, B5, 1.0), None);
        assert!(impute_b(0.0, 100.0, 1.0).is_err());
        let tau = Convention::default_for(Func::Tau);
        assert_eq!(tau.c, CTAU_REFERENCE);
        assert_eq!(tau.b_shift, 0.0);
    }

    #[test]
    fn grid_policy() {
        let g = scan_grid(100_000);
        assert_eq!(&g[..3], &[10, 20, 30]);
        assert!(g.contains(&1000) && g.contains(&1100) && g.contains(&10_000));
        assert!(!g.contains(&1010));
        assert_eq!(*g.last().unwrap(), 100_000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g.iter().filter(|&&x| x > 10_000).count(), 8);
    }

    #[test]
    fn scan_rows_agree_with_direct_densities() {
        let rows = scan(&[Func::Tau, Func::Omega], 20_000).unwrap();
        let grid = scan_grid(20_000);
        assert_eq!(rows.len(), 2 * grid.len());
        for r in rows.iter().filter(|r| r.x == 5000 || r.x == 20_000) {
            assert_eq!(r.density, equal_density(r.f, r.x).unwrap());
        }
        let small = rows.iter().find(|r| r.f == Func::Omega && r.x == 10).unwrap();
        assert_eq!(small.normalized, None);
    }

    #[test]
    fn histograms_preserve_counts() {
        let x = 50_000;
        for f in [Func::Omega, Func::BigOmega] {
            let h = diff_histogram(f, x).unwrap();
            assert_eq!(h.total(), x);
            // Telescoping: the mean is (f(x+1) - f(1)) / x.
            let want = oracle(f, x + 1) as f64 / x as f64;
            assert!((h.mean() - want).abs() < 1e-15);
        }
        let t = diff_histogram(Func::Tau, x).unwrap();
        assert_eq!(t.total(), count_pow2_ratio(1, x).unwrap());
        assert!(diff_histogram(Func::Omega, 999).is_err());
    }

    #[test]
    fn histogram_variance_matches_brute_force() {
        let x = 3000u64;
        let d: Vec<f64> = (1..=x)
            .map(|n| oracle(Func::BigOmega, n + 1) as f64 - oracle(Func::BigOmega, n) as f64)
            .collect();
        let mean = d.iter().sum::<f64>() / x as f64;
        let var = d.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / x as f64;
        let h = diff_histogram(Func::BigOmega, x).unwrap();
        assert!((h.variance() - var).abs() < 1e-12);
        assert!(h.gaussian_pred(0).unwrap() > h.gaussian_pred(3).unwrap());
    }

    #[test]
    fn moments_match_brute_force() {
        let x = 2000u64;
        let om: Vec<f64> = (1..=x).map(|n| oracle(Func::Omega, n) as f64).collect();
        let mean = om.iter().sum::<f64>() / x as f64;
        let var = om.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / x as f64;
        let m = moment_check(x).unwrap();
        let ll = loglog(x as f64);
        assert!((m.mean_omega - (mean - ll)).abs() < 1e-12);
        assert!((m.var_omega - (var - ll)).abs() < 1e-12);
    }

    #[test]
    fn covariance_of_constant_shift_is_zero() {
        let mut s = PairSums::default();
        for v in 0..100u64 {
            s.add(7, v);
        }
        assert_eq!(s.covariance(), 0.0);
        let mut t = PairSums::default();
        for v in 0..100u64 {
            t.add(v, v + 3);
        }
        assert!((t.covariance() - 833.25).abs() < 1e-9);
    }

    #[test]
    fn neighbor_covariance_matches_brute_force() {
        let x = 5000u64;
        let pairs: Vec<(f64, f64)> = (1..x)
            .map(|n| (oracle(Func::Omega, n) as f64, oracle(Func::Omega, n + 1) as f64))
            .collect();
        let k = pairs.len() as f64;
        let ma = pairs.iter().map(|p| p.0).sum::<f64>() / k;
        let mb = pairs.iter().map(|p| p.1).sum::<f64>() / k;
        let cov = pairs.iter().map(|p| p.0 * p.1).sum::<f64>() / k - ma * mb;
        assert!((neighbor_covariance(Func::Omega, x).unwrap() - cov).abs() < 1e-12);
        assert!(neighbor_covariance(Func::Tau, x).is_err());
    }

    #[test]
    fn parse_names() {
        assert_eq!("bigomega".parse::<Func>().unwrap(), Func::BigOmega);
        assert_eq!("BIG_OMEGA".parse::<Func>().unwrap(), Func::BigOmega);
        assert_eq!("Tau".parse::<Func>().unwrap(), Func::Tau);
        assert!("sigma".parse::<Func>().is_err());
    }
}
