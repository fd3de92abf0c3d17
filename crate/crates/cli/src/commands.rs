//! One function per subcommand: compute, then fill a [`Table`].

use clap::{Args, ValueEnum};
use erdoslab_core::barrier::{omega_barriers, tau_k2_scan, BarrierReport};
use erdoslab_core::consecutive::{diff_histogram, scan, scan_grid, Func};
use erdoslab_core::constants::{PrimeSums, SumKind};
use erdoslab_core::correlation::{two_point_correlation, CorrelationQuery, MultFn};
use erdoslab_core::ctau::{ctau_lower_c1, ctau_lower_c3, ctau_monte_carlo, ctau_scan};
use erdoslab_core::llt::{gaussian_local, llt_deviation, BpVariant, GaussianScale};
use erdoslab_core::smooth::{smooth_counts, DickmanTable};
use erdoslab_core::Result;

use crate::output::{num, opt, RunManifest, Table};

fn parse_func(s: &str) -> std::result::Result<Func, String> {
    s.parse().map_err(|e: erdoslab_core::LabError| e.to_string())
}

fn parse_variant(s: &str) -> std::result::Result<BpVariant, String> {
    s.parse().map_err(|e: erdoslab_core::LabError| e.to_string())
}

fn parse_mult(s: &str) -> std::result::Result<MultFn, String> {
    s.parse().map_err(|e: erdoslab_core::LabError| e.to_string())
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

fn names(fs: &[Func]) -> String {
    fs.iter().map(|f| f.name()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    /// Truncation point of the prime sums.
    #[arg(long, default_value_t = 10_000_000)]
    pub pmax: u64,
}

pub fn constants(a: &ConstantsArgs, m: &mut RunManifest) -> Result<Table> {
    m.param("pmax", a.pmax);
    let sums = PrimeSums::new(a.pmax)?;
    let mut t = Table::new(&["kind", "value", "p_max", "tail_bound"]);
    for k in SumKind::CONSTANTS {
        let r = sums.result(k)?;
        t.push(vec![
            k.name().into(),
            num(r.value),
            r.p_max.to_string(),
            num(r.tail_bound),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 10_000_000)]
    pub xmax: u64,
    /// Comma-separated list of omega, bigomega, tau.
    #[arg(long = "f", value_delimiter = ',', value_parser = parse_func,
          default_value = "omega,bigomega,tau")]
    pub funcs: Vec<Func>,
}

pub fn scan_cmd(a: &ScanArgs, m: &mut RunManifest) -> Result<Table> {
    m.param("xmax", a.xmax);
    m.param("f", names(&a.funcs));
    let mut t = Table::new(&["x", "f", "density", "normalized", "imputed_B", "B_shift", "c"]);
    for r in scan(&a.funcs, a.xmax)? {
        t.push(vec![
            r.x.to_string(),
            r.f.name().into(),
            num(r.density),
            opt(r.normalized),
            opt(r.imputed_b),
            num(r.convention.b_shift),
            num(r.convention.c),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Args)]
pub struct HistArgs {
    #[arg(long, default_value_t = 10_000_000)]
    pub xmax: u64,
    #[arg(long = "f", value_delimiter = ',', value_parser = parse_func,
          default_value = "omega,bigomega")]
    pub funcs: Vec<Func>,
}

/// Per histogram: one row per observed difference, then `mu_hat` and
/// `sigma2_hat` rows carrying the empirical moments in the count column.
pub fn hist(a: &HistArgs, m: &mut RunManifest) -> Result<Table> {
    m.param("xmax", a.xmax);
    m.param("f", names(&a.funcs));
    let mut t = Table::new(&["f", "x", "m", "count", "gaussian_pred"]);
    for &f in &a.funcs {
        let h = diff_histogram(f, a.xmax)?;
        let name = f.name().to_string();
        let x = h.x.to_string();
        for (&d, &c) in &h.counts {
            t.push(vec![name.clone(), x.clone(), d.to_string(), c.to_string(), opt(h.gaussian_pred(d))]);
        }
        t.push(vec![name.clone(), x.clone(), "mu_hat".into(), num(h.mean()), String::new()]);
        t.push(vec![name, x, "sigma2_hat".into(), num(h.variance()), String::new()]);
    }
    Ok(t)
}

#[derive(Debug, Args)]
pub struct CtauArgs {
    /// Range of the empirical curves.
    #[arg(long, default_value_t = 10_000_000)]
    pub xmax: u64,
    /// Prime cutoff of the model.
    #[arg(long, default_value_t = 100_000)]
    pub pmax: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Empirical curves on the scan grid, then the Monte Carlo estimate and the
/// two product lower bounds at `pmax`.
pub fn ctau(a: &CtauArgs, m: &mut RunManifest) -> Result<Table> {
    m.param("xmax", a.xmax);
    m.param("pmax", a.pmax);
    m.param("samples", a.samples);
    m.seed = Some(a.seed);
    let mut t = Table::new(&["x_or_pmax", "method", "estimate", "stderr", "tail_bound", "seed"]);
    for c in ctau_scan(&scan_grid(a.xmax))? {
        for (name, count) in c.series() {
            let d = count as f64 / c.x as f64;
            t.push(vec![c.x.to_string(), name.into(), num(d), String::new(), String::new(), String::new()]);
        }
    }
    let mc = ctau_monte_carlo(a.pmax, a.samples, a.seed)?;
    t.push(vec![
        a.pmax.to_string(),
        "monte_carlo".into(),
        num(mc.point),
        num(mc.mc_stderr),
        num(mc.tail_bound),
        a.seed.to_string(),
    ]);
    for (name, r) in [("lower_c1", ctau_lower_c1(a.pmax)?), ("lower_c3", ctau_lower_c3(a.pmax)?)] {
        t.push(vec![
            a.pmax.to_string(),
            name.into(),
            num(r.value),
            String::new(),
            num(r.tail_bound),
            String::new(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Scale {
    /// Half the exact variance.
    HalfVariance,
    /// ln ln z.
    Loglog,
}

#[derive(Debug, Args)]
pub struct LltArgs {
    #[arg(long, default_value_t = 2.0)]
    pub w: f64,
    #[arg(long, default_value_t = 1e6)]
    pub z: f64,
    /// bigomega or smallomega.
    #[arg(long, value_parser = parse_variant, default_value = "bigomega")]
    pub variant: BpVariant,
    #[arg(long, value_enum, default_value_t = Scale::HalfVariance)]
    pub scale: Scale,
}

pub fn llt(a: &LltArgs, m: &mut RunManifest) -> Result<Table> {
    m.param("w", num(a.w));
    m.param("z", num(a.z));
    m.param("variant", a.variant.name());
    let scale = match a.scale {
        Scale::HalfVariance => GaussianScale::HalfVariance,
        Scale::Loglog => GaussianScale::LogLog,
    };
    m.param("scale", format!("{:?}", a.scale));
    let (pmf, dev) = llt_deviation(a.w, a.z, a.variant, scale)?;
    let mut t = Table::new(&["m", "pmf", "gaussian", "L", "variant", "w", "z", "truncated_mass"]);
    let (l, w, z, tm) = (num(dev.l), num(a.w), num(a.z), num(pmf.truncated_mass));
    for (k, q) in pmf.iter() {
        t.push(vec![
            k.to_string(),
            num(q),
            num(gaussian_local(k, dev.l)),
            l.clone(),
            a.variant.name().into(),
            w.clone(),
            z.clone(),
            tm.clone(),
        ]);
    }
    Ok(t)
}

/// Grid step of the Dickman table used for the product column.
const RHO_STEP: f64 = 1e-4;

#[derive(Debug, Args)]
pub struct SmoothArgs {
    #[arg(long, default_value_t = 10_000_000)]
    pub xmax: u64,
    #[arg(long, value_delimiter = ',', default_value = "1.5,2,3")]
    pub u: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1.5,2,3")]
    pub v: Vec<f64>,
}

pub fn smooth(a: &SmoothArgs, m: &mut RunManifest) -> Result<Table> {
    m.param("xmax", a.xmax);
    m.param("u", join(&a.u.iter().map(|&x| num(x)).collect::<Vec<_>>()));
    m.param("v", join(&a.v.iter().map(|&x| num(x)).collect::<Vec<_>>()));
    let counts = smooth_counts(a.xmax, &a.u, &a.v)?;
    let u_max = a.u.iter().chain(&a.v).copied().fold(1.0, f64::max);
    let rho = DickmanTable::new(u_max, RHO_STEP)?;
    let mut t = Table::new(&["x", "u", "v", "pair_density", "rho_u", "rho_v", "product"]);
    for (i, &u) in a.u.iter().enumerate() {
        let ru = rho.eval(u)?;
        for (j, &v) in a.v.iter().enumerate() {
            let rv = rho.eval(v)?;
            t.push(vec![
                a.xmax.to_string(),
                num(u),
                num(v),
                num(counts.pair_density(i, j)),
                num(ru),
                num(rv),
                num(ru * rv),
            ]);
        }
    }
    Ok(t)
}

#[derive(Debug, Args)]
pub struct CorrArgs {
    /// one, liouville, moebius, exp_bigomega:A, exp_omega:A or band:LO:HI.
    #[arg(long, value_parser = parse_mult, default_value = "liouville")]
    pub g1: MultFn,
    #[arg(long, value_parser = parse_mult, default_value = "liouville")]
    pub g2: MultFn,
    /// Average over N < n <= 2N.
    #[arg(long = "n", default_value_t = 1_000_000)]
    pub n: u64,
    /// Modulus W of the progression.
    #[arg(long, default_value_t = 1)]
    pub modulus: u64,
    /// Residue b of the progression.
    #[arg(long, default_value_t = 1)]
    pub residue: u64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub h1: i64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub h2: i64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta: f64,
}

pub fn corr(a: &CorrArgs, m: &mut RunManifest) -> Result<Table> {
    let q = CorrelationQuery {
        n: a.n,
        w: a.modulus,
        b: a.residue,
        h1: a.h1,
        h2: a.h2,
        delta: a.delta,
    };
    let row = vec![
        a.g1.to_string(),
        a.g2.to_string(),
        q.n.to_string(),
        q.w.to_string(),
        q.b.to_string(),
        q.h1.to_string(),
        q.h2.to_string(),
        num(q.delta),
    ];
    for (k, v) in ["g1", "g2", "n", "modulus", "residue", "h1", "h2", "delta"].iter().zip(&row) {
        m.param(k, v);
    }
    let c = two_point_correlation(&a.g1, &a.g2, &q)?;
    let mut t = Table::new(&["g1", "g2", "N", "W", "b", "h1", "h2", "delta", "re", "im", "abs"]);
    let mut row = row;
    row.extend([num(c.re), num(c.im), num(c.norm())]);
    t.push(row);
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Definition {
    Omega,
    Tau,
    Both,
}

#[derive(Debug, Args)]
pub struct BarriersArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub xmax: u64,
    #[arg(long, value_enum, default_value_t = Definition::Both)]
    pub definition: Definition,
}

pub fn barriers(a: &BarriersArgs, m: &mut RunManifest) -> Result<Table> {
    m.param("xmax", a.xmax);
    m.param("definition", format!("{:?}", a.definition).to_lowercase());
    let mut reports: Vec<BarrierReport> = Vec::new();
    if a.definition != Definition::Tau {
        reports.push(omega_barriers(a.xmax)?);
    }
    if a.definition != Definition::Omega {
        reports.push(tau_k2_scan(a.xmax)?);
    }
    let mut t = Table::new(&["definition", "x", "n"]);
    for r in &reports {
        for n in &r.barriers {
            t.push(vec![r.kind.name().into(), r.x.to_string(), n.to_string()]);
        }
    }
    Ok(t)
}
