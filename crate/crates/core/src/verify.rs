//! Inequality checks assembled into a [`VerificationReport`].
//!
//! Every check compares a left side and a right side obtained from
//! different modules. `margin = rhs − lhs`, so a positive margin means the
//! inequality holds; a check passes when `margin ≥ −tolerance`, with the
//! tolerance taken from a versioned [`Tolerances`] table.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bergman::kernel_j;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::green::{boundary_flux, critical_points, disc_max_green, robin_capacity};
use crate::oracles::{mc_area, robin_extrapolate, wos_green};
use crate::sublevel::{convexity_report, monotonicity_check, sublevel_area, ConvexityReport, SublevelProfile, Sublevels, Verdict};

/// Bumped whenever a default tolerance changes.
pub const TOLERANCE_VERSION: u32 = 1;

/// Constant from the proof of the `δ²·log(1/(δc))` bound, `(11 + 5√5)/(4π)`.
pub fn thm2_constant() -> f64 {
    (11.0 + 5.0 * 5f64.sqrt()) / (4.0 * PI)
}

/// Radius fraction `(√5 − 1)/2` of `δ` that gives [`thm2_constant`].
pub fn golden_fraction() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ToleranceKind {
    /// multiplied by `max(|lhs|, |rhs|)`
    Relative,
    Absolute,
    /// multiplied by the Monte Carlo standard error
    Sigmas,
}

const DEFAULT_TOLERANCES: &[(&str, f64, ToleranceKind)] = &[
    ("suita", 1e-8, ToleranceKind::Relative),
    ("thm1", 1e-8, ToleranceKind::Relative),
    ("thm2", 1e-8, ToleranceKind::Relative),
    ("poisson", 1e-8, ToleranceKind::Relative),
    ("blb", 1e-4, ToleranceKind::Relative),
    ("blb_monotone", 1e-4, ToleranceKind::Absolute),
    ("thm4", 0.0, ToleranceKind::Absolute),
    ("characterization", 0.0, ToleranceKind::Absolute),
    ("oracle_wos", 3.0, ToleranceKind::Sigmas),
    ("oracle_area", 3.0, ToleranceKind::Sigmas),
    ("oracle_robin", 1e-6, ToleranceKind::Absolute),
    ("flux", 1e-4, ToleranceKind::Absolute),
];

/// Tolerance per check name.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub version: u32,
    pub values: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            version: TOLERANCE_VERSION,
            values: DEFAULT_TOLERANCES.iter().map(|&(n, v, _)| (n.to_string(), v)).collect(),
        }
    }
}

impl Tolerances {
    pub fn names() -> impl Iterator<Item = &'static str> {
        DEFAULT_TOLERANCES.iter().map(|&(n, _, _)| n)
    }

    pub fn kind(name: &str) -> Option<ToleranceKind> {
        DEFAULT_TOLERANCES.iter().find(|&&(n, _, _)| n == name).map(|&(_, _, k)| k)
    }

    pub fn get(&self, name: &str) -> f64 {
        self.values.get(name).copied().unwrap_or(0.0)
    }

    /// Overrides one entry; `all` overrides every entry.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value >= 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance for {name} must be >= 0, got {value}")));
        }
        if name == "all" {
            self.values.values_mut().for_each(|v| *v = value);
            return Ok(());
        }
        match self.values.get_mut(name) {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => Err(Error::InvalidArgument(format!("unknown tolerance {name:?}"))),
        }
    }

    /// Absolute tolerance applied to a check.
    fn absolute(&self, name: &str, lhs: f64, rhs: f64, sigma: f64) -> f64 {
        let t = self.get(name);
        match Self::kind(name).unwrap_or(ToleranceKind::Absolute) {
            ToleranceKind::Relative => {
                let scale = lhs.abs().max(rhs.abs());
                if scale.is_finite() {
                    t * scale
                } else {
                    0.0
                }
            }
            ToleranceKind::Absolute => t,
            ToleranceKind::Sigmas => t * sigma,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Where a check was evaluated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Context {
    pub domain: String,
    pub pole: String,
    pub params: String,
}

impl Context {
    fn new(domain: &DomainSpec<f64>, w: Point<f64>, params: impl Into<String>) -> Self {
        Self { domain: domain.to_string(), pole: format!("{},{}", fmt_num(w.re), fmt_num(w.im)), params: params.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; positive means the inequality holds
    pub margin: f64,
    /// absolute tolerance that was applied
    pub tolerance: f64,
    pub status: Status,
    pub context: Context,
}

impl Check {
    fn compare(name: &str, lhs: f64, rhs: f64, tol: &Tolerances, context: Context) -> Self {
        Self::with_sigma(name, lhs, rhs, 0.0, tol, context)
    }

    fn with_sigma(name: &str, lhs: f64, rhs: f64, sigma: f64, tol: &Tolerances, context: Context) -> Self {
        let margin = if lhs == rhs { 0.0 } else { rhs - lhs };
        let tolerance = tol.absolute(name, lhs, rhs, sigma);
        let status = if margin >= -tolerance { Status::Pass } else { Status::Fail };
        Self { name: name.to_string(), lhs, rhs, margin, tolerance, status, context }
    }

    fn skipped(name: &str, context: Context) -> Self {
        Self {
            name: name.to_string(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            tolerance: f64::NAN,
            status: Status::Skipped,
            context,
        }
    }

    /// Failure record for an error raised while computing the check.
    fn errored(name: &str, err: &Error, mut context: Context) -> Self {
        context.params = if context.params.is_empty() { format!("error={err}") } else { format!("{};error={err}", context.params) };
        Self {
            name: name.to_string(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            tolerance: f64::NAN,
            status: Status::Fail,
            context,
        }
    }

    pub fn pass(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Formats with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        let decimals = (11 - e).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (m, exp) = s.split_once('e').expect("exponent form");
        let m = if m.contains('.') { m.trim_end_matches('0').trim_end_matches('.') } else { m };
        format!("{m}e{exp}")
    }
}

/// `K^(j) ≥ j!(j+1)!/π · c^{2j+2}` for `j = 0..=j_max`.
pub fn suita_check(domain: &DomainSpec<f64>, w: Point<f64>, j_max: usize, tol: &Tolerances) -> Result<Vec<Check>> {
    if j_max > 6 {
        return Err(Error::OrderTooLarge(j_max));
    }
    let c = robin_capacity(domain, w)?.capacity;
    (0..=j_max)
        .map(|j| {
            let k = kernel_j(domain, w, j)?.value;
            let factor: f64 = (1..=j).map(|i| i as f64).product::<f64>() * (1..=j + 1).map(|i| i as f64).product::<f64>();
            let bound = factor / PI * c.powi(2 * j as i32 + 2);
            Ok(Check::compare("suita", bound, k, tol, Context::new(domain, w, format!("j={j}"))))
        })
        .collect()
}

/// `K ≤ 1/(−2πr² max_{|z−w|≤r} G)` for each `r`, plus `r = (√5 − 1)δ/2`.
pub fn thm1_check(domain: &DomainSpec<f64>, w: Point<f64>, r_list: &[f64], tol: &Tolerances) -> Result<Vec<Check>> {
    let delta = domain.boundary_distance(w)?.delta;
    let k = kernel_j(domain, w, 0)?.value;
    let mut radii = r_list.to_vec();
    radii.push(golden_fraction() * delta);
    radii
        .iter()
        .map(|&r| {
            let max = disc_max_green(domain, w, r)?;
            let bound = if max < 0.0 { 1.0 / (-2.0 * PI * r * r * max) } else { f64::INFINITY };
            Ok(Check::compare("thm1", k, bound, tol, Context::new(domain, w, format!("r={}", fmt_num(r)))))
        })
        .collect()
}

/// `K ≤ C/(δ² log(1/(δc)))`; skipped when `δc ≥ 1 − 1e−12`.
pub fn thm2_check(domain: &DomainSpec<f64>, w: Point<f64>, tol: &Tolerances) -> Result<Check> {
    let delta = domain.boundary_distance(w)?.delta;
    let c = robin_capacity(domain, w)?.capacity;
    let ctx = Context::new(domain, w, format!("delta_c={}", fmt_num(delta * c)));
    if delta * c >= 1.0 - 1e-12 {
        return Ok(Check::skipped("thm2", ctx));
    }
    let k = kernel_j(domain, w, 0)?.value;
    let bound = thm2_constant() / (delta * delta * (1.0 / (delta * c)).ln());
    Ok(Check::compare("thm2", k, bound, tol, ctx))
}

/// `K·δ²·log(1/(δc))`, the constant a sample would need.
pub fn thm2_ratio(domain: &DomainSpec<f64>, w: Point<f64>) -> Result<Option<f64>> {
    let delta = domain.boundary_distance(w)?.delta;
    let c = robin_capacity(domain, w)?.capacity;
    if delta * c >= 1.0 - 1e-12 {
        return Ok(None);
    }
    Ok(Some(kernel_j(domain, w, 0)?.value * delta * delta * (1.0 / (delta * c)).ln()))
}

/// `K ≥ 1/(e^{−2t}λ(t))` at every profile sample, and `e^{−2t}λ`
/// non-decreasing in `t`.
pub fn blb_check(domain: &DomainSpec<f64>, w: Point<f64>, profile: &SublevelProfile, tol: &Tolerances) -> Result<Vec<Check>> {
    let k = kernel_j(domain, w, 0)?.value;
    let mut out: Vec<Check> = profile
        .t_samples
        .iter()
        .zip(&profile.e2t_lambda)
        .map(|(&t, &v)| Check::compare("blb", 1.0 / v, k, tol, Context::new(domain, w, format!("t={}", fmt_num(t)))))
        .collect();
    let m = monotonicity_check(profile);
    out.push(Check::compare(
        "blb_monotone",
        m.max_decrease,
        0.0,
        tol,
        Context::new(domain, w, format!("window={}..{}", fmt_num(profile.t_samples[0]), fmt_num(profile.t_samples[profile.len() - 1]))),
    ));
    Ok(out)
}

/// Relative half-width of the window around `t0` scanned for non-convexity.
pub const THM4_WINDOW: f64 = 0.5;
pub const THM4_STEPS: usize = 64;

/// Profile on `[t0(1 + 0.5), t0(1 − 0.5)]` around the highest critical level.
pub fn thm4_profile(domain: &DomainSpec<f64>, w: Point<f64>, grid: usize) -> Result<(SublevelProfile, f64)> {
    let cps = critical_points(domain, w)?;
    let t0 = cps.first().ok_or(Error::NoCriticalPoint)?.level;
    let s = Sublevels::new(domain, w, grid)?;
    let p = s.profile(t0 * (1.0 + THM4_WINDOW), t0 * (1.0 - THM4_WINDOW), THM4_STEPS)?;
    Ok((p, t0))
}

/// Convexity scan around `t0`; the check passes iff non-convexity is detected.
pub fn thm4_scan(domain: &DomainSpec<f64>, w: Point<f64>, grid: usize, tol: &Tolerances) -> Result<(ConvexityReport, Check)> {
    let (profile, t0) = thm4_profile(domain, w, grid)?;
    let report = convexity_report(&profile, t0)?;
    let ctx = Context::new(domain, w, format!("t0={};grid={grid}", fmt_num(t0)));
    let mut check = Check::compare("thm4", report.min_second_diff, -report.noise_floor, tol, ctx);
    if report.verdict != Verdict::NonConvexDetected {
        check.status = Status::Fail;
    }
    Ok((report, check))
}

/// `max_{|z−w|≤r} G ≤ ((R − r)/(R + r))·log(R c)` with `R = δ`.
pub fn poisson_step_check(domain: &DomainSpec<f64>, w: Point<f64>, r: f64, tol: &Tolerances) -> Result<Check> {
    let big_r = domain.boundary_distance(w)?.delta;
    if !(r > 0.0 && r < big_r) {
        return Err(Error::RadiusTooLarge { radius: r, delta: big_r });
    }
    let c = robin_capacity(domain, w)?.capacity;
    let max = disc_max_green(domain, w, r)?;
    let bound = (big_r - r) / (big_r + r) * (big_r * c).ln();
    Ok(Check::compare("poisson", max, bound, tol, Context::new(domain, w, format!("r={}", fmt_num(r)))))
}

/// Interior points at least `2%` of the domain's span from the boundary.
fn probe_points(domain: &DomainSpec<f64>, count: usize, seed: u64, stream: u64) -> Vec<Point<f64>> {
    let Some((lo, hi)) = domain.bounding_box() else {
        return (0..count).map(|k| Complex::new(1.0 + k as f64, 0.5)).collect();
    };
    let size = hi - lo;
    let span = size.re.max(size.im);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = lo + Complex::new(rng.gen::<f64>() * size.re, rng.gen::<f64>() * size.im);
        if domain.contains(z) && domain.boundary_distance(z).is_ok_and(|d| d.delta > 0.02 * span) {
            out.push(z);
        }
    }
    out
}

/// `∂_z∂_z̄ log K^(j)` by the five-point stencil with step `h`.
fn log_kernel_laplacian(domain: &DomainSpec<f64>, z: Point<f64>, j: usize, h: f64) -> Result<f64> {
    let f = |p: Point<f64>| kernel_j(domain, p, j).map(|k| k.value.ln());
    let c = f(z)?;
    let sum = f(z + h)? + f(z - h)? + f(z + Complex::new(0.0, h))? + f(z - Complex::new(0.0, h))?;
    Ok((sum - 4.0 * c) / (4.0 * h * h))
}

/// For domains with a non-polar complement, `K^(j) > 0` for `j ≤ 6` and
/// `log K^(j)` strongly subharmonic at 5 random points; for the punctured
/// plane every `K^(j)` vanishes.
pub fn characterization_probe(samples: &[(DomainSpec<f64>, Point<f64>)], seed: u64, tol: &Tolerances) -> Vec<Check> {
    const J_MAX: usize = 6;
    samples
        .par_iter()
        .enumerate()
        .map(|(s, (domain, w))| {
            let mut out = Vec::new();
            if matches!(domain, DomainSpec::Polygon { .. }) {
                return out;
            }
            let polar = matches!(domain, DomainSpec::PolarComplement);
            for j in 0..=J_MAX {
                let ctx = Context::new(domain, *w, format!("j={j}"));
                match kernel_j(domain, *w, j) {
                    // zero kernels: |K| ≤ 0; positive kernels: K ≥ smallest normal
                    Ok(k) if polar => out.push(Check::compare("characterization", k.value.abs(), 0.0, tol, ctx)),
                    Ok(k) => out.push(Check::compare("characterization", f64::MIN_POSITIVE, k.value, tol, ctx)),
                    Err(e) => out.push(Check::errored("characterization", &e, ctx)),
                }
            }
            if polar {
                return out;
            }
            for z in probe_points(domain, 5, seed, s as u64) {
                let h = 1e-2 * domain.boundary_distance(z).map(|d| d.delta).unwrap_or(0.0);
                for j in 0..=J_MAX {
                    let ctx = Context::new(domain, *w, format!("j={j};z={},{}", fmt_num(z.re), fmt_num(z.im)));
                    match log_kernel_laplacian(domain, z, j, h) {
                        Ok(lap) => out.push(Check::compare("characterization", f64::MIN_POSITIVE, lap, tol, ctx)),
                        Err(e) => out.push(Check::errored("characterization", &e, ctx)),
                    }
                }
            }
            out
        })
        .flatten()
        .collect()
}

/// `∫_{∂Ω} ∂_n G dσ = 2π` at `n` boundary nodes.
pub fn flux_check(domain: &DomainSpec<f64>, w: Point<f64>, n: usize, tol: &Tolerances) -> Result<Check> {
    let flux = boundary_flux(domain, w, n)?;
    Ok(Check::compare("flux", (flux - 2.0 * PI).abs(), 0.0, tol, Context::new(domain, w, format!("n={n}"))))
}

/// Analytic Green value against walk-on-spheres at `z`.
pub fn wos_check(domain: &DomainSpec<f64>, w: Point<f64>, z: Point<f64>, walks: usize, seed: u64, tol: &Tolerances) -> Result<Check> {
    let exact = crate::green::green_eval(domain, w, z)?.value;
    let e = wos_green(domain, w, z, walks, seed)?;
    let ctx = Context::new(domain, w, format!("z={},{};walks={walks};seed={seed}", fmt_num(z.re), fmt_num(z.im)));
    Ok(Check::with_sigma("oracle_wos", (exact - e.mean).abs(), 0.0, e.std_error, tol, ctx))
}

/// Walk-on-spheres symmetry `G(a, b) = G(b, a)` where no closed form exists.
pub fn wos_symmetry_check(domain: &DomainSpec<f64>, a: Point<f64>, b: Point<f64>, walks: usize, seed: u64, tol: &Tolerances) -> Result<Check> {
    let ab = wos_green(domain, a, b, walks, seed)?;
    let ba = wos_green(domain, b, a, walks, seed.wrapping_add(1))?;
    let ctx = Context::new(domain, a, format!("z={},{};walks={walks};seed={seed}", fmt_num(b.re), fmt_num(b.im)));
    Ok(Check::with_sigma("oracle_wos", (ab.mean - ba.mean).abs(), 0.0, ab.std_error.hypot(ba.std_error), tol, ctx))
}

/// Contour area against Monte Carlo area.
pub fn area_check(domain: &DomainSpec<f64>, w: Point<f64>, t: f64, grid: usize, samples: usize, seed: u64, tol: &Tolerances) -> Result<Check> {
    let a = sublevel_area(domain, w, t, grid)?;
    let e = mc_area(domain, w, t, samples, seed)?;
    let ctx = Context::new(domain, w, format!("t={};samples={samples};seed={seed}", fmt_num(t)));
    Ok(Check::with_sigma("oracle_area", (a.area - e.mean).abs(), 0.0, e.std_error.max(a.error), tol, ctx))
}

/// Closed-form capacity against extrapolated circle means.
pub fn robin_check(domain: &DomainSpec<f64>, w: Point<f64>, tol: &Tolerances) -> Result<Check> {
    let delta = domain.boundary_distance(w)?.delta;
    let r0 = (0.1f64).min(0.5 * delta);
    let radii: Vec<f64> = (0..5).map(|k| r0 / 2f64.powi(k)).collect();
    let exact = robin_capacity(domain, w)?.capacity;
    let extrapolated = robin_extrapolate(domain, w, &radii)?;
    let ctx = Context::new(domain, w, format!("r0={}", fmt_num(r0)));
    Ok(Check::compare("oracle_robin", (exact - extrapolated).abs(), 0.0, tol, ctx))
}

/// Check families selectable in a suite run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Suite {
    Suita,
    Thm1,
    Thm2,
    Blb,
    Thm4,
    Poisson,
    Characterization,
    Oracle,
    Flux,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Suita,
        Suite::Thm1,
        Suite::Thm2,
        Suite::Blb,
        Suite::Thm4,
        Suite::Poisson,
        Suite::Characterization,
        Suite::Oracle,
        Suite::Flux,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Suita => "suita",
            Suite::Thm1 => "thm1",
            Suite::Thm2 => "thm2",
            Suite::Blb => "blb",
            Suite::Thm4 => "thm4",
            Suite::Poisson => "poisson",
            Suite::Characterization => "characterization",
            Suite::Oracle => "oracle",
            Suite::Flux => "flux",
        }
    }

    pub fn parse(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Suite::ALL
            .iter()
            .find(|x| x.name() == s)
            .map(|&x| vec![x])
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

/// One domain and pole of the sample plan.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub domain: DomainSpec<f64>,
    pub pole: Point<f64>,
}

/// Sample plan, tolerances and numerical parameters of a suite run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub samples: Vec<Sample>,
    pub suites: Vec<Suite>,
    pub tolerances: Tolerances,
    pub seed: u64,
    /// contour grid for sublevel quantities
    pub grid: usize,
    pub walks: usize,
    pub mc_samples: usize,
    pub j_max: usize,
    /// levels of the `blb` profiles
    pub blb_steps: usize,
}

/// Discs at 3 poles, annuli `q ∈ {0.3, 0.5, 0.8}` at 3 poles each, 2 Möbius
/// images, a square (oracle paths only) and the punctured plane.
pub fn default_samples() -> Vec<Sample> {
    let c = Complex::new;
    let unit = DomainSpec::unit_disc();
    let mut out = vec![
        Sample { domain: unit.clone(), pole: c(0.0, 0.0) },
        Sample { domain: unit.clone(), pole: c(0.5, 0.0) },
        Sample { domain: DomainSpec::disc(c(1.0, 1.0), 2.0).expect("valid disc"), pole: c(1.5, 0.2) },
    ];
    for (q, radii) in [(0.3, [0.5, 0.65, 0.8]), (0.5, [0.7, 0.6, 0.85]), (0.8, [0.9, 0.85, 0.95])] {
        let a = DomainSpec::annulus(q).expect("valid annulus");
        for (k, r) in radii.into_iter().enumerate() {
            out.push(Sample { domain: a.clone(), pole: Complex::from_polar(r, [0.0, 2.0, -1.0][k]) });
        }
    }
    let m1 = crate::geometry::Moebius::new(c(1.0, 0.5), c(0.2, 0.0), c(0.3, -0.1), c(2.0, 0.0));
    out.push(Sample { domain: DomainSpec::moebius(unit, m1).expect("valid image"), pole: m1.apply(c(0.3, -0.2)).expect("finite") });
    let m2 = crate::geometry::Moebius::new(c(2.0, 0.0), c(0.5, 0.5), c(0.25, 0.0), c(1.0, 0.0));
    let annulus = DomainSpec::annulus(0.5).expect("valid annulus");
    out.push(Sample { domain: DomainSpec::moebius(annulus, m2).expect("valid image"), pole: m2.apply(c(0.0, 0.7)).expect("finite") });
    out.push(Sample {
        domain: DomainSpec::polygon(vec![c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)]).expect("valid square"),
        pole: c(0.2, 0.1),
    });
    out.push(Sample { domain: DomainSpec::PolarComplement, pole: c(1.0, 0.0) });
    out
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            suites: Suite::ALL.to_vec(),
            tolerances: Tolerances::default(),
            seed: 42,
            grid: 1024,
            walks: 100_000,
            mc_samples: 200_000,
            j_max: 3,
            blb_steps: 12,
        }
    }
}

/// Run parameters recorded in a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub samples: Vec<Context>,
    pub suites: Vec<Suite>,
    pub seed: u64,
    pub grid: usize,
    pub walks: usize,
    pub mc_samples: usize,
    pub j_max: usize,
    /// largest kernel truncation order used by the `K^(0)` evaluations
    pub max_truncation: usize,
    pub tolerances: Tolerances,
    /// largest `K·δ²·log(1/(δc))` over the non-degenerate samples
    pub thm2_empirical_constant: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub metadata: Metadata,
    /// left out of serialized reports so reruns compare byte for byte
    #[serde(skip)]
    pub wall_time: f64,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }
}

fn push<T>(out: &mut Vec<Check>, name: &str, ctx: impl FnOnce() -> Context, r: Result<T>, f: impl FnOnce(T, &mut Vec<Check>)) {
    match r {
        Ok(v) => f(v, out),
        Err(e) => out.push(Check::errored(name, &e, ctx())),
    }
}

fn sample_checks(cfg: &SuiteConfig, index: usize, sample: &Sample) -> Vec<Check> {
    let (d, w) = (&sample.domain, sample.pole);
    let tol = &cfg.tolerances;
    let ctx = || Context::new(d, w, "");
    let chart = d.chart().is_some();
    let polar = matches!(d, DomainSpec::PolarComplement);
    let seed = cfg.seed.wrapping_add(1000 * index as u64);
    let mut out = Vec::new();
    for &suite in &cfg.suites {
        match suite {
            Suite::Suita if chart || polar => push(&mut out, "suita", ctx, suita_check(d, w, cfg.j_max, tol), |v, o| o.extend(v)),
            Suite::Thm1 if chart => {
                let delta = d.boundary_distance(w).map(|x| x.delta).unwrap_or(f64::NAN);
                let radii: Vec<f64> = (1..=10).map(|k| 0.1 * k as f64 * delta).collect();
                push(&mut out, "thm1", ctx, thm1_check(d, w, &radii, tol), |v, o| o.extend(v));
            }
            Suite::Thm2 if chart => push(&mut out, "thm2", ctx, thm2_check(d, w, tol), |v, o| o.push(v)),
            Suite::Poisson if chart => {
                let delta = d.boundary_distance(w).map(|x| x.delta).unwrap_or(f64::NAN);
                for f in [0.25, 0.5] {
                    push(&mut out, "poisson", ctx, poisson_step_check(d, w, f * delta, tol), |v, o| o.push(v));
                }
            }
            Suite::Blb if chart => {
                let r = Sublevels::new(d, w, cfg.grid).and_then(|s| s.profile(-3.0, -0.1, cfg.blb_steps)).and_then(|p| blb_check(d, w, &p, tol));
                push(&mut out, "blb", ctx, r, |v, o| o.extend(v));
            }
            Suite::Thm4 if chart => {
                if d.is_simply_connected() {
                    out.push(Check::skipped("thm4", Context::new(d, w, "no critical point")));
                } else {
                    push(&mut out, "thm4", ctx, thm4_scan(d, w, cfg.grid, tol), |(_, c), o| o.push(c));
                }
            }
            Suite::Oracle => {
                if chart {
                    push(&mut out, "oracle_robin", ctx, robin_check(d, w, tol), |v, o| o.push(v));
                    let delta = d.boundary_distance(w).map(|x| x.delta).unwrap_or(f64::NAN);
                    let z = w + Complex::new(0.0, 0.5 * delta);
                    push(&mut out, "oracle_wos", ctx, wos_check(d, w, z, cfg.walks, seed, tol), |v, o| o.push(v));
                    let area = area_check(d, w, -0.5, cfg.grid.min(512), cfg.mc_samples, seed + 1, tol);
                    push(&mut out, "oracle_area", ctx, area, |v, o| o.push(v));
                } else if matches!(d, DomainSpec::Polygon { .. }) {
                    let b = -w + Complex::new(0.1, 0.3);
                    push(&mut out, "oracle_wos", ctx, wos_symmetry_check(d, w, b, cfg.walks, seed, tol), |v, o| o.push(v));
                }
            }
            Suite::Flux if matches!(d, DomainSpec::Disc { .. } | DomainSpec::Annulus { .. }) => {
                push(&mut out, "flux", ctx, flux_check(d, w, 1024, tol), |v, o| o.push(v))
            }
            _ => {}
        }
    }
    out
}

/// Runs every selected family over the sample plan. Individual failures are
/// recorded in the report; only an empty plan is an error.
pub fn run_suite(cfg: &SuiteConfig) -> Result<VerificationReport> {
    if cfg.samples.is_empty() || cfg.suites.is_empty() {
        return Err(Error::InvalidArgument("suite needs at least one sample and one family".into()));
    }
    if cfg.j_max > 6 {
        return Err(Error::OrderTooLarge(cfg.j_max));
    }
    let start = Instant::now();
    let per_sample: Vec<Vec<Check>> = cfg.samples.par_iter().enumerate().map(|(i, s)| sample_checks(cfg, i, s)).collect();
    let mut checks: Vec<Check> = per_sample.into_iter().flatten().collect();
    if cfg.suites.contains(&Suite::Characterization) {
        let pairs: Vec<(DomainSpec<f64>, Point<f64>)> = cfg.samples.iter().map(|s| (s.domain.clone(), s.pole)).collect();
        checks.extend(characterization_probe(&pairs, cfg.seed, &cfg.tolerances));
    }
    // stable order keyed by check name; ties keep the sample order
    checks.sort_by(|a, b| a.name.cmp(&b.name));

    let chart: Vec<&Sample> = cfg.samples.iter().filter(|s| s.domain.chart().is_some()).collect();
    let max_truncation = chart.iter().filter_map(|s| kernel_j(&s.domain, s.pole, 0).ok()).map(|k| k.truncation_order).max().unwrap_or(0);
    let thm2_empirical_constant = chart.iter().filter_map(|s| thm2_ratio(&s.domain, s.pole).ok().flatten()).reduce(f64::max);
    Ok(VerificationReport {
        checks,
        metadata: Metadata {
            samples: cfg.samples.iter().map(|s| Context::new(&s.domain, s.pole, "")).collect(),
            suites: cfg.suites.clone(),
            seed: cfg.seed,
            grid: cfg.grid,
            walks: cfg.walks,
            mc_samples: cfg.mc_samples,
            j_max: cfg.j_max,
            max_truncation,
            tolerances: cfg.tolerances.clone(),
            thm2_empirical_constant,
        },
        wall_time: start.elapsed().as_secs_f64(),
    })
}
