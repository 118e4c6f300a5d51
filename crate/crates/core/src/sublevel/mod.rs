//! Sublevel sets `{G < t}`: areas `λ(t)`, the co-area derivative
//! `γ′(t) = ∫_{G=t} dσ/|∇G|`, and profiles of `log λ` and `e^{−2t}λ`.
//!
//! Areas come from the level curve itself: the sublevel set is compactly
//! contained in the domain and bounded by `{G = t}`, so Green's theorem
//! turns `λ(t)` into a sum over the marching-squares segments, each corrected
//! for the area between chord and arc. Segment endpoints are solved on the
//! exact `G`, so there is no interpolation error. Möbius images are handled
//! in the image plane directly.

mod contour;

pub use contour::{polylines, Field, Segment};

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::green::{critical_points, robin_capacity, CriticalPoint, GreenFunction};

pub const DEFAULT_GRID: usize = 1024;
const MIN_GRID: usize = 16;

/// `λ(t)` with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AreaEstimate {
    pub area: f64,
    pub error: f64,
}

/// Everything needed to evaluate level sets of one `G_Ω(·, w)` at many levels.
pub struct Sublevels {
    domain: DomainSpec<f64>,
    pole: Point<f64>,
    green: GreenFunction<f64>,
    grid: usize,
    capacity: f64,
    delta: f64,
    full: Field,
    critical: Vec<CriticalPoint<f64>>,
}

impl Sublevels {
    pub fn new(domain: &DomainSpec<f64>, w: Point<f64>, grid: usize) -> Result<Self> {
        if grid < MIN_GRID {
            return Err(Error::InvalidArgument(format!("grid {grid} below {MIN_GRID}")));
        }
        let green = GreenFunction::new(domain, w)?;
        let capacity = robin_capacity(domain, w)?.capacity;
        let delta = domain.boundary_distance(w)?.delta;
        let (lo, hi) = domain.bounding_box().expect("model domain");
        let full = Field::new(domain, green.clone(), lo, hi, grid);
        let critical = critical_points(domain, w)?;
        Ok(Self { domain: domain.clone(), pole: w, green, grid, capacity, delta, full, critical })
    }

    pub fn critical_points(&self) -> &[CriticalPoint<f64>] {
        &self.critical
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// A grid around the pole when `{G < t}` is small compared with the domain.
    fn zoomed(&self, t: f64) -> Option<Field> {
        let (lo, hi) = self.domain.bounding_box().expect("model domain");
        let span = (hi.re - lo.re).max(hi.im - lo.im);
        let mut rho = 1.5 * t.exp() / self.capacity;
        while rho < 0.125 * span && rho < 0.9 * self.delta {
            if self.encloses(t, rho) {
                let r = Complex::new(rho * 1.02, rho * 1.02);
                return Some(Field::new(&self.domain, self.green.clone(), self.pole - r, self.pole + r, self.grid));
            }
            rho *= 1.5;
        }
        None
    }

    /// `G > t` on the whole circle `|z − w| = ρ` (so `{G < t}` lies inside it).
    fn encloses(&self, t: f64, rho: f64) -> bool {
        let m = 1024;
        let mut min = f64::INFINITY;
        let mut slope = 0.0f64;
        for k in 0..m {
            let z = self.pole + Complex::from_polar(rho, std::f64::consts::TAU * k as f64 / m as f64);
            min = min.min(self.green.value(z));
            slope = slope.max(self.green.gradient_norm(z));
        }
        // the arc between samples is shorter than 2πρ/m
        min - 2.0 * slope * std::f64::consts::TAU * rho / m as f64 > t
    }

    fn check_level(&self, t: f64) -> Result<()> {
        if t.is_nan() || t >= 0.0 {
            return Err(Error::LevelAbovePeak(t));
        }
        Ok(())
    }

    /// Level curve `{G = t}`.
    pub fn level_set(&self, t: f64) -> Result<Vec<Segment>> {
        self.check_level(t)?;
        Ok(match self.zoomed(t) {
            Some(f) => f.level_set(t),
            None => self.full.level_set(t),
        })
    }

    pub fn area(&self, t: f64) -> Result<AreaEstimate> {
        Ok(area_of(&self.level_set(t)?))
    }

    /// `|t − t0|` below which `t` counts as a critical level: the range of
    /// `G` over a disc of one cell diagonal around a saddle is `|G″|·diag²`,
    /// doubled.
    pub fn critical_band(&self, cp: &CriticalPoint<f64>) -> f64 {
        let hessian = self.green.gradient_derivative(cp.location).norm();
        2.0 * hessian * self.full.cell_diagonal().powi(2)
    }

    /// `γ′(t)`; fails with `CriticalLevel` inside a critical band.
    pub fn coarea(&self, t: f64) -> Result<f64> {
        self.check_level(t)?;
        for cp in &self.critical {
            let band = self.critical_band(cp);
            if (t - cp.level).abs() < band {
                return Err(Error::CriticalLevel { level: t, critical: cp.level, band });
            }
        }
        Ok(self.level_set(t)?.iter().map(Segment::coarea_term).sum())
    }

    /// Area and co-area derivative from one level set.
    fn sample(&self, t: f64) -> Result<(AreaEstimate, Option<f64>)> {
        let segments = self.level_set(t)?;
        let area = area_of(&segments);
        let critical = self.critical.iter().any(|cp| (t - cp.level).abs() < self.critical_band(cp));
        let gamma = (!critical).then(|| segments.iter().map(Segment::coarea_term).sum());
        Ok((area, gamma))
    }

    /// Profile on `steps` uniformly spaced levels in `[t_min, t_max]`.
    pub fn profile(&self, t_min: f64, t_max: f64, steps: usize) -> Result<SublevelProfile> {
        if !(t_min < t_max && t_max < 0.0) {
            return Err(Error::InvalidArgument(format!("need t_min < t_max < 0, got [{t_min}, {t_max}]")));
        }
        if steps < 8 {
            return Err(Error::InvalidArgument(format!("profile needs at least 8 steps, got {steps}")));
        }
        let t_samples: Vec<f64> = (0..steps).map(|k| t_min + (t_max - t_min) * k as f64 / (steps - 1) as f64).collect();
        let mut lambda = Vec::with_capacity(steps);
        let mut err_est = Vec::with_capacity(steps);
        let mut gamma_prime = Vec::with_capacity(steps);
        for &t in &t_samples {
            let (a, g) = self.sample(t)?;
            lambda.push(a.area);
            err_est.push(a.error);
            gamma_prime.push(g);
        }
        Ok(SublevelProfile::assemble(
            self.domain.clone(),
            self.pole,
            self.grid,
            t_samples,
            lambda,
            gamma_prime,
            err_est,
            self.critical.first().map(|c| c.level),
        ))
    }
}

fn area_of(segments: &[Segment]) -> AreaEstimate {
    let (mut shoelace, mut corr, mut err) = (0.0, 0.0, 0.0);
    for s in segments {
        let (a, c, e) = s.area_terms();
        shoelace += a;
        corr += c;
        err += e;
    }
    let area = shoelace + corr;
    AreaEstimate { area, error: err + 1e-14 * area.abs() }
}

/// `λ({G_Ω(·, w) < t})`.
pub fn sublevel_area(domain: &DomainSpec<f64>, w: Point<f64>, t: f64, resolution: usize) -> Result<AreaEstimate> {
    if t.is_nan() || t >= 0.0 {
        return Err(Error::LevelAbovePeak(t));
    }
    Sublevels::new(domain, w, resolution)?.area(t)
}

/// `γ′(t) = ∫_{G=t} dσ/|∇G|`.
pub fn coarea_derivative(domain: &DomainSpec<f64>, w: Point<f64>, t: f64, resolution: usize) -> Result<f64> {
    if t.is_nan() || t >= 0.0 {
        return Err(Error::LevelAbovePeak(t));
    }
    Sublevels::new(domain, w, resolution)?.coarea(t)
}

/// Polylines of `{G = t}` for each level.
pub fn level_curves(domain: &DomainSpec<f64>, w: Point<f64>, levels: &[f64], resolution: usize) -> Result<Vec<Vec<Vec<Point<f64>>>>> {
    let s = Sublevels::new(domain, w, resolution)?;
    levels.iter().map(|&t| Ok(polylines(&s.level_set(t)?))).collect()
}

/// Profile at the default grid.
pub fn profile_scan(domain: &DomainSpec<f64>, w: Point<f64>, t_min: f64, t_max: f64, steps: usize) -> Result<SublevelProfile> {
    profile_scan_with(domain, w, t_min, t_max, steps, DEFAULT_GRID)
}

pub fn profile_scan_with(domain: &DomainSpec<f64>, w: Point<f64>, t_min: f64, t_max: f64, steps: usize, grid: usize) -> Result<SublevelProfile> {
    Sublevels::new(domain, w, grid)?.profile(t_min, t_max, steps)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SublevelProfile {
    #[serde(skip)]
    pub domain: DomainSpec<f64>,
    #[serde(skip)]
    pub pole: Point<f64>,
    pub grid: usize,
    pub t_samples: Vec<f64>,
    pub lambda: Vec<f64>,
    /// `None` at critical levels
    pub gamma_prime: Vec<Option<f64>>,
    pub log_lambda: Vec<f64>,
    /// `log λ(t_{k−1}) − 2 log λ(t_k) + log λ(t_{k+1})`; `None` at the ends
    pub second_diff: Vec<Option<f64>>,
    pub e2t_lambda: Vec<f64>,
    pub err_est: Vec<f64>,
    pub critical_level: Option<f64>,
}

impl SublevelProfile {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        domain: DomainSpec<f64>,
        pole: Point<f64>,
        grid: usize,
        t_samples: Vec<f64>,
        lambda: Vec<f64>,
        gamma_prime: Vec<Option<f64>>,
        err_est: Vec<f64>,
        critical_level: Option<f64>,
    ) -> Self {
        let mut p = Self {
            domain,
            pole,
            grid,
            t_samples,
            lambda,
            gamma_prime,
            log_lambda: Vec::new(),
            second_diff: Vec::new(),
            e2t_lambda: Vec::new(),
            err_est,
            critical_level,
        };
        p.derive();
        p
    }

    fn derive(&mut self) {
        self.log_lambda = self.lambda.iter().map(|l| l.ln()).collect();
        let n = self.lambda.len();
        self.second_diff = (0..n)
            .map(|k| (k > 0 && k + 1 < n).then(|| self.log_lambda[k - 1] - 2.0 * self.log_lambda[k] + self.log_lambda[k + 1]))
            .collect();
        self.e2t_lambda = self.t_samples.iter().zip(&self.lambda).map(|(t, l)| (-2.0 * t).exp() * l).collect();
    }

    /// Copy with `λ` at `index` multiplied by `factor` and derived columns recomputed.
    pub fn perturbed(&self, index: usize, factor: f64) -> Self {
        let mut p = self.clone();
        p.lambda[index] *= factor;
        p.derive();
        p
    }

    pub fn len(&self) -> usize {
        self.t_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_samples.is_empty()
    }

    /// `∫_{t_0}^{t_k} γ′ dt + λ(t_0)` by the trapezoidal rule; `None` past a skipped sample.
    pub fn reconstructed_lambda(&self) -> Vec<Option<f64>> {
        let mut out = Vec::with_capacity(self.len());
        let mut acc = Some(self.lambda[0]);
        out.push(acc);
        for k in 1..self.len() {
            acc = match (acc, self.gamma_prime[k - 1], self.gamma_prime[k]) {
                (Some(a), Some(g0), Some(g1)) => Some(a + 0.5 * (g0 + g1) * (self.t_samples[k] - self.t_samples[k - 1])),
                _ => None,
            };
            out.push(acc);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    ConvexWithinTolerance,
    NonConvexDetected,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub min_second_diff: f64,
    pub argmin_t: f64,
    pub critical_level: f64,
    pub window: (f64, f64),
    pub noise_floor: f64,
    pub verdict: Verdict,
}

/// Verdict on the convexity of `log λ` over the profile's window.
///
/// The noise floor is the largest disagreement between the profile's second
/// differences and those of the same levels on a grid of half the
/// resolution, or the propagated area error estimates, whichever is larger.
pub fn convexity_report(profile: &SublevelProfile, t0: f64) -> Result<ConvexityReport> {
    if profile.len() < 8 {
        return Err(Error::WindowTooNarrow(profile.len()));
    }
    let half_grid = (profile.grid / 2).max(MIN_GRID);
    let coarse = Sublevels::new(&profile.domain, profile.pole, half_grid)?;
    let coarse_lambda: Vec<f64> = profile.t_samples.iter().map(|&t| coarse.area(t).map(|a| a.area)).collect::<Result<_>>()?;
    let coarse_log: Vec<f64> = coarse_lambda.iter().map(|l| l.ln()).collect();
    let mut noise = 1e-13f64;
    let mut min = f64::INFINITY;
    let mut argmin = f64::NAN;
    for k in 1..profile.len() - 1 {
        let sd = profile.second_diff[k].expect("interior sample");
        let coarse_sd = coarse_log[k - 1] - 2.0 * coarse_log[k] + coarse_log[k + 1];
        let propagated = (profile.err_est[k - 1] / profile.lambda[k - 1])
            + 2.0 * (profile.err_est[k] / profile.lambda[k])
            + (profile.err_est[k + 1] / profile.lambda[k + 1]);
        noise = noise.max((sd - coarse_sd).abs()).max(propagated);
        if sd < min {
            min = sd;
            argmin = profile.t_samples[k];
        }
    }
    let verdict = if min < -noise { Verdict::NonConvexDetected } else { Verdict::ConvexWithinTolerance };
    Ok(ConvexityReport {
        min_second_diff: min,
        argmin_t: argmin,
        critical_level: t0,
        window: (profile.t_samples[0], profile.t_samples[profile.len() - 1]),
        noise_floor: noise,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonotonicityResult {
    pub max_decrease: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Largest forward decrease of `e^{−2t}λ` (which is non-decreasing in `t`),
/// against a tolerance propagated from the area error estimates.
pub fn monotonicity_check(profile: &SublevelProfile) -> MonotonicityResult {
    let tol = (1..profile.len())
        .map(|k| {
            (-2.0 * profile.t_samples[k - 1]).exp() * profile.err_est[k - 1] + (-2.0 * profile.t_samples[k]).exp() * profile.err_est[k]
        })
        .fold(0.0f64, f64::max);
    monotonicity_check_with(profile, tol.max(1e-12))
}

/// [`monotonicity_check`] with an explicit tolerance.
pub fn monotonicity_check_with(profile: &SublevelProfile, tolerance: f64) -> MonotonicityResult {
    let max_decrease = profile.e2t_lambda.windows(2).map(|p| p[0] - p[1]).fold(f64::NEG_INFINITY, f64::max);
    MonotonicityResult { max_decrease, tolerance, pass: max_decrease <= tolerance }
}
