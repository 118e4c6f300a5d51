//! Brute-force estimators used to cross-check the analytic code paths.
//!
//! Random numbers come from ChaCha8 with the stream index set to the walk or
//! chunk number, so results are reproducible under any thread schedule.
//! Partial sums are reduced in chunk order.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{segment_closest, DomainSpec, Point};
use crate::green::GreenFunction;

/// Capture shell width for walk-on-spheres.
pub const CAPTURE_TOLERANCE: f64 = 1e-6;
/// Steps allowed per walk before it counts as not captured.
pub const MAX_STEPS: usize = 10_000;
const MIN_CAPTURE_RATE: f64 = 0.999;
const CHUNK: usize = 4096;

/// Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Running `(count, mean, M2)` merged with Chan's update.
#[derive(Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments { n, mean: self.mean + d * o.n / n, m2: self.m2 + o.m2 + d * d * self.n * o.n / n }
    }

    fn std_error(&self) -> f64 {
        if self.n < 2.0 {
            return f64::INFINITY;
        }
        (self.m2 / (self.n - 1.0) / self.n).sqrt()
    }
}

enum Boundary {
    /// `(center, radius)` of each boundary circle
    Circles(Vec<(Point<f64>, f64)>),
    Polygon(Vec<Point<f64>>),
}

impl Boundary {
    fn of(domain: &DomainSpec<f64>) -> Result<Self> {
        match domain {
            DomainSpec::Polygon { vertices } => Ok(Boundary::Polygon(vertices.clone())),
            DomainSpec::PolarComplement => Err(Error::UnsupportedDomain("polar-complement".into())),
            _ => {
                let chart = domain.chart().expect("model domain");
                Ok(Boundary::Circles(chart.image_circles().into_iter().map(|(c, r, _)| (c, r)).collect()))
            }
        }
    }

    /// Nearest boundary point and its distance.
    fn nearest(&self, z: Point<f64>) -> (Point<f64>, f64) {
        let mut best = (z, f64::INFINITY);
        match self {
            Boundary::Circles(circles) => {
                for &(c, r) in circles {
                    let v = z - c;
                    let d = (v.norm() - r).abs();
                    if d < best.1 {
                        let dir = if v.norm() > 0.0 { v / v.norm() } else { Complex::new(1.0, 0.0) };
                        best = (c + dir * r, d);
                    }
                }
            }
            Boundary::Polygon(v) => {
                for i in 0..v.len() {
                    let p = segment_closest(v[i], v[(i + 1) % v.len()], z);
                    let d = (p - z).norm();
                    if d < best.1 {
                        best = (p, d);
                    }
                }
            }
        }
        best
    }
}

/// Walk-on-spheres estimate of `G_Ω(z, w)`.
///
/// `G(z, w) = log|z − w| − E[log|X − w|]` where `X` is the exit point of
/// Brownian motion started at `z`. Each walk jumps to a uniform point on
/// the largest circle around the current position inside the domain and
/// stops, projected to the nearest boundary point, once within
/// [`CAPTURE_TOLERANCE`] of the boundary.
pub fn wos_green(domain: &DomainSpec<f64>, w: Point<f64>, z: Point<f64>, walks: usize, seed: u64) -> Result<McEstimate> {
    domain.require_inside(w)?;
    domain.require_inside(z)?;
    if z == w {
        return Err(Error::CoincidentPoints);
    }
    if walks < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 walks, got {walks}")));
    }
    let boundary = Boundary::of(domain)?;
    let chunks: Vec<(Moments, usize)> = (0..walks.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut m = Moments::default();
            let mut captured = 0;
            for walk in c * CHUNK..((c + 1) * CHUNK).min(walks) {
                let mut r = rng(seed, walk as u64);
                let mut x = z;
                let mut exit = None;
                for _ in 0..MAX_STEPS {
                    let (p, d) = boundary.nearest(x);
                    if d < CAPTURE_TOLERANCE {
                        exit = Some(p);
                        break;
                    }
                    let theta: f64 = r.gen_range(0.0..std::f64::consts::TAU);
                    x += Complex::from_polar(d, theta);
                }
                let exit = match exit {
                    Some(p) => {
                        captured += 1;
                        p
                    }
                    None => boundary.nearest(x).0,
                };
                m.push((exit - w).norm().ln());
            }
            (m, captured)
        })
        .collect();
    let (m, captured) = chunks.into_iter().fold((Moments::default(), 0), |(a, n), (b, k)| (a.merge(b), n + k));
    let rate = captured as f64 / walks as f64;
    if rate < MIN_CAPTURE_RATE {
        return Err(Error::NonConvergence(rate));
    }
    Ok(McEstimate { mean: (z - w).norm().ln() - m.mean, std_error: m.std_error(), samples: walks, seed })
}

/// Rejection-sampling estimate of `λ({G_Ω(·, w) < t})` over the bounding box.
pub fn mc_area(domain: &DomainSpec<f64>, w: Point<f64>, t: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    if t.is_nan() || t >= 0.0 {
        return Err(Error::LevelAbovePeak(t));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let g = GreenFunction::new(domain, w)?;
    let (lo, hi) = domain.bounding_box().ok_or_else(|| Error::UnsupportedDomain(domain.kind().into()))?;
    let size = hi - lo;
    let hits: usize = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut r = rng(seed, c as u64);
            let mut hits = 0;
            for _ in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let z = lo + Complex::new(r.gen::<f64>() * size.re, r.gen::<f64>() * size.im);
                if domain.contains(z) && g.value(z) < t {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let box_area = size.re * size.im;
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        mean: box_area * p,
        std_error: box_area * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        seed,
    })
}

/// Logarithmic capacity as a genuine limit: circle means of `G − log r`
/// Richardson-extrapolated in `r²` to `r = 0`.
pub fn robin_extrapolate(domain: &DomainSpec<f64>, w: Point<f64>, radii: &[f64]) -> Result<f64> {
    if radii.len() < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 radii, got {}", radii.len())));
    }
    let delta = domain.boundary_distance(w)?.delta;
    if radii.windows(2).any(|p| p[1] >= p[0]) || radii.iter().any(|&r| !(r > 0.0 && r <= 0.5 * delta * (1.0 + 1e-12))) {
        return Err(Error::InvalidArgument(format!("radii must decrease within (0, {}]", 0.5 * delta)));
    }
    let g = GreenFunction::new(domain, w)?;
    let means: Vec<f64> = radii
        .iter()
        .map(|&r| {
            let m = 64;
            let s: f64 = (0..m)
                .map(|k| g.value(w + Complex::from_polar(r, std::f64::consts::TAU * k as f64 / m as f64)))
                .sum();
            s / m as f64 - r.ln()
        })
        .collect();
    // Neville's table for the polynomial in h = r² evaluated at h = 0
    let h: Vec<f64> = radii.iter().map(|r| r * r).collect();
    let mut p = means;
    let mut diagonal = vec![p[p.len() - 1]];
    for level in 1..h.len() {
        for i in 0..h.len() - level {
            p[i] = (h[i + level] * p[i] - h[i] * p[i + 1]) / (h[i + level] - h[i]);
        }
        diagonal.push(p[h.len() - level - 1]);
    }
    let n = diagonal.len();
    let jump = (diagonal[n - 1] - diagonal[n - 2]).abs();
    if !(jump <= 1e-4) {
        return Err(Error::ExtrapolationUnstable(jump));
    }
    Ok(diagonal[n - 1].exp())
}

/// Newton seeds for zeros of `∇G`: lattice nodes where a central-difference
/// `|∇G|` is a local minimum and small enough that a zero may lie within
/// about one cell.
///
/// Only values of `G` are used. The pole neighbourhood of radius 10 cells
/// is excluded; seeds closer than two cells are merged.
pub fn grid_min_gradient(domain: &DomainSpec<f64>, w: Point<f64>, grid_size: usize) -> Result<Vec<Point<f64>>> {
    if grid_size < 8 {
        return Err(Error::InvalidArgument(format!("grid {grid_size} below 8")));
    }
    let g = GreenFunction::new(domain, w)?;
    let (lo, hi) = domain.bounding_box().expect("model domain");
    let n = grid_size;
    let h = Complex::new((hi.re - lo.re) / (n - 1) as f64, (hi.im - lo.im) / (n - 1) as f64);
    let node = |i: usize, j: usize| lo + Complex::new(h.re * i as f64, h.im * j as f64);
    let values: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let z = node(k % n, k / n);
            if domain.contains(z) && z != w {
                g.value(z)
            } else {
                f64::NAN
            }
        })
        .collect();
    let at = |i: usize, j: usize| values[j * n + i];
    // central differences need all four neighbours
    let mut grad = vec![f64::NAN; n * n];
    let mut hess = vec![f64::NAN; n * n];
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let (c, e, we, nn, s) = (at(i, j), at(i + 1, j), at(i - 1, j), at(i, j + 1), at(i, j - 1));
            let gx = (e - we) / (2.0 * h.re);
            let gy = (nn - s) / (2.0 * h.im);
            let gxx = (e - 2.0 * c + we) / (h.re * h.re);
            let gyy = (nn - 2.0 * c + s) / (h.im * h.im);
            grad[j * n + i] = gx.hypot(gy);
            hess[j * n + i] = gxx.abs() + gyy.abs();
        }
    }
    let cell = h.re.max(h.im);
    let mut seeds: Vec<Point<f64>> = Vec::new();
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let v = grad[j * n + i];
            if v.is_nan() || (node(i, j) - w).norm() <= 10.0 * cell {
                continue;
            }
            let neighbours = (0..9).filter(|&k| k != 4).map(|k| grad[(j + k / 3 - 1) * n + i + k % 3 - 1]);
            let mut is_min = true;
            for u in neighbours {
                if u.is_nan() || u < v {
                    is_min = false;
                    break;
                }
            }
            if is_min && v <= 2.0 * cell * hess[j * n + i] {
                let z = node(i, j);
                if seeds.iter().all(|s| (s - z).norm() > 2.0 * cell) {
                    seeds.push(z);
                }
            }
        }
    }
    Ok(seeds)
}
