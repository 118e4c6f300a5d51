//! Zeros of `∇G` by Newton iteration on the holomorphic gradient `G_x − iG_y`.

use num_complex::Complex;

use super::GreenFunction;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::scalar::{from_usize, lit, Scalar};

/// Interior zero of `∇G`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct CriticalPoint<T> {
    pub location: Point<T>,
    /// `t0 = G(z0)`
    pub level: T,
    pub gradient_residual: T,
    /// exponent `n` of the normal form `G = t0 + Re(z^n h(z))`
    pub order: u32,
}

const SEED_GRID: usize = 160;
const RESIDUAL_TOL: f64 = 1e-9;

/// Grid nodes where `|∇G|` is a local minimum over the 8 neighbours (ties allowed).
///
/// Nodes whose neighbourhood leaves the domain, and nodes within `exclusion`
/// cells of the pole, are skipped.
pub fn gradient_minima<T: Scalar>(g: &GreenFunction<T>, domain: &DomainSpec<T>, n: usize, exclusion: usize) -> Vec<Point<T>> {
    let Some((lo, hi)) = domain.bounding_box() else { return Vec::new() };
    let hx = (hi.re - lo.re) / from_usize(n - 1);
    let hy = (hi.im - lo.im) / from_usize(n - 1);
    let node = |i: usize, j: usize| Complex::new(lo.re + hx * from_usize(i), lo.im + hy * from_usize(j));
    let mut field = vec![T::nan(); n * n];
    for j in 0..n {
        for i in 0..n {
            let z = node(i, j);
            if domain.contains(z) && z != g.pole() {
                field[j * n + i] = g.gradient_norm(z);
            }
        }
    }
    let pole_radius = lit::<T>(exclusion as f64) * hx.max(hy);
    let mut out = Vec::new();
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let v = field[j * n + i];
            if v.is_nan() || (node(i, j) - g.pole()).norm() <= pole_radius {
                continue;
            }
            let mut is_min = true;
            'nb: for dj in 0..3 {
                for di in 0..3 {
                    if di == 1 && dj == 1 {
                        continue;
                    }
                    let u = field[(j + dj - 1) * n + i + di - 1];
                    if u.is_nan() || u < v {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                out.push(node(i, j));
            }
        }
    }
    out
}

/// All critical points of `G_Ω(·, w)`; empty for simply connected domains.
pub fn critical_points<T: Scalar>(domain: &DomainSpec<T>, w: Point<T>) -> Result<Vec<CriticalPoint<T>>> {
    let g = GreenFunction::new(domain, w)?;
    if domain.is_simply_connected() {
        return Ok(Vec::new());
    }
    let seeds = gradient_minima(&g, domain, SEED_GRID, 3);
    let (lo, hi) = domain.bounding_box().expect("bounded domain");
    let scale = (hi - lo).norm();
    let mut found: Vec<CriticalPoint<T>> = Vec::new();
    let mut stalled = None;
    for seed in seeds {
        match newton(&g, domain, seed, scale) {
            Newton::Converged(z0, residual) => {
                if found.iter().any(|c| (c.location - z0).norm() <= lit::<T>(1e-7) * scale) {
                    continue;
                }
                found.push(CriticalPoint { location: z0, level: g.value(z0), gradient_residual: residual, order: estimate_order(&g, z0) });
            }
            Newton::Stalled(residual) => stalled = Some(residual),
            Newton::Escaped => {}
        }
    }
    if found.is_empty() {
        if let Some(r) = stalled {
            return Err(Error::ConvergenceFailure(format!("Newton stalled at gradient residual {r:e}")));
        }
    }
    found.sort_by(|a, b| b.level.partial_cmp(&a.level).unwrap_or(std::cmp::Ordering::Equal));
    Ok(found)
}

enum Newton<T> {
    Converged(Point<T>, T),
    Stalled(f64),
    Escaped,
}

fn newton<T: Scalar>(g: &GreenFunction<T>, domain: &DomainSpec<T>, mut z: Point<T>, scale: T) -> Newton<T> {
    let step_tol = lit::<T>(64.0) * T::epsilon() * scale;
    for _ in 0..100 {
        let jet = g.jet(z);
        if jet.grad_deriv.norm() == T::zero() {
            break;
        }
        let step = jet.grad / jet.grad_deriv;
        let next = z - step;
        if !domain.contains(next) {
            return Newton::Escaped;
        }
        z = next;
        if step.norm() <= step_tol {
            let residual = g.gradient_norm(z);
            return if residual <= lit(RESIDUAL_TOL) {
                Newton::Converged(z, residual)
            } else {
                Newton::Stalled(residual.to_f64().unwrap_or(f64::NAN))
            };
        }
    }
    let residual = g.gradient_norm(z);
    Newton::Stalled(residual.to_f64().unwrap_or(f64::NAN))
}

/// Least-squares slope of `log mean|∇G|` against `log r` for `r ∈ [1e-4, 1e-2]`, plus one.
fn estimate_order<T: Scalar>(g: &GreenFunction<T>, z0: Point<T>) -> u32 {
    let radii = 9;
    let angles = 16;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..radii {
        let r = 10f64.powf(-4.0 + 2.0 * k as f64 / (radii - 1) as f64);
        let mut mean = 0.0;
        for a in 0..angles {
            let theta = std::f64::consts::TAU * a as f64 / angles as f64;
            let z = z0 + Complex::from_polar(lit::<T>(r), lit(theta));
            mean += g.gradient_norm(z).to_f64().unwrap_or(f64::NAN);
        }
        let (x, y) = (r.ln(), (mean / angles as f64).ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let n = radii as f64;
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    ((slope + 1.0).round().max(2.0)) as u32
}
