//! Marching squares on a cached grid of `G`, with crossings solved on the
//! true function rather than interpolated.

use std::collections::HashMap;

use num_complex::Complex;
use rayon::prelude::*;

use crate::geometry::{DomainSpec, Point};
use crate::green::GreenFunction;

/// A grid of `G` values over an axis-aligned box.
pub struct Field {
    pub(crate) green: GreenFunction<f64>,
    pub(crate) domain: DomainSpec<f64>,
    lo: Point<f64>,
    hx: f64,
    hy: f64,
    n: usize,
    /// `G` at each node; `NaN` outside the domain.
    values: Vec<f64>,
    circles: Vec<(Point<f64>, f64, bool)>,
}

/// A piece of the level curve with the sublevel region on its left.
#[derive(Clone, Copy, Debug)]
pub struct Segment {
    pub start: Point<f64>,
    pub end: Point<f64>,
    /// point of the curve over the chord midpoint, if the projection converged
    pub middle: Option<Point<f64>>,
    pub(crate) start_edge: usize,
    pub(crate) end_edge: usize,
    pub(crate) start_slope: f64,
    pub(crate) end_slope: f64,
    pub(crate) middle_slope: f64,
}

impl Segment {
    pub fn chord(&self) -> f64 {
        (self.end - self.start).norm()
    }

    /// Signed distance from the chord midpoint to the curve, positive towards the region.
    fn sagitta(&self) -> Option<f64> {
        let m = self.middle?;
        let d = self.end - self.start;
        let normal = Complex::new(-d.im, d.re) / d.norm();
        let off = m - (self.start + self.end) * 0.5;
        Some(off.re * normal.re + off.im * normal.im)
    }

    /// `(shoelace term, curvature correction, error estimate)`.
    ///
    /// The correction is the area between chord and arc: `(2/3)·chord·sagitta`
    /// from the parabola, times `1 + 0.8(s/c)²`, which makes it exact for
    /// circular arcs through fifth order in the turning angle.
    pub(crate) fn area_terms(&self) -> (f64, f64, f64) {
        let (a, b) = (self.start, self.end);
        let shoelace = 0.5 * (a.re * b.im - a.im * b.re);
        let c = self.chord();
        match self.sagitta() {
            Some(s) if c > 0.0 => {
                let k = s / c;
                let corr = -(2.0 / 3.0) * c * s * (1.0 + 0.8 * k * k);
                (shoelace, corr, corr.abs() * k * k)
            }
            Some(_) => (shoelace, 0.0, 0.0),
            None => (shoelace, 0.0, c * c),
        }
    }

    /// `∫ dσ/|∇G|` over the arc, Simpson's rule in the chord parameter.
    pub(crate) fn coarea_term(&self) -> f64 {
        let c = self.chord();
        let k = self.sagitta().unwrap_or(0.0) / c.max(f64::MIN_POSITIVE);
        let length = c * (1.0 + 8.0 / 3.0 * k * k);
        let inv = |g: f64| 1.0 / g;
        if self.middle.is_some() {
            length * (inv(self.start_slope) + 4.0 * inv(self.middle_slope) + inv(self.end_slope)) / 6.0
        } else {
            length * (inv(self.start_slope) + inv(self.end_slope)) / 2.0
        }
    }
}

impl Field {
    pub fn new(domain: &DomainSpec<f64>, green: GreenFunction<f64>, lo: Point<f64>, hi: Point<f64>, n: usize) -> Self {
        let hx = (hi.re - lo.re) / (n - 1) as f64;
        let hy = (hi.im - lo.im) / (n - 1) as f64;
        let values: Vec<f64> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let z = Complex::new(lo.re + hx * (k % n) as f64, lo.im + hy * (k / n) as f64);
                if domain.contains(z) {
                    green.value(z)
                } else {
                    f64::NAN
                }
            })
            .collect();
        let circles = domain.chart().map(|c| c.image_circles()).unwrap_or_default();
        Self { green, domain: domain.clone(), lo, hx, hy, n, values, circles }
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn cell_diagonal(&self) -> f64 {
        self.hx.hypot(self.hy)
    }

    fn node(&self, i: usize, j: usize) -> Point<f64> {
        Complex::new(self.lo.re + self.hx * i as f64, self.lo.im + self.hy * j as f64)
    }

    fn below(&self, i: usize, j: usize, t: f64) -> bool {
        let v = self.values[j * self.n + i];
        v < t
    }

    /// Parameter in `(0, 1]` where the segment `a → a + d` first leaves the domain.
    fn exit_parameter(&self, a: Point<f64>, d: Point<f64>) -> f64 {
        let mut best = 1.0f64;
        for &(c, r, outward) in &self.circles {
            // |a + s d − c|² = r²
            let p = a - c;
            let qa = d.norm_sqr();
            let qb = 2.0 * (p.re * d.re + p.im * d.im);
            let qc = p.norm_sqr() - r * r;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                continue;
            }
            let sq = disc.sqrt();
            let roots = [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)];
            let s = if outward { roots[1] } else { roots[0] };
            if s > 0.0 && s < best && (outward || qc > 0.0) {
                best = s;
            }
        }
        best
    }

    /// Crossing of `G = t` on the segment from `a` (below) towards `b`.
    ///
    /// When `b` is outside the domain the bracket ends where the segment
    /// meets the boundary, where `G = 0 > t`.
    fn crossing(&self, a: Point<f64>, va: f64, b: Point<f64>, vb: Option<f64>, t: f64) -> (Point<f64>, f64) {
        let d = b - a;
        let hi_end = match vb {
            Some(_) => 1.0,
            None => self.exit_parameter(a, d),
        };
        let (mut lo, mut hi) = (0.0f64, hi_end);
        let f_hi = vb.map_or(-t, |v| v - t);
        let f_lo = va - t;
        let mut s = if f_lo.is_finite() && f_hi.is_finite() && f_hi > f_lo {
            (lo + (hi - lo) * (-f_lo / (f_hi - f_lo))).clamp(0.0, hi_end)
        } else {
            0.5 * hi_end
        };
        let mut slope = f64::NAN;
        for _ in 0..80 {
            let z = a + d * s;
            let jet = self.green.jet(z);
            let f = jet.value - t;
            slope = jet.grad.norm();
            if f < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let step = f / (jet.grad * d).re;
            if f == 0.0 || (step.is_finite() && step.abs() <= 1e-13 * hi_end) {
                s = (s - step).clamp(lo, hi);
                break;
            }
            let next = s - step;
            s = if next.is_finite() && next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo <= 1e-14 * hi_end {
                break;
            }
        }
        let z = a + d * s;
        if !slope.is_finite() {
            slope = self.green.gradient_norm(z);
        }
        (z, slope)
    }

    /// Edge id: horizontal edges `(i,j)–(i+1,j)` first, then vertical `(i,j)–(i,j+1)`.
    fn edge_id(&self, i: usize, j: usize, vertical: bool) -> usize {
        if vertical {
            self.n * self.n + j * self.n + i
        } else {
            j * self.n + i
        }
    }

    fn solve_edge(&self, i0: usize, j0: usize, i1: usize, j1: usize, t: f64) -> Option<(Point<f64>, f64)> {
        let (v0, v1) = (self.values[j0 * self.n + i0], self.values[j1 * self.n + i1]);
        let (b0, b1) = (v0 < t, v1 < t);
        if b0 == b1 {
            return None;
        }
        let (p0, p1) = (self.node(i0, j0), self.node(i1, j1));
        let (a, va, b, vb) = if b0 { (p0, v0, p1, v1) } else { (p1, v1, p0, v0) };
        let vb = if vb.is_nan() { None } else { Some(vb) };
        Some(self.crossing(a, va, b, vb, t))
    }

    /// Level curve `{G = t}` as oriented segments.
    pub fn level_set(&self, t: f64) -> Vec<Segment> {
        let n = self.n;
        let crossings: HashMap<usize, (Point<f64>, f64)> = (0..n)
            .into_par_iter()
            .flat_map_iter(|j| {
                let mut out = Vec::new();
                for i in 0..n {
                    if i + 1 < n {
                        if let Some(c) = self.solve_edge(i, j, i + 1, j, t) {
                            out.push((self.edge_id(i, j, false), c));
                        }
                    }
                    if j + 1 < n {
                        if let Some(c) = self.solve_edge(i, j, i, j + 1, t) {
                            out.push((self.edge_id(i, j, true), c));
                        }
                    }
                }
                out
            })
            .collect();
        let mut segments: Vec<Segment> = (0..n - 1)
            .into_par_iter()
            .flat_map_iter(|j| {
                let mut out = Vec::new();
                for i in 0..n - 1 {
                    self.cell_segments(i, j, t, &crossings, &mut out);
                }
                out
            })
            .collect();
        segments.par_iter_mut().for_each(|s| self.project_middle(s, t));
        segments
    }

    fn cell_segments(&self, i: usize, j: usize, t: f64, crossings: &HashMap<usize, (Point<f64>, f64)>, out: &mut Vec<Segment>) {
        // corners counter-clockwise: (i,j), (i+1,j), (i+1,j+1), (i,j+1)
        let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
        let below = corners.map(|(a, b)| self.below(a, b, t));
        if below.iter().all(|&b| b) || below.iter().all(|&b| !b) {
            return;
        }
        let edges = [self.edge_id(i, j, false), self.edge_id(i + 1, j, true), self.edge_id(i, j + 1, false), self.edge_id(i, j, true)];
        // crossing k sits on edge k between corner k and corner k+1
        let mut exits = Vec::with_capacity(2);
        let mut entries = Vec::with_capacity(2);
        for k in 0..4 {
            let (b0, b1) = (below[k], below[(k + 1) % 4]);
            if b0 && !b1 {
                exits.push(k);
            } else if !b0 && b1 {
                entries.push(k);
            }
        }
        let next_entry = |k: usize| (1..=4).map(|d| (k + d) % 4).find(|e| entries.contains(e)).expect("entry");
        let previous_entry = |k: usize| (1..=4).map(|d| (k + 4 - d) % 4).find(|e| entries.contains(e)).expect("entry");
        let pairs: Vec<(usize, usize)> = if exits.len() == 1 {
            vec![(exits[0], entries[0])]
        } else {
            let centre = self.node(i, j) + Complex::new(0.5 * self.hx, 0.5 * self.hy);
            let centre_below = self.domain.contains(centre) && self.green.value(centre) < t;
            exits.iter().map(|&e| (e, if centre_below { next_entry(e) } else { previous_entry(e) })).collect()
        };
        for (e, f) in pairs {
            let (Some(&(p0, s0)), Some(&(p1, s1))) = (crossings.get(&edges[e]), crossings.get(&edges[f])) else { continue };
            out.push(Segment {
                start: p0,
                end: p1,
                middle: None,
                start_edge: edges[e],
                end_edge: edges[f],
                start_slope: s0,
                end_slope: s1,
                middle_slope: f64::NAN,
            });
        }
    }

    fn project_middle(&self, s: &mut Segment, t: f64) {
        let d = s.end - s.start;
        let c = d.norm();
        if c == 0.0 {
            return;
        }
        let normal = Complex::new(-d.im, d.re) / c;
        let m = (s.start + s.end) * 0.5;
        let mut off = 0.0f64;
        for _ in 0..10 {
            let z = m + normal * off;
            let jet = self.green.jet(z);
            let deriv = (jet.grad * normal).re;
            let step = (jet.value - t) / deriv;
            if !step.is_finite() {
                return;
            }
            off -= step;
            if off.abs() > c {
                return;
            }
            // quadratic convergence: once the step is this small the next one is at rounding level
            if step.abs() <= 1e-8 * c {
                let z = m + normal * off;
                s.middle = Some(z);
                s.middle_slope = self.green.gradient_norm(z);
                return;
            }
        }
    }
}

/// Chains segments into polylines through their shared edge crossings.
pub fn polylines(segments: &[Segment]) -> Vec<Vec<Point<f64>>> {
    let mut by_start: HashMap<usize, usize> = HashMap::with_capacity(segments.len());
    for (k, s) in segments.iter().enumerate() {
        by_start.insert(s.start_edge, k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    for k0 in 0..segments.len() {
        if used[k0] {
            continue;
        }
        let mut line = vec![segments[k0].start];
        let mut k = k0;
        loop {
            used[k] = true;
            line.push(segments[k].end);
            match by_start.get(&segments[k].end_edge) {
                Some(&next) if !used[next] => k = next,
                _ => break,
            }
        }
        lines.push(line);
    }
    lines
}
