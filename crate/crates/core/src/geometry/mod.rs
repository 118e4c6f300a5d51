//! Planar domains: descriptors, membership, boundary distance, boundary
//! sampling and Möbius transport.
//!
//! Every analytic code path works on a [`Chart`]: a disc or the canonical
//! annulus `q < |ζ| < 1`, optionally pushed forward by one Möbius map.
//! Nested Möbius images are flattened by composing their coefficients.

mod literal;
pub use literal::{parse_complex, parse_point};
mod moebius;

pub use moebius::Moebius;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Scalar};

/// A point of the plane.
pub type Point<T> = Complex<T>;

/// Closed description of a planar domain.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec<T> {
    Disc { center: Point<T>, radius: T },
    /// `q < |z| < 1`.
    Annulus { q: T },
    /// `F(base)` with `F(ζ) = (aζ + b)/(cζ + d)`.
    MoebiusImage { base: Box<DomainSpec<T>>, map: Moebius<T> },
    /// Simple, positively oriented polygon.
    Polygon { vertices: Vec<Point<T>> },
    /// The plane minus the origin.
    PolarComplement,
}

/// Distance from an interior point to the boundary; `+∞` for the punctured plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceResult<T> {
    pub delta: T,
}

impl<T: Scalar> DistanceResult<T> {
    pub fn is_infinite(&self) -> bool {
        self.delta.is_infinite()
    }
}

/// A boundary node with its outward unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryNode<T> {
    pub point: Point<T>,
    pub normal: Point<T>,
}

/// Base domain of a chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Base<T> {
    Disc { center: Point<T>, radius: T },
    Annulus { q: T },
}

impl<T: Scalar> Base<T> {
    pub fn contains(&self, z: Point<T>) -> bool {
        match *self {
            Base::Disc { center, radius } => (z - center).norm() < radius,
            Base::Annulus { q } => {
                let r = z.norm();
                r > q && r < T::one()
            }
        }
    }

    /// Boundary circles as `(center, radius, outward)`; `outward = false`
    /// means the domain lies outside the circle.
    pub fn circles(&self) -> Vec<(Point<T>, T, bool)> {
        match *self {
            Base::Disc { center, radius } => vec![(center, radius, true)],
            Base::Annulus { q } => vec![(Complex::zero(), T::one(), true), (Complex::zero(), q, false)],
        }
    }

    pub fn distance(&self, z: Point<T>) -> T {
        match *self {
            Base::Disc { center, radius } => radius - (z - center).norm(),
            Base::Annulus { q } => {
                let r = z.norm();
                (r - q).min(T::one() - r)
            }
        }
    }
}

/// A model domain in the form `map(base)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chart<T> {
    pub base: Base<T>,
    /// Forward map base → image; `None` is the identity.
    pub map: Option<Moebius<T>>,
}

impl<T: Scalar> Chart<T> {
    /// Preimage of an image-plane point, `None` at the singular point.
    pub fn pull(&self, z: Point<T>) -> Option<Point<T>> {
        match &self.map {
            None => Some(z),
            Some(m) => m.inverse().apply(z),
        }
    }

    pub fn push(&self, zeta: Point<T>) -> Point<T> {
        match &self.map {
            None => zeta,
            Some(m) => m.apply(zeta).expect("chart pole lies outside the closed base"),
        }
    }

    /// `F′(ζ)` of the forward map.
    pub fn push_derivative(&self, zeta: Point<T>) -> Point<T> {
        match &self.map {
            None => Complex::one(),
            Some(m) => m.derivative(zeta).expect("chart pole lies outside the closed base"),
        }
    }

    /// `(φ(z), φ′(z))` for the inverse map φ = F⁻¹.
    pub fn pull_with_derivative(&self, z: Point<T>) -> Option<(Point<T>, Point<T>)> {
        match &self.map {
            None => Some((z, Complex::one())),
            Some(m) => {
                let inv = m.inverse();
                Some((inv.apply(z)?, inv.derivative(z)?))
            }
        }
    }

    pub fn contains(&self, z: Point<T>) -> bool {
        self.pull(z).is_some_and(|zeta| self.base.contains(zeta))
    }

    pub fn is_simply_connected(&self) -> bool {
        matches!(self.base, Base::Disc { .. })
    }

    /// Image boundary circles `(center, radius, outward)` in the image plane.
    pub fn image_circles(&self) -> Vec<(Point<T>, T, bool)> {
        self.base
            .circles()
            .into_iter()
            .map(|(c, r, outward)| match &self.map {
                None => (c, r, outward),
                Some(_) => {
                    let p = |k: f64| self.push(c + Complex::from_polar(r, lit(k)));
                    let (center, radius) = circumcircle(p(0.0), p(2.0943951023931957), p(4.1887902047863905));
                    // the domain lies inside the image circle iff the mapped
                    // outward normal points away from the image center
                    let zeta = c + Complex::new(r, T::zero());
                    let n_base: Point<T> = if outward { Complex::one() } else { -Complex::<T>::one() };
                    let n_img = n_base * self.push_derivative(zeta);
                    let rel = self.push(zeta) - center;
                    (center, radius, rel.re * n_img.re + rel.im * n_img.im > T::zero())
                }
            })
            .collect()
    }
}

fn circumcircle<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> (Point<T>, T) {
    let two = lit::<T>(2.0);
    let d = two * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
    let (a2, b2, c2) = (a.norm_sqr(), b.norm_sqr(), c.norm_sqr());
    let ux = (a2 * (b.im - c.im) + b2 * (c.im - a.im) + c2 * (a.im - b.im)) / d;
    let uy = (a2 * (c.re - b.re) + b2 * (a.re - c.re) + c2 * (b.re - a.re)) / d;
    let center = Complex::new(ux, uy);
    (center, (a - center).norm())
}

impl<T: Scalar> DomainSpec<T> {
    pub fn disc(center: Point<T>, radius: T) -> Result<Self> {
        let d = DomainSpec::Disc { center, radius };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_disc() -> Self {
        DomainSpec::Disc { center: Complex::zero(), radius: T::one() }
    }

    pub fn annulus(q: T) -> Result<Self> {
        let d = DomainSpec::Annulus { q };
        d.validate()?;
        Ok(d)
    }

    pub fn moebius(base: DomainSpec<T>, map: Moebius<T>) -> Result<Self> {
        let d = DomainSpec::MoebiusImage { base: Box::new(base), map };
        d.validate()?;
        Ok(d)
    }

    pub fn polygon(vertices: Vec<Point<T>>) -> Result<Self> {
        let d = DomainSpec::Polygon { vertices };
        d.validate()?;
        Ok(d)
    }

    /// Checks every structural invariant of the descriptor.
    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Disc { center, radius } => {
                if !(center.re.is_finite() && center.im.is_finite()) {
                    return Err(Error::InvalidDomain("disc center not finite".into()));
                }
                if !(*radius > T::zero() && radius.is_finite()) {
                    return Err(Error::InvalidDomain(format!("disc radius {radius} must be positive")));
                }
                Ok(())
            }
            DomainSpec::Annulus { q } => {
                if *q > T::zero() && *q < T::one() {
                    Ok(())
                } else {
                    Err(Error::InvalidDomain(format!("annulus q = {q} outside (0, 1)")))
                }
            }
            DomainSpec::MoebiusImage { base, map } => {
                base.validate()?;
                if matches!(**base, DomainSpec::Polygon { .. } | DomainSpec::PolarComplement) {
                    return Err(Error::InvalidDomain("Moebius base must be a disc, annulus or Moebius image".into()));
                }
                if map.determinant().norm() <= T::epsilon() {
                    return Err(Error::InvalidDomain("Moebius determinant vanishes".into()));
                }
                let chart = self.chart().expect("validated base has a chart");
                if let Some(m) = &chart.map {
                    if let Some(pole) = m.pole() {
                        let inside_closure = chart.base.distance(pole) >= -lit::<T>(1e-12);
                        if inside_closure {
                            return Err(Error::InvalidDomain("Moebius pole lies in the closed base domain".into()));
                        }
                    }
                }
                Ok(())
            }
            DomainSpec::Polygon { vertices } => validate_polygon(vertices),
            DomainSpec::PolarComplement => Ok(()),
        }
    }

    /// Flattened chart for model domains; `None` for polygons and the punctured plane.
    pub fn chart(&self) -> Option<Chart<T>> {
        match self {
            DomainSpec::Disc { center, radius } => Some(Chart { base: Base::Disc { center: *center, radius: *radius }, map: None }),
            DomainSpec::Annulus { q } => Some(Chart { base: Base::Annulus { q: *q }, map: None }),
            DomainSpec::MoebiusImage { base, map } => {
                let inner = base.chart()?;
                let composed = match inner.map {
                    None => *map,
                    Some(m) => map.compose(&m),
                };
                Some(Chart { base: inner.base, map: Some(composed) })
            }
            DomainSpec::Polygon { .. } | DomainSpec::PolarComplement => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            DomainSpec::Disc { .. } => "disc",
            DomainSpec::Annulus { .. } => "annulus",
            DomainSpec::MoebiusImage { .. } => "moebius",
            DomainSpec::Polygon { .. } => "polygon",
            DomainSpec::PolarComplement => "polar-complement",
        }
    }

    pub fn is_simply_connected(&self) -> bool {
        match self {
            DomainSpec::Polygon { .. } => true,
            DomainSpec::PolarComplement => false,
            _ => self.chart().is_some_and(|c| c.is_simply_connected()),
        }
    }

    /// Open-domain membership; boundary points are outside.
    pub fn contains(&self, z: Point<T>) -> bool {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return false;
        }
        match self {
            DomainSpec::Polygon { vertices } => polygon_contains(vertices, z),
            DomainSpec::PolarComplement => !z.is_zero(),
            _ => self.chart().is_some_and(|c| c.contains(z)),
        }
    }

    pub(crate) fn require_inside(&self, z: Point<T>) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::PointOutsideDomain(format!("{z}")))
        }
    }

    /// Euclidean distance from `w` to the boundary.
    ///
    /// Exact for discs, annuli and polygons. For Möbius images the boundary
    /// circles are scanned in the base parameter with doubling density,
    /// each coarse minimum is polished by golden-section search, and the
    /// result is lowered by a Lipschitz margin so it never exceeds the true
    /// distance.
    pub fn boundary_distance(&self, w: Point<T>) -> Result<DistanceResult<T>> {
        self.require_inside(w)?;
        let delta = match self {
            DomainSpec::PolarComplement => T::infinity(),
            DomainSpec::Polygon { vertices } => polygon_edges(vertices)
                .map(|(a, b)| segment_distance(a, b, w))
                .fold(T::infinity(), T::min),
            _ => {
                let chart = self.chart().expect("model domain");
                match chart.map {
                    None => chart.base.distance(w),
                    Some(_) => moebius_boundary_distance(&chart, w),
                }
            }
        };
        Ok(DistanceResult { delta })
    }

    /// `n` boundary nodes with outward normals, spaced by arc length, grouped
    /// per boundary component.
    pub fn boundary_sample(&self, n: usize) -> Result<Vec<BoundaryNode<T>>> {
        if n < 4 {
            return Err(Error::InvalidArgument(format!("boundary_sample needs n >= 4, got {n}")));
        }
        match self {
            DomainSpec::PolarComplement => Err(Error::UnsupportedDomain("polar-complement".into())),
            DomainSpec::Polygon { vertices } => Ok(polygon_sample(vertices, n)),
            _ => {
                let chart = self.chart().expect("model domain");
                let circles = chart.image_circles();
                let total: T = circles.iter().map(|&(_, r, _)| r).fold(T::zero(), |a, b| a + b);
                let mut counts: Vec<usize> = Vec::with_capacity(circles.len());
                let mut used = 0usize;
                for (k, &(_, r, _)) in circles.iter().enumerate() {
                    let m = if k + 1 == circles.len() {
                        n - used
                    } else {
                        (from_usize::<T>(n) * r / total).round().to_usize().unwrap_or(0).clamp(1, n - 1)
                    };
                    used += m;
                    counts.push(m);
                }
                let mut out = Vec::with_capacity(n);
                for (&(center, radius, outward), &m) in circles.iter().zip(&counts) {
                    let step = T::TAU() / from_usize(m);
                    for k in 0..m {
                        let dir = Complex::from_polar(T::one(), step * from_usize(k));
                        let normal = if outward { dir } else { -dir };
                        out.push(BoundaryNode { point: center + dir * radius, normal });
                    }
                }
                Ok(out)
            }
        }
    }

    /// Preimage of `w` under the chart map and `|F′|` there.
    pub fn moebius_transport(&self, w: Point<T>) -> Result<(Point<T>, T)> {
        let chart = self.chart().ok_or_else(|| Error::UnsupportedDomain(self.kind().into()))?;
        match &chart.map {
            None => {
                self.require_inside(w)?;
                Ok((w, T::one()))
            }
            Some(m) => {
                let zeta = m.inverse().apply(w).ok_or_else(|| Error::MapSingular(format!("{w}")))?;
                if !chart.base.contains(zeta) {
                    return Err(Error::PointOutsideDomain(format!("{w}")));
                }
                let deriv = m.derivative(zeta).ok_or_else(|| Error::MapSingular(format!("{zeta}")))?;
                Ok((zeta, deriv.norm()))
            }
        }
    }

    /// Axis-aligned box `(lower-left, upper-right)` containing the closure.
    pub fn bounding_box(&self) -> Option<(Point<T>, Point<T>)> {
        match self {
            DomainSpec::PolarComplement => None,
            DomainSpec::Polygon { vertices } => {
                let mut lo = vertices[0];
                let mut hi = vertices[0];
                for v in vertices {
                    lo = Complex::new(lo.re.min(v.re), lo.im.min(v.im));
                    hi = Complex::new(hi.re.max(v.re), hi.im.max(v.im));
                }
                Some((lo, hi))
            }
            _ => {
                let chart = self.chart()?;
                let circles = chart.image_circles();
                // the outer component bounds the domain
                let (c, r, _) = circles
                    .iter()
                    .copied()
                    .find(|&(_, _, outward)| outward)
                    .unwrap_or(circles[0]);
                Some((c - Complex::new(r, r), c + Complex::new(r, r)))
            }
        }
    }

    /// Total area of the domain.
    pub fn area(&self) -> Option<T> {
        match self {
            DomainSpec::PolarComplement => None,
            DomainSpec::Polygon { vertices } => Some(signed_area(vertices)),
            _ => {
                let circles = self.chart()?.image_circles();
                let mut a = T::zero();
                for (_, r, outward) in circles {
                    let disc = T::PI() * r * r;
                    a = if outward { a + disc } else { a - disc };
                }
                Some(a)
            }
        }
    }
}

fn moebius_boundary_distance<T: Scalar>(chart: &Chart<T>, w: Point<T>) -> T {
    let mut best = T::infinity();
    for (c, r, _) in chart.base.circles() {
        let curve = |theta: T| chart.push(c + Complex::from_polar(r, theta));
        let dist = |theta: T| (curve(theta) - w).norm();
        let mut n = 64usize;
        let mut previous = T::infinity();
        let mut refined = T::infinity();
        let mut lipschitz = T::zero();
        while n <= 1 << 16 {
            let step = T::TAU() / from_usize(n);
            let mut imin = 0;
            let mut dmin = T::infinity();
            lipschitz = T::zero();
            for k in 0..n {
                let theta = step * from_usize(k);
                let d = dist(theta);
                if d < dmin {
                    dmin = d;
                    imin = k;
                }
                let speed = chart.push_derivative(c + Complex::from_polar(r, theta)).norm() * r;
                lipschitz = lipschitz.max(speed);
            }
            let centre = step * from_usize(imin);
            let (theta, d) = golden_min(&dist, centre - step, centre + step, lit(1e-13));
            let _ = theta;
            refined = d.min(dmin);
            if previous.is_finite() && (previous - refined).abs() <= lit::<T>(1e-6) * refined {
                break;
            }
            previous = refined;
            n *= 2;
        }
        // curve speed is below 2·lipschitz between nodes; the polished bracket is 1e-13 wide
        let margin = lit::<T>(2.0) * lipschitz * lit(1e-13);
        best = best.min(refined - margin);
    }
    best
}

pub(crate) fn golden_min<T: Scalar, F: Fn(T) -> T>(f: &F, mut a: T, mut b: T, tol: T) -> (T, T) {
    let inv_phi = lit::<T>(0.6180339887498949);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

pub(crate) fn polygon_edges<T: Scalar>(v: &[Point<T>]) -> impl Iterator<Item = (Point<T>, Point<T>)> + '_ {
    (0..v.len()).map(move |i| (v[i], v[(i + 1) % v.len()]))
}

pub(crate) fn segment_closest<T: Scalar>(a: Point<T>, b: Point<T>, p: Point<T>) -> Point<T> {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2.is_zero() {
        return a;
    }
    let s = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    a + ab * s.max(T::zero()).min(T::one())
}

fn segment_distance<T: Scalar>(a: Point<T>, b: Point<T>, p: Point<T>) -> T {
    (p - segment_closest(a, b, p)).norm()
}

fn cross<T: Scalar>(a: Point<T>, b: Point<T>) -> T {
    a.re * b.im - a.im * b.re
}

fn signed_area<T: Scalar>(v: &[Point<T>]) -> T {
    polygon_edges(v).map(|(a, b)| cross(a, b)).fold(T::zero(), |s, x| s + x) / lit(2.0)
}

fn segments_intersect<T: Scalar>(p1: Point<T>, p2: Point<T>, q1: Point<T>, q2: Point<T>) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    ((d1 > T::zero()) != (d2 > T::zero())) && ((d3 > T::zero()) != (d4 > T::zero()))
}

fn validate_polygon<T: Scalar>(v: &[Point<T>]) -> Result<()> {
    if v.len() < 3 {
        return Err(Error::InvalidDomain("polygon needs at least 3 vertices".into()));
    }
    if v.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
        return Err(Error::InvalidDomain("polygon vertex not finite".into()));
    }
    let n = v.len();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return Err(Error::InvalidDomain("polygon is self-intersecting".into()));
            }
        }
    }
    if signed_area(v) <= T::zero() {
        return Err(Error::InvalidDomain("polygon must be positively oriented".into()));
    }
    Ok(())
}

fn polygon_contains<T: Scalar>(v: &[Point<T>], z: Point<T>) -> bool {
    let scale = v.iter().map(|p| p.norm()).fold(T::one(), T::max);
    let on_edge = polygon_edges(v).any(|(a, b)| segment_distance(a, b, z) <= lit::<T>(1e-14) * scale);
    if on_edge {
        return false;
    }
    let mut inside = false;
    for (a, b) in polygon_edges(v) {
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if z.re < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn polygon_sample<T: Scalar>(v: &[Point<T>], n: usize) -> Vec<BoundaryNode<T>> {
    let lengths: Vec<T> = polygon_edges(v).map(|(a, b)| (b - a).norm()).collect();
    let perimeter = lengths.iter().fold(T::zero(), |s, &l| s + l);
    let spacing = perimeter / from_usize(n);
    let mut out = Vec::with_capacity(n);
    let mut edge = 0usize;
    let mut edge_start = T::zero();
    for k in 0..n {
        let s = spacing * (from_usize::<T>(k) + lit(0.5));
        while edge + 1 < lengths.len() && s > edge_start + lengths[edge] {
            edge_start = edge_start + lengths[edge];
            edge += 1;
        }
        let a = v[edge];
        let b = v[(edge + 1) % v.len()];
        let dir = (b - a) / lengths[edge];
        let local = (s - edge_start).min(lengths[edge]);
        // outward normal of a counter-clockwise boundary is the tangent rotated by −90°
        out.push(BoundaryNode { point: a + dir * local, normal: Complex::new(dir.im, -dir.re) });
    }
    out
}

#[cfg(test)]
mod tests;
