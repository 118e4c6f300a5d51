//! Negative Green function `G_Ω(·, w)`, logarithmic capacity, maxima over
//! closed discs, critical points and the boundary flux identity.

mod annulus;
mod critical;

pub use critical::{critical_points, gradient_minima, CriticalPoint};

use num_complex::Complex;
use num_traits::One;

use self::annulus::{AnnulusGreen, Jet};
use crate::error::{Error, Result};
use crate::geometry::{golden_min, Base, Chart, DomainSpec, Point};
use crate::scalar::{from_usize, lit, Scalar};

/// Value and gradient of `G_Ω(·, w)` at a point.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct GreenValue<T> {
    pub value: T,
    pub grad_x: T,
    pub grad_y: T,
    pub truncation_bound: T,
}

/// Logarithmic capacity `c_Ω(w)` and Robin constant `log c_Ω(w)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct CapacityResult<T> {
    pub capacity: T,
    pub robin_constant: T,
    pub truncation_bound: T,
}

#[derive(Clone, Debug)]
enum BaseGreen<T> {
    Disc { center: Point<T>, radius: T, pole: Point<T> },
    Annulus(Box<AnnulusGreen<T>>),
}

/// `G_Ω(·, w)` prepared for repeated evaluation.
///
/// Evaluation also works on the closed domain (boundary points give 0 up to
/// rounding), which the disc-maximum and contouring code rely on.
#[derive(Clone, Debug)]
pub struct GreenFunction<T> {
    chart: Chart<T>,
    pole: Point<T>,
    base_pole: Point<T>,
    base: BaseGreen<T>,
}

impl<T: Scalar> GreenFunction<T> {
    pub fn new(domain: &DomainSpec<T>, w: Point<T>) -> Result<Self> {
        let chart = match domain {
            DomainSpec::Polygon { .. } | DomainSpec::PolarComplement => {
                return Err(Error::UnsupportedDomain(domain.kind().into()))
            }
            _ => domain.chart().expect("model domain"),
        };
        domain.require_inside(w)?;
        let base_pole = chart.pull(w).ok_or_else(|| Error::MapSingular(format!("{w}")))?;
        let base = match chart.base {
            Base::Disc { center, radius } => BaseGreen::Disc { center, radius, pole: base_pole },
            Base::Annulus { q } => BaseGreen::Annulus(Box::new(AnnulusGreen::new(q, base_pole))),
        };
        Ok(Self { chart, pole: w, base_pole, base })
    }

    pub fn pole(&self) -> Point<T> {
        self.pole
    }

    pub fn chart(&self) -> &Chart<T> {
        &self.chart
    }

    /// Preimage of the pole in the base chart.
    pub fn base_pole(&self) -> Point<T> {
        self.base_pole
    }

    fn base_value(&self, zeta: Point<T>) -> T {
        match &self.base {
            BaseGreen::Disc { center, radius, pole } => disc_value(*center, *radius, *pole, zeta),
            BaseGreen::Annulus(a) => a.value(zeta),
        }
    }

    fn base_jet(&self, zeta: Point<T>) -> Jet<T> {
        match &self.base {
            BaseGreen::Disc { center, radius, pole } => disc_jet(*center, *radius, *pole, zeta),
            BaseGreen::Annulus(a) => a.jet(zeta),
        }
    }

    /// Value in base coordinates.
    pub fn value_base(&self, zeta: Point<T>) -> T {
        self.base_value(zeta)
    }

    /// `G` at an image-plane point of the closed domain; `+∞` past the map singularity.
    pub fn value(&self, z: Point<T>) -> T {
        match self.chart.pull(z) {
            Some(zeta) => self.base_value(zeta),
            None => T::infinity(),
        }
    }

    /// Value, complex gradient `G_x − iG_y` and its complex derivative.
    pub(crate) fn jet(&self, z: Point<T>) -> Jet<T> {
        match self.chart.map {
            None => self.base_jet(z),
            Some(m) => {
                let inv = m.inverse();
                let zeta = inv.apply(z).expect("point away from the map singularity");
                let d1 = inv.derivative(z).expect("regular point");
                let d2 = inv.second_derivative(z).expect("regular point");
                let j = self.base_jet(zeta);
                Jet {
                    value: j.value,
                    grad: j.grad * d1,
                    grad_deriv: j.grad_deriv * d1 * d1 + j.grad * d2,
                    bound: j.bound,
                }
            }
        }
    }

    /// Complex gradient `G_x − iG_y` (a holomorphic function of `z`).
    pub fn complex_gradient(&self, z: Point<T>) -> Point<T> {
        self.jet(z).grad
    }

    /// Complex derivative of [`Self::complex_gradient`]; its modulus is the
    /// Hessian eigenvalue magnitude of the harmonic `G`.
    pub fn gradient_derivative(&self, z: Point<T>) -> Point<T> {
        self.jet(z).grad_deriv
    }

    pub fn eval(&self, z: Point<T>) -> GreenValue<T> {
        let j = self.jet(z);
        GreenValue { value: j.value, grad_x: j.grad.re, grad_y: -j.grad.im, truncation_bound: j.bound }
    }

    pub fn gradient_norm(&self, z: Point<T>) -> T {
        self.jet(z).grad.norm()
    }
}

fn disc_value<T: Scalar>(center: Point<T>, radius: T, pole: Point<T>, z: Point<T>) -> T {
    let (wp, zp) = (pole - center, z - center);
    let den = Complex::new(radius * radius, T::zero()) - wp.conj() * zp;
    ((zp - wp) * radius / den).norm().ln()
}

fn disc_jet<T: Scalar>(center: Point<T>, radius: T, pole: Point<T>, z: Point<T>) -> Jet<T> {
    let (wp, zp) = (pole - center, z - center);
    let den = Complex::new(radius * radius, T::zero()) - wp.conj() * zp;
    let num = zp - wp;
    let one = Complex::<T>::one();
    let grad = one / num + wp.conj() / den;
    let grad_deriv = -one / (num * num) + wp.conj() * wp.conj() / (den * den);
    Jet { value: (num * radius / den).norm().ln(), grad, grad_deriv, bound: T::zero() }
}

/// `G_Ω(z, w)` with gradient.
pub fn green_eval<T: Scalar>(domain: &DomainSpec<T>, w: Point<T>, z: Point<T>) -> Result<GreenValue<T>> {
    let g = GreenFunction::new(domain, w)?;
    domain.require_inside(z)?;
    if z == w {
        return Err(Error::CoincidentPoints);
    }
    Ok(g.eval(z))
}

/// `c_Ω(w) = exp(lim_{z→w}(G_Ω(z, w) − log|z − w|))`.
///
/// The logarithmic singularity is removed inside the closed forms; the limit
/// is never taken numerically. Möbius images use `c_F(Ω)(F(ζ)) = c_Ω(ζ)/|F′(ζ)|`.
pub fn robin_capacity<T: Scalar>(domain: &DomainSpec<T>, w: Point<T>) -> Result<CapacityResult<T>> {
    match domain {
        DomainSpec::PolarComplement => {
            domain.require_inside(w)?;
            return Ok(CapacityResult { capacity: T::zero(), robin_constant: T::neg_infinity(), truncation_bound: T::zero() });
        }
        DomainSpec::Polygon { .. } => return Err(Error::UnsupportedDomain("polygon".into())),
        _ => {}
    }
    domain.require_inside(w)?;
    let chart = domain.chart().expect("model domain");
    let (zeta, modulus) = domain.moebius_transport(w)?;
    let (log_c, bound) = match chart.base {
        Base::Disc { center, radius } => {
            let r2 = (zeta - center).norm_sqr();
            ((radius / (radius * radius - r2)).ln(), T::zero())
        }
        Base::Annulus { q } => AnnulusGreen::new(q, zeta).robin_constant(),
    };
    let log_c = log_c - modulus.ln();
    Ok(CapacityResult { capacity: log_c.exp(), robin_constant: log_c, truncation_bound: bound })
}

/// Upper bound for `max_{|z−w|≤r} G_Ω(z, w)`, attained on the circle `|z − w| = r`.
///
/// The circle is sampled at `nodes` angles, every sampled local maximum is
/// polished by golden-section search, and a Lipschitz margin for the final
/// bracket is added. The result never exceeds 0, the supremum of G on the closure.
pub fn disc_max_green<T: Scalar>(domain: &DomainSpec<T>, w: Point<T>, r: T) -> Result<T> {
    disc_max_green_with(domain, w, r, 4096)
}

pub fn disc_max_green_with<T: Scalar>(domain: &DomainSpec<T>, w: Point<T>, r: T, nodes: usize) -> Result<T> {
    let delta = domain.boundary_distance(w)?.delta;
    if !(r > T::zero()) || r > delta * (T::one() + lit(1e-12)) {
        return Err(Error::RadiusTooLarge {
            radius: r.to_f64().unwrap_or(f64::NAN),
            delta: delta.to_f64().unwrap_or(f64::NAN),
        });
    }
    let g = GreenFunction::new(domain, w)?;
    let on_circle = |theta: T| g.value(w + Complex::from_polar(r, theta));
    let step = T::TAU() / from_usize(nodes);
    let samples: Vec<T> = (0..nodes).map(|k| on_circle(step * from_usize(k))).collect();
    let mut peaks: Vec<usize> = (0..nodes)
        .filter(|&k| {
            let prev = samples[(k + nodes - 1) % nodes];
            let next = samples[(k + 1) % nodes];
            samples[k] >= prev && samples[k] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| samples[b].partial_cmp(&samples[a]).unwrap_or(std::cmp::Ordering::Equal));
    peaks.truncate(8);
    let mut best = samples.iter().copied().fold(T::neg_infinity(), T::max);
    let tol = lit::<T>(1e-13);
    let mut slope = T::zero();
    for &k in &peaks {
        let centre = step * from_usize(k);
        let (theta, neg) = golden_min(&|t: T| -on_circle(t), centre - step, centre + step, tol);
        best = best.max(-neg);
        slope = slope.max(g.gradient_norm(w + Complex::from_polar(r, theta)));
    }
    // |dG/dθ| ≤ r|∇G|; near the maximizer the gradient is at most twice the sampled one
    let margin = lit::<T>(2.0) * slope * r * tol;
    Ok((best + margin).min(T::zero()))
}

/// Outward flux `∫_{∂Ω} ∂_n G dσ`, per boundary component.
///
/// Normal derivatives are one-sided fourth-order finite differences along
/// the inward normal with step one hundredth of the node spacing; the
/// quadrature is the trapezoidal rule on each circle.
pub fn boundary_flux_components<T: Scalar>(domain: &DomainSpec<T>, w: Point<T>, n: usize) -> Result<Vec<T>> {
    if !matches!(domain, DomainSpec::Disc { .. } | DomainSpec::Annulus { .. }) {
        return Err(Error::UnsupportedDomain(domain.kind().into()));
    }
    if n < 64 {
        return Err(Error::InvalidArgument(format!("boundary_flux needs n >= 64, got {n}")));
    }
    let g = GreenFunction::new(domain, w)?;
    let chart = domain.chart().expect("model domain");
    let nodes = domain.boundary_sample(n)?;
    let circles = chart.image_circles();
    let mut fluxes = Vec::with_capacity(circles.len());
    let mut offset = 0usize;
    let total_r: T = circles.iter().fold(T::zero(), |s, c| s + c.1);
    for (idx, &(_, radius, _)) in circles.iter().enumerate() {
        let m = if idx + 1 == circles.len() {
            nodes.len() - offset
        } else {
            (from_usize::<T>(n) * radius / total_r).round().to_usize().unwrap_or(1).clamp(1, n - 1)
        };
        let spacing = T::TAU() * radius / from_usize(m);
        let h = spacing * lit(0.01);
        let coeffs = [lit::<T>(-25.0), lit(48.0), lit(-36.0), lit(16.0), lit(-3.0)];
        let mut flux = T::zero();
        for node in &nodes[offset..offset + m] {
            let mut d = T::zero();
            for (k, &c) in coeffs.iter().enumerate().skip(1) {
                d = d + c * g.value(node.point - node.normal * (h * from_usize(k)));
            }
            // G = 0 on the boundary; d/ds G(p − s·n) at s = 0 is −∂_n G
            let inward_derivative = d / (lit::<T>(12.0) * h);
            flux = flux - inward_derivative * spacing;
        }
        fluxes.push(flux);
        offset += m;
    }
    Ok(fluxes)
}

/// Total outward flux of `∇G`; equals 2π.
pub fn boundary_flux<T: Scalar>(domain: &DomainSpec<T>, w: Point<T>, n: usize) -> Result<T> {
    Ok(boundary_flux_components(domain, w, n)?.into_iter().fold(T::zero(), |s, f| s + f))
}

#[cfg(test)]
mod tests;
