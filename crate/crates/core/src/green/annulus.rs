//! Green function of the annulus `q < |z| < 1`.
//!
//! Two exact representations are combined:
//!
//! * the prime-function product
//!   `P(ζ) = (1 − ζ)·∏_{k≥1}(1 − q^{2k}ζ)(1 − q^{2k}/ζ)`, with
//!   `G(z,w) = log|P(z/w)| − log|P(z w̄)| + log|w| − log|w|·log|z|/log q`,
//!   accurate to an absolute ~1e-16 everywhere including the pole;
//! * the Fourier series in logarithmic coordinates `x = log|z|`,
//!   `y = arg(z/w)`, with `a = −log q`, `μ_k = kπ/a`, `s_k(x) = sin μ_k(x + a)`:
//!   `G = −Σ_k (2/k) s_k(x_w) s_k(x) cosh(μ_k(π − |y|))/sinh(μ_k π)`.
//!   Its terms decay like `e^{−μ_k |y|}`, and every term is computed to full
//!   relative precision, so far from the pole (where G can be as small as
//!   1e-19 for thin annuli) the value keeps all its significant digits.
//!
//! The evaluator uses the Fourier form whenever `|y| ≥ a/π`.

use num_complex::Complex;
use num_traits::One;

use crate::scalar::{from_usize, lit, Scalar};

/// Prepared annulus Green function for a fixed pole.
#[derive(Clone, Debug)]
pub(crate) struct AnnulusGreen<T> {
    w: Complex<T>,
    w_conj: Complex<T>,
    log_q: T,
    log_w: T,
    /// `q^{2k}` for `k = 1..=K`.
    powers: Vec<T>,
    pub(crate) product_bound: T,
    /// strip width `a = −log q`
    width: T,
    /// `sin μ_k(x_w + a)`, lazily sized
    pole_modes: Vec<T>,
    switch_angle: T,
}

/// Value, complex gradient `G_x − i G_y`, its complex derivative and a truncation bound.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Jet<T> {
    pub value: T,
    pub grad: Complex<T>,
    pub grad_deriv: Complex<T>,
    pub bound: T,
}

const MAX_STRIP_TERMS: usize = 4000;

impl<T: Scalar> AnnulusGreen<T> {
    pub(crate) fn new(q: T, w: Complex<T>) -> Self {
        let (powers, product_bound) = product_powers(q);
        let width = -q.ln();
        let x_w = w.norm().ln();
        let pole_modes = (1..=MAX_STRIP_TERMS)
            .map(|k| (from_usize::<T>(k) * T::PI() / width * (x_w + width)).sin())
            .collect();
        Self {
            w,
            w_conj: w.conj(),
            log_q: q.ln(),
            log_w: w.norm().ln(),
            powers,
            product_bound,
            width,
            pole_modes,
            switch_angle: width / T::PI(),
        }
    }

    fn angle(&self, z: Complex<T>) -> T {
        let r = z * self.w_conj;
        r.im.atan2(r.re)
    }

    /// Value only (cheap path for grids).
    pub(crate) fn value(&self, z: Complex<T>) -> T {
        let y = self.angle(z);
        if y.abs() >= self.switch_angle {
            self.strip(z, y, false).value
        } else {
            self.product_value(z)
        }
    }

    pub(crate) fn jet(&self, z: Complex<T>) -> Jet<T> {
        let y = self.angle(z);
        if y.abs() >= self.switch_angle {
            self.strip(z, y, true)
        } else {
            self.product_jet(z)
        }
    }

    /// Forces the product representation; used to cross-check the two forms.
    pub(crate) fn product_jet(&self, z: Complex<T>) -> Jet<T> {
        let zeta1 = z / self.w;
        let zeta2 = z * self.w_conj;
        let (l1, d1) = log_derivative(&self.powers, zeta1);
        let (l2, d2) = log_derivative(&self.powers, zeta2);
        let k = self.log_w / self.log_q;
        let grad = l1 / self.w - l2 * self.w_conj - Complex::new(k, T::zero()) / z;
        let grad_deriv = d1 / (self.w * self.w) - d2 * self.w_conj * self.w_conj + Complex::new(k, T::zero()) / (z * z);
        Jet { value: self.product_value(z), grad, grad_deriv, bound: self.product_bound }
    }

    pub(crate) fn product_value(&self, z: Complex<T>) -> T {
        let p1 = log_abs_prime(&self.powers, z / self.w);
        let p2 = log_abs_prime(&self.powers, z * self.w_conj);
        p1 - p2 + self.log_w - self.log_w * z.norm().ln() / self.log_q
    }

    /// Forces the Fourier representation (`y = arg(z/w)` must be nonzero).
    #[cfg(test)]
    pub(crate) fn strip_jet(&self, z: Complex<T>) -> Jet<T> {
        let y = self.angle(z);
        self.strip(z, y, true)
    }

    fn strip(&self, z: Complex<T>, y: T, derivatives: bool) -> Jet<T> {
        let a = self.width;
        let x = z.norm().ln();
        let ay = y.abs();
        let sgn = if y < T::zero() { -T::one() } else { T::one() };
        let two = lit::<T>(2.0);
        let base_rate = T::PI() / a;
        let (mut v, mut gx, mut gy, mut gxx, mut gxy) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
        let denom_floor = T::one() - (-two * base_rate * T::PI()).exp();
        let ratio = (-base_rate * ay).exp();
        let tail_factor = T::one() / (denom_floor * (T::one() - ratio));
        let mut bound = T::zero();
        for k in 1..=MAX_STRIP_TERMS {
            let kf = from_usize::<T>(k);
            let mu = kf * base_rate;
            let e1 = (-mu * ay).exp();
            let e2 = (-mu * (two * T::PI() - ay)).exp();
            let den = T::one() - (-two * mu * T::PI()).exp();
            let ch = (e1 + e2) / den;
            let phase = mu * (x + a);
            let sx = phase.sin();
            let coef = -(two / kf) * self.pole_modes[k - 1];
            v = v + coef * sx * ch;
            if derivatives {
                let sh = (e1 - e2) / den;
                let cx = phase.cos();
                gx = gx + coef * mu * cx * ch;
                gy = gy + coef * sx * (-mu * sgn * sh);
                gxx = gxx - coef * mu * mu * sx * ch;
                gxy = gxy + coef * mu * cx * (-mu * sgn * sh);
            }
            // remaining terms are bounded by a geometric series in e^{−π|y|/a}
            let next = (two / (kf + T::one())) * lit::<T>(2.0) * (-(kf + T::one()) * base_rate * ay).exp() * tail_factor;
            let scale = if derivatives { (kf + T::one()) * base_rate * (kf + T::one()) * base_rate } else { T::one() };
            bound = next * scale.max(T::one());
            let target = T::epsilon() * lit(1e-2) * v.abs().max(T::min_positive_value());
            if bound <= target || next.is_zero() {
                break;
            }
        }
        let big_f = Complex::new(gx, -gy);
        let grad = big_f / z;
        let grad_deriv = (Complex::new(gxx, -gxy) - big_f) / (z * z);
        Jet { value: v, grad, grad_deriv, bound }
    }

    /// `log c = 2Σ log(1 − q^{2k}) − log|P(|w|²)| − (log|w|)²/log q`, with
    /// the `(1 − ζ)` factor removed analytically at `ζ = 1`.
    pub(crate) fn robin_constant(&self) -> (T, T) {
        let mut s = T::zero();
        for &p in &self.powers {
            s = s + (T::one() - p).ln();
        }
        let r2 = self.w.norm_sqr();
        let v = two_s(s) - log_abs_prime(&self.powers, Complex::new(r2, T::zero())) - self.log_w * self.log_w / self.log_q;
        (v, self.product_bound)
    }
}

fn two_s<T: Scalar>(s: T) -> T {
    s + s
}

/// `q^{2k}` up to the smallest K whose tail bound on
/// `|log|P(z/w)|| + |log|P(z w̄)||` is below the working precision.
fn product_powers<T: Scalar>(q: T) -> (Vec<T>, T) {
    let q2 = q * q;
    let target = lit::<T>(T::eps_f64() * 5.0);
    let mut powers = Vec::new();
    let mut p = q2;
    loop {
        powers.push(p);
        let next = p * q2;
        // Σ_{k>K} 2(q^{2k−1} + q^{2k−2})/(1 − q^{2K}) for each of the two products
        let bound = lit::<T>(4.0) * next * (T::one() + q) / (q2 * (T::one() - q2) * (T::one() - p));
        if bound < target || powers.len() >= 10_000 {
            return (powers, bound);
        }
        p = next;
    }
}

/// `log|P(ζ)|` for the prime-function product.
fn log_abs_prime<T: Scalar>(powers: &[T], zeta: Complex<T>) -> T {
    let one = Complex::<T>::one();
    let inv = one / zeta;
    let mut prod = one - zeta;
    let mut acc = T::zero();
    for (k, &p) in powers.iter().enumerate() {
        prod = prod * (one - zeta * p) * (one - inv * p);
        // renormalize now and then so long products never leave range
        if k % 16 == 15 {
            let m = prod.norm();
            acc = acc + m.ln();
            prod = prod / m;
        }
    }
    acc + prod.norm().ln()
}

/// `(P′/P)(ζ)` and its derivative.
fn log_derivative<T: Scalar>(powers: &[T], zeta: Complex<T>) -> (Complex<T>, Complex<T>) {
    let one = Complex::<T>::one();
    let two = lit::<T>(2.0);
    let u = one - zeta;
    let mut l = -one / u;
    let mut d = -one / (u * u);
    for &p in powers {
        let s = one - zeta * p;
        l = l - Complex::new(p, T::zero()) / s;
        d = d - Complex::new(p * p, T::zero()) / (s * s);
        let t = zeta * (zeta - p);
        l = l + Complex::new(p, T::zero()) / t;
        d = d - (zeta * two - p) * p / (t * t);
    }
    (l, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_fourier_forms_agree() {
        for &(q, w) in &[(0.5, Complex::new(0.7, 0.0)), (0.3, Complex::new(0.2, 0.5)), (0.8, Complex::new(-0.1, 0.89))] {
            let g = AnnulusGreen::<f64>::new(q, w);
            for k in 0..24 {
                let r = q + (1.0 - q) * (0.05 + 0.9 * (k as f64 / 23.0));
                let z = w / w.norm() * Complex::from_polar(r, 0.4 + 0.2 * k as f64);
                let a = g.product_jet(z);
                let b = g.strip_jet(z);
                assert!((a.value - b.value).abs() < 1e-13, "{q} {z}: {} vs {}", a.value, b.value);
                assert!((a.grad - b.grad).norm() < 1e-11 * (1.0 + a.grad.norm()));
                assert!((a.grad_deriv - b.grad_deriv).norm() < 1e-9 * (1.0 + a.grad_deriv.norm()));
            }
        }
    }

    #[test]
    fn vanishes_on_both_circles() {
        let g = AnnulusGreen::<f64>::new(0.5, Complex::new(0.7, 0.0));
        for k in 0..64 {
            let t = k as f64 * 0.1;
            assert!(g.value(Complex::from_polar(1.0, t)).abs() < 1e-14);
            assert!(g.value(Complex::from_polar(0.5, t)).abs() < 1e-14);
        }
    }
}
