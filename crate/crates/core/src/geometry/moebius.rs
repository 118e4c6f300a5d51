use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Fractional linear map `ζ ↦ (aζ + b)/(cζ + d)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Moebius<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Scalar> Moebius<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(Complex::one(), Complex::zero(), Complex::zero(), Complex::one())
    }

    /// `ζ ↦ s·ζ + t`.
    pub fn affine(scale: Complex<T>, shift: Complex<T>) -> Self {
        Self::new(scale, shift, Complex::zero(), Complex::one())
    }

    pub fn determinant(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    pub fn is_affine(&self) -> bool {
        self.c.is_zero()
    }

    /// Image of `z`, or `None` at the pole.
    pub fn apply(&self, z: Complex<T>) -> Option<Complex<T>> {
        let den = self.c * z + self.d;
        if den.norm_sqr() <= T::min_positive_value() {
            return None;
        }
        Some((self.a * z + self.b) / den)
    }

    /// `F′(z) = (ad − bc)/(cz + d)²`.
    pub fn derivative(&self, z: Complex<T>) -> Option<Complex<T>> {
        let den = self.c * z + self.d;
        if den.norm_sqr() <= T::min_positive_value() {
            return None;
        }
        Some(self.determinant() / (den * den))
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        Self::new(
            self.a * inner.a + self.b * inner.c,
            self.a * inner.b + self.b * inner.d,
            self.c * inner.a + self.d * inner.c,
            self.c * inner.b + self.d * inner.d,
        )
    }

    /// The finite pole `−d/c`, if the map is not affine.
    pub fn pole(&self) -> Option<Complex<T>> {
        if self.is_affine() {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    /// Taylor coefficients of the map around `z0`, orders `0..=order`.
    ///
    /// With `u = c·z0 + d`, `F(z0 + ε) = F(z0) + (det/u²)·ε·Σ_k (−c·ε/u)^k`.
    pub fn taylor(&self, z0: Complex<T>, order: usize) -> Option<Vec<Complex<T>>> {
        let u = self.c * z0 + self.d;
        if u.norm_sqr() <= T::min_positive_value() {
            return None;
        }
        let mut out = Vec::with_capacity(order + 1);
        out.push((self.a * z0 + self.b) / u);
        let ratio = -self.c / u;
        let mut term = self.determinant() / (u * u);
        for _ in 1..=order {
            out.push(term);
            term = term * ratio;
        }
        Some(out)
    }
}

impl<T: Scalar> Moebius<T> {
    /// `F″(z) = −2c(ad − bc)/(cz + d)³`.
    pub fn second_derivative(&self, z: Complex<T>) -> Option<Complex<T>> {
        let den = self.c * z + self.d;
        if den.norm_sqr() <= T::min_positive_value() {
            return None;
        }
        let two = T::one() + T::one();
        Some(-self.c * self.determinant() * two / (den * den * den))
    }
}
