//! Diagonal Bergman kernel `K_Ω(w)` and the higher-order kernels
//! `K^(j)_Ω(w) = sup{|f^(j)(w)|² : ‖f‖ ≤ 1, f(w) = … = f^(j−1)(w) = 0}`.
//!
//! On a disc or the canonical annulus the normalized monomials
//! `e_n = (z − c)^n/‖(z − c)^n‖` (Laurent monomials on the annulus) are an
//! orthonormal basis of the Bergman space. Row `i` of a frame holds the
//! Taylor coefficients `e_n^(i)(w)/i!` for all retained `n`; `K^(j)` is
//! `(j!)²` times the squared norm of row `j` orthogonal to rows `0..j`.
//! Möbius images use the pulled-back basis `e_n(φ(z))·φ′(z)`, whose
//! Taylor rows are a fixed lower-triangular recombination of the base rows.

mod extended;

pub use extended::annulus_suita_gap;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::{Base, Chart, DomainSpec, Point};
use crate::scalar::{from_i64, from_usize, lit, Scalar};

/// Largest supported derivative order.
pub const MAX_ORDER: usize = 12;
/// Largest truncation order tried before giving up.
pub const MAX_TRUNCATION: usize = 10_000;
/// Tail target in units of machine epsilon.
const RELATIVE_TAIL_ULPS: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct KernelResult<T> {
    pub j: usize,
    pub value: T,
    pub truncation_order: usize,
    pub tail_bound: T,
}

/// Derivatives of the truncated orthonormal basis at a point.
#[derive(Clone, Debug)]
pub struct OrthonormalFrame<T> {
    /// Laurent exponents of the retained basis elements.
    pub exponents: Vec<i64>,
    /// `‖(z − c)^n‖²` per retained exponent.
    pub basis_norms: Vec<T>,
    /// Row `i`, column `k`: `e_{n_k}^{(i)}(w)`.
    pub derivative_matrix: Vec<Vec<Complex<T>>>,
    /// Upper bound for the omitted `Σ_n |e_n^{(i)}(w)/i!|²`, per row.
    row_tails: Vec<T>,
}

impl<T: Scalar> OrthonormalFrame<T> {
    /// Taylor row `i` (derivatives divided by `i!`).
    fn taylor_row(&self, i: usize) -> Vec<Complex<T>> {
        let f = factorial::<T>(i);
        self.derivative_matrix[i].iter().map(|v| v / f).collect()
    }

    /// Gram–Schmidt vectors of rows `0..count`, each normalized.
    pub fn constraint_basis(&self, count: usize) -> Vec<Vec<Complex<T>>> {
        let rows: Vec<_> = (0..count).map(|i| self.taylor_row(i)).collect();
        orthonormalize(&rows).0
    }
}

/// `‖(z − c)^n‖²` on a disc or `‖z^n‖²` on the annulus, for each `n` in `range`.
pub fn basis_norms<T: Scalar>(domain: &DomainSpec<T>, range: std::ops::RangeInclusive<i64>) -> Result<Vec<T>> {
    let base = match domain {
        DomainSpec::Disc { center, radius } => Base::Disc { center: *center, radius: *radius },
        DomainSpec::Annulus { q } => Base::Annulus { q: *q },
        _ => return Err(Error::UnsupportedDomain(domain.kind().into())),
    };
    range
        .map(|n| {
            if n < 0 && matches!(base, Base::Disc { .. }) {
                Err(Error::InvalidArgument(format!("disc basis has no exponent {n}")))
            } else {
                Ok(log_norm_sq(&base, n).exp())
            }
        })
        .collect()
}

/// `log ‖(z − c)^n‖²`.
fn log_norm_sq<T: Scalar>(base: &Base<T>, n: i64) -> T {
    match *base {
        Base::Disc { radius, .. } => {
            let m = from_i64::<T>(n + 1);
            T::PI().ln() + lit::<T>(2.0) * m * radius.ln() - m.ln()
        }
        Base::Annulus { q } => {
            if n == -1 {
                return (T::TAU() * -q.ln()).ln();
            }
            // 2π(1 − q^m)/m with m = 2n + 2, positive for either sign of m
            let m = from_i64::<T>(2 * n + 2);
            let a = -q.ln();
            if m > T::zero() {
                T::TAU().ln() + (-(-m * a).exp()).ln_1p() - m.ln()
            } else {
                T::TAU().ln() - m * a + (-(m * a).exp()).ln_1p() - (-m).ln()
            }
        }
    }
}

fn factorial<T: Scalar>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * from_usize(k))
}

/// `log|binom(n, i)|` and its sign for integer `n` of either sign; `None` when zero.
fn log_binomial<T: Scalar>(n: i64, i: usize) -> Option<(T, bool)> {
    let mut log = T::zero();
    let mut negative = false;
    for k in 0..i as i64 {
        let f = n - k;
        if f == 0 {
            return None;
        }
        negative ^= f < 0;
        log = log + from_i64::<T>(f.abs()).ln() - from_i64::<T>(k + 1).ln();
    }
    Some((log, negative))
}

fn exponents(base: &Base<impl Scalar>, n: usize) -> Vec<i64> {
    match base {
        Base::Disc { .. } => (0..=n as i64).collect(),
        Base::Annulus { .. } => (-(n as i64)..=n as i64).collect(),
    }
}

/// Taylor rows `0..=order` of the base basis at `zeta`.
fn base_rows<T: Scalar>(base: &Base<T>, zeta: Point<T>, order: usize, exps: &[i64]) -> Vec<Vec<Complex<T>>> {
    let center = match *base {
        Base::Disc { center, .. } => center,
        Base::Annulus { .. } => Complex::zero(),
    };
    let offset = zeta - center;
    let (radius, phase) = (offset.norm(), offset.im.atan2(offset.re));
    let log_r = radius.ln();
    let half = lit::<T>(0.5);
    let norms: Vec<T> = exps.iter().map(|&n| half * log_norm_sq(base, n)).collect();
    (0..=order)
        .map(|i| {
            exps.iter()
                .zip(&norms)
                .map(|(&n, &log_norm)| {
                    let Some((log_c, negative)) = log_binomial::<T>(n, i) else { return Complex::zero() };
                    let power = n - i as i64;
                    let (log_pow, angle) = if power == 0 {
                        (T::zero(), T::zero())
                    } else {
                        (from_i64::<T>(power) * log_r, from_i64::<T>(power) * phase)
                    };
                    let modulus = (log_c + log_pow - log_norm).exp();
                    let v = Complex::from_polar(modulus, angle);
                    if negative {
                        -v
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect()
}

/// Lower-triangular `M` with image Taylor row `m = Σ_i M[m][i]·(base row i)`,
/// for the basis `e_n(φ(z))·φ′(z)` around `z`, `φ` the inverse chart map.
fn pullback_matrix<T: Scalar>(chart: &Chart<T>, z: Point<T>, order: usize) -> Result<Vec<Vec<Complex<T>>>> {
    let Some(map) = chart.map else {
        return Ok((0..=order)
            .map(|m| (0..=order).map(|i| if i == m { Complex::new(T::one(), T::zero()) } else { Complex::zero() }).collect())
            .collect());
    };
    let phi = map.inverse().taylor(z, order + 1).ok_or_else(|| Error::MapSingular(format!("{z}")))?;
    let deriv: Vec<Complex<T>> = (0..=order).map(|k| phi[k + 1] * from_usize::<T>(k + 1)).collect();
    let mut power = vec![Complex::zero(); order + 1];
    power[0] = Complex::new(T::one(), T::zero());
    let mut m = vec![vec![Complex::zero(); order + 1]; order + 1];
    #[allow(clippy::needless_range_loop)]
    for i in 0..=order {
        for row in 0..=order {
            let mut s = Complex::zero();
            for a in 0..=row {
                s = s + power[a] * deriv[row - a];
            }
            m[row][i] = s;
        }
        // power ← power · (φ − φ(z))
        let mut next = vec![Complex::zero(); order + 1];
        for (a, &pa) in power.iter().enumerate() {
            for b in 1..=order - a {
                next[a + b] = next[a + b] + pa * phi[b];
            }
        }
        power = next;
    }
    Ok(m)
}

/// Squared modulus of the last omitted term per row, extrapolated geometrically.
fn geometric_tail<T: Scalar>(row: &[Complex<T>], last: usize, before: usize) -> T {
    let (a, b) = (row[last].norm_sqr(), row[before].norm_sqr());
    if a.is_zero() {
        return T::zero();
    }
    let ratio = a / b;
    if !(ratio < lit(0.999)) {
        return T::infinity();
    }
    lit::<T>(2.0) * a * ratio / (T::one() - ratio)
}

/// Frame of the truncated basis (`|n| ≤ truncation`) with derivative rows `0..=order` at `z`.
pub fn orthonormal_frame<T: Scalar>(domain: &DomainSpec<T>, z: Point<T>, order: usize, truncation: usize) -> Result<OrthonormalFrame<T>> {
    let chart = match domain {
        DomainSpec::Polygon { .. } | DomainSpec::PolarComplement => return Err(Error::UnsupportedDomain(domain.kind().into())),
        _ => domain.chart().expect("model domain"),
    };
    domain.require_inside(z)?;
    if truncation < order + 2 {
        return Err(Error::InvalidArgument(format!("truncation {truncation} too small for order {order}")));
    }
    let zeta = chart.pull(z).ok_or_else(|| Error::MapSingular(format!("{z}")))?;
    let exps = exponents(&chart.base, truncation);
    let rows = base_rows(&chart.base, zeta, order, &exps);
    // tails from the outermost exponents of each end
    let len = exps.len();
    let mut tails: Vec<T> = rows
        .iter()
        .map(|row| {
            let hi = geometric_tail(row, len - 1, len - 2);
            let lo = if exps[0] < 0 { geometric_tail(row, 0, 1) } else { T::zero() };
            hi + lo
        })
        .collect();
    let m = pullback_matrix(&chart, z, order)?;
    let image: Vec<Vec<Complex<T>>> = m
        .iter()
        .map(|coeffs| {
            (0..len)
                .map(|k| coeffs.iter().zip(&rows).fold(Complex::zero(), |s, (c, row)| s + c * row[k]))
                .collect()
        })
        .collect();
    if chart.map.is_some() {
        tails = m
            .iter()
            .map(|coeffs| {
                let s = coeffs.iter().zip(&tails).fold(T::zero(), |s, (c, t)| s + c.norm() * t.sqrt());
                s * s
            })
            .collect();
    }
    let derivative_matrix = image
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let f = factorial::<T>(i);
            row.into_iter().map(|v| v * f).collect()
        })
        .collect();
    let basis_norms = exps.iter().map(|&n| log_norm_sq(&chart.base, n).exp()).collect();
    Ok(OrthonormalFrame { exponents: exps, basis_norms, derivative_matrix, row_tails: tails })
}

fn dot<T: Scalar>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter().zip(y).fold(Complex::zero(), |s, (a, b)| s + a * b.conj())
}

fn norm_sq<T: Scalar>(x: &[Complex<T>]) -> T {
    x.iter().fold(T::zero(), |s, a| s + a.norm_sqr())
}

/// Removes the components along the orthonormal `basis`, twice.
fn project_out<T: Scalar>(v: &mut [Complex<T>], basis: &[Vec<Complex<T>>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            for (x, y) in v.iter_mut().zip(b) {
                *x = *x - c * y;
            }
        }
    }
}

/// Modified Gram–Schmidt with reorthogonalization; returns the normalized
/// vectors and the squared residual norms.
fn orthonormalize<T: Scalar>(rows: &[Vec<Complex<T>>]) -> (Vec<Vec<Complex<T>>>, Vec<T>) {
    let mut basis: Vec<Vec<Complex<T>>> = Vec::with_capacity(rows.len());
    let mut residuals = Vec::with_capacity(rows.len());
    for row in rows {
        let mut v = row.clone();
        project_out(&mut v, &basis);
        let r = norm_sq(&v);
        residuals.push(r);
        let s = T::one() / r.sqrt();
        basis.push(v.into_iter().map(|x| x * s).collect());
    }
    (basis, residuals)
}

/// `K^(j)` at a fixed truncation order.
pub fn kernel_j_truncated<T: Scalar>(domain: &DomainSpec<T>, w: Point<T>, j: usize, truncation: usize) -> Result<KernelResult<T>> {
    if j > MAX_ORDER {
        return Err(Error::OrderTooLarge(j));
    }
    if let DomainSpec::PolarComplement = domain {
        domain.require_inside(w)?;
        return Ok(KernelResult { j, value: T::zero(), truncation_order: 0, tail_bound: T::zero() });
    }
    let frame = orthonormal_frame(domain, w, j, truncation)?;
    let rows: Vec<_> = (0..=j).map(|i| frame.taylor_row(i)).collect();
    let (_, residuals) = orthonormalize(&rows);
    let fact_sq = factorial::<T>(j).powi(2);
    let complement = residuals[j];
    let conditioning = norm_sq(&rows[j]) / complement;
    let tail = frame.row_tails.iter().fold(T::zero(), |s, &t| s + t);
    let tail_bound = fact_sq * tail * (T::one() + conditioning).powi(2);
    Ok(KernelResult { j, value: fact_sq * complement, truncation_order: truncation, tail_bound })
}

/// `K^(j)_Ω(w)`, doubling the truncation until the tail bound is below a few ulps of the value.
pub fn kernel_j<T: Scalar>(domain: &DomainSpec<T>, w: Point<T>, j: usize) -> Result<KernelResult<T>> {
    let mut n = (2 * j + 16).max(32);
    loop {
        let r = kernel_j_truncated(domain, w, j, n)?;
        if r.tail_bound <= lit::<T>(RELATIVE_TAIL_ULPS) * T::epsilon() * r.value || r.truncation_order == 0 {
            return Ok(r);
        }
        if n >= MAX_TRUNCATION {
            return Err(Error::TruncationFailure(n));
        }
        n = (2 * n).min(MAX_TRUNCATION);
    }
}

/// `F_j(z) = (j!)²·‖row_j(z) ⟂ span{row_0(w), …, row_{j−1}(w)}‖²`.
///
/// The frame of `w` is frozen; `F_j(w) = K^(j)(w)` and
/// `∂_z∂_z̄ log F_j (w) = K^(j+1)(w)/K^(j)(w)`.
pub struct FrozenFrame<T> {
    domain: DomainSpec<T>,
    j: usize,
    truncation: usize,
    constraints: Vec<Vec<Complex<T>>>,
}

impl<T: Scalar> FrozenFrame<T> {
    pub fn new(domain: &DomainSpec<T>, w: Point<T>, j: usize, truncation: usize) -> Result<Self> {
        let frame = orthonormal_frame(domain, w, j, truncation)?;
        Ok(Self { domain: domain.clone(), j, truncation, constraints: frame.constraint_basis(j) })
    }

    pub fn eval(&self, z: Point<T>) -> Result<T> {
        let frame = orthonormal_frame(&self.domain, z, self.j, self.truncation)?;
        let mut v = frame.taylor_row(self.j);
        project_out(&mut v, &self.constraints);
        Ok(factorial::<T>(self.j).powi(2) * norm_sq(&v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct LaplacianCheck<T> {
    pub fd_laplacian: T,
    pub ratio: T,
    pub rel_error: T,
}

/// Compares `∂_z∂_z̄ log F_j` at `w` (five-point stencil of step `h`,
/// divided by 4) with `K^(j+1)(w)/K^(j)(w)`.
pub fn laplacian_identity_check<T: Scalar>(domain: &DomainSpec<T>, w: Point<T>, j: usize, h: T) -> Result<LaplacianCheck<T>> {
    if j + 1 > MAX_ORDER {
        return Err(Error::OrderTooLarge(j + 1));
    }
    let stencil = [
        Complex::new(h, T::zero()),
        Complex::new(-h, T::zero()),
        Complex::new(T::zero(), h),
        Complex::new(T::zero(), -h),
    ];
    if !domain.contains(w) {
        return Err(Error::PointOutsideDomain(format!("{w}")));
    }
    if stencil.iter().any(|s| !domain.contains(w + s)) {
        return Err(Error::StencilOutsideDomain);
    }
    let k0 = kernel_j(domain, w, j)?;
    let k1 = kernel_j(domain, w, j + 1)?;
    if !(k0.value > T::zero()) {
        return Err(Error::DomainError("kernel vanishes at the pole".into()));
    }
    let truncation = k0.truncation_order.max(k1.truncation_order);
    let frozen = FrozenFrame::new(domain, w, j, truncation)?;
    let centre = frozen.eval(w)?.ln();
    let mut sum = T::zero();
    for s in stencil {
        sum = sum + frozen.eval(w + s)?.ln() - centre;
    }
    let fd_laplacian = sum / (lit::<T>(4.0) * h * h);
    let ratio = k1.value / k0.value;
    Ok(LaplacianCheck { fd_laplacian, ratio, rel_error: (fd_laplacian - ratio).abs() / ratio })
}
