//! Weights `η₀(s) = −log(−s + e^s − 1)` and `γ₀(s) = η₀(s) + log(1 − e^s)` on `s < 0`.
//!
//! With `D = −s + e^s − 1`, `u = 1 − e^s` and `E = e^s`:
//! `η₀′ = u/D`, `η₀″ = (u² − E·D)/D²`, `γ₀′ = u/D − E/u`, and
//! `η₀″ − γ₀′² = E/D − E²/u²`, which is how the normalization identity is
//! evaluated (the direct form `1 − γ₀′²/η₀″` cancels to nothing for very
//! negative `s`).

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Below this `s` the weights are evaluated with `D = m + e^s`, `m = −s − 1`.
pub const SERIES_SWITCH: f64 = -30.0;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct WeightValues<T> {
    pub s: T,
    pub eta0: T,
    pub eta0p: T,
    pub eta0pp: T,
    pub gamma0: T,
    pub gamma0p: T,
    /// `η₀″ − γ₀′²`, cancellation free
    pub gap: T,
}

struct Parts<T> {
    d: T,
    u: T,
    e: T,
    /// `u² − E·D`
    curvature: T,
}

fn direct<T: Scalar>(s: T) -> Parts<T> {
    let e = s.exp();
    let u = -s.exp_m1();
    let d = if s > lit(-0.1) {
        // Σ_{k≥2} s^k/k!
        let mut term = s * s / lit(2.0);
        let mut sum = T::zero();
        let mut k = 2.0;
        while term.abs() > T::epsilon() * sum.abs() * lit(0.01) || sum.is_zero() {
            sum = sum + term;
            k += 1.0;
            term = term * s / lit(k);
            if term.is_zero() {
                break;
            }
        }
        sum
    } else {
        s.exp_m1() - s
    };
    Parts { d, u, e, curvature: u * u - e * d }
}

fn stabilized<T: Scalar>(s: T) -> Parts<T> {
    let e = s.exp();
    let m = -s - T::one();
    let d = m + e;
    let curvature = T::one() - e * (m + lit(2.0));
    Parts { d, u: -s.exp_m1(), e, curvature }
}

fn assemble<T: Scalar>(s: T, p: Parts<T>) -> WeightValues<T> {
    let Parts { d, u, e, curvature } = p;
    let eta0 = -d.ln();
    let eta0p = u / d;
    let eta0pp = curvature / (d * d);
    let log_u = (-e).ln_1p();
    WeightValues {
        s,
        eta0,
        eta0p,
        eta0pp,
        gamma0: eta0 + log_u,
        gamma0p: eta0p - e / u,
        gap: e / d - (e / u) * (e / u),
    }
}

fn check<T: Scalar>(s: T) -> Result<()> {
    if s < T::zero() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("weights need s < 0, got {s}")))
    }
}

/// `η₀, γ₀` and their derivatives at `s < 0`.
pub fn eval_weights<T: Scalar>(s: T) -> Result<WeightValues<T>> {
    check(s)?;
    let parts = if s < lit(SERIES_SWITCH) { stabilized(s) } else { direct(s) };
    Ok(assemble(s, parts))
}

/// Both branches at the same `s`, for seam checks: `(direct, stabilized)`.
pub fn eval_both_branches<T: Scalar>(s: T) -> Result<(WeightValues<T>, WeightValues<T>)> {
    check(s)?;
    Ok((assemble(s, direct(s)), assemble(s, stabilized(s))))
}

/// `|(1 − γ₀′²/η₀″)·e^{2γ₀ − η₀ − s} − 1|`.
pub fn identity_residual<T: Scalar>(s: T) -> Result<T> {
    let v = eval_weights(s)?;
    Ok(((v.gap / v.eta0pp) * (lit::<T>(2.0) * v.gamma0 - v.eta0 - s).exp() - T::one()).abs())
}

/// `2γ₀(s) − η₀(s) − log η₀′(s)` at each `s`.
///
/// Grouped as `2(γ₀ − η₀) − log(η₀′·D)` with both brackets evaluated from
/// `log(1 − e^s)`, so the value keeps its digits as it tends to 0.
pub fn war_probe<T: Scalar>(s_list: &[T]) -> Result<Vec<T>> {
    s_list
        .iter()
        .map(|&s| {
            check(s)?;
            let e = s.exp();
            let gamma_minus_eta = (-e).ln_1p();
            let eta_p_times_d = -s.exp_m1();
            Ok(lit::<T>(2.0) * gamma_minus_eta - eta_p_times_d.ln())
        })
        .collect()
}
