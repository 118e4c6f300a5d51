//! Extended-precision Suita margin for the annulus.
//!
//! For thin annuli `πK/c² − 1` is far below `f64` resolution (about `1e-38`
//! at `q = 0.8`), so both sides are summed again in binary floating point
//! with a chosen number of bits. The kernel comes from the Laurent basis and
//! the capacity from the prime-function product, as in the `f64` paths.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

use crate::error::{Error, Result};

type F = FBig<HalfEven, 2>;

fn num(x: f64, bits: usize) -> F {
    F::try_from(x).expect("finite input").with_precision(bits).value()
}

fn int(n: i64, bits: usize) -> F {
    F::from(n).with_precision(bits).value()
}

fn to_f64(x: &F) -> f64 {
    x.to_f64().value()
}

/// `(πK, c²)` of the annulus `q < |z| < 1` at a pole of modulus `r`.
fn sides(q: f64, r: f64, bits: usize) -> (F, F) {
    let one = int(1, bits);
    let q2 = num(q, bits) * num(q, bits);
    let r2 = num(r, bits) * num(r, bits);
    let r2_inv = &one / &r2;
    let stop = (-(bits as f64) * std::f64::consts::LN_2).exp();

    // πK = Σ_{n≥0} (n+1) r^{2n}/(1 − q^{2n+2}) + r^{−2} Σ_{m≥1} m (q²/r²)^m/(1 − q^{2m}) + r^{−2}/(2 log(1/q))
    let mut pi_k = &r2_inv / (int(2, bits) * (-num(q, bits).ln()));
    let mut rn = one.clone();
    let mut qn = q2.clone();
    for n in 0.. {
        let term = int(n + 1, bits) * &rn / (&one - &qn);
        pi_k += &term;
        if to_f64(&term) < stop * to_f64(&pi_k) {
            break;
        }
        rn *= &r2;
        qn *= &q2;
    }
    let ratio = &q2 / &r2;
    let mut xm = ratio.clone();
    let mut qm = q2.clone();
    for m in 1.. {
        let term = int(m, bits) * &xm / (&one - &qm) * &r2_inv;
        pi_k += &term;
        if to_f64(&term) < stop * to_f64(&pi_k) {
            break;
        }
        xm *= &ratio;
        qm *= &q2;
    }

    // log c = 2Σ log(1 − q^{2k}) − log(1 − r²) − Σ [log(1 − q^{2k}r²) + log(1 − q^{2k}/r²)] − (log r)²/log q
    let log_r = num(r, bits).ln();
    let mut log_c = -(&one - &r2).ln() - &log_r * &log_r / num(q, bits).ln();
    let mut p = q2.clone();
    loop {
        let a = (&one - &p).ln();
        let b = (&one - &p * &r2).ln() + (&one - &p * &r2_inv).ln();
        log_c += int(2, bits) * &a - &b;
        if to_f64(&p) < stop * 1e-3 {
            break;
        }
        p *= &q2;
    }
    let c2 = (int(2, bits) * log_c).exp();
    (pi_k, c2)
}

/// `πK_Ω(w)/c_Ω(w)² − 1` for the annulus `q < |z| < 1` with `|w| = r`,
/// evaluated with `bits` of binary precision and rounded to `f64`.
pub fn annulus_suita_gap(q: f64, r: f64, bits: usize) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidDomain(format!("annulus needs 0 < q < 1, got {q}")));
    }
    if !(r > q && r < 1.0) {
        return Err(Error::PointOutsideDomain(format!("|w| = {r}")));
    }
    if bits < 64 {
        return Err(Error::InvalidArgument(format!("need at least 64 bits, got {bits}")));
    }
    let (pi_k, c2) = sides(q, r, bits);
    Ok(to_f64(&(pi_k / c2 - int(1, bits))))
}
