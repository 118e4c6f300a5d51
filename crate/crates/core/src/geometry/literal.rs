//! Text form of domains: `disc:cx,cy,r`, `annulus:q`,
//! `moebius:a,b,c,d;base=<literal>`, `polygon:x1,y1;x2,y2;...`,
//! `polar-complement`. Möbius coefficients are complex numbers written as
//! `1.5`, `-2i`, `0.3+0.1i` or `1e-3-2e-1i`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use super::{DomainSpec, Moebius, Point};
use crate::error::Error;
use crate::scalar::Scalar;

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidDomain(msg.into())
}

fn parse_real<T: Scalar>(s: &str) -> Result<T, Error> {
    let v: f64 = s.trim().parse().map_err(|_| bad(format!("not a number: {s:?}")))?;
    T::from_f64(v).ok_or_else(|| bad(format!("not representable: {s:?}")))
}

/// Parses `x,y` into a point.
pub fn parse_point<T: Scalar>(s: &str) -> Result<Point<T>, Error> {
    let mut parts = s.split(',');
    let (Some(x), Some(y), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(bad(format!("expected x,y but got {s:?}")));
    };
    Ok(Complex::new(parse_real(x)?, parse_real(y)?))
}

/// Parses a complex literal such as `0.5-0.25i`.
pub fn parse_complex<T: Scalar>(s: &str) -> Result<Complex<T>, Error> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex::new(parse_real(s)?, T::zero()));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<T, Error> {
        match t {
            "" | "+" => Ok(T::one()),
            "-" => Ok(-T::one()),
            _ => parse_real(t),
        }
    };
    match split {
        Some(k) => Ok(Complex::new(parse_real(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex::new(T::zero(), imag(body)?)),
    }
}

fn fmt_complex<T: Scalar>(z: &Complex<T>) -> String {
    if z.im.is_zero() {
        format!("{}", z.re)
    } else if z.im < T::zero() {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

impl<T: Scalar> FromStr for DomainSpec<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "polar-complement" {
            return Ok(DomainSpec::PolarComplement);
        }
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad(format!("unknown domain literal {s:?}")))?;
        match kind {
            "disc" => {
                let v: Vec<&str> = rest.split(',').collect();
                if v.len() != 3 {
                    return Err(bad("disc literal is disc:cx,cy,r"));
                }
                DomainSpec::disc(Complex::new(parse_real(v[0])?, parse_real(v[1])?), parse_real(v[2])?)
            }
            "annulus" => DomainSpec::annulus(parse_real(rest)?),
            "moebius" => {
                let (coeffs, base) = rest
                    .split_once(";base=")
                    .ok_or_else(|| bad("moebius literal is moebius:a,b,c,d;base=<literal>"))?;
                let c: Vec<&str> = coeffs.split(',').collect();
                if c.len() != 4 {
                    return Err(bad("moebius needs four coefficients"));
                }
                let map = Moebius::new(
                    parse_complex(c[0])?,
                    parse_complex(c[1])?,
                    parse_complex(c[2])?,
                    parse_complex(c[3])?,
                );
                DomainSpec::moebius(base.parse()?, map)
            }
            "polygon" => {
                let vertices = rest.split(';').map(parse_point).collect::<Result<Vec<_>, _>>()?;
                DomainSpec::polygon(vertices)
            }
            _ => Err(bad(format!("unknown domain kind {kind:?}"))),
        }
    }
}

impl<T: Scalar> fmt::Display for DomainSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Disc { center, radius } => write!(f, "disc:{},{},{}", center.re, center.im, radius),
            DomainSpec::Annulus { q } => write!(f, "annulus:{q}"),
            DomainSpec::MoebiusImage { base, map } => write!(
                f,
                "moebius:{},{},{},{};base={}",
                fmt_complex(&map.a),
                fmt_complex(&map.b),
                fmt_complex(&map.c),
                fmt_complex(&map.d),
                base
            ),
            DomainSpec::Polygon { vertices } => {
                write!(f, "polygon:")?;
                for (k, v) in vertices.iter().enumerate() {
                    if k > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{},{}", v.re, v.im)?;
                }
                Ok(())
            }
            DomainSpec::PolarComplement => write!(f, "polar-complement"),
        }
    }
}
