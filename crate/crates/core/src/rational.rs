//! Exact rational helpers shared by the certificate and series code.

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serializer;

pub use num_rational::BigRational as Rational;

/// Build `num/den` as an exact rational. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `Σ x_i y_i` summed over one common denominator and reduced once.
pub fn dot<'a>(pairs: impl IntoIterator<Item = (&'a Rational, &'a Rational)>) -> Rational {
    let terms: Vec<(BigInt, BigInt)> = pairs
        .into_iter()
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| (x.numer() * y.numer(), x.denom() * y.denom()))
        .collect();
    let mut common = BigInt::one();
    for (_, d) in &terms {
        common = common.lcm(d);
    }
    let numer: BigInt = terms.iter().map(|(n, d)| n * (&common / d)).sum();
    Rational::new(numer, common)
}

/// Exact `num/den` rendering; integers keep their `/1` so every value has one shape.
pub fn to_fraction_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parse `"7"`, `"-3/4"` or `"5/2"` into a reduced rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => BigInt::from_str(text).ok().map(Rational::from_integer),
    }
}

/// Nearest double, computed from the ratio itself so huge numerators and
/// denominators do not overflow on the way.
pub fn to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = q.numer().abs();
    let d = q.denom().clone();
    let shift = n.bits() as i64 - d.bits() as i64;
    // scale into roughly [2^60, 2^62) before dividing
    let (n, d) = if shift > 60 {
        (n, d << (shift - 60) as usize)
    } else {
        (n << (60 - shift) as usize, d)
    };
    let mant = (n / d).to_f64().unwrap_or(f64::NAN);
    let v = mant * 2f64.powi((shift - 60) as i32);
    if q.is_negative() {
        -v
    } else {
        v
    }
}

pub(crate) fn serialize_rationals<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(to_fraction_string))
}

/// JSON has no infinities; non-finite values become `"inf"`, `"-inf"` or `"nan"`.
pub(crate) fn serialize_float<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub(crate) fn serialize_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq([z.re, z.im])
}
