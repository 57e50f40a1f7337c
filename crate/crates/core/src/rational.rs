//! Exact rational scalars and vectors, with a small text codec.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;
pub type QVec = Vec<Q>;

/// Longest accepted numeric token. Input files are untrusted.
pub const MAX_TOKEN_LEN: usize = 4096;
const MAX_EXPONENT: i64 = 4096;

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn q_frac(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact value of a finite float.
pub fn q_from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

/// Nearest integer, ties resolved toward the smaller integer.
pub fn round_ties_down(x: &Q) -> BigInt {
    let half = Q::new(BigInt::one(), BigInt::from(2));
    (x - half).ceil().to_integer()
}

pub fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or(Error::Overflow)
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    let mut acc = Q::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn norm_sq(a: &[Q]) -> Q {
    dot(a, a)
}

pub fn sub(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Q], c: &Q) -> QVec {
    a.iter().map(|x| x * c).collect()
}

pub fn to_f64_vec(a: &[Q]) -> Vec<f64> {
    a.iter().map(q_to_f64).collect()
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn format_qvec(v: &[Q]) -> String {
    v.iter().map(format_q).collect::<Vec<_>>().join(" ")
}

fn digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parse an integer, a fraction `p/q`, or a decimal such as `-0.25e3`.
/// Every accepted token is converted exactly.
pub fn parse_q(token: &str) -> std::result::Result<Q, String> {
    if token.is_empty() {
        return Err("empty number".into());
    }
    if token.len() > MAX_TOKEN_LEN {
        return Err("number too long".into());
    }
    let (neg, body) = match token.as_bytes()[0] {
        b'-' => (true, &token[1..]),
        b'+' => (false, &token[1..]),
        _ => (false, token),
    };
    let value = if let Some((p, q)) = body.split_once('/') {
        let p = digits(p).ok_or_else(|| format!("bad numerator in {token:?}"))?;
        let q = digits(q).ok_or_else(|| format!("bad denominator in {token:?}"))?;
        if q.is_zero() {
            return Err("zero denominator".into());
        }
        Q::new(p, q)
    } else {
        let (mantissa, exp) = match body.find(['e', 'E']) {
            Some(i) => {
                let e: i64 = body[i + 1..]
                    .parse()
                    .map_err(|_| format!("bad exponent in {token:?}"))?;
                if e.abs() > MAX_EXPONENT {
                    return Err("exponent out of range".into());
                }
                (&body[..i], e)
            }
            None => (body, 0),
        };
        let (int_part, frac_part) = match mantissa.split_once('.') {
            Some((a, b)) => (a, b),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(format!("no digits in {token:?}"));
        }
        let all = format!("{int_part}{frac_part}");
        let n = digits(&all).ok_or_else(|| format!("bad number {token:?}"))?;
        let shift = exp - frac_part.len() as i64;
        let ten = BigInt::from(10);
        if shift >= 0 {
            Q::from_integer(n * num_traits::pow(ten, shift as usize))
        } else {
            Q::new(n, num_traits::pow(ten, (-shift) as usize))
        }
    };
    Ok(if neg { -value } else { value })
}

pub fn parse_qvec(s: &str) -> std::result::Result<QVec, String> {
    s.split_whitespace().map(parse_q).collect()
}

/// Least common multiple of the denominators.
pub fn common_denominator(v: &[Q]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}
