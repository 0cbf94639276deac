//! Exact rational breakpoints.
//!
//! Every breakpoint, shift step and exponent multiplier in the algebra is a
//! [`Q`]. Shifting by the operator step is then an exact rational translation
//! and repeated shifts never drift.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = Ratio<i64>;

/// Largest denominator accepted when snapping a float onto the grid.
const MAX_DENOM: i64 = 1 << 20;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn to_f64(x: Q) -> f64 {
    x.to_f64().unwrap_or_else(|| *x.numer() as f64 / *x.denom() as f64)
}

/// `ceil(x)` for a rational.
pub fn ceil(x: Q) -> i64 {
    x.ceil().to_integer()
}

/// `floor(x)` for a rational.
pub fn floor(x: Q) -> i64 {
    x.floor().to_integer()
}

/// Snaps `x` to a small-denominator rational, or fails with
/// [`Error::IncommensurateStep`] when no such rational reproduces it.
pub fn from_f64(x: f64) -> Result<Q> {
    if !x.is_finite() {
        return Err(Error::IncommensurateStep(x));
    }
    // continued fraction convergents
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > MAX_DENOM as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            return Ok(Q::new(h1 as i64, k1 as i64));
        }
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    Err(Error::IncommensurateStep(x))
}

/// Parses `"k/q"`, an integer, or a finite decimal such as `"0.25"`.
pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Ok(n) = s.parse::<i64>() {
        return Ok(q(n));
    }
    // exact decimal
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').ok_or_else(bad)?;
    if frac_part.len() > 15 || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let int_val: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| bad())?
    };
    let scale = 10i64.pow(frac_part.len() as u32);
    let frac_val: i64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| bad())?
    };
    let v = Q::new(int_val * scale + frac_val, scale);
    Ok(if neg { -v } else { v })
}

pub fn format(x: Q) -> String {
    if x.denom() == &1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn is_zero(x: &Q) -> bool {
    x.is_zero()
}

pub(crate) mod serde_q {
    use super::{format, parse, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}
