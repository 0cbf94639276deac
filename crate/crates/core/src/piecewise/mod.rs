//! Exact piecewise exponential-polynomial functions on `[0, ∞)`.

mod exponent;
mod function;
mod json;
mod segment;
mod tail;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use exponent::{Exponent, LogFactor};
pub use function::PiecewiseFn;
pub use json::FnDoc;
pub use segment::{Segment, Term};
pub use tail::{GeometricTail, LawFactor};

/// The function space a value is meant to live in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Space {
    Lp(f64),
    C0,
}

impl Space {
    pub fn is_c0(&self) -> bool {
        matches!(self, Space::C0)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Space::Lp(p) if !(p.is_finite() && *p >= 1.0) => {
                Err(Error::InvalidSpec(format!("p = {p} must be finite and at least 1")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Lp(p) => write!(f, "Lp:{p}"),
            Space::C0 => write!(f, "C0"),
        }
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("c0") {
            return Ok(Space::C0);
        }
        let p = t
            .split_once(':')
            .filter(|(head, _)| head.eq_ignore_ascii_case("lp"))
            .map(|(_, p)| p)
            .ok_or_else(|| Error::Parse(format!("unknown space {s:?}")))?;
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
        let space = Space::Lp(p);
        space.validate()?;
        Ok(space)
    }
}

impl Serialize for Space {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Space {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}
