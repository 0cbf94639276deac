//! JSON documents for [`PiecewiseFn`].
//!
//! Each term of a segment is written as its own entry with the global
//! `c · e^{γ t} · P(t − start)` reading. Because rational exponent factors
//! do not survive that flattening, every entry also carries an `exact` block
//! with the factor list, and readers prefer it when present.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::exponent::{Exponent, LogFactor};
use super::segment::{Segment, Term};
use super::tail::{GeometricTail, LawFactor};
use super::{PiecewiseFn, Space};
use crate::error::{Error, Result};
use crate::grid::{self, to_f64, Q};
use crate::poly::Poly;

type Pair = [f64; 2];

fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FactorDoc {
    pub log: Pair,
    pub quad: String,
    pub rate: String,
    pub offset: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExactDoc {
    pub coeff: Pair,
    pub factors: Vec<FactorDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SegmentDoc {
    pub start: String,
    pub end: String,
    pub c: Pair,
    pub gamma: Pair,
    pub poly: Vec<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LawDoc {
    pub log: Pair,
    pub quad: String,
    pub lin: String,
    pub rate: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TailDoc {
    pub start: String,
    pub block_len: String,
    pub base: Vec<SegmentDoc>,
    pub law: Vec<LawDoc>,
    pub blocks: Option<u64>,
}

/// Serialized form of a [`PiecewiseFn`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FnDoc {
    pub segments: Vec<SegmentDoc>,
    pub tail: Option<TailDoc>,
    pub space: Space,
}

fn segment_docs(s: &Segment) -> Vec<SegmentDoc> {
    let start = grid::format(s.start);
    let end = s.end.map_or_else(|| "inf".to_string(), grid::format);
    s.terms
        .iter()
        .map(|t| {
            let (_, b, c) = t.exponent.coefficients();
            let global_c = t.coeff * (c - b * to_f64(s.start)).exp();
            SegmentDoc {
                start: start.clone(),
                end: end.clone(),
                c: pair(global_c),
                gamma: pair(b),
                poly: t.poly.0.iter().copied().map(pair).collect(),
                exact: Some(ExactDoc {
                    coeff: pair(t.coeff),
                    factors: t
                        .exponent
                        .factors()
                        .iter()
                        .map(|f| FactorDoc {
                            log: pair(f.log),
                            quad: grid::format(f.quad),
                            rate: grid::format(f.rate),
                            offset: grid::format(f.offset),
                        })
                        .collect(),
                }),
            }
        })
        .collect()
}

fn read_segment(d: &SegmentDoc) -> Result<Segment> {
    let start = grid::parse(&d.start)?;
    let end = if d.end.trim().eq_ignore_ascii_case("inf") {
        None
    } else {
        Some(grid::parse(&d.end)?)
    };
    let poly = Poly(d.poly.iter().copied().map(complex).collect());
    let term = match &d.exact {
        Some(ex) => {
            let mut e = Exponent::one();
            for f in &ex.factors {
                e.mul_factor(LogFactor::new(
                    complex(f.log),
                    grid::parse(&f.quad)?,
                    grid::parse(&f.rate)?,
                    grid::parse(&f.offset)?,
                ));
            }
            Term::new(complex(ex.coeff), e, poly)
        }
        None => {
            let e = Exponent::from_factor(LogFactor::new(
                complex(d.gamma),
                Q::zero(),
                Q::from_integer(1),
                start,
            ));
            Term::new(complex(d.c), e, poly)
        }
    };
    Ok(Segment::new(start, end, vec![term]))
}

impl From<&PiecewiseFn> for FnDoc {
    fn from(f: &PiecewiseFn) -> Self {
        FnDoc {
            segments: f.segments().iter().flat_map(segment_docs).collect(),
            tail: f.tail().map(|t| TailDoc {
                start: grid::format(t.start()),
                block_len: grid::format(t.block_len()),
                base: t.base().iter().flat_map(segment_docs).collect(),
                law: t
                    .law()
                    .iter()
                    .map(|l| LawDoc {
                        log: pair(l.log),
                        quad: grid::format(l.quad),
                        lin: grid::format(l.lin),
                        rate: grid::format(l.rate),
                    })
                    .collect(),
                blocks: t.blocks(),
            }),
            space: f.space(),
        }
    }
}

impl TryFrom<&FnDoc> for PiecewiseFn {
    type Error = Error;

    fn try_from(d: &FnDoc) -> Result<Self> {
        let segments = d.segments.iter().map(read_segment).collect::<Result<Vec<_>>>()?;
        let tail = match &d.tail {
            None => None,
            Some(t) => {
                let base = t.base.iter().map(read_segment).collect::<Result<Vec<_>>>()?;
                let law = t
                    .law
                    .iter()
                    .map(|l| {
                        Ok(LawFactor::new(
                            complex(l.log),
                            grid::parse(&l.quad)?,
                            grid::parse(&l.lin)?,
                            grid::parse(&l.rate)?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(GeometricTail::new(
                    grid::parse(&t.start)?,
                    grid::parse(&t.block_len)?,
                    base,
                    law,
                    t.blocks,
                )?)
            }
        };
        PiecewiseFn::new(segments, tail, d.space)
    }
}

impl Serialize for PiecewiseFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FnDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiecewiseFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = FnDoc::deserialize(d)?;
        PiecewiseFn::try_from(&doc).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{q, qr};

    #[test]
    fn round_trip_preserves_structure() {
        let ln2 = Complex64::new(2f64.ln(), 0.0);
        let base = vec![Segment::linear(q(1), qr(3, 2), Complex64::new(1.0, 0.5), Complex64::new(0.0, 0.0))];
        let tail = GeometricTail::new(
            q(1),
            qr(1, 2),
            base,
            vec![LawFactor::new(ln2, qr(-1, 4), q(1), q(-1))],
            None,
        )
        .unwrap();
        let head = vec![Segment::simple(q(0), q(1), Complex64::new(2.0, 0.0), -ln2, Poly::tau())];
        let f = PiecewiseFn::new(head, Some(tail), Space::Lp(2.0)).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        let back: PiecewiseFn = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn plain_entries_use_global_exponential() {
        let text = r#"{"segments":[{"start":"2","end":"3","c":[1,0],"gamma":[-1,0],"poly":[[1,0]]}],"tail":null,"space":"Lp:1"}"#;
        let f: PiecewiseFn = serde_json::from_str(text).unwrap();
        assert!((f.evaluate(2.5).re - (-2.5f64).exp()).abs() < 1e-15);
        assert_eq!(f.evaluate(3.0), Complex64::new(0.0, 0.0));
    }
}
