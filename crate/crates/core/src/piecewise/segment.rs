use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;

use super::exponent::{Exponent, LogFactor};
use crate::grid::{to_f64, Q};
use crate::poly::Poly;

/// `coeff · exponent(τ) · poly(τ)` in the local variable `τ = t − start`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub exponent: Exponent,
    pub poly: Poly,
}

impl Term {
    pub fn new(coeff: Complex64, exponent: Exponent, poly: Poly) -> Self {
        Term {
            coeff,
            exponent,
            poly: poly.trimmed(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Term::new(c, Exponent::one(), Poly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coeff == Complex64::new(0.0, 0.0) || self.poly.is_zero()
    }

    pub fn eval(&self, tau: f64) -> Complex64 {
        self.coeff * self.exponent.eval(tau) * self.poly.eval(tau)
    }

    pub fn recenter(&self, d: Q) -> Term {
        if d.is_zero() {
            return self.clone();
        }
        Term {
            coeff: self.coeff,
            exponent: self.exponent.recenter(d),
            poly: self.poly.taylor_shift(to_f64(d)),
        }
    }

    pub fn with_factor(&self, f: LogFactor) -> Term {
        let mut t = self.clone();
        t.exponent.mul_factor(f);
        t
    }
}

/// Sorts terms by exponent, merges terms that share an exponent and drops
/// zero terms.
pub(crate) fn canonical_terms(mut terms: Vec<Term>) -> Vec<Term> {
    terms.retain(|t| !t.is_zero());
    terms.sort_by(|a, b| a.exponent.cmp_key(&b.exponent));
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(prev) if prev.exponent == t.exponent => {
                if prev.poly == t.poly {
                    prev.coeff += t.coeff;
                } else {
                    prev.poly = prev.poly.scale(prev.coeff).add(&t.poly.scale(t.coeff));
                    prev.coeff = Complex64::new(1.0, 0.0);
                }
            }
            _ => out.push(t),
        }
    }
    out.retain(|t| !t.is_zero());
    out
}

/// A half-open interval `[start, end)` carrying a sum of terms. `end = None`
/// stands for `+∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub start: Q,
    pub end: Option<Q>,
    pub terms: Vec<Term>,
}

impl Segment {
    pub fn new(start: Q, end: Option<Q>, terms: Vec<Term>) -> Self {
        Segment {
            start,
            end,
            terms: canonical_terms(terms),
        }
    }

    /// `c · e^{γ t} · P(t − start)` on `[start, end)`.
    pub fn simple(start: Q, end: Q, c: Complex64, gamma: Complex64, poly: Poly) -> Self {
        let exponent = if gamma == Complex64::new(0.0, 0.0) {
            Exponent::one()
        } else {
            Exponent::from_factor(LogFactor::new(gamma, Q::zero(), Q::from_integer(1), start))
        };
        Segment::new(start, Some(end), vec![Term::new(c, exponent, poly)])
    }

    pub fn constant(start: Q, end: Q, c: Complex64) -> Self {
        Segment::new(start, Some(end), vec![Term::constant(c)])
    }

    /// Linear piece from `v0` at `start` to `v1` at `end`.
    pub fn linear(start: Q, end: Q, v0: Complex64, v1: Complex64) -> Self {
        let slope = (v1 - v0) / to_f64(end - start);
        Segment::new(
            start,
            Some(end),
            vec![Term::new(
                Complex64::new(1.0, 0.0),
                Exponent::one(),
                Poly(vec![v0, slope]),
            )],
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> Option<Q> {
        self.end.map(|e| e - self.start)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= to_f64(self.start) && self.end.map_or(true, |e| t < to_f64(e))
    }

    pub fn eval_local(&self, tau: f64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(tau)).sum()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        if self.contains(t) {
            self.eval_local(t - to_f64(self.start))
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn translate(&self, d: Q) -> Segment {
        Segment {
            start: self.start + d,
            end: self.end.map(|e| e + d),
            terms: self.terms.clone(),
        }
    }

    /// The part on `[max(start, lo), min(end, hi))`, re-anchored at its new
    /// start; `None` when empty.
    pub fn clip(&self, lo: Q, hi: Option<Q>) -> Option<Segment> {
        let start = self.start.max(lo);
        let end = match (self.end, hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        if matches!(end, Some(e) if e <= start) {
            return None;
        }
        let d = start - self.start;
        Some(Segment {
            start,
            end,
            terms: self.terms.iter().map(|t| t.recenter(d)).collect(),
        })
    }

    pub fn map_terms(&self, f: impl Fn(&Term) -> Term) -> Segment {
        Segment::new(self.start, self.end, self.terms.iter().map(f).collect())
    }
}

fn is_sorted_disjoint(segs: &[Segment]) -> bool {
    segs.windows(2).all(|w| match w[0].end {
        Some(e) => e <= w[1].start,
        None => false,
    })
}

/// Brings a segment list into canonical form: sorted, pairwise disjoint,
/// overlapping segments summed on the common refinement of their
/// breakpoints, zero segments removed.
pub(crate) fn normalize(mut segs: Vec<Segment>) -> Vec<Segment> {
    segs.retain(|s| !s.is_zero() && s.end.map_or(true, |e| e > s.start));
    segs.sort_by(|a, b| a.start.cmp(&b.start));
    if is_sorted_disjoint(&segs) {
        return segs;
    }
    let mut points: Vec<Q> = segs
        .iter()
        .flat_map(|s| std::iter::once(s.start).chain(s.end))
        .collect();
    points.sort();
    points.dedup();

    let mut pieces: BTreeMap<Q, (Option<Q>, Vec<Term>)> = BTreeMap::new();
    for s in &segs {
        let lo = points.partition_point(|p| *p < s.start);
        let hi = match s.end {
            Some(e) => points.partition_point(|p| *p < e),
            None => points.len(),
        };
        for i in lo..hi {
            let piece_start = points[i];
            let piece_end = points.get(i + 1).copied();
            let d = piece_start - s.start;
            let entry = pieces
                .entry(piece_start)
                .or_insert_with(|| (piece_end, Vec::new()));
            entry.1.extend(s.terms.iter().map(|t| t.recenter(d)));
        }
    }
    pieces
        .into_iter()
        .map(|(start, (end, terms))| Segment::new(start, end, terms))
        .filter(|s| !s.is_zero())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::q;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn overlapping_segments_are_refined_and_summed() {
        let a = Segment::constant(q(0), q(2), one());
        let b = Segment::constant(q(1), q(3), one());
        let n = normalize(vec![a, b]);
        assert_eq!(n.len(), 3);
        assert_eq!(n[1].start, q(1));
        assert_eq!(n[1].eval_local(0.5), Complex64::new(2.0, 0.0));
        assert_eq!(n[2].end, Some(q(3)));
    }

    #[test]
    fn cancellation_removes_segment() {
        let a = Segment::constant(q(0), q(1), one());
        let b = Segment::constant(q(0), q(1), -one());
        assert!(normalize(vec![a, b]).is_empty());
    }

    #[test]
    fn infinite_segment_refinement() {
        let inf = Segment::new(q(0), None, vec![Term::constant(one())]);
        let fin = Segment::constant(q(1), q(2), one());
        let n = normalize(vec![inf, fin]);
        assert_eq!(n.len(), 3);
        assert_eq!(n[2].start, q(2));
        assert_eq!(n[2].end, None);
        assert_eq!(n[1].eval_local(0.0), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn clip_reanchors_polynomial() {
        let s = Segment::linear(q(0), q(4), Complex64::new(0.0, 0.0), Complex64::new(4.0, 0.0));
        let c = s.clip(q(1), Some(q(3))).unwrap();
        assert_eq!(c.start, q(1));
        assert!((c.eval(2.5) - Complex64::new(2.5, 0.0)).norm() < 1e-15);
        assert!(s.clip(q(5), None).is_none());
    }
}
