use num_complex::Complex64;
use num_traits::Zero;

use super::exponent::LogFactor;
use super::segment::{normalize, Segment};
use super::tail::{GeometricTail, LawFactor};
use super::Space;
use crate::error::{Error, Result};
use crate::grid::{ceil, to_f64, Q};
use crate::poly::MAX_DEGREE;

/// Jumps up to `CONTINUITY_TOL · (1 + local value scale)` count as continuous.
const CONTINUITY_TOL: f64 = 1e-10;

/// Number of tail blocks examined when checking continuity.
const CONTINUITY_BLOCKS: u64 = 4;

/// A function on `[0, ∞)` given by finitely many segments followed by an
/// optional [`GeometricTail`].
///
/// The segments are kept sorted and disjoint and all of them end at or before
/// the tail start.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFn {
    segments: Vec<Segment>,
    tail: Option<GeometricTail>,
    space: Space,
}

impl PiecewiseFn {
    pub fn new(segments: Vec<Segment>, tail: Option<GeometricTail>, space: Space) -> Result<Self> {
        for s in &segments {
            if s.start < Q::zero() {
                return Err(Error::InvalidArgument("segment starts before 0".into()));
            }
            if matches!(s.end, Some(e) if e <= s.start) {
                return Err(Error::InvalidArgument("segment has empty interval".into()));
            }
            for t in &s.terms {
                if t.poly.degree() > MAX_DEGREE {
                    return Err(Error::InvalidArgument(format!(
                        "polynomial degree {} exceeds {MAX_DEGREE}",
                        t.poly.degree()
                    )));
                }
                if !t.coeff.is_finite() || t.poly.0.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite coefficient".into()));
                }
            }
        }
        if let Some(t) = &tail {
            if t.start() < Q::zero() {
                return Err(Error::InvalidArgument("tail starts before 0".into()));
            }
        }
        Self::assemble(segments, tail, space)
    }

    /// Normalises the head and moves tail blocks into it until the head ends
    /// before the tail starts.
    fn assemble(segments: Vec<Segment>, tail: Option<GeometricTail>, space: Space) -> Result<Self> {
        let mut segments = normalize(segments);
        let tail = tail.filter(|t| !t.is_zero());
        let tail = match tail {
            None => None,
            Some(t) => {
                if segments.iter().any(|s| s.end.is_none()) {
                    return Err(Error::Unsupported(
                        "an unbounded segment cannot coexist with a tail".into(),
                    ));
                }
                let head_end = segments.iter().filter_map(|s| s.end).max();
                match head_end {
                    Some(e) if e > t.start() => {
                        let j = ceil((e - t.start()) / t.block_len()) as u64;
                        let (blocks, rest) = t.split_off(j);
                        segments.extend(blocks);
                        segments = normalize(segments);
                        rest
                    }
                    _ => Some(t),
                }
            }
        };
        Ok(PiecewiseFn {
            segments,
            tail,
            space,
        })
    }

    pub fn from_segments(segments: Vec<Segment>, space: Space) -> Result<Self> {
        Self::new(segments, None, space)
    }

    pub fn zero(space: Space) -> Self {
        PiecewiseFn {
            segments: Vec::new(),
            tail: None,
            space,
        }
    }

    /// Indicator of `[lo, hi)`.
    pub fn indicator(lo: Q, hi: Q, space: Space) -> Result<Self> {
        Self::from_segments(
            vec![Segment::constant(lo, hi, Complex64::new(1.0, 0.0))],
            space,
        )
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn tail(&self) -> Option<&GeometricTail> {
        self.tail.as_ref()
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn with_space(mut self, space: Space) -> Self {
        self.space = space;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.segments.is_empty() && self.tail.is_none()
    }

    /// Whether the function vanishes beyond some finite point.
    pub fn is_eventually_zero(&self) -> bool {
        self.support_end().is_some()
    }

    /// Right end of the support, `None` when unbounded.
    pub fn support_end(&self) -> Option<Q> {
        let mut end = Q::zero();
        for s in &self.segments {
            end = end.max(s.end?);
        }
        if let Some(t) = &self.tail {
            end = end.max(t.end()?);
        }
        Some(end)
    }

    pub fn evaluate(&self, t: f64) -> Complex64 {
        if t < 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let head: Complex64 = self.segments.iter().map(|s| s.eval(t)).sum();
        head + self.tail.as_ref().map_or(Complex64::new(0.0, 0.0), |tl| tl.eval(t))
    }

    /// `lim_{s → t⁻} f(s)`.
    pub fn left_limit(&self, t: f64) -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        for s in &self.segments {
            let (a, b) = (to_f64(s.start), s.end.map_or(f64::INFINITY, to_f64));
            if a < t && t <= b {
                v += s.eval_local(t - a);
            }
        }
        if let Some(tl) = &self.tail {
            v += tl.left_limit(t);
        }
        v
    }

    /// `t ↦ f(t + a)` restricted to `[0, ∞)`.
    pub fn shift_left(&self, a: Q) -> PiecewiseFn {
        let mut head = self.segments.clone();
        let tail = match &self.tail {
            Some(t) if t.start() < a => {
                let j = ceil((a - t.start()) / t.block_len()) as u64;
                let (blocks, rest) = t.split_off(j);
                head.extend(blocks);
                rest
            }
            other => other.clone(),
        };
        let head = head
            .iter()
            .filter_map(|s| s.clip(a, None))
            .map(|s| s.translate(-a))
            .collect();
        PiecewiseFn {
            segments: normalize(head),
            tail: tail.map(|t| t.translate(-a)),
            space: self.space,
        }
    }

    /// `t ↦ f(t − a)`, zero on `[0, a)`.
    pub fn shift_right(&self, a: Q) -> PiecewiseFn {
        PiecewiseFn {
            segments: self.segments.iter().map(|s| s.translate(a)).collect(),
            tail: self.tail.as_ref().map(|t| t.translate(a)),
            space: self.space,
        }
    }

    fn map_segments(&self, f: impl Fn(&Segment) -> Segment) -> PiecewiseFn {
        PiecewiseFn {
            segments: normalize(self.segments.iter().map(&f).collect()),
            tail: self
                .tail
                .as_ref()
                .map(|t| t.map_base(&f))
                .filter(|t| !t.is_zero()),
            space: self.space,
        }
    }

    pub fn scale(&self, c: Complex64) -> PiecewiseFn {
        if c == Complex64::new(0.0, 0.0) {
            return PiecewiseFn::zero(self.space);
        }
        self.map_segments(|s| {
            s.map_terms(|t| {
                let mut t = t.clone();
                t.coeff *= c;
                t
            })
        })
    }

    /// Multiplies by `exp(log · k)`.
    pub fn scale_log(&self, log: Complex64, k: Q) -> PiecewiseFn {
        let f = LogFactor::constant(log, k);
        self.map_segments(|s| s.map_terms(|t| t.with_factor(f.clone())))
    }

    /// Multiplies by `exp(log · (rate t + offset))`.
    pub fn exp_affine(&self, log: Complex64, rate: Q, offset: Q) -> PiecewiseFn {
        let factor_at = |s: &Segment| LogFactor::new(log, Q::zero(), rate, offset + rate * s.start);
        let mut out = self.map_segments(|s| {
            let f = factor_at(s);
            s.map_terms(|t| t.with_factor(f.clone()))
        });
        if let Some(t) = out.tail.take() {
            out.tail = Some(t.mul_law(LawFactor::new(log, Q::zero(), rate * t.block_len(), Q::zero())));
        }
        out
    }

    /// Multiplies by `c · e^{γ t}`.
    pub fn exp_scale(&self, c: Complex64, gamma: Complex64) -> PiecewiseFn {
        self.scale(c).exp_affine(gamma, Q::from_integer(1), Q::zero())
    }

    pub fn neg(&self) -> PiecewiseFn {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn add(&self, other: &PiecewiseFn) -> Result<PiecewiseFn> {
        let mut segs = self.segments.clone();
        segs.extend(other.segments.iter().cloned());
        let tail = match (&self.tail, &other.tail) {
            (None, None) => None,
            (Some(t), None) | (None, Some(t)) => Some(t.clone()),
            (Some(a), Some(b)) => {
                if !a.same_structure(b) {
                    return Err(Error::IncompatibleTails);
                }
                let mut base = a.base().to_vec();
                base.extend(b.base().iter().cloned());
                Some(a.with_base(base))
            }
        };
        Self::assemble(segs, tail, self.space)
    }

    pub fn sub(&self, other: &PiecewiseFn) -> Result<PiecewiseFn> {
        self.add(&other.neg())
    }

    /// Keeps the head and the first `k` tail blocks and drops the rest.
    pub fn materialize_tail(&self, k: u64) -> PiecewiseFn {
        match &self.tail {
            None => self.clone(),
            Some(t) => {
                let (blocks, _) = t.split_off(k);
                let mut segs = self.segments.clone();
                segs.extend(blocks);
                PiecewiseFn {
                    segments: normalize(segs),
                    tail: None,
                    space: self.space,
                }
            }
        }
    }

    /// Moves the first `k` tail blocks into the head, keeping the rest.
    pub fn expand_tail(&self, k: u64) -> PiecewiseFn {
        match &self.tail {
            None => self.clone(),
            Some(t) => {
                let (blocks, rest) = t.split_off(k);
                let mut segs = self.segments.clone();
                segs.extend(blocks);
                PiecewiseFn {
                    segments: normalize(segs),
                    tail: rest,
                    space: self.space,
                }
            }
        }
    }

    /// The restriction to `[0, hi)`.
    pub fn restrict_to(&self, hi: Q) -> PiecewiseFn {
        let view = match &self.tail {
            Some(t) if t.start() < hi => self.expand_tail(ceil((hi - t.start()) / t.block_len()) as u64),
            _ => self.clone(),
        };
        PiecewiseFn {
            segments: view
                .segments
                .iter()
                .filter_map(|s| s.clip(Q::zero(), Some(hi)))
                .collect(),
            tail: None,
            space: self.space,
        }
    }

    /// Breakpoints of the head together with those of the first `blocks`
    /// tail blocks.
    pub fn breakpoints(&self, blocks: u64) -> Vec<Q> {
        let mut pts: Vec<Q> = Vec::new();
        let view = self.expand_tail(blocks);
        for s in &view.segments {
            pts.push(s.start);
            pts.extend(s.end);
        }
        if let Some(t) = &view.tail {
            pts.push(t.start());
        }
        pts.sort();
        pts.dedup();
        pts
    }

    /// Checks that there is no jump at any breakpoint, including at the start
    /// of the support when it is positive.
    pub fn check_continuity(&self) -> Result<()> {
        for p in self.breakpoints(CONTINUITY_BLOCKS) {
            if p <= Q::zero() {
                continue;
            }
            let x = to_f64(p);
            let (l, r) = (self.left_limit(x), self.evaluate(x));
            let jump = (l - r).norm();
            if jump > CONTINUITY_TOL * (1.0 + l.norm().max(r.norm())) {
                return Err(Error::ContinuityViolation { at: x, jump });
            }
        }
        Ok(())
    }

    /// Largest breakpoint denominator, used to decide whether a step lies on
    /// the grid of this function.
    pub fn grid_denominator(&self) -> i64 {
        self.breakpoints(1)
            .iter()
            .fold(1i64, |acc, p| lcm(acc, *p.denom()))
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    (a / gcd(a, b)) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{q, qr};
    use crate::poly::Poly;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn hat() -> PiecewiseFn {
        PiecewiseFn::from_segments(
            vec![
                Segment::linear(q(0), q(1), c(0.0), c(1.0)),
                Segment::linear(q(1), q(2), c(1.0), c(0.0)),
            ],
            Space::C0,
        )
        .unwrap()
    }

    #[test]
    fn shifts_are_exact_translations() {
        let f = hat();
        let g = f.shift_right(qr(3, 2)).shift_left(qr(3, 2));
        assert_eq!(g, f);
        let h = f.shift_left(qr(1, 2));
        assert!((h.evaluate(0.0) - c(0.5)).norm() < 1e-15);
        assert!((h.evaluate(1.0) - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn add_then_subtract_is_zero() {
        let f = hat();
        let g = PiecewiseFn::indicator(qr(1, 2), q(3), Space::C0).unwrap();
        let s = f.add(&g).unwrap().sub(&g).unwrap();
        for t in [0.25, 0.75, 1.5, 2.5] {
            assert!((s.evaluate(t) - f.evaluate(t)).norm() < 1e-15);
        }
        assert!(s.sub(&f).unwrap().is_zero());
    }

    #[test]
    fn exp_affine_inverse_cancels() {
        let ln2 = c(2f64.ln());
        let f = hat().exp_affine(ln2, q(1), q(0));
        assert!((f.evaluate(1.0) - c(2.0)).norm() < 1e-15);
        let g = f.exp_affine(ln2, q(-1), q(0));
        assert_eq!(g, hat());
    }

    #[test]
    fn continuity_detects_jump() {
        assert!(hat().check_continuity().is_ok());
        let step = PiecewiseFn::indicator(q(0), q(1), Space::C0).unwrap();
        assert!(matches!(
            step.check_continuity(),
            Err(Error::ContinuityViolation { .. })
        ));
    }

    #[test]
    fn head_overlapping_tail_is_separated() {
        let base = vec![Segment::constant(q(0), q(1), c(1.0))];
        let tail = GeometricTail::new(
            q(0),
            q(1),
            base,
            vec![LawFactor::new(c(0.5f64.ln()), q(0), q(1), q(0))],
            None,
        )
        .unwrap();
        let head = vec![Segment::simple(q(0), qr(5, 2), c(1.0), c(0.0), Poly::one())];
        let f = PiecewiseFn::new(head, Some(tail), Space::Lp(1.0)).unwrap();
        assert_eq!(f.tail().unwrap().start(), q(3));
        assert!((f.evaluate(1.5) - c(1.5)).norm() < 1e-15);
        assert!((f.evaluate(3.5) - c(0.125)).norm() < 1e-15);
    }
}
