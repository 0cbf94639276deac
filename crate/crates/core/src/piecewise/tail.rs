use num_complex::Complex64;
use num_traits::Zero;

use super::exponent::{canonical_log, log_key_cmp, LogFactor};
use super::segment::{normalize, Segment};
use crate::error::{Error, Result};
use crate::grid::{to_f64, Q};

/// Block law factor: block `k` of a tail is its base pattern multiplied by
/// `exp(log · (quad k² + lin k + rate k u))`, `u` being the offset from the
/// block start.
#[derive(Clone, Debug, PartialEq)]
pub struct LawFactor {
    pub log: Complex64,
    pub quad: Q,
    pub lin: Q,
    pub rate: Q,
}

impl LawFactor {
    pub fn new(log: Complex64, quad: Q, lin: Q, rate: Q) -> Self {
        let log = canonical_log(log);
        if log.re < 0.0 || (log.re == 0.0 && log.im < 0.0) {
            LawFactor {
                log: canonical_log(-log),
                quad: -quad,
                lin: -lin,
                rate: -rate,
            }
        } else {
            LawFactor {
                log,
                quad,
                lin,
                rate,
            }
        }
    }

    fn is_trivial(&self) -> bool {
        (self.quad.is_zero() && self.lin.is_zero() && self.rate.is_zero())
            || self.log == Complex64::new(0.0, 0.0)
    }
}

fn canonical_law(law: Vec<LawFactor>) -> Vec<LawFactor> {
    let mut out: Vec<LawFactor> = Vec::with_capacity(law.len());
    for f in law {
        let f = LawFactor::new(f.log, f.quad, f.lin, f.rate);
        if f.is_trivial() {
            continue;
        }
        match out.binary_search_by(|g| log_key_cmp(&g.log, &f.log)) {
            Ok(i) => {
                let g = &mut out[i];
                g.quad += f.quad;
                g.lin += f.lin;
                g.rate += f.rate;
                if g.is_trivial() {
                    out.remove(i);
                }
            }
            Err(i) => out.insert(i, f),
        }
    }
    out
}

/// A repeating block pattern starting at `start`: blocks of length
/// `block_len`, each a copy of the base pattern weighted by the block law.
/// `blocks = None` means infinitely many blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricTail {
    start: Q,
    block_len: Q,
    base: Vec<Segment>,
    law: Vec<LawFactor>,
    blocks: Option<u64>,
}

impl GeometricTail {
    pub fn new(
        start: Q,
        block_len: Q,
        base: Vec<Segment>,
        law: Vec<LawFactor>,
        blocks: Option<u64>,
    ) -> Result<Self> {
        if block_len <= Q::zero() {
            return Err(Error::InvalidArgument("tail block length must be positive".into()));
        }
        let base = normalize(base);
        for s in &base {
            match s.end {
                Some(e) if s.start >= start && e <= start + block_len => {}
                _ => {
                    return Err(Error::InvalidArgument(
                        "tail base segments must lie inside the first block".into(),
                    ))
                }
            }
        }
        Ok(GeometricTail {
            start,
            block_len,
            base,
            law: canonical_law(law),
            blocks,
        })
    }

    pub fn start(&self) -> Q {
        self.start
    }

    pub fn block_len(&self) -> Q {
        self.block_len
    }

    pub fn base(&self) -> &[Segment] {
        &self.base
    }

    pub fn law(&self) -> &[LawFactor] {
        &self.law
    }

    pub fn blocks(&self) -> Option<u64> {
        self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_empty() || self.blocks == Some(0)
    }

    pub fn is_infinite(&self) -> bool {
        self.blocks.is_none()
    }

    /// Right end of the support, `None` for infinitely many blocks.
    pub fn end(&self) -> Option<Q> {
        let k = self.blocks?;
        let base_end = self.base.iter().filter_map(|s| s.end).max()?;
        if k == 0 {
            return Some(self.start);
        }
        Some(base_end + self.block_len * (k as i64 - 1))
    }

    /// Segments of block `k`, positioned absolutely.
    pub fn block(&self, k: u64) -> Vec<Segment> {
        let shift = self.block_len * k as i64;
        let kq = Q::from_integer(k as i64);
        self.base
            .iter()
            .map(|s| {
                let u0 = s.start - self.start;
                let mut seg = s.translate(shift);
                for f in &self.law {
                    let factor = LogFactor::new(
                        f.log,
                        Q::zero(),
                        f.rate * kq,
                        f.quad * kq * kq + f.lin * kq + f.rate * kq * u0,
                    );
                    seg = seg.map_terms(|t| t.with_factor(factor.clone()));
                }
                seg
            })
            .filter(|s| !s.is_zero())
            .collect()
    }

    /// Blocks `0..j` as plain segments together with the tail of the remaining
    /// blocks, re-based so that its block 0 is the old block `j`.
    pub fn split_off(&self, j: u64) -> (Vec<Segment>, Option<GeometricTail>) {
        let take = self.blocks.map_or(j, |b| b.min(j));
        let head: Vec<Segment> = (0..take).flat_map(|k| self.block(k)).collect();
        if self.blocks.is_some_and(|b| b <= j) {
            return (head, None);
        }
        let jq = Q::from_integer(j as i64);
        let rest = GeometricTail {
            start: self.start + self.block_len * jq,
            block_len: self.block_len,
            base: self.block(j),
            law: canonical_law(
                self.law
                    .iter()
                    .map(|f| LawFactor::new(f.log, f.quad, f.lin + f.quad * jq * 2, f.rate))
                    .collect(),
            ),
            blocks: self.blocks.map(|b| b - j),
        };
        (head, if rest.is_zero() { None } else { Some(rest) })
    }

    pub fn translate(&self, d: Q) -> GeometricTail {
        GeometricTail {
            start: self.start + d,
            block_len: self.block_len,
            base: self.base.iter().map(|s| s.translate(d)).collect(),
            law: self.law.clone(),
            blocks: self.blocks,
        }
    }

    pub(crate) fn map_base(&self, f: impl Fn(&Segment) -> Segment) -> GeometricTail {
        GeometricTail {
            base: normalize(self.base.iter().map(f).collect()),
            ..self.clone()
        }
    }

    pub(crate) fn mul_law(&self, factor: LawFactor) -> GeometricTail {
        let mut law = self.law.clone();
        law.push(factor);
        GeometricTail {
            law: canonical_law(law),
            ..self.clone()
        }
    }

    pub(crate) fn with_base(&self, base: Vec<Segment>) -> GeometricTail {
        GeometricTail {
            base: normalize(base),
            ..self.clone()
        }
    }

    pub fn same_structure(&self, other: &GeometricTail) -> bool {
        self.start == other.start
            && self.block_len == other.block_len
            && self.law == other.law
            && self.blocks == other.blocks
    }

    /// Real growth rates `(ρ, σ, δ)` of the block law: the modulus of block
    /// `k` at offset `u` is `exp(ρ k² + σ k + δ k u)` times the base.
    pub fn growth(&self) -> (f64, f64, f64) {
        self.law.iter().fold((0.0, 0.0, 0.0), |(r, s, d), f| {
            (
                r + f.log.re * to_f64(f.quad),
                s + f.log.re * to_f64(f.lin),
                d + f.log.re * to_f64(f.rate),
            )
        })
    }

    /// Offsets of the base support relative to the block start.
    pub fn base_span(&self) -> (f64, f64) {
        let lo = self.base.iter().map(|s| s.start).min().unwrap_or(self.start);
        let hi = self
            .base
            .iter()
            .filter_map(|s| s.end)
            .max()
            .unwrap_or(self.start);
        (to_f64(lo - self.start), to_f64(hi - self.start))
    }

    /// `ln M_k`: block `k` is bounded pointwise by `M_k` times the base.
    pub fn log_majorant(&self, k: u64) -> f64 {
        let (rho, sigma, delta) = self.growth();
        let (u0, u1) = self.base_span();
        let kf = k as f64;
        rho * kf * kf + (sigma + (delta * u0).max(delta * u1)) * kf
    }

    /// Whether every block has the same modulus profile up to a geometric
    /// factor, so that block norms form an exact geometric sequence.
    pub fn is_geometric(&self) -> bool {
        let (rho, _, delta) = self.growth();
        rho == 0.0 && delta == 0.0
    }

    fn block_index(&self, t: f64) -> Option<u64> {
        let rel = (t - to_f64(self.start)) / to_f64(self.block_len);
        if rel < 0.0 {
            return None;
        }
        Some(rel.floor() as u64)
    }

    fn in_range(&self, k: u64) -> bool {
        self.blocks.map_or(true, |b| k < b)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let Some(k) = self.block_index(t) else {
            return zero;
        };
        for kk in [k, k.wrapping_sub(1), k + 1] {
            if kk == u64::MAX || !self.in_range(kk) {
                continue;
            }
            let segs = self.block(kk);
            if let Some(s) = segs.iter().find(|s| s.contains(t)) {
                return s.eval(t);
            }
        }
        zero
    }

    pub fn left_limit(&self, t: f64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let rel = (t - to_f64(self.start)) / to_f64(self.block_len);
        if rel <= 0.0 {
            return zero;
        }
        let k = rel.ceil() as u64 - 1;
        for kk in [k, k + 1, k.wrapping_sub(1)] {
            if kk == u64::MAX || !self.in_range(kk) {
                continue;
            }
            for s in self.block(kk) {
                let (a, b) = (to_f64(s.start), s.end.map_or(f64::INFINITY, to_f64));
                if a < t && t <= b {
                    return s.eval_local(t - a);
                }
            }
        }
        zero
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{q, qr};

    fn unit_block() -> Vec<Segment> {
        vec![Segment::constant(q(0), q(1), Complex64::new(1.0, 0.0))]
    }

    #[test]
    fn geometric_blocks_scale_by_ratio() {
        let ln_half = Complex64::new(0.5f64.ln(), 0.0);
        let t = GeometricTail::new(
            q(0),
            q(1),
            unit_block(),
            vec![LawFactor::new(ln_half, q(0), q(1), q(0))],
            None,
        )
        .unwrap();
        for k in 0..5u64 {
            let v = t.eval(k as f64 + 0.5);
            assert!((v.re - 0.5f64.powi(k as i32)).abs() < 1e-15);
        }
        assert!(t.is_geometric());
    }

    #[test]
    fn split_off_preserves_values() {
        let log = Complex64::new(0.3, 0.2);
        let t = GeometricTail::new(
            q(1),
            qr(3, 2),
            vec![Segment::linear(q(1), qr(5, 2), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))],
            vec![LawFactor::new(log, qr(-1, 2), q(1), q(-1))],
            None,
        )
        .unwrap();
        let (head, rest) = t.split_off(3);
        let rest = rest.unwrap();
        assert_eq!(rest.start(), q(1) + qr(9, 2));
        for x in [1.2, 3.0, 5.9, 6.1, 8.0, 11.3] {
            let direct = t.eval(x);
            let split: Complex64 =
                head.iter().map(|s| s.eval(x)).sum::<Complex64>() + rest.eval(x);
            assert!((direct - split).norm() < 1e-12 * direct.norm().max(1.0), "{x}");
        }
    }

    #[test]
    fn finite_tail_end() {
        let t = GeometricTail::new(q(2), q(1), unit_block().iter().map(|s| s.translate(q(2))).collect(), vec![], Some(4)).unwrap();
        assert_eq!(t.end(), Some(q(6)));
        assert_eq!(t.eval(6.5), Complex64::new(0.0, 0.0));
    }
}
