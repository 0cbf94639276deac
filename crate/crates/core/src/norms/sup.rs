//! Sup norms.
//!
//! A single-term segment `k e^{aτ² + bτ + c} P(τ)` has its extrema where
//! `(4 Re a τ + 2 Re b)|P|² + (|P|²)'` vanishes, so its maximum is found
//! exactly from real polynomial roots. Segments carrying several terms are
//! searched by branch and bound with a second-order upper estimate.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::numeric::{NumSegment, NumTerm};
use super::{majorant_max, NormMethod, NormResult};
use crate::error::{Error, Result};
use crate::piecewise::{GeometricTail, PiecewiseFn, Segment};
use crate::poly::RealPoly;

const REL_TOL: f64 = 1e-12;
const MAX_INTERVALS: usize = 200_000;
const MAX_BLOCKS: u64 = 100_000;

#[derive(Clone, Copy, Debug)]
struct Sup {
    value: f64,
    err: f64,
    method: NormMethod,
}

impl Sup {
    fn zero() -> Self {
        Sup {
            value: 0.0,
            err: 0.0,
            method: NormMethod::ClosedForm,
        }
    }

    fn max(self, o: Sup) -> Sup {
        Sup {
            value: self.value.max(o.value),
            err: self.err.max(o.err),
            method: self.method.max(o.method),
        }
    }
}

fn single_term(t: &NumTerm, len: Option<f64>) -> Result<Sup> {
    let absq = t.poly.abs_sq();
    let hi = match len {
        Some(l) => l,
        None if t.decays() => {
            let lin = RealPoly(vec![2.0 * t.b.re, 4.0 * t.a.re]).trimmed();
            lin.mul(&absq).add(&absq.derivative()).root_bound()
        }
        None if t.a.re == 0.0 && t.b.re == 0.0 && t.poly.is_constant() => {
            let v = t.eval(0.0).norm();
            return Ok(Sup {
                value: v,
                err: 0.0,
                method: NormMethod::ClosedForm,
            });
        }
        None => return Err(Error::DivergentNorm("unbounded segment does not decay".into())),
    };
    let lin = RealPoly(vec![2.0 * t.b.re, 4.0 * t.a.re]).trimmed();
    let r = lin.mul(&absq).add(&absq.derivative());
    let mut candidates = vec![0.0];
    if len.is_some() {
        candidates.push(hi);
    }
    candidates.extend(r.real_roots_in(0.0, hi));
    let value = candidates
        .iter()
        .map(|&x| t.eval(x).norm())
        .fold(0.0, f64::max);
    Ok(Sup {
        value,
        err: 1e-14 * value,
        method: NormMethod::ClosedForm,
    })
}

struct Cell {
    upper: f64,
    lo: f64,
    hi: f64,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.upper == o.upper
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        self.upper.total_cmp(&o.upper)
    }
}

fn branch_and_bound(seg: &NumSegment, lo: f64, hi: f64, floor: f64) -> Sup {
    let mut best = floor.max(seg.eval(lo).norm()).max(seg.eval(hi).norm());
    let bound = |l: f64, h: f64, best: &mut f64| -> f64 {
        let m = 0.5 * (l + h);
        let (fm, dm) = (seg.eval(m), seg.derivative(m));
        *best = best.max(fm.norm());
        let half = 0.5 * (h - l);
        let first = (fm + dm * half).norm().max((fm - dm * half).norm());
        first + 0.5 * seg.second_derivative_bound(l, h) * half * half
    };
    let mut heap = BinaryHeap::new();
    let pieces = 16;
    for i in 0..pieces {
        let l = lo + (hi - lo) * i as f64 / pieces as f64;
        let h = lo + (hi - lo) * (i + 1) as f64 / pieces as f64;
        let upper = bound(l, h, &mut best);
        heap.push(Cell { upper, lo: l, hi: h });
    }
    let mut visited = 0usize;
    while let Some(cell) = heap.pop() {
        if cell.upper <= best * (1.0 + REL_TOL) || visited >= MAX_INTERVALS {
            heap.push(cell);
            break;
        }
        visited += 1;
        let mid = 0.5 * (cell.lo + cell.hi);
        for (l, h) in [(cell.lo, mid), (mid, cell.hi)] {
            let upper = bound(l, h, &mut best);
            heap.push(Cell { upper, lo: l, hi: h });
        }
    }
    let top = heap.peek().map_or(best, |c| c.upper);
    Sup {
        value: best,
        err: (top - best).max(REL_TOL * best),
        method: NormMethod::Quadrature,
    }
}

fn segment_sup(seg: &Segment) -> Result<Sup> {
    let ns = NumSegment::new(seg);
    match ns.terms.as_slice() {
        [] => Ok(Sup::zero()),
        [t] => single_term(t, ns.len),
        _ => match ns.len {
            Some(len) => Ok(branch_and_bound(&ns, 0.0, len, 0.0)),
            None => {
                if !ns.decays() {
                    return Err(Error::DivergentNorm("unbounded segment does not decay".into()));
                }
                let probe = (0..=64)
                    .map(|i| ns.eval(i as f64 / 4.0).norm())
                    .fold(0.0, f64::max);
                let cut = ns
                    .decay_point(|h| h.iter().map(|&(v, _)| v.exp()).sum::<f64>() <= probe)
                    .ok_or_else(|| Error::DivergentNorm("no decay point found".into()))?;
                Ok(branch_and_bound(&ns, 0.0, cut, probe))
            }
        },
    }
}

fn segments_sup(segs: &[Segment]) -> Result<Sup> {
    segs.iter()
        .try_fold(Sup::zero(), |acc, s| Ok(acc.max(segment_sup(s)?)))
}

fn tail_sup(t: &GeometricTail) -> Result<Sup> {
    let base = segments_sup(t.base())?;
    let mut total = base;
    if base.value == 0.0 {
        return Ok(total);
    }
    majorant_max(t, 0).ok_or_else(|| Error::DivergentNorm("tail blocks do not decay".into()))?;
    let base_upper = base.value + base.err;
    let (rho, sigma, delta) = t.growth();
    let (u0, u1) = t.base_span();
    let mu = (delta * u0).max(delta * u1);
    let mut k = 1u64;
    loop {
        if t.blocks().is_some_and(|n| k >= n) {
            break;
        }
        let inc = rho * (2 * k + 1) as f64 + sigma + mu;
        if inc <= 0.0 && t.log_majorant(k).exp() * base_upper <= total.value {
            break;
        }
        total = total.max(segments_sup(&t.block(k))?);
        k += 1;
        if k > MAX_BLOCKS {
            return Err(Error::ToleranceNotMet {
                tol: REL_TOL,
                achieved: f64::INFINITY,
            });
        }
    }
    if k > 1 {
        total.method = total.method.max(NormMethod::TailSeries);
    }
    Ok(total)
}

/// `sup_{t ≥ 0} |f(t)|`.
pub fn sup_norm(f: &PiecewiseFn) -> Result<NormResult> {
    let mut s = segments_sup(f.segments())?;
    if let Some(t) = f.tail() {
        s = s.max(tail_sup(t)?);
    }
    Ok(NormResult {
        value: s.value,
        err_bound: s.err,
        method: s.method,
    })
}
