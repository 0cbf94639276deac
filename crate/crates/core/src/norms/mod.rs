//! Certified `L_p` and sup norms of [`PiecewiseFn`] values.

mod numeric;
pub(crate) mod quadrature;
mod sup;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::{GeometricTail, PiecewiseFn, Segment, Space};
use crate::poly::RealPoly;
use numeric::NumSegment;

pub mod reference;
pub use sup::sup_norm;

/// Default absolute tolerance for norm computations.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Safety cap on the number of tail blocks summed explicitly.
const MAX_BLOCKS: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NormMethod {
    ClosedForm,
    Quadrature,
    TailSeries,
}

/// A norm value with an error bound: the true norm lies in
/// `[value − err_bound, value + err_bound]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub err_bound: f64,
    pub method: NormMethod,
}

impl NormResult {
    pub fn exact(value: f64) -> Self {
        NormResult {
            value,
            err_bound: 0.0,
            method: NormMethod::ClosedForm,
        }
    }

    pub fn upper(&self) -> f64 {
        self.value + self.err_bound
    }

    pub fn lower(&self) -> f64 {
        (self.value - self.err_bound).max(0.0)
    }
}

/// `∫|f|^p` with an absolute error bound.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Integral {
    pub value: f64,
    pub err: f64,
    pub method: NormMethod,
}

impl Integral {
    fn zero() -> Self {
        Integral {
            value: 0.0,
            err: 0.0,
            method: NormMethod::ClosedForm,
        }
    }

    fn plus(self, o: Integral) -> Integral {
        Integral {
            value: self.value + o.value,
            err: self.err + o.err,
            method: self.method.max(o.method),
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("p = {p} must be finite and at least 1")))
    }
}

fn abs_pow(z: num_complex::Complex64, p: f64) -> f64 {
    if p == 2.0 {
        z.norm_sqr()
    } else if p == 1.0 {
        z.norm()
    } else {
        z.norm().powf(p)
    }
}

/// Points in `(0, len)` where a single-term integrand may fail to be smooth.
fn kink_points(seg: &NumSegment, len: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    if let [t] = seg.terms.as_slice() {
        let re = RealPoly(t.poly.0.iter().map(|c| c.re).collect());
        let im = RealPoly(t.poly.0.iter().map(|c| c.im).collect());
        let mut roots = re.real_roots_in(0.0, len);
        roots.extend(im.real_roots_in(0.0, len));
        roots.retain(|&r| r > 0.0 && r < len);
        roots.sort_by(f64::total_cmp);
        pts.extend(roots);
    }
    pts.push(len);
    pts.dedup();
    pts
}

fn quad_pieces(seg: &NumSegment, p: f64, len: f64, tol: f64) -> Result<Integral> {
    let pts = kink_points(seg, len);
    let share = tol / (pts.len() - 1) as f64;
    let mut total = Integral {
        method: NormMethod::Quadrature,
        ..Integral::zero()
    };
    for w in pts.windows(2) {
        let q = quadrature::adaptive(|t| abs_pow(seg.eval(t), p), w[0], w[1], share);
        if !q.converged {
            return Err(Error::ToleranceNotMet {
                tol,
                achieved: q.err,
            });
        }
        total.value += q.value;
        total.err += q.err;
    }
    Ok(total)
}

/// `∫|f|^p` over one segment.
pub(crate) fn segment_integral(seg: &Segment, p: f64, tol: f64) -> Result<Integral> {
    let ns = NumSegment::new(seg);
    if let [t] = ns.terms.as_slice() {
        if t.a.re == 0.0 && t.poly.is_constant() {
            let m = (t.k * t.poly.eval(0.0)).norm() * t.c.re.exp();
            let beta = p * t.b.re;
            let mp = m.powf(p);
            let value = match ns.len {
                Some(len) if beta == 0.0 => mp * len,
                Some(len) => mp * (beta * len).exp_m1() / beta,
                None if beta < 0.0 => mp / -beta,
                None => {
                    return Err(Error::DivergentNorm(
                        "non-decaying exponential on an unbounded segment".into(),
                    ))
                }
            };
            return Ok(Integral {
                value,
                err: 16.0 * f64::EPSILON * value,
                method: NormMethod::ClosedForm,
            });
        }
    }
    match ns.len {
        Some(len) => quad_pieces(&ns, p, len, tol),
        None => {
            if !ns.decays() {
                return Err(Error::DivergentNorm(
                    "unbounded segment does not decay".into(),
                ));
            }
            let n = ns.terms.len() as f64;
            let spread = n.powf(p - 1.0);
            let tail_bound = |h: &[(f64, f64)]| -> f64 {
                spread * h.iter().map(|&(v, d)| (p * v).exp() / (p * -d)).sum::<f64>()
            };
            let cut = ns
                .decay_point(|h| tail_bound(h) <= 0.25 * tol)
                .ok_or_else(|| Error::ToleranceNotMet {
                    tol,
                    achieved: f64::INFINITY,
                })?;
            let h: Vec<(f64, f64)> = ns.terms.iter().map(|t| t.log_majorant(cut)).collect();
            let rest = tail_bound(&h);
            let mut body = quad_pieces(&ns, p, cut, 0.75 * tol)?;
            body.err += rest;
            body.value += 0.5 * rest;
            Ok(body)
        }
    }
}

fn segments_integral(segs: &[Segment], p: f64, tol: f64) -> Result<Integral> {
    let share = tol / segs.len().max(1) as f64;
    segs.iter().try_fold(Integral::zero(), |acc, s| {
        Ok(acc.plus(segment_integral(s, p, share)?))
    })
}

/// `Σ_{k ≥ from} M_k^p` for the block majorants of `t`, or `None` when the
/// series diverges.
pub(crate) fn majorant_power_sum(t: &GeometricTail, from: u64, p: f64) -> Option<f64> {
    let (rho, sigma, delta) = t.growth();
    let (u0, u1) = t.base_span();
    let mu = (delta * u0).max(delta * u1);
    let term = |k: u64| (p * t.log_majorant(k)).exp();
    if let Some(n) = t.blocks() {
        if n <= from {
            return Some(0.0);
        }
        if n - from <= MAX_BLOCKS {
            return Some((from..n).map(term).sum());
        }
    }
    if rho > 0.0 || (rho == 0.0 && sigma + mu >= 0.0) {
        return None;
    }
    let mut sum = 0.0;
    let mut k = from;
    loop {
        let inc = p * (rho * (2 * k + 1) as f64 + sigma + mu);
        if inc < 0.0 {
            return Some(sum + term(k) / -inc.exp_m1());
        }
        sum += term(k);
        k += 1;
        if k - from > MAX_BLOCKS {
            return None;
        }
    }
}

/// `sup_{k ≥ from} M_k`, or `None` when the majorants do not decay.
pub(crate) fn majorant_max(t: &GeometricTail, from: u64) -> Option<f64> {
    let (rho, sigma, delta) = t.growth();
    let (u0, u1) = t.base_span();
    let mu = (delta * u0).max(delta * u1);
    let last = match t.blocks() {
        Some(n) if n <= from => return Some(0.0),
        Some(n) => Some(n - 1),
        None => {
            if rho > 0.0 || (rho == 0.0 && sigma + mu >= 0.0) {
                return None;
            }
            None
        }
    };
    let mut best = f64::NEG_INFINITY;
    let mut k = from;
    loop {
        best = best.max(t.log_majorant(k));
        let inc = rho * (2 * k + 1) as f64 + sigma + mu;
        if inc <= 0.0 || last == Some(k) || k - from > MAX_BLOCKS {
            return Some(best.exp());
        }
        k += 1;
    }
}

fn tail_integral(t: &GeometricTail, p: f64, tol: f64) -> Result<Integral> {
    let base = segments_integral(t.base(), p, 0.25 * tol)?;
    if base.value == 0.0 && base.err == 0.0 {
        return Ok(Integral::zero());
    }
    if t.is_geometric() {
        let (_, sigma, _) = t.growth();
        let ratio = (p * sigma).exp();
        let factor = match t.blocks() {
            Some(n) if ratio == 1.0 => n as f64,
            Some(n) => -(n as f64 * p * sigma).exp_m1() / -(p * sigma).exp_m1(),
            None if ratio < 1.0 => 1.0 / -(p * sigma).exp_m1(),
            None => {
                return Err(Error::DivergentNorm(
                    "tail blocks do not decay geometrically".into(),
                ))
            }
        };
        return Ok(Integral {
            value: base.value * factor,
            err: base.err * factor + 16.0 * f64::EPSILON * base.value * factor,
            method: base.method,
        });
    }
    let mut total = base;
    total.method = NormMethod::TailSeries;
    let upper = base.value + base.err;
    let mut k = 1u64;
    loop {
        match majorant_power_sum(t, k, p) {
            None => {
                return Err(Error::DivergentNorm("tail majorant series diverges".into()))
            }
            Some(rest) if rest * upper <= 0.5 * tol || t.blocks().is_some_and(|n| k >= n) => {
                let rest = rest * upper;
                total.value += 0.5 * rest;
                total.err += 0.5 * rest;
                return Ok(total);
            }
            Some(_) => {}
        }
        let block_tol = 0.25 * tol / ((k + 1) * (k + 1)) as f64;
        total = total.plus(segments_integral(&t.block(k), p, block_tol)?);
        k += 1;
        if k > MAX_BLOCKS {
            return Err(Error::ToleranceNotMet {
                tol,
                achieved: f64::INFINITY,
            });
        }
    }
}

/// `∫|f|^p` with absolute error at most about `tol`.
pub(crate) fn lp_integral(f: &PiecewiseFn, p: f64, tol: f64) -> Result<Integral> {
    let head = segments_integral(f.segments(), p, 0.5 * tol)?;
    match f.tail() {
        None => Ok(head),
        Some(t) => Ok(head.plus(tail_integral(t, p, 0.5 * tol)?)),
    }
}

fn root(int: Integral, p: f64) -> NormResult {
    let v = int.value.max(0.0);
    let value = v.powf(1.0 / p);
    let hi = (v + int.err).powf(1.0 / p);
    let lo = (v - int.err).max(0.0).powf(1.0 / p);
    NormResult {
        value,
        err_bound: (hi - value).max(value - lo) + 4.0 * f64::EPSILON * value,
        method: int.method,
    }
}

/// `‖f‖_p` with `err_bound ≤ tol`.
pub fn lp_norm(f: &PiecewiseFn, p: f64, tol: f64) -> Result<NormResult> {
    check_p(p)?;
    if f.is_zero() {
        return Ok(NormResult::exact(0.0));
    }
    let mut target = 0.5 * tol * p;
    let mut achieved = f64::INFINITY;
    for _ in 0..8 {
        let int = lp_integral(f, p, target)?;
        let r = root(int, p);
        if r.err_bound <= tol {
            return Ok(r);
        }
        achieved = r.err_bound;
        let want = 0.5 * tol * p * int.value.max(0.0).powf((p - 1.0) / p);
        target = want.min(0.1 * target).max(f64::MIN_POSITIVE);
    }
    Err(Error::ToleranceNotMet { tol, achieved })
}

/// Norm in the given space.
pub fn norm(f: &PiecewiseFn, space: Space, tol: f64) -> Result<NormResult> {
    match space {
        Space::Lp(p) => lp_norm(f, p, tol),
        Space::C0 => sup_norm(f),
    }
}

/// Norm with `err_bound` at most `rel` times the value.
pub fn norm_rel(f: &PiecewiseFn, space: Space, rel: f64) -> Result<NormResult> {
    if f.is_zero() {
        return Ok(NormResult::exact(0.0));
    }
    let rough = norm(f, space, f64::INFINITY)?;
    let mut scale = rough.value;
    for _ in 0..4 {
        if scale == 0.0 {
            return norm(f, space, DEFAULT_TOL);
        }
        let r = norm(f, space, rel * scale)?;
        if r.err_bound <= rel * r.value {
            return Ok(r);
        }
        scale = r.value.min(0.5 * scale);
    }
    norm(f, space, rel * scale)
}

/// `‖f − g‖` in the given space.
///
/// When the tails of `f` and `g` have different block structure, both are
/// truncated after enough blocks that the dropped parts stay within a
/// quarter of `tol` each, and their bounds are folded into the error.
pub fn distance(f: &PiecewiseFn, g: &PiecewiseFn, space: Space, tol: f64) -> Result<NormResult> {
    match f.sub(g) {
        Ok(d) => norm(&d, space, tol),
        Err(Error::IncompatibleTails) => {
            let (kf, rf) = truncation_for(f, space, 0.25 * tol)?;
            let (kg, rg) = truncation_for(g, space, 0.25 * tol)?;
            let d = f.materialize_tail(kf).sub(&g.materialize_tail(kg))?;
            let mut r = norm(&d, space, 0.5 * tol)?;
            r.err_bound += rf + rg;
            r.method = NormMethod::TailSeries;
            Ok(r)
        }
        Err(e) => Err(e),
    }
}

fn truncation_for(f: &PiecewiseFn, space: Space, tol: f64) -> Result<(u64, f64)> {
    let mut k = 1u64;
    loop {
        let r = tail_remainder_bound(f, k, space)?;
        if r <= tol {
            return Ok((k, r));
        }
        k += 1;
        if k > MAX_BLOCKS {
            return Err(Error::ToleranceNotMet { tol, achieved: r });
        }
    }
}

/// Upper bound on the norm of tail blocks `K, K+1, …` of `f`.
///
/// Blocks have disjoint supports, so in `L_p` the bound is
/// `(Σ_{k≥K} M_k^p)^{1/p} · ‖base‖_p` and in `C_0` it is
/// `max_{k≥K} M_k · ‖base‖_∞`.
pub fn tail_remainder_bound(f: &PiecewiseFn, k: u64, space: Space) -> Result<f64> {
    let Some(t) = f.tail() else {
        return Ok(0.0);
    };
    let base = PiecewiseFn::from_segments(t.base().to_vec(), space)?;
    let diverges = || Error::DivergentNorm("tail majorant does not decay".into());
    match space {
        Space::Lp(p) => {
            check_p(p)?;
            let b = lp_norm(&base, p, DEFAULT_TOL)?.upper();
            let s = majorant_power_sum(t, k, p).ok_or_else(diverges)?;
            Ok(s.powf(1.0 / p) * b)
        }
        Space::C0 => {
            let b = sup_norm(&base)?.upper();
            let m = majorant_max(t, k).ok_or_else(diverges)?;
            Ok(m * b)
        }
    }
}
