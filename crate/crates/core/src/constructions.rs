//! Periodic points, eigenvectors and transitivity witnesses.
//!
//! Bounded shifts admit closed tail forms: every block is the kernel element
//! scaled by a geometric factor. Unbounded shifts lead to series `Σ c_k S^k x`
//! whose blocks still follow a log-quadratic law; these are truncated after
//! the first block whose majorant falls below the tolerance.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::{ceil, Q};
use crate::norms::{distance, norm, norm_rel, NormMethod, NormResult, DEFAULT_TOL};
use crate::operators::{apply, apply_power, right_inverse_power, ShiftSpec, WeightKind};
use crate::piecewise::{GeometricTail, LawFactor, PiecewiseFn, Segment, Space};
use crate::poly::Poly;

/// Default relative residual tolerance.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;

const MAX_TERMS: u64 = 400;
const MAX_WITNESS_STEPS: u32 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    PaperClosedForm,
    DerivedConstruction,
    TheoremAsserted,
}

/// How a series object was truncated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    ClosedForm,
    /// Index of the last kept term.
    Terms(u64),
}

impl Truncation {
    pub fn terms(&self) -> Option<u64> {
        match self {
            Truncation::ClosedForm => None,
            Truncation::Terms(k) => Some(*k),
        }
    }
}

impl Serialize for Truncation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Truncation::ClosedForm => s.serialize_str("closed-form"),
            Truncation::Terms(k) => s.serialize_u64(*k),
        }
    }
}

/// A point with `T^N x = x` (up to the truncation residual).
#[derive(Clone, Debug, Serialize)]
pub struct PeriodicPoint {
    #[serde(rename = "fn")]
    pub function: PiecewiseFn,
    pub period: u32,
    pub norm: NormResult,
    /// `‖T^N x − x‖ / ‖x‖`.
    pub residual: NormResult,
    pub truncation: Truncation,
    pub provenance: Provenance,
}

/// An eigenvector with `T x = λ x` (up to the truncation residual).
#[derive(Clone, Debug, Serialize)]
pub struct EigenPair {
    pub lambda: Complex64,
    #[serde(rename = "fn")]
    pub function: PiecewiseFn,
    pub norm: NormResult,
    /// `‖T x − λ x‖ / ‖x‖`.
    pub residual: NormResult,
    pub truncation: Truncation,
    pub provenance: Provenance,
}

/// `z` close to `x` with `T^n z = y`.
#[derive(Clone, Debug, Serialize)]
pub struct TransitivityWitness {
    pub n: u32,
    pub z: PiecewiseFn,
    /// `‖z − x‖`.
    pub distance: NormResult,
    /// Whether `T^n z − y` is structurally zero.
    pub exact_image: bool,
    pub provenance: Provenance,
}

/// Where `|λ|` sits relative to `|w|`, with relative tolerance `1e-12`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiskPosition {
    Inside,
    Boundary,
    Outside,
}

pub fn disk_position(lambda: Complex64, w: Complex64) -> DiskPosition {
    let (l2, w2) = (lambda.norm_sqr(), w.norm_sqr());
    if (l2 - w2).abs() <= 1e-12 * w2 {
        DiskPosition::Boundary
    } else if l2 < w2 {
        DiskPosition::Inside
    } else {
        DiskPosition::Outside
    }
}

fn nq(n: u32) -> Q {
    Q::from_integer(n as i64)
}

/// The default element of `ker T^N`: the indicator of `[0, N a)` in `L_p`,
/// the hat of height 1 on `[0, N a]` in `C_0`.
pub fn default_kernel(spec: &ShiftSpec, n: u32) -> Result<PiecewiseFn> {
    if n == 0 {
        return Err(Error::InvalidArgument("kernel index must be at least 1".into()));
    }
    let len = spec.a() * nq(n);
    match spec.space() {
        Space::Lp(_) => PiecewiseFn::indicator(Q::zero(), len, spec.space()),
        Space::C0 => {
            let (zero, one) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
            let mid = len / 2;
            PiecewiseFn::from_segments(
                vec![
                    Segment::linear(Q::zero(), mid, zero, one),
                    Segment::linear(mid, len, one, zero),
                ],
                Space::C0,
            )
        }
    }
}

/// Smallest `M` with `f` vanishing beyond `M a`.
pub fn support_steps(spec: &ShiftSpec, f: &PiecewiseFn) -> Result<u32> {
    let end = f.support_end().ok_or(Error::NotEventuallyZero)?;
    Ok(ceil(end / spec.a()).max(0) as u32)
}

fn check_kernel(spec: &ShiftSpec, x: &PiecewiseFn, n: u32) -> Result<PiecewiseFn> {
    if n == 0 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    if x.is_zero() || !x.is_eventually_zero() || support_steps(spec, x)? > n {
        return Err(Error::NotInKernel(n));
    }
    let x = x.clone().with_space(spec.space());
    if spec.space().is_c0() {
        x.check_continuity()?;
    }
    Ok(x)
}

fn relative(residual: NormResult, base: NormResult) -> NormResult {
    if residual.value == 0.0 && residual.err_bound == 0.0 {
        return NormResult { method: residual.method, ..NormResult::exact(0.0) };
    }
    let value = residual.value / base.value;
    NormResult {
        value,
        err_bound: (residual.err_bound + value * base.err_bound) / base.lower().max(f64::MIN_POSITIVE),
        method: residual.method.max(base.method),
    }
}

fn require_kind(spec: &ShiftSpec, kind: WeightKind) -> Result<()> {
    if spec.kind() == kind {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("construction needs a {kind:?} shift")))
    }
}

fn block_tail(spec: &ShiftSpec, base: &PiecewiseFn, block: Q, law: Vec<LawFactor>) -> Result<PiecewiseFn> {
    let tail = GeometricTail::new(Q::zero(), block, base.segments().to_vec(), law, None)?;
    PiecewiseFn::new(vec![], Some(tail), spec.space())
}

/// Relative residual `‖g‖ / ‖f‖` with `g` the defect of `f`.
fn defect(spec: &ShiftSpec, f: &PiecewiseFn, g: &PiecewiseFn, tol: f64) -> Result<(NormResult, NormResult)> {
    let fnorm = norm_rel(f, spec.space(), 1e-12)?;
    let gnorm = if g.is_zero() {
        NormResult::exact(0.0)
    } else {
        norm(g, spec.space(), 1e-2 * tol * fnorm.value)?
    };
    Ok((fnorm, relative(gnorm, fnorm)))
}

/// The `N`-periodic point `Σ_k w^{−kN} x(t − kNa)` of a bounded shift, in
/// closed tail form.
pub fn periodic_point_bounded(spec: &ShiftSpec, x: &PiecewiseFn, n: u32) -> Result<PeriodicPoint> {
    require_kind(spec, WeightKind::Bounded)?;
    let x = check_kernel(spec, x, n)?;
    let law = vec![LawFactor::new(spec.log_w(), Q::zero(), -nq(n), Q::zero())];
    let f = block_tail(spec, &x, spec.a() * nq(n), law)?;
    if spec.space().is_c0() {
        f.check_continuity()?;
    }
    let g = apply_power(spec, &f, n)?.sub(&f)?;
    let (norm, residual) = defect(spec, &f, &g, DEFAULT_RESIDUAL_TOL)?;
    Ok(PeriodicPoint {
        function: f,
        period: n,
        norm,
        residual,
        truncation: Truncation::ClosedForm,
        provenance: if spec.space().is_c0() {
            Provenance::DerivedConstruction
        } else {
            Provenance::PaperClosedForm
        },
    })
}

/// Block law of `Σ_k c^k S^{kN} x` for an unbounded shift: block `k` is
/// `x(t − kNa)` weighted by `c^k w^{−kNt + kN(kN+1)a/2}`.
fn series_law(spec: &ShiftSpec, n: u32, ratio: Option<Complex64>) -> Vec<LawFactor> {
    let (nn, a) = (nq(n), spec.a());
    let mut law = vec![LawFactor::new(spec.log_w(), -nn * nn * a / 2, nn * a / 2, -nn)];
    if let Some(c) = ratio {
        law.push(LawFactor::new(c.ln(), Q::zero(), Q::from_integer(1), Q::zero()));
    }
    law
}

/// Series in tail form, or `None` when the `C_0` ramps of `S^{kN}` would
/// straddle blocks.
fn series_tail(spec: &ShiftSpec, x: &PiecewiseFn, n: u32, ratio: Option<Complex64>) -> Result<Option<PiecewiseFn>> {
    let x0 = x.evaluate(0.0);
    let base = if spec.space().is_c0() && x0 != Complex64::new(0.0, 0.0) {
        if n != 1 {
            return Ok(None);
        }
        let c = ratio.unwrap_or(Complex64::new(1.0, 0.0));
        let ramp = Segment::new(
            Q::zero(),
            Some(spec.a()),
            vec![crate::piecewise::Term::new(
                c * x0 / crate::grid::to_f64(spec.a()),
                crate::piecewise::Exponent::one(),
                Poly::tau(),
            )],
        );
        x.add(&PiecewiseFn::from_segments(vec![ramp], spec.space())?)?
    } else {
        x.clone()
    };
    let law = series_law(spec, n, ratio);
    Ok(Some(block_tail(spec, &base, spec.a() * nq(n), law)?))
}

/// Index of the first term whose majorant, times `extra`, is at most `tol`.
fn first_small_block(tail: &GeometricTail, extra: f64, tol: f64) -> Result<u64> {
    (0..MAX_TERMS)
        .find(|&k| extra * tail.log_majorant(k).exp() <= tol)
        .ok_or(Error::ToleranceNotMet { tol, achieved: f64::INFINITY })
}

/// Partial sum `Σ_{k ≤ K} c^k S^{kN} x`, either from the tail form or by
/// direct summation.
fn partial_sum(spec: &ShiftSpec, x: &PiecewiseFn, n: u32, ratio: Option<Complex64>, tail: Option<&PiecewiseFn>, k: u64) -> Result<PiecewiseFn> {
    if let Some(t) = tail {
        return Ok(t.materialize_tail(k + 1));
    }
    let c = ratio.unwrap_or(Complex64::new(1.0, 0.0));
    let mut sum = x.clone();
    let mut coeff = Complex64::new(1.0, 0.0);
    for j in 1..=k {
        coeff *= c;
        let term = right_inverse_power(spec, x, (j as u32) * n)?;
        sum = sum.add(&term.scale(coeff))?;
    }
    Ok(sum)
}

/// Shared truncation loop for the unbounded series. `defect_of` maps a
/// partial sum to its defect; `extra` scales the block majorant.
fn truncated_series(
    spec: &ShiftSpec,
    x: &PiecewiseFn,
    n: u32,
    ratio: Option<Complex64>,
    tol: f64,
    defect_of: impl Fn(&PiecewiseFn) -> Result<PiecewiseFn>,
) -> Result<(PiecewiseFn, NormResult, NormResult, u64)> {
    let tail = series_tail(spec, x, n, ratio)?;
    let extra = ratio.map_or(1.0, |c| c.norm());
    let mut k = match tail.as_ref().and_then(|f| f.tail()) {
        Some(t) => first_small_block(t, extra, tol)?,
        None => 0,
    };
    let mut achieved = f64::INFINITY;
    while k < MAX_TERMS {
        let f = partial_sum(spec, x, n, ratio, tail.as_ref(), k)?;
        let g = defect_of(&f)?;
        let (fnorm, residual) = defect(spec, &f, &g, tol)?;
        if residual.value <= tol {
            return Ok((f, fnorm, residual, k));
        }
        achieved = residual.value;
        k += 1;
    }
    Err(Error::ToleranceNotMet { tol, achieved })
}

/// The `N`-periodic point `Σ_k S^{kN} x` of an unbounded shift, truncated
/// once the relative residual is at most `tol`.
pub fn periodic_point_unbounded(spec: &ShiftSpec, x: &PiecewiseFn, n: u32, tol: f64) -> Result<PeriodicPoint> {
    require_kind(spec, WeightKind::Unbounded)?;
    let x = check_kernel(spec, x, n)?;
    let (f, norm, residual, k) = truncated_series(spec, &x, n, None, tol, |f| apply_power(spec, f, n)?.sub(f))?;
    if residual.value > 2.0 * tol {
        return Err(Error::ToleranceNotMet { tol, achieved: residual.value });
    }
    Ok(PeriodicPoint {
        function: f,
        period: n,
        norm,
        residual,
        truncation: Truncation::Terms(k),
        provenance: if spec.space().is_c0() {
            Provenance::DerivedConstruction
        } else {
            Provenance::PaperClosedForm
        },
    })
}

/// Periodic point for either weight kind with the default tolerance.
pub fn periodic_point(spec: &ShiftSpec, x: &PiecewiseFn, n: u32) -> Result<PeriodicPoint> {
    match spec.kind() {
        WeightKind::Bounded => periodic_point_bounded(spec, x, n),
        WeightKind::Unbounded => periodic_point_unbounded(spec, x, n, DEFAULT_RESIDUAL_TOL),
    }
}

fn check_disk(spec: &ShiftSpec, lambda: Complex64) -> Result<()> {
    if disk_position(lambda, spec.w()) == DiskPosition::Inside {
        Ok(())
    } else {
        Err(Error::LambdaOutOfDisk {
            lambda_abs: lambda.norm(),
            w_abs: spec.w().norm(),
        })
    }
}

fn eigen_defect(spec: &ShiftSpec, f: &PiecewiseFn, lambda: Complex64) -> Result<PiecewiseFn> {
    let tf = apply(spec, f)?;
    if lambda == Complex64::new(0.0, 0.0) {
        return Ok(tf);
    }
    tf.sub(&f.scale_log(lambda.ln(), Q::from_integer(1)))
}

fn bounded_eigen(spec: &ShiftSpec, lambda: Complex64, x: PiecewiseFn) -> Result<EigenPair> {
    let f = if lambda == Complex64::new(0.0, 0.0) {
        x
    } else {
        let law = vec![
            LawFactor::new(lambda.ln(), Q::zero(), Q::from_integer(1), Q::zero()),
            LawFactor::new(spec.log_w(), Q::zero(), Q::from_integer(-1), Q::zero()),
        ];
        block_tail(spec, &x, spec.a(), law)?
    };
    if spec.space().is_c0() {
        f.check_continuity()?;
    }
    let g = eigen_defect(spec, &f, lambda)?;
    let (norm, residual) = defect(spec, &f, &g, DEFAULT_RESIDUAL_TOL)?;
    Ok(EigenPair {
        lambda,
        function: f,
        norm,
        residual,
        truncation: Truncation::ClosedForm,
        provenance: Provenance::PaperClosedForm,
    })
}

/// Eigenvector `Σ_k (λ/w)^k x(t − ka)` of a bounded shift on `L_p`.
pub fn eigenvector_bounded_lp(spec: &ShiftSpec, lambda: Complex64, x: &PiecewiseFn) -> Result<EigenPair> {
    require_kind(spec, WeightKind::Bounded)?;
    check_disk(spec, lambda)?;
    let x = check_kernel(spec, x, 1)?;
    bounded_eigen(spec, lambda, x)
}

/// Eigenvector of a bounded shift on `C_0` built from a profile on `[0, a]`
/// with `x(a) = (λ/w) x(0)`. Without a profile, `e^{ct}` with
/// `c = ln(λ/w)/a` is used, giving the eigenvector `(λ/w)^{t/a}`.
pub fn eigenvector_bounded_c0(spec: &ShiftSpec, lambda: Complex64, profile: Option<&PiecewiseFn>) -> Result<EigenPair> {
    require_kind(spec, WeightKind::Bounded)?;
    check_disk(spec, lambda)?;
    let a = spec.a();
    let x = match profile {
        Some(p) => p.restrict_to(a).with_space(Space::C0),
        None => {
            if lambda == Complex64::new(0.0, 0.0) {
                return Err(Error::InvalidArgument(
                    "the exponential profile needs a nonzero eigenvalue".into(),
                ));
            }
            let c = (lambda / spec.w()).ln() / crate::grid::to_f64(a);
            PiecewiseFn::from_segments(vec![Segment::simple(Q::zero(), a, Complex64::new(1.0, 0.0), c, Poly::one())], Space::C0)?
        }
    };
    if x.is_zero() {
        return Err(Error::InvalidArgument("profile vanishes on [0, a)".into()));
    }
    let end = x.left_limit(crate::grid::to_f64(a));
    let want = lambda / spec.w() * x.evaluate(0.0);
    let jump = (end - want).norm();
    if jump > 1e-10 * (1.0 + end.norm().max(want.norm())) {
        return Err(Error::ProfileMismatch(jump));
    }
    bounded_eigen(&spec.with_space(Space::C0)?, lambda, x)
}

/// Eigenvector `Σ_k λ^k S^k x` of an unbounded shift, for any `λ`.
pub fn eigenvector_unbounded(spec: &ShiftSpec, lambda: Complex64, x: &PiecewiseFn, tol: f64) -> Result<EigenPair> {
    require_kind(spec, WeightKind::Unbounded)?;
    let x = check_kernel(spec, x, 1)?;
    if lambda == Complex64::new(0.0, 0.0) {
        let (norm, residual) = defect(spec, &x, &apply(spec, &x)?, tol)?;
        return Ok(EigenPair {
            lambda,
            function: x,
            norm,
            residual,
            truncation: Truncation::Terms(0),
            provenance: Provenance::PaperClosedForm,
        });
    }
    let (f, norm, residual, k) =
        truncated_series(spec, &x, 1, Some(lambda), tol, |f| eigen_defect(spec, f, lambda))?;
    if residual.value > 2.0 * tol {
        return Err(Error::ToleranceNotMet { tol, achieved: residual.value });
    }
    Ok(EigenPair {
        lambda,
        function: f,
        norm,
        residual,
        truncation: Truncation::Terms(k),
        provenance: if spec.space().is_c0() {
            Provenance::DerivedConstruction
        } else {
            Provenance::PaperClosedForm
        },
    })
}

/// Eigenvector for `λ` with the default kernel element or profile.
pub fn default_eigenvector(spec: &ShiftSpec, lambda: Complex64) -> Result<EigenPair> {
    match (spec.kind(), spec.space()) {
        (WeightKind::Unbounded, _) => {
            eigenvector_unbounded(spec, lambda, &default_kernel(spec, 1)?, DEFAULT_RESIDUAL_TOL)
        }
        (WeightKind::Bounded, Space::Lp(_)) => {
            eigenvector_bounded_lp(spec, lambda, &default_kernel(spec, 1)?)
        }
        (WeightKind::Bounded, Space::C0) if lambda == Complex64::new(0.0, 0.0) => {
            eigenvector_bounded_c0(spec, lambda, Some(&default_kernel(spec, 1)?))
        }
        (WeightKind::Bounded, Space::C0) => eigenvector_bounded_c0(spec, lambda, None),
    }
}

/// Finds `n` and `z = x + S^n y` with `‖z − x‖ < eps` and `T^n z = y`, `n`
/// minimal among `n ≥ max(1, M)` where `x` and `y` vanish beyond `M a`.
pub fn transitivity_witness(spec: &ShiftSpec, x: &PiecewiseFn, y: &PiecewiseFn, eps: f64) -> Result<TransitivityWitness> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let (x, y) = (x.clone().with_space(spec.space()), y.clone().with_space(spec.space()));
    if spec.space().is_c0() {
        x.check_continuity()?;
        y.check_continuity()?;
    }
    let start = support_steps(spec, &x)?.max(support_steps(spec, &y)?).max(1);
    let tol = (1e-3 * eps).min(DEFAULT_TOL);
    let mut n = start;
    let sy = loop {
        let sy = right_inverse_power(spec, &y, n)?;
        let d = norm(&sy, spec.space(), tol)?;
        if d.upper() < eps {
            break sy;
        }
        n += 1;
        if n > start + MAX_WITNESS_STEPS {
            return Err(Error::ToleranceNotMet { tol: eps, achieved: d.value });
        }
    };
    let z = x.add(&sy)?;
    let distance = distance(&z, &x, spec.space(), tol)?;
    let exact_image = apply_power(spec, &z, n)?.sub(&y)?.is_zero();
    Ok(TransitivityWitness {
        n,
        z,
        distance,
        exact_image,
        provenance: if spec.is_bounded() && !spec.space().is_c0() {
            Provenance::PaperClosedForm
        } else {
            Provenance::DerivedConstruction
        },
    })
}

/// `‖x_N − x‖` for the `N`-periodic point induced by `x`.
pub fn periodic_density_gap(spec: &ShiftSpec, x: &PiecewiseFn, n: u32) -> Result<NormResult> {
    let min = support_steps(spec, x)?;
    if n < min.max(1) {
        return Err(Error::PeriodTooSmall { period: n, min: min.max(1) });
    }
    if x.is_zero() {
        return Ok(NormResult::exact(0.0));
    }
    let p = periodic_point(spec, x, n)?;
    let mut d = distance(&p.function, &x.clone().with_space(spec.space()), spec.space(), DEFAULT_TOL)?;
    if let Truncation::Terms(_) = p.truncation {
        d.err_bound += p.residual.value * p.norm.value;
        d.method = d.method.max(NormMethod::TailSeries);
    }
    Ok(d)
}
