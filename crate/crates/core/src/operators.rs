//! The weighted backward shifts
//! `x(t) ↦ w x(t + a)` (bounded weight) and `x(t) ↦ w^t x(t + a)`
//! (unbounded weight) on `L_p` and `C_0`, with their powers, right inverses
//! and domain tests.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::{ceil, to_f64, Q};
use crate::norms::majorant_max;
use crate::piecewise::{Exponent, LogFactor, PiecewiseFn, Segment, Space, Term};
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    /// `w x(t + a)` with a complex scalar `|w| > 1`.
    Bounded,
    /// `w^t x(t + a)` with a real `w > 1`.
    Unbounded,
}

/// Which of the four shifts: space, weight kind, weight `w` and step `a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftSpec {
    space: Space,
    kind: WeightKind,
    w: Complex64,
    a: Q,
}

impl ShiftSpec {
    pub fn new(space: Space, kind: WeightKind, w: Complex64, a: Q) -> Result<Self> {
        space.validate()?;
        if a <= Q::zero() {
            return Err(Error::InvalidSpec(format!("step a = {a} must be positive")));
        }
        if !w.is_finite() {
            return Err(Error::InvalidSpec("w must be finite".into()));
        }
        match kind {
            WeightKind::Bounded if w.norm() <= 1.0 => Err(Error::InvalidSpec(format!(
                "|w| = {} must exceed 1",
                w.norm()
            ))),
            WeightKind::Unbounded if w.im != 0.0 || w.re <= 1.0 => Err(Error::InvalidSpec(
                format!("w = {w} must be real and greater than 1"),
            )),
            _ => Ok(ShiftSpec { space, kind, w, a }),
        }
    }

    pub fn bounded(space: Space, w: Complex64, a: Q) -> Result<Self> {
        Self::new(space, WeightKind::Bounded, w, a)
    }

    pub fn unbounded(space: Space, w: f64, a: Q) -> Result<Self> {
        Self::new(space, WeightKind::Unbounded, Complex64::new(w, 0.0), a)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn w(&self) -> Complex64 {
        self.w
    }

    pub fn a(&self) -> Q {
        self.a
    }

    pub fn log_w(&self) -> Complex64 {
        self.w.ln()
    }

    pub fn is_bounded(&self) -> bool {
        self.kind == WeightKind::Bounded
    }

    pub fn with_space(&self, space: Space) -> Result<Self> {
        Self::new(space, self.kind, self.w, self.a)
    }
}

#[derive(Serialize, Deserialize)]
struct SpecDoc {
    space: Space,
    kind: WeightKind,
    w: [f64; 2],
    #[serde(with = "crate::grid::serde_q")]
    a: Q,
}

impl Serialize for ShiftSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecDoc {
            space: self.space,
            kind: self.kind,
            w: [self.w.re, self.w.im],
            a: self.a,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ShiftSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = SpecDoc::deserialize(d)?;
        ShiftSpec::new(doc.space, doc.kind, Complex64::new(doc.w[0], doc.w[1]), doc.a)
            .map_err(serde::de::Error::custom)
    }
}

/// Outcome of a symbolic domain test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainVerdict {
    pub in_domain: bool,
    pub witness: String,
}

fn nq(n: u32) -> Q {
    Q::from_integer(n as i64)
}

/// `T^n f` by the closed formula, without a domain check.
fn power_image(spec: &ShiftSpec, f: &PiecewiseFn, n: u32) -> PiecewiseFn {
    if n == 0 {
        return f.clone();
    }
    let shift = spec.a * nq(n);
    let g = f.shift_left(shift);
    match spec.kind {
        WeightKind::Bounded => g.scale_log(spec.log_w(), nq(n)),
        WeightKind::Unbounded => {
            let offset = nq(n - 1) * shift / 2;
            g.exp_affine(spec.log_w(), nq(n), offset)
        }
    }
}

/// Symbolic test of `f ∈ D(T^n)`: every unbounded piece of the image must
/// decay and every tail must have summable block majorants.
pub fn in_domain(spec: &ShiftSpec, f: &PiecewiseFn, n: u32) -> DomainVerdict {
    if spec.is_bounded() {
        return DomainVerdict {
            in_domain: true,
            witness: "bounded operator: everywhere defined".into(),
        };
    }
    if f.is_eventually_zero() {
        return DomainVerdict {
            in_domain: true,
            witness: "eventually zero".into(),
        };
    }
    let g = power_image(spec, f, n);
    for s in g.segments().iter().filter(|s| s.end.is_none()) {
        for t in &s.terms {
            let (a, b, _) = t.exponent.coefficients();
            if !(a.re < 0.0 || (a.re == 0.0 && b.re < 0.0)) {
                return DomainVerdict {
                    in_domain: false,
                    witness: format!(
                        "image on [{}, inf) has log-modulus {}·τ² + {}·τ, which does not decay",
                        s.start,
                        a.re,
                        b.re
                    ),
                };
            }
        }
    }
    if let Some(t) = g.tail() {
        if majorant_max(t, 0).is_none() {
            let (rho, sigma, delta) = t.growth();
            return DomainVerdict {
                in_domain: false,
                witness: format!(
                    "image tail block growth ({rho}, {sigma}, {delta}) is not summable"
                ),
            };
        }
    }
    DomainVerdict {
        in_domain: true,
        witness: "image decays at infinity".into(),
    }
}

fn require_domain(spec: &ShiftSpec, f: &PiecewiseFn, n: u32) -> Result<()> {
    let v = in_domain(spec, f, n);
    if v.in_domain {
        Ok(())
    } else {
        Err(Error::NotInDomain(v.witness))
    }
}

/// `T f`.
pub fn apply(spec: &ShiftSpec, f: &PiecewiseFn) -> Result<PiecewiseFn> {
    apply_power(spec, f, 1)
}

/// `T^n f` by the closed power formula.
pub fn apply_power(spec: &ShiftSpec, f: &PiecewiseFn, n: u32) -> Result<PiecewiseFn> {
    require_domain(spec, f, n)?;
    Ok(power_image(spec, f, n))
}

/// The linear piece on `[(n−1)a, na)` that the `C_0` right inverse inserts
/// so that `S^n f` starts at 0 and joins `f(0)` continuously.
fn c0_ramp(spec: &ShiftSpec, f0: Complex64, n: u32) -> Segment {
    let a = spec.a;
    let start = a * nq(n - 1);
    let factor = match spec.kind {
        WeightKind::Bounded => LogFactor::constant(spec.log_w(), -nq(n)),
        WeightKind::Unbounded => {
            let m = nq(n - 1);
            LogFactor::new(spec.log_w(), Q::zero(), -m, -m * start + m * nq(n) * a / 2)
        }
    };
    Segment::new(
        start,
        Some(start + a),
        vec![Term::new(f0 / to_f64(a), Exponent::from_factor(factor), Poly::tau())],
    )
}

/// `S f`, the right inverse on eventually zero functions.
pub fn right_inverse(spec: &ShiftSpec, f: &PiecewiseFn) -> Result<PiecewiseFn> {
    right_inverse_power(spec, f, 1)
}

/// `S^n f` by the closed formula.
pub fn right_inverse_power(spec: &ShiftSpec, f: &PiecewiseFn, n: u32) -> Result<PiecewiseFn> {
    if !f.is_eventually_zero() {
        return Err(Error::NotEventuallyZero);
    }
    if n == 0 {
        return Ok(f.clone());
    }
    let shift = spec.a * nq(n);
    let g = f.shift_right(shift);
    let g = match spec.kind {
        WeightKind::Bounded => g.scale_log(spec.log_w(), -nq(n)),
        WeightKind::Unbounded => {
            let offset = nq(n + 1) * shift / 2;
            g.exp_affine(spec.log_w(), -nq(n), offset)
        }
    };
    if !spec.space.is_c0() {
        return Ok(g);
    }
    let f0 = f.evaluate(0.0);
    if f0 == Complex64::new(0.0, 0.0) {
        return Ok(g);
    }
    let ramp = PiecewiseFn::from_segments(vec![c0_ramp(spec, f0, n)], f.space())?;
    g.add(&ramp)
}

/// Factor `c_n` with `‖S^n x‖ ≤ c_n ‖x‖` whenever no ramp is inserted:
/// `|w|^{−n}` for bounded weights and `w^{−n(n−1)a/2}` for unbounded ones.
pub fn right_inverse_decay(spec: &ShiftSpec, n: u32) -> f64 {
    match spec.kind {
        WeightKind::Bounded => spec.w.norm().powi(-(n as i32)),
        WeightKind::Unbounded => {
            let e = nq(n) * nq(n.saturating_sub(1)) * spec.a / 2;
            spec.w.re.powf(-to_f64(e))
        }
    }
}

/// Upper bound for `‖S^n x‖` from `‖x‖` and `|x(0)|`.
///
/// In `C_0` with an unbounded weight the ramp on `[(n−1)a, na)` reaches
/// `|x(0)| R_n` with `R_n = w^{−(n−1)(n−2)a/2} max_{0≤τ≤a} (τ/a) w^{−(n−1)τ}`,
/// which can exceed `w^{−n(n−1)a/2} ‖x‖`.
pub fn right_inverse_power_bound(spec: &ShiftSpec, n: u32, norm_x: f64, x0_abs: f64) -> f64 {
    let main = right_inverse_decay(spec, n) * norm_x;
    if n == 0 || !spec.space.is_c0() || spec.is_bounded() {
        return main;
    }
    let (w, a) = (spec.w.re, to_f64(spec.a));
    let m = (n - 1) as f64;
    let peak = if m == 0.0 {
        1.0
    } else {
        let tau = (1.0 / (m * w.ln())).min(a);
        tau / a * w.powf(-m * tau)
    };
    let ramp = x0_abs * w.powf(-m * (m - 1.0) * a / 2.0) * peak;
    main.max(ramp)
}

/// `profile` restricted to `[0, N a)`, an element of `ker T^N`.
pub fn kernel_element(spec: &ShiftSpec, n: u32, profile: &PiecewiseFn) -> Result<PiecewiseFn> {
    if n == 0 {
        return Err(Error::InvalidArgument("kernel index must be at least 1".into()));
    }
    let f = profile.restrict_to(spec.a * nq(n)).with_space(spec.space);
    if spec.space.is_c0() {
        f.check_continuity()?;
    }
    Ok(f)
}

/// A unit-norm function `e_m` together with the analytic lower bound
/// `w^{n(m·u − na) + (n−1)na/2}` for `‖T^n e_m‖`, where `u = 1` in `L_p`
/// (the box `[m, m+1]`) and `u = a` in `C_0` (plateau up to `ma`, then
/// `w^{−(t−ma)²}`).
pub fn unboundedness_witness(spec: &ShiftSpec, n: u32, m: i64) -> Result<(PiecewiseFn, f64)> {
    if spec.is_bounded() {
        return Err(Error::Unsupported(
            "bounded shifts have no unboundedness witness".into(),
        ));
    }
    let a = spec.a;
    let na = a * nq(n);
    let (f, lead) = match spec.space {
        Space::Lp(_) => {
            let min = ceil(na);
            if m < min {
                return Err(Error::IndexTooSmall { m, min });
            }
            let mq = Q::from_integer(m);
            let f = PiecewiseFn::indicator(mq, mq + 1, spec.space)?;
            (f, mq - na)
        }
        Space::C0 => {
            let min = n as i64;
            if m < min {
                return Err(Error::IndexTooSmall { m, min });
            }
            let ma = a * Q::from_integer(m);
            let bump = Segment::new(
                ma,
                None,
                vec![Term::new(
                    Complex64::new(1.0, 0.0),
                    Exponent::from_factor(LogFactor::new(
                        spec.log_w(),
                        -Q::from_integer(1),
                        Q::zero(),
                        Q::zero(),
                    )),
                    Poly::one(),
                )],
            );
            let plateau = Segment::constant(Q::zero(), ma, Complex64::new(1.0, 0.0));
            let f = PiecewiseFn::from_segments(vec![plateau, bump], spec.space)?;
            (f, ma - na)
        }
    };
    let exponent = nq(n) * lead + nq(n - 1) * na / 2;
    Ok((f, spec.w.re.powf(to_f64(exponent))))
}
