//! Verification suites producing one report per check.

use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::{
    default_eigenvector, default_kernel, periodic_density_gap, periodic_point, periodic_point_bounded,
    transitivity_witness, Provenance,
};
use crate::error::{Error, Result};
use crate::grid::{ceil, to_f64, Q};
use crate::norms::reference::{reference_lp_norm, reference_sup_norm};
use crate::norms::{distance, norm_rel, tail_remainder_bound, DEFAULT_TOL};
use crate::operators::{
    apply, apply_power, in_domain, right_inverse_decay, right_inverse_power, right_inverse_power_bound,
    unboundedness_witness, ShiftSpec, WeightKind,
};
use crate::piecewise::{PiecewiseFn, Segment, Space, Term};
use crate::piecewise::Exponent;
use crate::poly::Poly;
use crate::sample::random_function;
use crate::spectrum::gelfand_bound_check;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
}

/// One check: `lhs relation rhs` up to `tol`.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub check: String,
    pub anchor: &'static str,
    pub spec: ShiftSpec,
    pub inputs: Value,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub tol: f64,
    pub pass: bool,
    pub provenance: Provenance,
}

impl Report {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        check: impl Into<String>,
        anchor: &'static str,
        spec: &ShiftSpec,
        inputs: Value,
        lhs: f64,
        relation: Relation,
        rhs: f64,
        tol: f64,
        provenance: Provenance,
    ) -> Self {
        let pass = match relation {
            Relation::Eq => (lhs - rhs).abs() <= tol,
            Relation::Le => lhs <= rhs + tol,
            Relation::Lt => lhs < rhs,
            Relation::Ge => lhs >= rhs - tol,
        };
        Report {
            check: check.into(),
            anchor,
            spec: *spec,
            inputs,
            lhs,
            relation,
            rhs,
            tol,
            pass,
            provenance,
        }
    }

    fn failed(check: impl Into<String>, anchor: &'static str, spec: &ShiftSpec, err: &Error) -> Self {
        Report {
            check: check.into(),
            anchor,
            spec: *spec,
            inputs: json!({ "error": err.to_string() }),
            lhs: f64::NAN,
            relation: Relation::Eq,
            rhs: f64::NAN,
            tol: 0.0,
            pass: false,
            provenance: Provenance::DerivedConstruction,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Norms,
    Periodic,
    Eigen,
    Transitivity,
    Unbounded,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(Suite::All),
            "norms" => Ok(Suite::Norms),
            "periodic" => Ok(Suite::Periodic),
            "eigen" => Ok(Suite::Eigen),
            "transitivity" => Ok(Suite::Transitivity),
            "unbounded" => Ok(Suite::Unbounded),
            _ => Err(Error::InvalidArgument(format!("unknown suite '{s}'"))),
        }
    }
}

const NORM_TOL: f64 = 1e-8;

/// Collects reports; a check that errors becomes a failing report.
struct Sink<'a> {
    spec: &'a ShiftSpec,
    out: Vec<Report>,
}

impl Sink<'_> {
    fn push(&mut self, check: String, anchor: &'static str, r: Result<Report>) {
        let spec = self.spec;
        self.out.push(r.unwrap_or_else(|e| Report::failed(check, anchor, spec, &e)));
    }
}

fn space_norm(f: &PiecewiseFn, spec: &ShiftSpec) -> Result<f64> {
    Ok(norm_rel(f, spec.space(), DEFAULT_TOL)?.value)
}

fn reference_norm(f: &PiecewiseFn, space: Space) -> f64 {
    match space {
        Space::Lp(p) => reference_lp_norm(f, p, 64),
        Space::C0 => reference_sup_norm(f, 400),
    }
}

fn p_of(space: Space) -> Option<f64> {
    match space {
        Space::Lp(p) => Some(p),
        Space::C0 => None,
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn random_unit(spec: &ShiftSpec, rng: &mut ChaCha8Rng, units: u32) -> PiecewiseFn {
    random_function(rng, spec.space(), spec.a(), units)
}

/// The bounded shift with the same space, weight and step.
fn bounded_twin(spec: &ShiftSpec) -> Result<ShiftSpec> {
    ShiftSpec::bounded(spec.space(), spec.w(), spec.a())
}

/// The unbounded shift with weight `|w|`.
fn unbounded_twin(spec: &ShiftSpec) -> Result<ShiftSpec> {
    ShiftSpec::unbounded(spec.space(), spec.w().norm(), spec.a())
}

fn norms_suite(spec: &ShiftSpec, seed: u64, sink: &mut Sink) {
    let anchor = "norms";
    let unit = default_kernel(spec, 1);
    sink.push("norm-default-kernel".into(), anchor, (|| {
        let x = unit.clone()?;
        let expected = match spec.space() {
            Space::Lp(p) => to_f64(spec.a()).powf(1.0 / p),
            Space::C0 => 1.0,
        };
        Ok(Report::new("norm-default-kernel", anchor, spec, json!({}), space_norm(&x, spec)?, Relation::Eq, expected, 1e-12, Provenance::PaperClosedForm))
    })());
    let mut rng = rng_for(seed, 1);
    let fs: Vec<PiecewiseFn> = (0..6).map(|_| random_unit(spec, &mut rng, 3)).collect();
    for (i, f) in fs.iter().enumerate() {
        let check = format!("norm-vs-reference-{i}");
        sink.push(check.clone(), anchor, (|| {
            let lhs = space_norm(f, spec)?;
            Ok(Report::new(check.clone(), anchor, spec, json!({ "sample": i }), lhs, Relation::Eq, reference_norm(f, spec.space()), NORM_TOL, Provenance::DerivedConstruction))
        })());
    }
    for i in 0..2 {
        let check = format!("norm-homogeneity-{i}");
        let c = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        sink.push(check.clone(), anchor, (|| {
            let lhs = space_norm(&fs[i].scale(c), spec)?;
            let rhs = c.norm() * space_norm(&fs[i], spec)?;
            Ok(Report::new(check.clone(), anchor, spec, json!({ "c": [c.re, c.im] }), lhs, Relation::Eq, rhs, NORM_TOL * (1.0 + rhs), Provenance::DerivedConstruction))
        })());
    }
    for i in 0..2 {
        let check = format!("norm-triangle-{i}");
        let (f, g, h) = (&fs[3 * i], &fs[3 * i + 1], &fs[3 * i + 2]);
        sink.push(check.clone(), anchor, (|| {
            let d = |u: &PiecewiseFn, v: &PiecewiseFn| distance(u, v, spec.space(), DEFAULT_TOL).map(|r| r.value);
            let lhs = d(f, h)?;
            let rhs = d(f, g)? + d(g, h)?;
            Ok(Report::new(check.clone(), anchor, spec, json!({}), lhs, Relation::Le, rhs, 3.0 * DEFAULT_TOL, Provenance::DerivedConstruction))
        })());
    }
    let twin = bounded_twin(spec);
    for k in 1..=4u64 {
        let check = format!("norm-tail-consistency-{k}");
        sink.push(check.clone(), anchor, (|| {
            let twin = twin.clone()?;
            let p = periodic_point_bounded(&twin, &default_kernel(&twin, 1)?, 1)?;
            let whole = space_norm(&p.function, spec)?;
            let cut = space_norm(&p.function.materialize_tail(k), spec)?;
            let bound = tail_remainder_bound(&p.function, k, spec.space())?;
            Ok(Report::new(check.clone(), anchor, &twin, json!({ "blocks": k }), (whole - cut).abs(), Relation::Le, bound, 2.0 * DEFAULT_TOL, Provenance::DerivedConstruction))
        })());
    }
    if spec.is_bounded() {
        sink.push("operator-norm-sampling".into(), anchor, (|| {
            let g = gelfand_bound_check(spec, 25, seed)?;
            Ok(Report::new("operator-norm-sampling", "operator-norm", spec, json!({ "samples": 25, "attaining": g.attaining }), g.max_ratio, Relation::Le, g.bound, 1e-10 * g.bound, Provenance::PaperClosedForm))
        })());
    }
}

fn periodic_suite(spec: &ShiftSpec, tol: f64, sink: &mut Sink) {
    let anchor = "periodic-points";
    let mut previous_gap = f64::INFINITY;
    for n in 1..=8u32 {
        let check = format!("periodic-residual-N{n}");
        let point = default_kernel(spec, n).and_then(|x| Ok((periodic_point(spec, &x, n)?, x)));
        let (p, x) = match point {
            Ok(v) => v,
            Err(e) => {
                sink.push(check, anchor, Err(e));
                continue;
            }
        };
        sink.out.push(Report::new(check, anchor, spec, json!({ "N": n }), p.residual.value, Relation::Le, 2.0 * tol, 0.0, p.provenance));
        if spec.is_bounded() {
            let wn = spec.w().norm().powi(-(n as i32));
            let (norm_factor, gap_factor) = match p_of(spec.space()) {
                Some(pp) => {
                    let d = (1.0 - wn.powf(pp)).powf(1.0 / pp);
                    (1.0 / d, wn / d)
                }
                None => (1.0, wn),
            };
            let check = format!("periodic-norm-N{n}");
            sink.push(check.clone(), anchor, (|| {
                let xn = space_norm(&x, spec)?;
                Ok(Report::new(check.clone(), anchor, spec, json!({ "N": n }), p.norm.value, Relation::Eq, norm_factor * xn, NORM_TOL, p.provenance))
            })());
            let check = format!("periodic-gap-N{n}");
            sink.push(check.clone(), anchor, (|| {
                let xn = space_norm(&x, spec)?;
                let gap = periodic_density_gap(spec, &x, n)?.value;
                Ok(Report::new(check.clone(), anchor, spec, json!({ "N": n }), gap, Relation::Eq, gap_factor * xn, NORM_TOL, p.provenance))
            })());
        } else {
            sink.out.push(Report::new(format!("periodic-truncation-N{n}"), anchor, spec, json!({ "N": n }), p.truncation.terms().unwrap_or(0) as f64, Relation::Le, 12.0, 0.0, p.provenance));
            let check = format!("periodic-gap-decreasing-N{n}");
            let unit = default_kernel(spec, 1);
            sink.push(check.clone(), anchor, (|| {
                let gap = periodic_density_gap(spec, &unit.clone()?, n)?.value;
                let r = Report::new(check.clone(), anchor, spec, json!({ "N": n }), gap, Relation::Le, previous_gap, 0.0, p.provenance);
                previous_gap = gap;
                Ok(r)
            })());
        }
    }
}

fn eigen_lambdas(spec: &ShiftSpec, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut out = vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-0.5, 0.5),
    ];
    let radius = match spec.kind() {
        WeightKind::Bounded => 0.95 * spec.w().norm(),
        WeightKind::Unbounded => 10.0,
    };
    if spec.kind() == WeightKind::Unbounded {
        out.push(Complex64::new(10.0, 0.0));
    }
    for _ in 0..8 {
        let r = radius * rng.gen_range(0.0f64..1.0).sqrt();
        out.push(Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU)));
    }
    out
}

fn eigen_suite(spec: &ShiftSpec, seed: u64, tol: f64, sink: &mut Sink) {
    let anchor = "eigenvectors";
    let mut rng = rng_for(seed, 2);
    for (i, lambda) in eigen_lambdas(spec, &mut rng).into_iter().enumerate() {
        let check = format!("eigen-residual-{i}");
        let inputs = json!({ "lambda": [lambda.re, lambda.im] });
        match default_eigenvector(spec, lambda) {
            Ok(e) => {
                let bound = if spec.is_bounded() { DEFAULT_TOL } else { 2.0 * tol };
                sink.out.push(Report::new(check, anchor, spec, inputs.clone(), e.residual.value, Relation::Le, bound, 0.0, e.provenance));
                if let (WeightKind::Bounded, Some(p)) = (spec.kind(), p_of(spec.space())) {
                    let check = format!("eigen-norm-{i}");
                    let ratio = (lambda / spec.w()).norm();
                    let expected = to_f64(spec.a()).powf(1.0 / p) / (1.0 - ratio.powf(p)).powf(1.0 / p);
                    sink.out.push(Report::new(check, anchor, spec, inputs, e.norm.value, Relation::Eq, expected, NORM_TOL * (1.0 + expected), e.provenance));
                }
            }
            Err(err) => sink.push(check, anchor, Err(err)),
        }
    }
    if spec.is_bounded() {
        for (i, scale) in [1.0, 1.5].into_iter().enumerate() {
            let lambda = spec.w() * Complex64::new(0.0, scale);
            let refused = matches!(default_eigenvector(spec, lambda), Err(Error::LambdaOutOfDisk { .. }));
            sink.out.push(Report::new(format!("eigen-refused-outside-{i}"), "spectrum", spec, json!({ "lambda": [lambda.re, lambda.im] }), refused as u8 as f64, Relation::Eq, 1.0, 0.0, Provenance::TheoremAsserted));
        }
    }
}

fn transitivity_suite(spec: &ShiftSpec, seed: u64, sink: &mut Sink) {
    let anchor = "transitivity";
    let mut rng = rng_for(seed, 3);
    for i in 0..8 {
        let x = random_unit(spec, &mut rng, 3);
        let y = random_unit(spec, &mut rng, 3);
        let eps = 10f64.powf(rng.gen_range(-3.0..-0.3));
        let inputs = json!({ "sample": i, "eps": eps });
        let check = format!("transitivity-distance-{i}");
        let w = match transitivity_witness(spec, &x, &y, eps) {
            Ok(w) => w,
            Err(e) => {
                sink.push(check, anchor, Err(e));
                continue;
            }
        };
        sink.out.push(Report::new(check, anchor, spec, inputs.clone(), w.distance.value, Relation::Lt, eps, 0.0, w.provenance));
        sink.out.push(Report::new(format!("transitivity-image-{i}"), anchor, spec, inputs.clone(), w.exact_image as u8 as f64, Relation::Eq, 1.0, 0.0, w.provenance));
        if spec.is_bounded() {
            let check = format!("transitivity-identity-{i}");
            sink.push(check.clone(), anchor, (|| {
                let rhs = spec.w().norm().powi(-(w.n as i32)) * space_norm(&y, spec)?;
                Ok(Report::new(check.clone(), anchor, spec, inputs.clone(), w.distance.value, Relation::Eq, rhs, 1e-10, w.provenance))
            })());
        }
    }
}

/// `x(0)` of an eventually zero function, as a modulus.
fn start_value(f: &PiecewiseFn) -> f64 {
    f.evaluate(0.0).norm()
}

fn unbounded_suite(spec: &ShiftSpec, seed: u64, sink: &mut Sink) {
    let anchor = "unbounded-growth";
    let un = match spec.kind() {
        WeightKind::Unbounded => Ok(*spec),
        WeightKind::Bounded => unbounded_twin(spec),
    };
    let un = match un {
        Ok(u) => u,
        Err(e) => return sink.push("unbounded-spec".into(), anchor, Err(e)),
    };
    for n in 1..=3u32 {
        let min = match un.space() {
            Space::Lp(_) => ceil(un.a() * Q::from_integer(n as i64)),
            Space::C0 => n as i64,
        };
        for m in [min, min + 3, 12.max(min)] {
            let check = format!("witness-growth-n{n}-m{m}");
            sink.push(check.clone(), anchor, (|| {
                let (e, bound) = unboundedness_witness(&un, n, m)?;
                let measured = space_norm(&apply_power(&un, &e, n)?, &un)?;
                Ok(Report::new(check.clone(), anchor, &un, json!({ "n": n, "m": m }), measured, Relation::Ge, bound, 1e-10 * bound, Provenance::PaperClosedForm))
            })());
        }
    }
    let mut rng = rng_for(seed, 4);
    let x = random_unit(&un, &mut rng, 2);
    let hat = default_kernel(&un, 2);
    for n in 1..=10u32 {
        let check = format!("s-decay-n{n}");
        sink.push(check.clone(), "right-inverse-decay", (|| {
            let xn = space_norm(&x, &un)?;
            let lhs = space_norm(&right_inverse_power(&un, &x, n)?, &un)?;
            let (rhs, provenance) = if un.space().is_c0() {
                (right_inverse_power_bound(&un, n, xn, start_value(&x)), Provenance::DerivedConstruction)
            } else {
                (right_inverse_decay(&un, n) * xn, Provenance::PaperClosedForm)
            };
            Ok(Report::new(check.clone(), "right-inverse-decay", &un, json!({ "n": n, "x0": start_value(&x) }), lhs, Relation::Le, rhs, 1e-10 * rhs, provenance))
        })());
        if un.space().is_c0() {
            let check = format!("s-decay-vanishing-start-n{n}");
            sink.push(check.clone(), "right-inverse-decay", (|| {
                let h = hat.clone()?;
                let lhs = space_norm(&right_inverse_power(&un, &h, n)?, &un)?;
                let rhs = right_inverse_decay(&un, n) * space_norm(&h, &un)?;
                Ok(Report::new(check.clone(), "right-inverse-decay", &un, json!({ "n": n }), lhs, Relation::Le, rhs, 1e-10 * rhs, Provenance::PaperClosedForm))
            })());
        }
    }
    let ln_w = un.log_w();
    for (i, (rate, n, expect)) in [(1.0, 1, false), (2.0, 1, true)].into_iter().enumerate() {
        let seg = Segment::new(Q::from_integer(0), None, vec![Term::new(Complex64::new(1.0, 0.0), Exponent::rate(-ln_w * rate), Poly::one())]);
        let check = format!("domain-decision-{i}");
        sink.push(check.clone(), "domain", (|| {
            let f = PiecewiseFn::from_segments(vec![seg], un.space())?;
            let v = in_domain(&un, &f, n);
            Ok(Report::new(check.clone(), "domain", &un, json!({ "decay": rate, "n": n, "witness": v.witness }), v.in_domain as u8 as f64, Relation::Eq, expect as u8 as f64, 0.0, Provenance::PaperClosedForm))
        })());
    }
    let check = "right-inverse-identity".to_string();
    sink.push(check.clone(), "right-inverse", (|| {
        let back = apply(&un, &right_inverse_power(&un, &x, 1)?)?;
        let exact = back.sub(&x)?.is_zero();
        Ok(Report::new(check.clone(), "right-inverse", &un, json!({}), exact as u8 as f64, Relation::Eq, 1.0, 0.0, Provenance::PaperClosedForm))
    })());
}

/// Runs a suite; every check becomes one report.
pub fn run_suite(spec: &ShiftSpec, suite: Suite, seed: u64, tol: f64) -> Vec<Report> {
    let mut sink = Sink { spec, out: Vec::new() };
    let all = suite == Suite::All;
    if all || suite == Suite::Norms {
        norms_suite(spec, seed, &mut sink);
    }
    if all || suite == Suite::Periodic {
        periodic_suite(spec, tol, &mut sink);
    }
    if all || suite == Suite::Eigen {
        eigen_suite(spec, seed, tol, &mut sink);
    }
    if all || suite == Suite::Transitivity {
        transitivity_suite(spec, seed, &mut sink);
    }
    if all || suite == Suite::Unbounded {
        unbounded_suite(spec, seed, &mut sink);
    }
    sink.out
}
