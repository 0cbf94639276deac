//! Worked examples checked through the public API against the test oracle.

mod common;

use num_complex::Complex64;
use shiftchaos::constructions::{
    default_eigenvector, default_kernel, eigenvector_bounded_c0, eigenvector_bounded_lp, eigenvector_unbounded,
    periodic_density_gap, periodic_point_bounded, periodic_point_unbounded, transitivity_witness, Truncation,
};
use shiftchaos::grid::{q, qr};
use shiftchaos::norms::{distance, lp_norm, norm, sup_norm, tail_remainder_bound, DEFAULT_TOL};
use shiftchaos::operators::{
    apply, apply_power, in_domain, kernel_element, right_inverse, right_inverse_power, unboundedness_witness,
};
use shiftchaos::piecewise::{Exponent, Segment, Term};
use shiftchaos::poly::Poly;
use shiftchaos::spectrum::{classify, gelfand_bound_check, spectrum_grid, SpectrumKind};
use shiftchaos::{Error, PiecewiseFn, ShiftSpec, Space};

const LN2: f64 = std::f64::consts::LN_2;
const L1: Space = Space::Lp(1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn box_fn(lo: i64, hi: i64) -> PiecewiseFn {
    PiecewiseFn::indicator(q(lo), q(hi), L1).unwrap()
}

fn bounded(space: Space) -> ShiftSpec {
    ShiftSpec::bounded(space, c(2.0), q(1)).unwrap()
}

fn unbounded(space: Space) -> ShiftSpec {
    ShiftSpec::unbounded(space, 2.0, q(1)).unwrap()
}

fn exp_tail(gamma: f64) -> PiecewiseFn {
    let term = Term::new(c(1.0), Exponent::rate(c(gamma)), Poly::one());
    PiecewiseFn::new(vec![Segment::new(q(0), None, vec![term])], None, L1).unwrap()
}

/// Equal up to rounding; representations of `w^k` factors may differ.
fn same(f: &PiecewiseFn, g: &PiecewiseFn) -> bool {
    common::lp(&f.sub(g).unwrap(), 1.0, 4).0 <= 1e-14
}

fn close(x: Complex64, y: f64, tol: f64) -> bool {
    (x - c(y)).norm() <= tol
}

#[test]
fn evaluation() {
    let f = box_fn(0, 1);
    assert_eq!(f.evaluate(0.5), c(1.0));
    assert_eq!(f.evaluate(1.0), c(0.0));
    assert!(close(exp_tail(-LN2).evaluate(3.0), 0.125, 1e-15));
}

#[test]
fn translation_and_scaling() {
    assert!(box_fn(1, 2).shift_left(q(1)).sub(&box_fn(0, 1)).unwrap().is_zero());
    assert!(box_fn(0, 1).shift_left(q(1)).is_zero());
    let f = PiecewiseFn::from_segments(vec![Segment::simple(q(2), q(3), c(1.0), c(-1.0), Poly::one())], L1).unwrap();
    let g = f.shift_left(q(2));
    for t in [0.0, 0.5] {
        assert!(close(g.evaluate(t), (-(t + 2.0f64)).exp(), 1e-15));
    }
    let h = box_fn(0, 1).exp_scale(c(1.0), c(LN2));
    assert!(close(h.evaluate(1.0 - 1e-9), 2.0, 1e-8));
    assert!(box_fn(0, 1).exp_scale(c(2.0), c(0.0)).sub(&box_fn(0, 1).scale(c(2.0))).unwrap().is_zero());
}

#[test]
fn addition() {
    let f = box_fn(0, 1);
    assert!(f.add(&PiecewiseFn::zero(L1)).unwrap().sub(&f).unwrap().is_zero());
    assert!(f.add(&box_fn(1, 2)).unwrap().sub(&box_fn(0, 2)).unwrap().is_zero());
    assert!(f.add(&f).unwrap().sub(&f.scale(c(2.0))).unwrap().is_zero());
}

#[test]
fn support_and_materialization() {
    assert_eq!(box_fn(0, 1).support_end(), Some(q(1)));
    assert_eq!(PiecewiseFn::zero(L1).support_end(), Some(q(0)));
    let x = periodic_point_bounded(&bounded(L1), &box_fn(0, 1), 1).unwrap().function;
    assert_eq!(x.support_end(), None);
    assert!(x.materialize_tail(1).sub(&box_fn(0, 1)).unwrap().is_zero());
    let three = x.materialize_tail(3);
    for (t, v) in [(0.5, 1.0), (1.5, 0.5), (2.5, 0.25), (3.5, 0.0)] {
        assert!(close(three.evaluate(t), v, 1e-15));
    }
    assert!(box_fn(0, 2).materialize_tail(5).sub(&box_fn(0, 2)).unwrap().is_zero());
}

#[test]
fn norms_match_oracle() {
    assert_eq!(lp_norm(&box_fn(0, 1), 1.0, DEFAULT_TOL).unwrap().value, 1.0);
    assert_eq!(lp_norm(&PiecewiseFn::zero(L1), 1.0, DEFAULT_TOL).unwrap().value, 0.0);
    let x = periodic_point_bounded(&bounded(L1), &box_fn(0, 1), 1).unwrap().function;
    let n = lp_norm(&x, 1.0, DEFAULT_TOL).unwrap().value;
    assert!((n - 2.0).abs() < 1e-9);
    assert!((common::lp(&x.materialize_tail(60), 1.0, 4).0 - 2.0).abs() < 1e-9);
    let image = right_inverse(&unbounded(L1), &box_fn(0, 1)).unwrap();
    let v = lp_norm(&image, 1.0, DEFAULT_TOL).unwrap().value;
    assert!((v - 1.0 / (2.0 * LN2)).abs() < 1e-9);
    assert!((common::lp(&image, 1.0, 16).0 - v).abs() < 1e-9);
}

#[test]
fn sup_norms() {
    assert_eq!(sup_norm(&box_fn(0, 1).with_space(Space::C0)).unwrap().value, 1.0);
    let ramp = PiecewiseFn::from_segments(vec![Segment::linear(q(0), q(1), c(0.0), c(1.0))], L1).unwrap();
    assert!((sup_norm(&ramp).unwrap().value - 1.0).abs() < 1e-12);
    let e = eigenvector_bounded_c0(&bounded(Space::C0), c(1.0), None).unwrap();
    assert!((norm(&e.function, Space::C0, DEFAULT_TOL).unwrap().value - 1.0).abs() < 1e-9);
    assert!((common::sup(&e.function) - 1.0).abs() < 1e-9);
}

#[test]
fn distances() {
    let x = box_fn(0, 1);
    assert_eq!(distance(&x, &x, L1, DEFAULT_TOL).unwrap().value, 0.0);
    let w = transitivity_witness(&bounded(L1), &x, &x, 0.2).unwrap();
    assert!((distance(&w.z, &x, L1, DEFAULT_TOL).unwrap().value - 0.125).abs() < 1e-12);
    let p = periodic_point_bounded(&bounded(L1), &x, 1).unwrap().function;
    assert!((distance(&p, &x, L1, DEFAULT_TOL).unwrap().value - 1.0).abs() < 1e-9);
}

#[test]
fn tail_remainders() {
    let p = periodic_point_bounded(&bounded(L1), &box_fn(0, 1), 1).unwrap().function;
    assert!(tail_remainder_bound(&p, 10, L1).unwrap() <= 2f64.powi(-9) * (1.0 + 1e-12));
    assert_eq!(tail_remainder_bound(&box_fn(0, 3), 5, L1).unwrap(), 0.0);
}

#[test]
fn operator_images() {
    let b = bounded(L1);
    assert!(same(&apply(&b, &box_fn(1, 2)).unwrap(), &box_fn(0, 1).scale(c(2.0))));
    assert!(apply(&b, &box_fn(0, 1)).unwrap().is_zero());
    let u = unbounded(L1);
    let g = apply(&u, &box_fn(1, 2)).unwrap();
    assert!(close(g.evaluate(0.5), 2f64.sqrt(), 1e-14));
    let g2 = apply_power(&u, &box_fn(2, 3), 2).unwrap();
    let seq = apply(&u, &apply(&u, &box_fn(2, 3)).unwrap()).unwrap();
    for t in [0.0, 0.3, 0.9] {
        assert!(close(g2.evaluate(t), 2f64.powf(2.0 * t + 1.0), 1e-12));
        assert!((g2.evaluate(t) - seq.evaluate(t)).norm() < 1e-12);
    }
    let b3 = ShiftSpec::bounded(L1, c(3.0), q(1)).unwrap();
    assert!(apply_power(&b3, &box_fn(0, 2), 2).unwrap().is_zero());
    assert!(same(&apply_power(&b3, &box_fn(0, 3), 2).unwrap(), &box_fn(0, 1).scale(c(9.0))));
}

#[test]
fn right_inverse_images() {
    let u = unbounded(L1);
    let s = right_inverse(&u, &box_fn(0, 1)).unwrap();
    assert!(close(s.evaluate(1.5), 2f64.powf(-0.5), 1e-14));
    assert!(apply(&u, &s).unwrap().sub(&box_fn(0, 1)).unwrap().is_zero());
    let b = right_inverse(&bounded(L1), &box_fn(0, 1)).unwrap();
    assert!(same(&b, &box_fn(1, 2).scale(c(0.5))));
    let hat = PiecewiseFn::from_segments(vec![Segment::linear(q(0), q(1), c(1.0), c(0.0))], Space::C0).unwrap();
    let c0 = unbounded(Space::C0);
    let s = right_inverse(&c0, &hat).unwrap();
    s.check_continuity().unwrap();
    assert!(close(s.evaluate(0.5), 0.5, 1e-14));
    assert!(close(s.evaluate(1.5), 0.5 * 2f64.powf(-0.5), 1e-14));
    assert!(apply(&c0, &s).unwrap().sub(&hat).unwrap().is_zero());
    let s2 = right_inverse_power(&unbounded(L1), &box_fn(0, 1), 2).unwrap();
    assert!(close(s2.evaluate(2.5), 2f64.powf(-2.0 * 2.5 + 3.0), 1e-14));
}

#[test]
fn domain_decisions() {
    let u = unbounded(L1);
    assert!(in_domain(&u, &box_fn(0, 4), 3).in_domain);
    assert!(!in_domain(&u, &exp_tail(-LN2), 1).in_domain);
    assert!(in_domain(&u, &exp_tail(-2.0 * LN2), 1).in_domain);
}

#[test]
fn kernel_elements() {
    let b = bounded(L1);
    let k = kernel_element(&b, 1, &box_fn(0, 1)).unwrap();
    assert!(apply(&b, &k).unwrap().is_zero());
    assert!(kernel_element(&b, 2, &box_fn(0, 5)).unwrap().sub(&box_fn(0, 2)).unwrap().is_zero());
    let c0 = bounded(Space::C0);
    let hat = default_kernel(&c0, 1).unwrap();
    assert!(apply(&c0, &hat).unwrap().is_zero());
    assert!(close(hat.evaluate(0.5), 1.0, 1e-14));
}

#[test]
fn unboundedness_witnesses() {
    let (e, bound) = unboundedness_witness(&unbounded(L1), 1, 3).unwrap();
    assert!((bound - 4.0).abs() < 1e-12);
    let measured = lp_norm(&apply(&unbounded(L1), &e).unwrap(), 1.0, DEFAULT_TOL).unwrap().value;
    assert!((measured - 4.0 / LN2).abs() < 1e-9);
    let c0 = unbounded(Space::C0);
    let (e, bound) = unboundedness_witness(&c0, 1, 2).unwrap();
    assert!((bound - 2.0).abs() < 1e-12);
    let image = apply(&c0, &e).unwrap();
    assert!(image.evaluate(1.0).norm() >= 2.0 * (1.0 - 1e-12));
    assert!(matches!(unboundedness_witness(&c0, 2, 1), Err(Error::IndexTooSmall { .. })));
}

#[test]
fn periodic_points() {
    let p = periodic_point_bounded(&bounded(L1), &box_fn(0, 1), 1).unwrap();
    assert!((p.norm.value - 2.0).abs() < 1e-9);
    assert_eq!(p.truncation, Truncation::ClosedForm);
    let u = periodic_point_unbounded(&unbounded(L1), &box_fn(0, 1), 1, 1e-10).unwrap();
    let k = u.truncation.terms().unwrap();
    assert!(k <= 9, "K = {k}");
    assert!(u.residual.value <= 2e-10);
}

#[test]
fn eigenvectors() {
    let b = bounded(L1);
    let z = eigenvector_bounded_lp(&b, c(0.0), &box_fn(0, 1)).unwrap();
    assert!(z.function.sub(&box_fn(0, 1)).unwrap().is_zero());
    let one = eigenvector_bounded_lp(&b, c(1.0), &box_fn(0, 1)).unwrap();
    assert!((one.norm.value - 2.0).abs() < 1e-9);
    assert!(matches!(
        eigenvector_bounded_lp(&b, c(2.0), &box_fn(0, 1)),
        Err(Error::LambdaOutOfDisk { .. })
    ));
    let c0 = bounded(Space::C0);
    let e = eigenvector_bounded_c0(&c0, c(1.0), None).unwrap();
    for t in [0.0, 0.7, 3.2] {
        assert!(close(e.function.evaluate(t), 2f64.powf(-t), 1e-12));
    }
    let hat = default_kernel(&c0, 1).unwrap();
    let e0 = eigenvector_bounded_c0(&c0, c(0.0), Some(&hat)).unwrap();
    assert!(e0.function.sub(&hat).unwrap().is_zero());
    assert!(eigenvector_bounded_c0(&c0, Complex64::new(0.0, 2.0), None).is_err());
    let u = unbounded(L1);
    let e0 = eigenvector_unbounded(&u, c(0.0), &box_fn(0, 1), 1e-9).unwrap();
    assert!(e0.function.sub(&box_fn(0, 1)).unwrap().is_zero());
    let e10 = eigenvector_unbounded(&u, c(10.0), &box_fn(0, 1), 1e-9).unwrap();
    assert!(e10.residual.value <= 2e-9);
    let f = e10.function.clone();
    let defect = apply(&u, &f).unwrap().sub(&f.scale(c(10.0))).unwrap();
    assert!(common::lp(&defect, 1.0, 32).0 / common::lp(&f, 1.0, 32).0 <= 2e-9);
}

#[test]
fn transitivity() {
    let x = box_fn(0, 1);
    let w = transitivity_witness(&bounded(L1), &x, &x, 0.2).unwrap();
    assert_eq!(w.n, 3);
    let expected = x.add(&box_fn(3, 4).scale(c(0.125))).unwrap();
    assert!(same(&w.z, &expected));
    assert!(apply_power(&bounded(L1), &w.z, 3).unwrap().sub(&x).unwrap().is_zero());
    assert!((common::lp(&w.z.sub(&x).unwrap(), 1.0, 8).0 - 0.125).abs() < 1e-12);
    let zero = PiecewiseFn::zero(L1);
    let w0 = transitivity_witness(&bounded(L1), &zero, &zero, 0.2).unwrap();
    assert_eq!(w0.n, 1);
    assert!(w0.z.is_zero());
}

#[test]
fn density_gaps() {
    let b = bounded(L1);
    let x = box_fn(0, 1);
    assert!((periodic_density_gap(&b, &x, 1).unwrap().value - 1.0).abs() < 1e-9);
    assert!((periodic_density_gap(&b, &x, 4).unwrap().value - 1.0 / 15.0).abs() < 1e-9);
    let gaps: Vec<f64> = (1..=12).map(|n| periodic_density_gap(&b, &x, n).unwrap().value).collect();
    assert!(gaps.windows(2).all(|g| g[1] < g[0]));
}

#[test]
fn spectrum_examples() {
    assert_eq!(classify(&bounded(L1), c(1.0)).unwrap().class, SpectrumKind::Point);
    assert_eq!(
        classify(&bounded(Space::C0), Complex64::new(0.0, 2.0)).unwrap().class,
        SpectrumKind::Continuous
    );
    let p = classify(&unbounded(L1), Complex64::new(17.0, -5.0)).unwrap();
    assert_eq!(p.class, SpectrumKind::Point);
    assert!(p.evidence.unwrap().residual.value <= 2e-9);
    let g = spectrum_grid(&bounded(L1), (-3.0, 3.0), (-3.0, 3.0), (13, 13)).unwrap();
    for cell in &g.cells {
        let inside = cell.re * cell.re + cell.im * cell.im < 4.0;
        assert_eq!(cell.class == SpectrumKind::Point, inside);
    }
    let corners = spectrum_grid(&bounded(L1), (-3.0, 3.0), (-3.0, 3.0), (2, 2)).unwrap();
    assert_eq!(corners.count(SpectrumKind::Resolvent), 4);
    let all = spectrum_grid(&unbounded(L1), (-3.0, 3.0), (-3.0, 3.0), (7, 7)).unwrap();
    assert_eq!(all.count(SpectrumKind::Point), 49);
}

#[test]
fn operator_norm_sampling() {
    let b = bounded(L1);
    let t = apply(&b, &box_fn(1, 2)).unwrap();
    assert_eq!(lp_norm(&t, 1.0, DEFAULT_TOL).unwrap().value, 2.0);
    let r = gelfand_bound_check(&b, 500, 11).unwrap();
    assert!(r.pass && r.max_ratio <= 2.0 + 1e-10);
}

#[test]
fn default_constructions_are_consistent() {
    for space in [L1, Space::Lp(2.0), Space::C0] {
        for spec in [bounded(space), unbounded(space)] {
            let e = default_eigenvector(&spec, Complex64::new(0.5, 0.5)).unwrap();
            assert!(e.residual.value <= 2e-9, "{space}");
        }
    }
    let half = ShiftSpec::bounded(L1, c(2.0), qr(1, 2)).unwrap();
    let k = default_kernel(&half, 3).unwrap();
    assert_eq!(k.support_end(), Some(qr(3, 2)));
    assert!(apply_power(&half, &k, 3).unwrap().is_zero());
    assert!(!apply_power(&half, &k, 2).unwrap().is_zero());
}
