//! Property-based invariants of the function algebra, norms, operators and
//! spectrum rules.

mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shiftchaos::constructions::{default_eigenvector, default_kernel, periodic_point_bounded};
use shiftchaos::grid::{q, qr};
use shiftchaos::norms::{norm, tail_remainder_bound, DEFAULT_TOL};
use shiftchaos::operators::{apply, apply_power, kernel_element, right_inverse};
use shiftchaos::sample::random_function;
use shiftchaos::spectrum::{classify, classify_kind, SpectrumKind};
use shiftchaos::{PiecewiseFn, ShiftSpec, Space, WeightKind, Q};

fn space_strategy() -> impl Strategy<Value = Space> {
    prop_oneof![
        Just(Space::Lp(1.0)),
        Just(Space::Lp(1.5)),
        Just(Space::Lp(2.0)),
        Just(Space::Lp(3.0)),
        Just(Space::C0),
    ]
}

fn step_strategy() -> impl Strategy<Value = Q> {
    prop_oneof![Just(q(1)), Just(qr(1, 2)), Just(qr(3, 2)), Just(q(2))]
}

fn spec_strategy() -> impl Strategy<Value = ShiftSpec> {
    (space_strategy(), any::<bool>(), 1.1f64..3.0, 0.0f64..6.28, step_strategy()).prop_map(
        |(space, bounded, r, theta, a)| {
            if bounded {
                ShiftSpec::bounded(space, Complex64::from_polar(r, theta), a).unwrap()
            } else {
                ShiftSpec::unbounded(space, r, a).unwrap()
            }
        },
    )
}

fn sample(seed: u64, space: Space, unit: Q, units: u32) -> PiecewiseFn {
    random_function(&mut ChaCha8Rng::seed_from_u64(seed), space, unit, units)
}

fn p_of(space: Space) -> Option<f64> {
    match space {
        Space::Lp(p) => Some(p),
        Space::C0 => None,
    }
}

fn lib_norm(f: &PiecewiseFn, space: Space) -> f64 {
    norm(f, space, DEFAULT_TOL).unwrap().value
}

/// Pointwise agreement on a fixed probe set covering `[0, end)`.
fn agree(f: &PiecewiseFn, g: &PiecewiseFn, end: f64, tol: f64) -> bool {
    (0..400).all(|i| {
        let t = end * (i as f64 + 0.37) / 400.0;
        let (x, y) = (f.evaluate(t), g.evaluate(t));
        (x - y).norm() <= tol * y.norm().max(1.0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn shift_round_trip(seed in any::<u64>(), space in space_strategy(), d in step_strategy()) {
        let f = sample(seed, space, qr(1, 2), 6);
        let back = f.shift_right(d).shift_left(d);
        prop_assert!(agree(&back, &f, 4.0, 1e-14));
        prop_assert!(f.shift_right(d).evaluate(0.5 * shiftchaos::grid::to_f64(d)).norm() == 0.0);
    }

    #[test]
    fn exp_scale_composes(
        seed in any::<u64>(),
        c1 in -2.0f64..2.0, c2 in -2.0f64..2.0,
        g1 in -1.0f64..1.0, g2 in -1.0f64..1.0, h in -1.0f64..1.0,
    ) {
        let f = sample(seed, Space::Lp(1.0), q(1), 4);
        let (c1, c2) = (Complex64::new(c1, 0.5), Complex64::new(c2, -0.25));
        let (g1, g2) = (Complex64::new(g1, h), Complex64::new(g2, -h));
        let two = f.exp_scale(c1, g1).exp_scale(c2, g2);
        let one = f.exp_scale(c1 * c2, g1 + g2);
        prop_assert!(agree(&two, &one, 4.0, 1e-12));
    }

    #[test]
    fn addition_laws(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), space in space_strategy()) {
        let (f, g, h) = (sample(a, space, q(1), 4), sample(b, space, qr(1, 2), 6), sample(c, space, qr(1, 3), 9));
        prop_assert!(agree(&f.add(&g).unwrap(), &g.add(&f).unwrap(), 4.0, 1e-14));
        let left = f.add(&g).unwrap().add(&h).unwrap();
        let right = f.add(&g.add(&h).unwrap()).unwrap();
        prop_assert!(agree(&left, &right, 4.0, 1e-13));
        prop_assert!(f.sub(&f).unwrap().is_zero() || common::lp(&f.sub(&f).unwrap(), 1.0, 4).0 == 0.0);
    }

    #[test]
    fn continuity_is_preserved(seed in any::<u64>(), spec in spec_strategy()) {
        let spec = spec.with_space(Space::C0).unwrap();
        let f = sample(seed, Space::C0, spec.a(), 4);
        f.check_continuity().unwrap();
        apply(&spec, &f).unwrap().check_continuity().unwrap();
        let s = right_inverse(&spec, &f).unwrap();
        s.check_continuity().unwrap();
        prop_assert!(s.evaluate(0.0).norm() == 0.0);
    }

    #[test]
    fn norm_homogeneity(seed in any::<u64>(), space in space_strategy(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let f = sample(seed, space, qr(1, 2), 6);
        let c = Complex64::new(re, im);
        let lhs = lib_norm(&f.scale(c), space);
        let rhs = c.norm() * lib_norm(&f, space);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0));
    }

    #[test]
    fn triangle_inequality(a in any::<u64>(), b in any::<u64>(), space in space_strategy()) {
        let (f, g) = (sample(a, space, q(1), 4), sample(b, space, qr(1, 2), 8));
        let lhs = lib_norm(&f.add(&g).unwrap(), space);
        prop_assert!(lhs <= lib_norm(&f, space) + lib_norm(&g, space) + 1e-9);
    }

    #[test]
    fn norms_agree_with_oracle(seed in any::<u64>(), space in space_strategy()) {
        let f = sample(seed, space, qr(1, 2), 6);
        let lib = norm(&f, space, DEFAULT_TOL).unwrap();
        let oracle = common::norm(&f, p_of(space));
        prop_assert!((lib.value - oracle).abs() <= 1e-9 * oracle.max(1.0), "{} vs {}", lib.value, oracle);
    }

    #[test]
    fn tail_consistency(n in 1u32..6, k in 1u64..21, p in prop_oneof![Just(1.0), Just(2.0), Just(3.0)]) {
        let space = Space::Lp(p);
        let spec = ShiftSpec::bounded(space, Complex64::new(2.0, 0.0), q(1)).unwrap();
        let x = default_kernel(&spec, n).unwrap();
        let f = periodic_point_bounded(&spec, &x, n).unwrap().function;
        let full = lib_norm(&f, space);
        let head = lib_norm(&f.materialize_tail(k), space);
        let rest = tail_remainder_bound(&f, k, space).unwrap();
        prop_assert!(head <= full + 1e-12);
        prop_assert!(full <= head + rest + 1e-12);
        let closed = (1.0 / (1.0 - 2f64.powf(-p * n as f64))).powf(1.0 / p) * (n as f64).powf(1.0 / p);
        prop_assert!((full - closed).abs() <= 1e-9 * closed);
    }

    #[test]
    fn power_law(seed in any::<u64>(), spec in spec_strategy(), n in 1u32..4, m in 1u32..4) {
        let f = sample(seed, spec.space(), spec.a(), 12);
        let composed = apply_power(&spec, &apply_power(&spec, &f, m).unwrap(), n).unwrap();
        let direct = apply_power(&spec, &f, n + m).unwrap();
        prop_assert!(agree(&composed, &direct, 6.0, 1e-12));
    }

    #[test]
    fn right_inverse_identity(seed in any::<u64>(), spec in spec_strategy()) {
        let f = sample(seed, spec.space(), spec.a() / 2, 6);
        let back = apply(&spec, &right_inverse(&spec, &f).unwrap()).unwrap();
        prop_assert!(back.sub(&f).unwrap().is_zero());
    }

    #[test]
    fn kernel_nilpotence(seed in any::<u64>(), spec in spec_strategy(), n in 1u32..5) {
        // Continuous profiles must already vanish at the cut.
        let units = if spec.space().is_c0() { n } else { 3 * n };
        let profile = sample(seed, spec.space(), spec.a(), units);
        let k = kernel_element(&spec, n, &profile).unwrap();
        prop_assert!(apply_power(&spec, &k, n).unwrap().is_zero());
        prop_assert!(apply_power(&spec, &default_kernel(&spec, n).unwrap(), n).unwrap().is_zero());
    }

    #[test]
    fn operator_norm_bound(seed in any::<u64>(), space in space_strategy(), r in 1.1f64..3.0, a in step_strategy()) {
        let spec = ShiftSpec::bounded(space, Complex64::from_polar(r, 1.0), a).unwrap();
        let f = sample(seed, space, a / 3, 12);
        prop_assume!(!f.is_zero());
        let ratio = lib_norm(&apply(&spec, &f).unwrap(), space) / lib_norm(&f, space);
        prop_assert!(ratio <= r * (1.0 + 1e-10));
    }

    #[test]
    fn disk_symmetry(r in 1.1f64..3.0, theta in 0.0f64..6.28, lr in 0.0f64..4.0, phi in 0.0f64..6.28, psi in 0.0f64..6.28) {
        let spec = ShiftSpec::bounded(Space::Lp(2.0), Complex64::from_polar(r, theta), q(1)).unwrap();
        let lambda = Complex64::from_polar(lr, phi);
        let base = classify_kind(&spec, lambda).0;
        prop_assert_eq!(base, classify_kind(&spec, lambda.conj()).0);
        prop_assert_eq!(base, classify_kind(&spec, lambda * Complex64::from_polar(1.0, psi)).0);
        let expected = if lr < r { SpectrumKind::Point } else { SpectrumKind::Resolvent };
        prop_assume!((lr - r).abs() > 1e-9);
        prop_assert_eq!(base, expected);
    }

    #[test]
    fn classification_coherence(spec in spec_strategy(), lr in 0.0f64..5.0, phi in 0.0f64..6.28) {
        let lambda = Complex64::from_polar(lr, phi);
        let class = classify(&spec, lambda).unwrap();
        prop_assert_ne!(class.class, SpectrumKind::Residual);
        match class.class {
            SpectrumKind::Point => {
                let e = class.evidence.unwrap();
                prop_assert!(e.residual.value <= 2e-9);
                prop_assert!(spec.kind() == WeightKind::Unbounded || lr < spec.w().norm());
            }
            _ => {
                prop_assert!(class.evidence.is_none());
                prop_assert!(default_eigenvector(&spec, lambda).is_err());
                prop_assert!(spec.kind() == WeightKind::Bounded && lr >= spec.w().norm() * (1.0 - 1e-12));
            }
        }
    }
}
