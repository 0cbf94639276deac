//! Random eventually-zero functions for property checks.

use num_complex::Complex64;
use rand::Rng;

use crate::grid::Q;
use crate::piecewise::{PiecewiseFn, Segment, Space};
use crate::poly::Poly;

const SUBDIVISION: i64 = 4;

fn complex<R: Rng + ?Sized>(rng: &mut R, re: f64, im: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-re..=re), rng.gen_range(-im..=im))
}

/// Sorted distinct grid points in `[0, units·unit]` on the grid `unit/4`,
/// always including 0 when `from_zero`.
fn knots<R: Rng + ?Sized>(rng: &mut R, unit: Q, units: u32, count: usize, from_zero: bool) -> Vec<Q> {
    let cells = SUBDIVISION * units.max(1) as i64;
    let mut idx: Vec<i64> = (0..count).map(|_| rng.gen_range(0..=cells)).collect();
    if from_zero {
        idx.push(0);
    }
    idx.sort_unstable();
    idx.dedup();
    idx.into_iter().map(|i| unit * Q::new(i, SUBDIVISION)).collect()
}

/// A random nonzero function vanishing beyond `units · unit`.
///
/// In `L_p` it is a sum of exponential-polynomial pieces with gaps. In `C_0`
/// it is continuous: a piecewise linear interpolant ending at 0, sometimes
/// multiplied by a global exponential, with `x(0)` sometimes zero.
pub fn random_function<R: Rng + ?Sized>(rng: &mut R, space: Space, unit: Q, units: u32) -> PiecewiseFn {
    loop {
        let f = match space {
            Space::Lp(_) => random_lp(rng, space, unit, units),
            Space::C0 => random_c0(rng, unit, units),
        };
        if !f.is_zero() {
            return f;
        }
    }
}

fn random_lp<R: Rng + ?Sized>(rng: &mut R, space: Space, unit: Q, units: u32) -> PiecewiseFn {
    let count = rng.gen_range(2..=6);
    let pts = knots(rng, unit, units, count, false);
    let mut segs = Vec::new();
    for w in pts.windows(2) {
        if rng.gen_bool(0.25) {
            continue;
        }
        let c = complex(rng, 2.0, 1.0);
        let gamma = if rng.gen_bool(0.5) {
            Complex64::new(0.0, 0.0)
        } else {
            complex(rng, 1.0, 2.0)
        };
        let degree = rng.gen_range(0..=2);
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        coeffs.extend((0..degree).map(|_| complex(rng, 1.0, 0.5)));
        segs.push(Segment::simple(w[0], w[1], c, gamma, Poly(coeffs).trimmed()));
    }
    PiecewiseFn::from_segments(segs, space).expect("sorted random segments")
}

fn random_c0<R: Rng + ?Sized>(rng: &mut R, unit: Q, units: u32) -> PiecewiseFn {
    let count = rng.gen_range(2..=6);
    let pts = knots(rng, unit, units, count, true);
    if pts.len() < 2 {
        return PiecewiseFn::zero(Space::C0);
    }
    let mut values: Vec<Complex64> = (0..pts.len()).map(|_| complex(rng, 2.0, 1.0)).collect();
    *values.last_mut().unwrap() = Complex64::new(0.0, 0.0);
    if rng.gen_bool(0.3) {
        values[0] = Complex64::new(0.0, 0.0);
    }
    let segs = pts
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| Segment::linear(t[0], t[1], v[0], v[1]))
        .collect();
    let f = PiecewiseFn::from_segments(segs, Space::C0).expect("sorted random segments");
    if rng.gen_bool(0.5) {
        f.exp_scale(Complex64::new(1.0, 0.0), complex(rng, 1.0, 2.0))
    } else {
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::q;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_respect_support_and_continuity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let f = random_function(&mut rng, Space::Lp(2.0), q(1), 3);
            assert!(f.support_end().unwrap() <= q(3));
            let g = random_function(&mut rng, Space::C0, q(1), 3);
            assert!(g.support_end().unwrap() <= q(3));
            g.check_continuity().unwrap();
        }
    }
}
