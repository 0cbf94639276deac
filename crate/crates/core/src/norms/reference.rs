//! Reference norms for cross-checking: fixed composite 20-point
//! Gauss–Legendre quadrature and sampled maximization with golden-section
//! refinement. They share no code with the certified routines.

use std::sync::OnceLock;

use crate::grid::to_f64;
use crate::piecewise::PiecewiseFn;

const ORDER: usize = 20;
const NEGLIGIBLE_LOG: f64 = -41.4;
const MAX_BLOCKS: u64 = 5000;

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        (1..=ORDER)
            .map(|i| {
                let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (ORDER as f64 + 0.5)).cos();
                for _ in 0..100 {
                    let (p, dp) = legendre(ORDER, x);
                    let dx = p / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                let (_, dp) = legendre(ORDER, x);
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

/// Expands tail blocks until their majorant is below `e^{-41.4} ≈ 1e-18`.
fn finite_view(f: &PiecewiseFn) -> PiecewiseFn {
    match f.tail() {
        None => f.clone(),
        Some(t) => {
            let k = (0..MAX_BLOCKS)
                .find(|&k| t.log_majorant(k) < NEGLIGIBLE_LOG)
                .unwrap_or(MAX_BLOCKS);
            f.materialize_tail(k + 1)
        }
    }
}

fn pieces(f: &PiecewiseFn) -> Vec<(f64, f64)> {
    f.segments()
        .iter()
        .map(|s| (to_f64(s.start), s.end.map_or(f64::INFINITY, to_f64)))
        .collect()
}

/// `‖f‖_p` with every piece split into `panels` equal panels. Unbounded
/// pieces are cut where the integrand has fallen below `1e-18` of its peak
/// on a doubling ladder.
pub fn reference_lp_norm(f: &PiecewiseFn, p: f64, panels: usize) -> f64 {
    let f = finite_view(f);
    let g = |t: f64| f.evaluate(t).norm().powf(p);
    let mut total = 0.0;
    for (lo, hi) in pieces(&f) {
        let hi = if hi.is_finite() {
            hi
        } else {
            let mut len = 1.0;
            let peak = (0..64).map(|i| g(lo + i as f64 / 8.0)).fold(0.0, f64::max);
            while len < 1e6 && (0..16).any(|i| g(lo + len * (1.0 + i as f64 / 16.0)) > 1e-18 * peak) {
                len *= 2.0;
            }
            lo + 2.0 * len
        };
        let h = (hi - lo) / panels as f64;
        for j in 0..panels {
            let (a, b) = (lo + j as f64 * h, lo + (j + 1) as f64 * h);
            let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
            total += r * rule().iter().map(|&(x, w)| w * g(m + r * x)).sum::<f64>();
        }
    }
    total.powf(1.0 / p)
}

fn golden_max(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..80 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    gc.max(gd)
}

/// `sup |f|` from `samples` points per piece, endpoint limits and
/// golden-section refinement around the three best samples.
pub fn reference_sup_norm(f: &PiecewiseFn, samples: usize) -> f64 {
    let f = finite_view(f);
    let g = |t: f64| f.evaluate(t).norm();
    let mut best: f64 = 0.0;
    for (lo, hi) in pieces(&f) {
        let hi = if hi.is_finite() { hi } else { lo + 64.0 };
        best = best.max(g(lo)).max(f.left_limit(hi).norm());
        let h = (hi - lo) / samples as f64;
        let mut vals: Vec<(f64, usize)> = (0..=samples).map(|i| (g(lo + i as f64 * h), i)).collect();
        vals.sort_by(|x, y| y.0.total_cmp(&x.0));
        for &(v, i) in vals.iter().take(3) {
            best = best.max(v);
            let a = (lo + (i as f64 - 1.0) * h).max(lo);
            let b = (lo + (i as f64 + 1.0) * h).min(hi);
            best = best.max(golden_max(&g, a, b));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::q;
    use crate::piecewise::{Segment, Space};
    use crate::poly::Poly;
    use num_complex::Complex64;

    #[test]
    fn rule_weights_sum_to_two() {
        let s: f64 = rule().iter().map(|&(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn reference_values() {
        let seg = Segment::simple(q(0), q(3), Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), Poly::tau());
        let f = PiecewiseFn::from_segments(vec![seg], Space::C0).unwrap();
        assert!((reference_sup_norm(&f, 200) - (-1f64).exp()).abs() < 1e-14);
        let exact = 1.0 - 4.0 * (-3f64).exp();
        assert!((reference_lp_norm(&f, 1.0, 16) - exact).abs() < 1e-14);
    }
}
