//! Independent oracles for integration and acceptance tests: composite
//! Gauss–Legendre quadrature of order 20 on uniform panels, and dense
//! sampling with ternary refinement for suprema. Only pointwise evaluation of
//! the library's functions is used.

#![allow(dead_code)]

use shiftchaos::grid::to_f64;
use shiftchaos::{PiecewiseFn, Space};

const ORDER: usize = 20;

/// Nodes and weights on [-1, 1] from the three-term recurrence and Newton.
pub fn gauss_legendre() -> Vec<(f64, f64)> {
    let n = ORDER;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = -(std::f64::consts::PI * (4 * i + 3) as f64 / (4 * n + 2) as f64).cos();
        let mut dp = 1.0;
        for _ in 0..60 {
            let (mut a, mut b) = (1.0f64, x);
            for k in 2..=n {
                let c = ((2 * k - 1) as f64 * x * b - (k - 1) as f64 * a) / k as f64;
                a = b;
                b = c;
            }
            dp = n as f64 * (a - x * b) / (1.0 - x * x);
            let step = b / dp;
            x -= step;
            if step.abs() < 1e-17 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Tail blocks are expanded until they fall below `1e-20` relative.
pub fn finite(f: &PiecewiseFn) -> PiecewiseFn {
    match f.tail() {
        None => f.clone(),
        Some(t) => {
            let mut k = 1;
            while k < 4000 && t.log_majorant(k) > -46.0 {
                k += 1;
            }
            f.materialize_tail(k + 1)
        }
    }
}

/// Each piece with the function restricted to the segments overlapping it.
fn intervals(f: &PiecewiseFn) -> Vec<(f64, f64, PiecewiseFn)> {
    let spans: Vec<(f64, f64)> = f
        .segments()
        .iter()
        .map(|s| {
            let lo = to_f64(s.start);
            (lo, s.end.map_or(lo + 80.0, to_f64))
        })
        .collect();
    let mut order: Vec<usize> = (0..spans.len()).collect();
    order.sort_by(|&i, &j| spans[i].0.total_cmp(&spans[j].0));
    let mut reach = vec![f64::NEG_INFINITY; order.len()];
    for (k, &i) in order.iter().enumerate() {
        reach[k] = if k == 0 { spans[i].1 } else { reach[k - 1].max(spans[i].1) };
    }
    spans
        .iter()
        .map(|&(lo, hi)| {
            let first = reach.partition_point(|&r| r <= lo);
            let local: Vec<_> = order[first..]
                .iter()
                .take_while(|&&i| spans[i].0 < hi)
                .filter(|&&i| spans[i].1 > lo)
                .map(|&i| f.segments()[i].clone())
                .collect();
            (lo, hi, PiecewiseFn::from_segments(local, Space::Lp(1.0)).unwrap())
        })
        .collect()
}

/// `∫|f|^p` with `panels` uniform panels per piece.
pub fn integral(f: &PiecewiseFn, p: f64, panels: usize) -> f64 {
    let f = finite(f);
    let rule = gauss_legendre();
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for (lo, hi, f) in intervals(&f) {
        let h = (hi - lo) / panels as f64;
        for j in 0..panels {
            let c = lo + (j as f64 + 0.5) * h;
            let term = 0.5 * h * rule.iter().map(|&(x, w)| w * f.evaluate(c + 0.5 * h * x).norm().powf(p)).sum::<f64>();
            let next = sum + term;
            carry += if sum.abs() >= term.abs() { (sum - next) + term } else { (term - next) + sum };
            sum = next;
        }
    }
    sum + carry
}

/// `(‖f‖_p, error estimate)` from `panels` and `2·panels` panels.
pub fn lp(f: &PiecewiseFn, p: f64, panels: usize) -> (f64, f64) {
    let coarse = integral(f, p, panels).powf(1.0 / p);
    let fine = integral(f, p, 2 * panels).powf(1.0 / p);
    (fine, (fine - coarse).abs())
}

/// `sup |f|` by sampling each piece and refining around the best samples.
pub fn sup(f: &PiecewiseFn) -> f64 {
    let f = finite(f);
    let mut best: f64 = 0.0;
    for (lo, hi, f) in intervals(&f) {
        let g = |t: f64| f.evaluate(t).norm();
        best = best.max(g(lo)).max(f.left_limit(hi).norm());
        let n = 512;
        let h = (hi - lo) / n as f64;
        let values: Vec<f64> = (0..=n).map(|i| g(lo + i as f64 * h)).collect();
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
        for &i in idx.iter().take(4) {
            let (mut a, mut b) = ((lo + (i as f64 - 1.0) * h).max(lo), (lo + (i as f64 + 1.0) * h).min(hi));
            for _ in 0..100 {
                let (m1, m2) = (a + (b - a) / 3.0, b - (b - a) / 3.0);
                if g(m1) < g(m2) {
                    a = m1;
                } else {
                    b = m2;
                }
            }
            best = best.max(g(0.5 * (a + b))).max(g(lo + i as f64 * h));
        }
    }
    best
}

/// Norm in `L_p` (`Some(p)`) or sup norm (`None`).
pub fn norm(f: &PiecewiseFn, p: Option<f64>) -> f64 {
    match p {
        Some(p) => lp(f, p, 32).0,
        None => sup(f),
    }
}
