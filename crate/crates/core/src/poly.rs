//! Small dense polynomials in the segment-local variable.

use num_complex::Complex64;

/// Maximum polynomial degree carried by a segment term.
pub const MAX_DEGREE: usize = 4;

/// Complex coefficients in ascending order: `p[0] + p[1] τ + ...`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Complex64) -> Self {
        Poly(vec![c]).trimmed()
    }

    pub fn one() -> Self {
        Poly(vec![Complex64::new(1.0, 0.0)])
    }

    /// The monomial `τ`.
    pub fn tau() -> Self {
        Poly(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect()).trimmed()
    }

    pub fn trimmed(mut self) -> Self {
        while matches!(self.0.last(), Some(c) if *c == Complex64::new(0.0, 0.0)) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// `P(τ + d)`, by repeated synthetic division.
    pub fn taylor_shift(&self, d: f64) -> Poly {
        if d == 0.0 || self.0.len() <= 1 {
            return self.clone();
        }
        let mut c = self.0.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let next = c[j + 1];
                c[j] += next * d;
            }
        }
        Poly(c).trimmed()
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly(self.0.iter().map(|&c| c * s).collect()).trimmed()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let zero = Complex64::new(0.0, 0.0);
        Poly(
            (0..n)
                .map(|i| {
                    self.0.get(i).copied().unwrap_or(zero) + other.0.get(i).copied().unwrap_or(zero)
                })
                .collect(),
        )
        .trimmed()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trimmed()
    }

    pub fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
        .trimmed()
    }

    /// `|P(τ)|²` for real `τ`, as a real polynomial.
    pub fn abs_sq(&self) -> RealPoly {
        let conj = Poly(self.0.iter().map(|c| c.conj()).collect());
        RealPoly(self.mul(&conj).0.iter().map(|c| c.re).collect()).trimmed()
    }

    /// Sum of coefficient moduli, a bound for `|P|` on `[0, 1]`.
    pub fn coeff_abs_sum(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).sum()
    }
}

/// Real coefficients in ascending order.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RealPoly(pub Vec<f64>);

impl RealPoly {
    pub fn trimmed(mut self) -> Self {
        while matches!(self.0.last(), Some(c) if *c == 0.0) {
            self.0.pop();
        }
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> RealPoly {
        RealPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
        .trimmed()
    }

    pub fn add(&self, other: &RealPoly) -> RealPoly {
        let n = self.0.len().max(other.0.len());
        RealPoly(
            (0..n)
                .map(|i| self.0.get(i).copied().unwrap_or(0.0) + other.0.get(i).copied().unwrap_or(0.0))
                .collect(),
        )
        .trimmed()
    }

    pub fn mul(&self, other: &RealPoly) -> RealPoly {
        if self.0.is_empty() || other.0.is_empty() {
            return RealPoly(Vec::new());
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPoly(out).trimmed()
    }

    /// Cauchy bound on the modulus of every root.
    pub fn root_bound(&self) -> f64 {
        match self.0.last() {
            None => 0.0,
            Some(&lead) => {
                1.0 + self.0[..self.0.len() - 1]
                    .iter()
                    .map(|c| (c / lead).abs())
                    .fold(0.0, f64::max)
            }
        }
    }

    /// All real roots in `[lo, hi]`, isolated through the critical points of
    /// the derivative and refined by bisection on each monotone piece.
    pub fn real_roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let p = self.clone().trimmed();
        if p.0.len() <= 1 || !(lo <= hi) {
            return Vec::new();
        }
        if p.0.len() == 2 {
            let r = -p.0[0] / p.0[1];
            return if r >= lo && r <= hi { vec![r] } else { Vec::new() };
        }
        let mut knots = vec![lo];
        knots.extend(p.derivative().real_roots_in(lo, hi));
        knots.push(hi);
        let mut roots: Vec<f64> = Vec::new();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (p.eval(a), p.eval(b));
            let r = if fa == 0.0 {
                Some(a)
            } else if fb == 0.0 {
                Some(b)
            } else if (fa < 0.0) != (fb < 0.0) {
                Some(bisect(&p, a, b, fa))
            } else {
                None
            };
            if let Some(r) = r {
                if roots.last().map_or(true, |&last| (r - last).abs() > 1e-14 * r.abs().max(1.0)) {
                    roots.push(r);
                }
            }
        }
        roots
    }
}

fn bisect(p: &RealPoly, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = p.eval(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn taylor_shift_matches_direct_evaluation() {
        let p = Poly(vec![c(1.0), c(-2.0), c(0.5), Complex64::new(0.0, 1.0)]);
        let s = p.taylor_shift(0.75);
        for x in [0.0, 0.3, 1.7] {
            assert!((s.eval(x) - p.eval(x + 0.75)).norm() < 1e-13);
        }
    }

    #[test]
    fn abs_sq_is_modulus_squared() {
        let p = Poly(vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.25)]);
        let q = p.abs_sq();
        for x in [0.0, 0.4, 2.0] {
            assert!((q.eval(x) - p.eval(x).norm_sqr()).abs() < 1e-13);
        }
    }

    #[test]
    fn finds_all_roots_of_a_cubic() {
        // (x - 0.2)(x - 0.5)(x - 0.9)
        let p = RealPoly(vec![-0.09, 0.73, -1.6, 1.0]);
        let r = p.real_roots_in(0.0, 1.0);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([0.2, 0.5, 0.9]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(p.real_roots_in(0.95, 2.0).is_empty());
    }

    #[test]
    fn double_root_at_knot() {
        // (x - 0.5)^2 touches zero at the critical point
        let p = RealPoly(vec![0.25, -1.0, 1.0]);
        let r = p.real_roots_in(0.0, 1.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-12);
    }
}
