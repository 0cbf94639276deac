//! Floating-point views of segment terms used by the norm routines.

use num_complex::Complex64;

use crate::grid::to_f64;
use crate::piecewise::{Segment, Term};
use crate::poly::Poly;

/// `k · exp(a τ² + b τ + c) · P(τ)`.
#[derive(Clone, Debug)]
pub(crate) struct NumTerm {
    pub k: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub poly: Poly,
}

impl NumTerm {
    pub fn new(t: &Term) -> Self {
        let (a, b, c) = t.exponent.coefficients();
        NumTerm {
            k: t.coeff,
            a,
            b,
            c,
            poly: t.poly.clone(),
        }
    }

    fn phase(&self, tau: f64) -> Complex64 {
        (self.a * tau * tau + self.b * tau + self.c).exp()
    }

    pub fn eval(&self, tau: f64) -> Complex64 {
        self.k * self.phase(tau) * self.poly.eval(tau)
    }

    /// `(2aτ + b)`, the derivative of the exponent.
    fn slope(&self) -> Poly {
        Poly(vec![self.b, self.a * 2.0])
    }

    pub fn derivative(&self, tau: f64) -> Complex64 {
        let inner = self.slope().mul(&self.poly).add(&self.poly.derivative());
        self.k * self.phase(tau) * inner.eval(tau)
    }

    /// Upper bound for `|f''|` on `[lo, hi]`.
    pub fn second_derivative_bound(&self, lo: f64, hi: f64) -> f64 {
        let s = self.slope();
        let two_a = Poly::constant(self.a * 2.0);
        let q = s
            .mul(&s)
            .add(&two_a)
            .mul(&self.poly)
            .add(&s.mul(&self.poly.derivative()).scale(Complex64::new(2.0, 0.0)))
            .add(&self.poly.derivative().derivative());
        let h = hi - lo;
        let shifted = q.taylor_shift(lo);
        let poly_bound: f64 = shifted
            .0
            .iter()
            .enumerate()
            .map(|(j, c)| c.norm() * h.powi(j as i32))
            .sum();
        self.k.norm() * self.max_log_modulus(lo, hi).exp() * poly_bound
    }

    /// `max Re(a τ² + b τ + c)` over `[lo, hi]`.
    pub fn max_log_modulus(&self, lo: f64, hi: f64) -> f64 {
        let g = |t: f64| self.a.re * t * t + self.b.re * t + self.c.re;
        let mut m = g(lo).max(g(hi));
        if self.a.re < 0.0 {
            let v = -self.b.re / (2.0 * self.a.re);
            if v > lo && v < hi {
                m = m.max(g(v));
            }
        }
        m
    }

    /// Whether the term tends to zero as `τ → ∞`.
    pub fn decays(&self) -> bool {
        self.a.re < 0.0 || (self.a.re == 0.0 && self.b.re < 0.0)
    }

    /// Concave majorant `H(τ) ≥ ln |f(τ)|` for `τ ≥ 1`, with its derivative.
    pub fn log_majorant(&self, tau: f64) -> (f64, f64) {
        let s: f64 = self.poly.0.iter().map(|c| c.norm()).sum();
        let d = self.poly.degree() as f64;
        let h = self.k.norm().ln() + s.ln() + d * tau.ln()
            + self.a.re * tau * tau
            + self.b.re * tau
            + self.c.re;
        let dh = d / tau + 2.0 * self.a.re * tau + self.b.re;
        (h, dh)
    }
}

pub(crate) struct NumSegment {
    pub len: Option<f64>,
    pub terms: Vec<NumTerm>,
}

impl NumSegment {
    pub fn new(s: &Segment) -> Self {
        NumSegment {
            len: s.len().map(to_f64),
            terms: s.terms.iter().map(NumTerm::new).collect(),
        }
    }

    pub fn eval(&self, tau: f64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(tau)).sum()
    }

    pub fn derivative(&self, tau: f64) -> Complex64 {
        self.terms.iter().map(|t| t.derivative(tau)).sum()
    }

    pub fn second_derivative_bound(&self, lo: f64, hi: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.second_derivative_bound(lo, hi))
            .sum()
    }

    pub fn decays(&self) -> bool {
        self.terms.iter().all(NumTerm::decays)
    }

    /// Smallest `T` on a geometric ladder from 1 at which every term's log
    /// majorant is decreasing and `accept` holds for the pairs `(H_i(T), H_i'(T))`.
    pub fn decay_point(&self, accept: impl Fn(&[(f64, f64)]) -> bool) -> Option<f64> {
        let mut t = 1.0;
        while t < 1e9 {
            let h: Vec<(f64, f64)> = self.terms.iter().map(|x| x.log_majorant(t)).collect();
            if h.iter().all(|&(_, dh)| dh < 0.0) && accept(&h) {
                return Some(t);
            }
            t *= 1.5;
        }
        None
    }
}
