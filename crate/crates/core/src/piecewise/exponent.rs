use std::cmp::Ordering;

use num_complex::Complex64;
use num_traits::Zero;

use crate::grid::{to_f64, Q};

/// One factor `exp(log · (quad τ² + rate τ + offset))` with exact rational
/// multipliers.
///
/// Factors sharing the same `log` combine by adding their multipliers, so a
/// weight introduced by one operation and removed by its inverse cancels
/// exactly instead of leaving rounding residue.
#[derive(Clone, Debug, PartialEq)]
pub struct LogFactor {
    pub log: Complex64,
    pub quad: Q,
    pub rate: Q,
    pub offset: Q,
}

impl LogFactor {
    pub fn new(log: Complex64, quad: Q, rate: Q, offset: Q) -> Self {
        LogFactor {
            log,
            quad,
            rate,
            offset,
        }
        .canonical()
    }

    /// Same factor with `log` in the half-plane `re > 0` (or `re = 0, im ≥ 0`),
    /// so that `exp(-γ s)` and `exp(γ s)` share a key.
    fn canonical(self) -> Self {
        let log = canonical_log(self.log);
        if log.re < 0.0 || (log.re == 0.0 && log.im < 0.0) {
            LogFactor {
                log: canonical_log(-log),
                quad: -self.quad,
                rate: -self.rate,
                offset: -self.offset,
            }
        } else {
            LogFactor { log, ..self }
        }
    }

    /// `exp(log · offset)`, a constant factor.
    pub fn constant(log: Complex64, offset: Q) -> Self {
        Self::new(log, Q::zero(), Q::zero(), offset)
    }

    pub fn is_trivial(&self) -> bool {
        (self.quad.is_zero() && self.rate.is_zero() && self.offset.is_zero())
            || self.log == Complex64::new(0.0, 0.0)
    }

    fn exponent_at(&self, tau: f64) -> Complex64 {
        let poly = to_f64(self.quad) * tau * tau + to_f64(self.rate) * tau + to_f64(self.offset);
        self.log * poly
    }
}

/// Normalises signed zeros so that equal logarithms share one key.
pub(crate) fn canonical_log(z: Complex64) -> Complex64 {
    Complex64::new(z.re + 0.0, z.im + 0.0)
}

pub(crate) fn log_key_cmp(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Canonical product of [`LogFactor`]s: sorted by logarithm, one factor per
/// logarithm, trivial factors removed.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Exponent(Vec<LogFactor>);

impl Exponent {
    pub fn one() -> Self {
        Exponent(Vec::new())
    }

    pub fn from_factor(f: LogFactor) -> Self {
        let mut e = Exponent::one();
        e.mul_factor(f);
        e
    }

    /// `exp(gamma · τ)`.
    pub fn rate(gamma: Complex64) -> Self {
        Self::from_factor(LogFactor::new(gamma, Q::zero(), Q::from_integer(1), Q::zero()))
    }

    pub fn factors(&self) -> &[LogFactor] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul_factor(&mut self, f: LogFactor) {
        let f = f.canonical();
        if f.is_trivial() {
            return;
        }
        match self.0.binary_search_by(|g| log_key_cmp(&g.log, &f.log)) {
            Ok(i) => {
                let g = &mut self.0[i];
                g.quad += f.quad;
                g.rate += f.rate;
                g.offset += f.offset;
                if g.is_trivial() {
                    self.0.remove(i);
                }
            }
            Err(i) => self.0.insert(i, f),
        }
    }

    pub fn mul(&self, other: &Exponent) -> Exponent {
        let mut out = self.clone();
        for f in &other.0 {
            out.mul_factor(f.clone());
        }
        out
    }

    /// Re-anchors the local variable: the result at `τ` equals `self` at `τ + d`.
    pub fn recenter(&self, d: Q) -> Exponent {
        if d.is_zero() {
            return self.clone();
        }
        let mut out = Exponent::one();
        for f in &self.0 {
            out.mul_factor(LogFactor {
                log: f.log,
                quad: f.quad,
                rate: f.rate + f.quad * d * 2,
                offset: f.offset + f.rate * d + f.quad * d * d,
            });
        }
        out
    }

    /// Collapses to `exp(A τ² + B τ + C)` and returns `(A, B, C)`.
    pub fn coefficients(&self) -> (Complex64, Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        self.0.iter().fold((zero, zero, zero), |(a, b, c), f| {
            (
                a + f.log * to_f64(f.quad),
                b + f.log * to_f64(f.rate),
                c + f.log * to_f64(f.offset),
            )
        })
    }

    pub fn eval(&self, tau: f64) -> Complex64 {
        if self.0.is_empty() {
            return Complex64::new(1.0, 0.0);
        }
        let s: Complex64 = self.0.iter().map(|f| f.exponent_at(tau)).sum();
        s.exp()
    }

    pub(crate) fn cmp_key(&self, other: &Exponent) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            let o = log_key_cmp(&a.log, &b.log)
                .then(a.quad.cmp(&b.quad))
                .then(a.rate.cmp(&b.rate))
                .then(a.offset.cmp(&b.offset));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}
