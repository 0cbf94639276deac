//! Spectrum classification and complex-plane grids.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::{default_eigenvector, disk_position, DiskPosition, EigenPair, Provenance};
use crate::error::{Error, Result};
use crate::grid::{to_f64, Q};
use crate::norms::{norm, DEFAULT_TOL};
use crate::operators::{apply, ShiftSpec, WeightKind};
use crate::piecewise::{PiecewiseFn, Segment, Space};
use crate::sample::random_function;

/// Environment variable capping the worker threads used for grids.
pub const THREADS_ENV: &str = "SHIFTCHAOS_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpectrumKind {
    Point,
    Continuous,
    Residual,
    Resolvent,
}

impl SpectrumKind {
    /// One-letter code used in grid exports.
    pub fn code(&self) -> &'static str {
        match self {
            SpectrumKind::Point => "P",
            SpectrumKind::Continuous => "C",
            SpectrumKind::Residual => "R",
            SpectrumKind::Resolvent => "ρ",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumClass {
    pub class: SpectrumKind,
    pub rule: &'static str,
    pub provenance: Provenance,
    /// Eigenvector witnessing a point-spectrum verdict.
    pub evidence: Option<EigenPair>,
}

/// The rule-based verdict without evidence.
pub fn classify_kind(spec: &ShiftSpec, lambda: Complex64) -> (SpectrumKind, &'static str) {
    match spec.kind() {
        WeightKind::Unbounded => (SpectrumKind::Point, "unbounded-weight: every λ is an eigenvalue"),
        WeightKind::Bounded => match disk_position(lambda, spec.w()) {
            DiskPosition::Inside => (SpectrumKind::Point, "bounded-weight: |λ| < |w| is an eigenvalue"),
            DiskPosition::Boundary => (SpectrumKind::Continuous, "bounded-weight: |λ| = |w| is continuous spectrum"),
            DiskPosition::Outside => (SpectrumKind::Resolvent, "bounded-weight: |λ| > |w| exceeds the operator norm"),
        },
    }
}

/// Classifies `λ`; point verdicts carry an eigenvector built from the
/// default kernel element or profile.
pub fn classify(spec: &ShiftSpec, lambda: Complex64) -> Result<SpectrumClass> {
    let (class, rule) = classify_kind(spec, lambda);
    let (evidence, provenance) = match class {
        SpectrumKind::Point => {
            let e = default_eigenvector(spec, lambda)?;
            let p = e.provenance;
            (Some(e), p)
        }
        _ => (None, Provenance::TheoremAsserted),
    };
    Ok(SpectrumClass {
        class,
        rule,
        provenance,
        evidence,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridCell {
    pub re: f64,
    pub im: f64,
    pub class: SpectrumKind,
}

/// Row-major grid: rows run over the imaginary axis, columns over the real
/// axis, both ascending.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumGrid {
    pub columns: usize,
    pub rows: usize,
    pub cells: Vec<GridCell>,
}

impl SpectrumGrid {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,class\n");
        for c in &self.cells {
            let _ = writeln!(out, "{},{},{}", c.re, c.im, c.class.code());
        }
        out
    }

    pub fn count(&self, kind: SpectrumKind) -> usize {
        self.cells.iter().filter(|c| c.class == kind).count()
    }
}

/// Worker count from the environment, if set to a positive integer.
pub fn thread_limit() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

fn axis(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    lo + (hi - lo) * i as f64 / (n - 1) as f64
}

/// Classifies the points of an evenly spaced grid including the corners.
pub fn spectrum_grid(
    spec: &ShiftSpec,
    re_range: (f64, f64),
    im_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<SpectrumGrid> {
    let (nx, ny) = resolution;
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidArgument("grid resolution must be at least 2 per axis".into()));
    }
    let ranges_ok = [re_range, im_range]
        .iter()
        .all(|&(lo, hi)| lo.is_finite() && hi.is_finite() && lo <= hi);
    if !ranges_ok {
        return Err(Error::InvalidArgument("grid ranges must be finite with lo ≤ hi".into()));
    }
    let cell = |idx: usize| {
        let (i, j) = (idx % nx, idx / nx);
        let (re, im) = (axis(re_range.0, re_range.1, nx, i), axis(im_range.0, im_range.1, ny, j));
        GridCell {
            re,
            im,
            class: classify_kind(spec, Complex64::new(re, im)).0,
        }
    };
    let run = || (0..nx * ny).into_par_iter().map(cell).collect::<Vec<_>>();
    let cells = match thread_limit() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok(SpectrumGrid {
        columns: nx,
        rows: ny,
        cells,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GelfandReport {
    pub samples: usize,
    pub bound: f64,
    pub max_ratio: f64,
    pub attaining: String,
    pub pass: bool,
}

/// Family attaining `‖T f‖ = |w| ‖f‖`: a unit box (or hat in `C_0`)
/// supported in `[a, a + 1]`.
pub fn attaining_function(spec: &ShiftSpec) -> Result<PiecewiseFn> {
    let a = spec.a();
    let one = Q::from_integer(1);
    match spec.space() {
        Space::Lp(_) => PiecewiseFn::indicator(a, a + one, spec.space()),
        Space::C0 => {
            let (zero, peak) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
            let mid = a + one / 2;
            PiecewiseFn::from_segments(
                vec![
                    Segment::linear(a, mid, zero, peak),
                    Segment::linear(mid, a + one, peak, zero),
                ],
                Space::C0,
            )
        }
    }
}

/// Samples random functions and checks `‖T f‖ ≤ |w| ‖f‖ (1 + 1e−10)`.
pub fn gelfand_bound_check(spec: &ShiftSpec, samples: usize, seed: u64) -> Result<GelfandReport> {
    if !spec.is_bounded() {
        return Err(Error::InvalidSpec("operator-norm check needs a bounded weight".into()));
    }
    let bound = spec.w().norm();
    let ratio = |f: &PiecewiseFn| -> Result<f64> {
        let nf = norm(f, spec.space(), DEFAULT_TOL)?;
        let nt = norm(&apply(spec, f)?, spec.space(), DEFAULT_TOL)?;
        Ok(nt.value / nf.value)
    };
    let mut max_ratio = ratio(&attaining_function(spec)?)?;
    let mut attaining = String::from("box on [a, a+1)");
    let units = (to_f64(spec.a()).ceil() as u32 + 2).max(3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..samples {
        let unit = spec.a() / rng.gen_range(1..=4);
        let f = random_function(&mut rng, spec.space(), unit, units);
        let r = ratio(&f)?;
        if r > max_ratio {
            max_ratio = r;
            attaining = format!("random sample {i}");
        }
    }
    Ok(GelfandReport {
        samples,
        bound,
        max_ratio,
        attaining,
        pass: max_ratio <= bound * (1.0 + 1e-10),
    })
}
