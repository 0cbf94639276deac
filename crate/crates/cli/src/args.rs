//! Flag parsing and config-file merging.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use shiftchaos::grid;
use shiftchaos::verify::Suite;
use shiftchaos::{ShiftSpec, Space, WeightKind};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "shiftchaos", version, about = "Weighted backward shifts: verification suites, witnesses and spectrum maps")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// JSON config with any of space, kind, w, a, tol, seed; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// lp:<p> or c0.
    #[arg(long, global = true)]
    pub space: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub kind: Option<KindArg>,
    /// Weight as <re>[+<im>i].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub w: Option<String>,
    /// Step as an integer or k/q.
    #[arg(long, global = true)]
    pub a: Option<String>,
    /// Relative residual tolerance for constructions.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Bounded,
    Unbounded,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run verification suites and print one JSON report per line.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Construct a witness and print it as JSON.
    Witness {
        #[command(subcommand)]
        kind: WitnessKind,
    },
    /// Classify a grid of eigenvalue candidates and write CSV.
    SpectrumMap {
        /// re_min,re_max,im_min,im_max
        #[arg(long, default_value = "-3,3,-3,3", allow_hyphen_values = true)]
        region: String,
        /// Points per axis.
        #[arg(long, conflicts_with = "step")]
        resolution: Option<usize>,
        /// Grid spacing; overrides the default resolution.
        #[arg(long)]
        step: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum WitnessKind {
    /// Periodic point built from a kernel element of T^N.
    Periodic {
        #[arg(long = "N", alias = "n", default_value_t = 1)]
        period: u32,
        /// JSON function file for the kernel element; default profile otherwise.
        #[arg(long)]
        kernel: Option<PathBuf>,
    },
    /// Eigenvector for the given eigenvalue.
    Eigen {
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        lambda: String,
        /// JSON function file for the kernel element or profile.
        #[arg(long)]
        kernel: Option<PathBuf>,
    },
    /// Pair (n, z) with z close to x and T^n z = y.
    Transitivity {
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        #[arg(long)]
        x: Option<PathBuf>,
        #[arg(long)]
        y: Option<PathBuf>,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    space: Option<String>,
    kind: Option<KindArg>,
    w: Option<WeightValue>,
    a: Option<String>,
    tol: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum WeightValue {
    Pair([f64; 2]),
    Real(f64),
    Text(String),
}

/// Resolved settings.
#[derive(Debug)]
pub struct Settings {
    pub spec: ShiftSpec,
    pub tol: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_TOL: f64 = 1e-9;

/// Parses `<re>`, `<im>i`, or `<re>±<im>i`.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("not a complex number: {s:?}"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(i, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .last();
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn read_config(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

impl Common {
    pub fn resolve(&self) -> Result<Settings, CliError> {
        let cfg = match &self.config {
            Some(p) => read_config(p)?,
            None => Config::default(),
        };
        let space: Space = self
            .space
            .clone()
            .or(cfg.space)
            .unwrap_or_else(|| "lp:1".into())
            .parse()
            .map_err(|e: shiftchaos::Error| CliError::Usage(e.to_string()))?;
        let kind = match self.kind.or(cfg.kind).unwrap_or(KindArg::Bounded) {
            KindArg::Bounded => WeightKind::Bounded,
            KindArg::Unbounded => WeightKind::Unbounded,
        };
        let w = match (&self.w, cfg.w) {
            (Some(s), _) => parse_complex(s)?,
            (None, Some(WeightValue::Pair([re, im]))) => Complex64::new(re, im),
            (None, Some(WeightValue::Real(re))) => Complex64::new(re, 0.0),
            (None, Some(WeightValue::Text(s))) => parse_complex(&s)?,
            (None, None) => Complex64::new(2.0, 0.0),
        };
        let a = grid::parse(&self.a.clone().or(cfg.a).unwrap_or_else(|| "1".into()))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let spec = ShiftSpec::new(space, kind, w, a).map_err(|e| CliError::Usage(e.to_string()))?;
        let tol = self.tol.or(cfg.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        Ok(Settings {
            spec,
            tol,
            seed: self.seed.or(cfg.seed).unwrap_or(0),
            out: self.out.clone(),
        })
    }
}

pub fn parse_suite(s: &str) -> Result<Suite, CliError> {
    s.parse().map_err(|e: shiftchaos::Error| CliError::Usage(e.to_string()))
}

/// `(re_range, im_range)` from `re_min,re_max,im_min,im_max`.
pub fn parse_region(s: &str) -> Result<((f64, f64), (f64, f64)), CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad region {s:?}")))?;
    match v.as_slice() {
        &[a, b, c, d] if a <= b && c <= d => Ok(((a, b), (c, d))),
        _ => Err(CliError::Usage(format!("region needs re_min,re_max,im_min,im_max in order, got {s:?}"))),
    }
}

/// Points per axis for a given spacing.
pub fn steps_for(range: (f64, f64), step: f64) -> Result<usize, CliError> {
    if !(step > 0.0) {
        return Err(CliError::Usage("--step must be positive".into()));
    }
    Ok(((range.1 - range.0) / step).round() as usize + 1)
}
