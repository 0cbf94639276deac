//! `shiftchaos` command-line front end.

mod args;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};
use shiftchaos::constructions::{
    default_eigenvector, default_kernel, eigenvector_bounded_c0, eigenvector_bounded_lp, eigenvector_unbounded,
    periodic_point_bounded, periodic_point_unbounded, transitivity_witness,
};
use shiftchaos::spectrum::spectrum_grid;
use shiftchaos::verify::run_suite;
use shiftchaos::{PiecewiseFn, Space, WeightKind};

use args::{parse_complex, parse_region, parse_suite, steps_for, Cli, Command, Settings, WitnessKind};

const DEFAULT_RESOLUTION: usize = 101;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] shiftchaos::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_fn(path: &PathBuf, space: Space) -> Result<PiecewiseFn, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let f: PiecewiseFn = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad function file {}: {e}", path.display())))?;
    Ok(f.with_space(space))
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Usage(e.to_string()))
}

fn verify(s: &Settings, suite: &str) -> Result<bool, CliError> {
    let suite = parse_suite(suite)?;
    let reports = run_suite(&s.spec, suite, s.seed, s.tol);
    let mut text = String::new();
    for r in &reports {
        text.push_str(&serde_json::to_string(r).map_err(|e| CliError::Usage(e.to_string()))?);
        text.push('\n');
    }
    emit(s.out.as_deref(), &text)?;
    Ok(reports.iter().all(|r| r.pass))
}

fn witness(s: &Settings, kind: &WitnessKind) -> Result<bool, CliError> {
    let spec = &s.spec;
    let kernel = |path: &Option<PathBuf>, n: u32| -> Result<PiecewiseFn, CliError> {
        match path {
            Some(p) => read_fn(p, spec.space()),
            None => Ok(default_kernel(spec, n)?),
        }
    };
    let (name, params, body, pass) = match kind {
        WitnessKind::Periodic { period, kernel: path } => {
            let x = kernel(path, *period)?;
            let p = match spec.kind() {
                WeightKind::Bounded => periodic_point_bounded(spec, &x, *period)?,
                WeightKind::Unbounded => periodic_point_unbounded(spec, &x, *period, s.tol)?,
            };
            let pass = p.residual.value <= 2.0 * s.tol;
            ("periodic", json!({ "N": period }), to_value(&p)?, pass)
        }
        WitnessKind::Eigen { lambda, kernel: path } => {
            let lambda = parse_complex(lambda)?;
            let e = match (spec.kind(), spec.space(), path) {
                (WeightKind::Unbounded, _, _) => eigenvector_unbounded(spec, lambda, &kernel(path, 1)?, s.tol)?,
                (WeightKind::Bounded, _, None) => default_eigenvector(spec, lambda)?,
                (WeightKind::Bounded, Space::C0, Some(p)) => {
                    eigenvector_bounded_c0(spec, lambda, Some(&read_fn(p, Space::C0)?))?
                }
                (WeightKind::Bounded, Space::Lp(_), Some(p)) => {
                    eigenvector_bounded_lp(spec, lambda, &read_fn(p, spec.space())?)?
                }
            };
            let pass = e.residual.value <= 2.0 * s.tol;
            ("eigen", json!({ "lambda": [lambda.re, lambda.im] }), to_value(&e)?, pass)
        }
        WitnessKind::Transitivity { eps, x, y } => {
            let xf = kernel(x, 1)?;
            let yf = kernel(y, 1)?;
            let w = transitivity_witness(spec, &xf, &yf, *eps)?;
            let pass = w.distance.value < *eps && w.exact_image;
            ("transitivity", json!({ "eps": eps }), to_value(&w)?, pass)
        }
    };
    let doc = json!({
        "witness": name,
        "spec": to_value(spec)?,
        "params": params,
        "result": body,
    });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Usage(e.to_string()))?;
    text.push('\n');
    emit(s.out.as_deref(), &text)?;
    Ok(pass)
}

fn spectrum_map(s: &Settings, region: &str, resolution: Option<usize>, step: Option<f64>) -> Result<bool, CliError> {
    let (re, im) = parse_region(region)?;
    let (nx, ny) = match (resolution, step) {
        (Some(n), _) => (n, n),
        (None, Some(h)) => (steps_for(re, h)?, steps_for(im, h)?),
        (None, None) => (DEFAULT_RESOLUTION, DEFAULT_RESOLUTION),
    };
    if nx < 2 || ny < 2 {
        return Err(CliError::Usage("resolution must be at least 2 per axis".into()));
    }
    let grid = spectrum_grid(&s.spec, re, im, (nx, ny))?;
    emit(s.out.as_deref(), &grid.to_csv())?;
    Ok(true)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let settings = cli.common.resolve()?;
    match &cli.command {
        Command::Verify { suite } => verify(&settings, suite),
        Command::Witness { kind } => witness(&settings, kind),
        Command::SpectrumMap { region, resolution, step } => spectrum_map(&settings, region, *resolution, *step),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
