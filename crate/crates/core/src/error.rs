use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("step {0} is not commensurate with the rational breakpoint grid")]
    IncommensurateStep(f64),
    #[error("tails have different block structure and cannot be added")]
    IncompatibleTails,
    #[error("norm diverges: {0}")]
    DivergentNorm(String),
    #[error("tolerance {tol:e} not met (best error bound {achieved:e})")]
    ToleranceNotMet { tol: f64, achieved: f64 },
    #[error("function is not in the operator domain: {0}")]
    NotInDomain(String),
    #[error("function is not eventually zero")]
    NotEventuallyZero,
    #[error("continuity violated at t = {at} (jump {jump:e})")]
    ContinuityViolation { at: f64, jump: f64 },
    #[error("witness index m = {m} is below the admissible threshold {min}")]
    IndexTooSmall { m: i64, min: i64 },
    #[error("function is not annihilated by T^{0}")]
    NotInKernel(u32),
    #[error("|lambda| = {lambda_abs} is not below |w| = {w_abs}")]
    LambdaOutOfDisk { lambda_abs: f64, w_abs: f64 },
    #[error("profile does not satisfy x(a) = (lambda/w) x(0): mismatch {0:e}")]
    ProfileMismatch(f64),
    #[error("period {period} is below the support index {min}")]
    PeriodTooSmall { period: u32, min: u32 },
    #[error("invalid shift specification: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
