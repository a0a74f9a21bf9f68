use thiserror::Error;

/// Failure modes shared by every evaluation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input in {0}")]
    NonFinite(&'static str),
    #[error("dimension n = {0} is not supported (need n >= 2)")]
    Dimension(usize),
    #[error("point outside the chart domain (1 + c|x|^2/4 = {factor})")]
    ChartDomain { factor: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("profile not admissible at t = {t}: {reason}")]
    Inadmissible { t: f64, reason: &'static str },
    #[error("singular profile at t = {t}: {reason}")]
    Singular { t: f64, reason: &'static str },
    #[error("t = {t} lies outside the admissible interval [0, {t_max})")]
    OutsideTube { t: f64, t_max: f64 },
    #[error("finite-difference step {step} is not usable here: {reason}")]
    Step { step: f64, reason: &'static str },
    #[error("expanded connection form is undefined here (|v| or |w| below threshold); use the generic form")]
    UseGeneric,
    #[error("no admissible sample points")]
    EmptySample,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_finite(xs: &[f64], what: &'static str) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
