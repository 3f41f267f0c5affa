use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the physics routines.
///
/// The variants are coarse on purpose so a front end can map them onto exit
/// codes: bad arguments, singular geometry, and insufficient resolution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("singularity: {0}")]
    Singularity(&'static str),
    #[error("insufficient resolution: {what} (got {got}, limit {limit})")]
    Resolution {
        what: &'static str,
        got: f64,
        limit: f64,
    },
    #[error("relative phase unobservable: coherence {0:.3e} below threshold")]
    Unobservable(f64),
    #[error("noise draw degenerate after {0} attempts")]
    DegenerateDraw(u32),
}

impl Error {
    pub(crate) fn check_finite(value: f64, what: &'static str) -> Result<f64> {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Domain(what))
        }
    }
}
