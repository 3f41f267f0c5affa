//! Composite Simpson rule on a uniform grid.

use crate::{Error, Result};

/// Smallest accepted panel count for the loop integrals.
pub const MIN_STEPS: usize = 64;

/// Default panel count for Berry-phase integrals.
pub const DEFAULT_STEPS: usize = 4096;

/// Integrates `f` over `[a, b]` with `n` subintervals (`n` even).
pub fn simpson<F>(mut f: F, a: f64, b: f64, n: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Domain("Simpson rule needs an even, nonzero step count"));
    }
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for k in 1..n {
        let y = f(a + k as f64 * h)?;
        if k % 2 == 1 {
            odd += y;
        } else {
            even += y;
        }
    }
    Ok(h / 3.0 * (f(a)? + f(b)? + 4.0 * odd + 2.0 * even))
}

pub(crate) fn check_steps(n: usize) -> Result<()> {
    if n < MIN_STEPS {
        return Err(Error::Resolution {
            what: "quadrature step count",
            got: n as f64,
            limit: MIN_STEPS as f64,
        });
    }
    if !n.is_multiple_of(2) {
        return Err(Error::Domain("quadrature step count must be even"));
    }
    Ok(())
}
