//! Positivity-preserving squeeze limiter.
//!
//! Nodal values in an element are contracted toward the element mean just
//! enough to remove negative values, which preserves the mean and the formal
//! order of accuracy. The element mean itself stays nonnegative under the
//! time-step restriction dt <= min(tau, dt_CFL); a negative mean therefore
//! signals a violated step constraint and is reported as an error.

use crate::error::{Error, Result};
use crate::fr::FrBasis;

/// Element mean via the basis mean weights (exact for degree <= p).
pub fn element_mean(nodal_values: &[f64], basis: &FrBasis) -> f64 {
    nodal_values
        .iter()
        .zip(&basis.mean_weights)
        .map(|(f, m)| m * f)
        .sum()
}

/// Squeeze the nodal values of one element toward their mean so the minimum
/// becomes nonnegative. Nonnegative inputs are returned unchanged; zero is an
/// admissible value, so no positive floor is applied.
pub fn squeeze(nodal_values: &mut [f64], basis: &FrBasis) -> Result<()> {
    squeeze_with_floor(nodal_values, basis, 0.0, 0)
}

/// Squeeze with an absolute magnitude floor on the negativity tolerance so
/// that elements at underflow levels next to populated ones cannot trigger
/// spurious mean-negativity errors. `element` only labels the error.
pub(crate) fn squeeze_with_floor(
    nodal_values: &mut [f64],
    basis: &FrBasis,
    abs_floor: f64,
    element: usize,
) -> Result<()> {
    let mut min = f64::INFINITY;
    let mut max_abs = 0.0f64;
    for &v in nodal_values.iter() {
        min = min.min(v);
        max_abs = max_abs.max(v.abs());
    }
    if min >= 0.0 {
        return Ok(());
    }
    let mean = element_mean(nodal_values, basis);
    if mean < -1e-12 * max_abs.max(abs_floor) {
        return Err(Error::MeanNegativity { element, mean });
    }
    let denom = mean - min;
    if denom < 1e-300 {
        return Ok(());
    }
    let beta = (mean / denom).abs().min(1.0);
    for v in nodal_values.iter_mut() {
        let squeezed = mean + beta * (*v - mean);
        // rounding can leave the minimum a few ulp below zero; clearing it
        // keeps repeated applications exact no-ops
        *v = if squeezed < 0.0 { 0.0 } else { squeezed };
    }
    Ok(())
}
