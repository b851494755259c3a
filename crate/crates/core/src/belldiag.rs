//! Closed-form reference curves for the Bell-diagonal ensemble.
//!
//! For a Bell-diagonal state with largest weight w >= 1/2 the concurrence is
//! C = 2w - 1, so w = (1 + C)/2 and the infinite-order Renyi entropy
//! R_inf = -ln w = -ln((1 + sqrt(C^2))/2) is an exact function of C^2.
//! Entangled Bell-diagonal states therefore show perfect entropy-
//! entanglement correlation at q = infinity, which makes this curve a
//! machine-precision oracle for the whole sampling pipeline. States with
//! w < 1/2 are separable (C = 0) and are outside the curve's domain.

use crate::{Error, Result};

/// One point of the analytic R_inf(C^2) curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellCurvePoint {
    pub c_squared: f64,
    pub r_infinity: f64,
}

/// R_inf for an entangled Bell-diagonal state of squared concurrence `c_squared`.
pub fn bell_r_infinity(c_squared: f64) -> Result<f64> {
    if !(c_squared > 0.0 && c_squared <= 1.0) {
        return Err(Error::OutOfRange(format!(
            "c_squared {c_squared} outside (0, 1]"
        )));
    }
    Ok(-((1.0 + c_squared.sqrt()) / 2.0).ln())
}

/// Evaluate the curve on a grid of C^2 values in (0, 1].
pub fn bell_r_infinity_curve(grid: &[f64]) -> Result<Vec<BellCurvePoint>> {
    grid.iter()
        .map(|&c2| {
            Ok(BellCurvePoint {
                c_squared: c2,
                r_infinity: bell_r_infinity(c2)?,
            })
        })
        .collect()
}

/// Uniform `n`-point grid on (0, 1] ending at 1.
pub fn default_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / n as f64).collect()
}
