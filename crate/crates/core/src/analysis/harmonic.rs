use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fullsolver::EigenResult;
use crate::geometry::DiskConfig;

/// Mismatch of the harmonic form of the unit-circle condition for real
/// `lambda`: `u = (lambda - 1) u_0 + const` and
/// `du/dn = (lambda + 1) du_0/dn` with `u = Re phi`, `u_0 = Re phi_0`.
/// Normal derivatives come from `Re(t f'(t))`. The result is the largest
/// mismatch over `samples` points relative to the largest value involved.
pub fn harmonic_residual(eigen: &EigenResult, config: &DiskConfig, samples: usize) -> Result<f64> {
    if !eigen.is_real_lambda {
        return Err(Error::NonRealEigenvalue {
            lambda: eigen.lambda,
        });
    }
    let lambda = eigen.lambda.re;
    let pot = eigen.potentials(config);
    let mut shift = Vec::with_capacity(samples);
    let mut flux = 0.0f64;
    let mut scale = 0.0f64;
    for j in 0..samples {
        let t = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / samples as f64);
        let u = pot.phi(t)?.re;
        let u0 = pot.phi0(t)?.re;
        let du = (t * pot.phi_derivative(t)?).re;
        let du0 = (t * pot.phi0_derivative(t)?).re;
        shift.push(u - (lambda - 1.0) * u0);
        flux = flux.max((du - (lambda + 1.0) * du0).abs());
        scale = scale
            .max(u.abs())
            .max(u0.abs())
            .max(du.abs())
            .max(du0.abs());
    }
    let mean = shift.iter().sum::<f64>() / samples as f64;
    let level = shift.iter().map(|s| (s - mean).abs()).fold(0.0, f64::max);
    let worst = level.max(flux);
    Ok(if scale > 0.0 { worst / scale } else { worst })
}
