use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::DiskConfig;

use super::field::TaylorField;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative slack admitted when evaluating on the closure of a domain.
const CLOSURE_SLACK: f64 = 1e-12;

/// Integration constants `c_k` with `phi_k = c_k + phi~_k`, `phi~_k(a_k) = 0`.
pub fn recover_constants(
    field: &TaylorField,
    lambda: Complex64,
    config: &DiskConfig,
) -> Result<Vec<Complex64>> {
    if lambda == ZERO {
        return Err(Error::ZeroEigenvalue);
    }
    let pot = Potentials {
        config,
        field,
        lambda,
        constants: &[],
    };
    Ok(config
        .disks()
        .iter()
        .enumerate()
        .map(|(k, dk)| {
            let mut rhs = ZERO;
            for (m, dm) in config.disks().iter().enumerate() {
                if m != k {
                    rhs -= dm.contrast * pot.reflected(m, dk.center);
                }
            }
            rhs += pot.unit_side_sum(dk.center) / lambda;
            // c - rho conj(c) = R  has the solution  c = (R + rho conj(R)) / (1 - |rho|^2).
            let rho = dk.contrast;
            (rhs + rho * rhs.conj()) / (1.0 - rho.norm_sqr())
        })
        .collect())
}

/// Every potential of one eigenpair, evaluated in closed form from the
/// antiderivative series.
#[derive(Debug, Clone, Copy)]
pub struct Potentials<'a> {
    pub config: &'a DiskConfig,
    pub field: &'a TaylorField,
    pub lambda: Complex64,
    pub constants: &'a [Complex64],
}

impl<'a> Potentials<'a> {
    /// `psi_k(z) = phi_k'(z)`.
    pub fn psi(&self, k: usize, z: Complex64) -> Complex64 {
        let d = &self.config.disks()[k];
        self.field.eval_series(k, (z - d.center) / d.radius)
    }

    /// `phi~_k(z)`, the antiderivative of `psi_k` vanishing at `a_k`.
    pub fn phi_tilde(&self, k: usize, z: Complex64) -> Complex64 {
        let d = &self.config.disks()[k];
        d.radius * self.field.eval_integrated(k, (z - d.center) / d.radius)
    }

    /// `phi_k(z) = c_k + phi~_k(z)`.
    pub fn phi_k(&self, k: usize, z: Complex64) -> Complex64 {
        self.constants.get(k).copied().unwrap_or(ZERO) + self.phi_tilde(k, z)
    }

    /// `conj(phi~_m(z*_(m)))`, analytic outside disk `m`.
    pub fn reflected(&self, m: usize, z: Complex64) -> Complex64 {
        let d = &self.config.disks()[m];
        let s = d.radius / (z - d.center);
        d.radius * self.field.eval_conj_integrated(m, s)
    }

    /// Derivative of [`Self::reflected`] in `z`.
    pub fn reflected_derivative(&self, m: usize, z: Complex64) -> Complex64 {
        let d = &self.config.disks()[m];
        let s = d.radius / (z - d.center);
        -s * s * self.field.eval_conj_series(m, s)
    }

    fn exterior_sum(&self, z: Complex64) -> Complex64 {
        self.config
            .disks()
            .iter()
            .enumerate()
            .map(|(m, d)| d.contrast * self.reflected(m, z))
            .sum()
    }

    /// `sum_m conj(rho_m) phi~_m(w_m(z))`.
    fn unit_side_sum(&self, z: Complex64) -> Complex64 {
        self.config
            .disks()
            .iter()
            .enumerate()
            .map(|(m, d)| {
                let t = d.radius * z / (1.0 - d.center.conj() * z);
                d.contrast.conj() * d.radius * self.field.eval_integrated(m, t)
            })
            .sum()
    }

    fn unit_side_sum_derivative(&self, z: Complex64) -> Complex64 {
        self.config
            .disks()
            .iter()
            .enumerate()
            .map(|(m, d)| {
                let q = d.radius / (1.0 - d.center.conj() * z);
                d.contrast.conj() * q * q * self.field.eval_series(m, q * z)
            })
            .sum()
    }

    /// `phi_0(z)` for `|z| >= 1`.
    pub fn phi0(&self, z: Complex64) -> Result<Complex64> {
        self.check_exterior(z)?;
        Ok(-self.exterior_sum(z) / self.lambda.conj())
    }

    /// `phi_0'(z)` for `|z| >= 1`.
    pub fn phi0_derivative(&self, z: Complex64) -> Result<Complex64> {
        self.check_exterior(z)?;
        let s: Complex64 = self
            .config
            .disks()
            .iter()
            .enumerate()
            .map(|(m, d)| d.contrast * self.reflected_derivative(m, z))
            .sum();
        Ok(-s / self.lambda.conj())
    }

    /// Coating map `omega(z) = conj(phi_0(1 / conj(z)))` on the closed unit
    /// disk, with `omega(0) = 0`.
    pub fn omega(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() > 1.0 + CLOSURE_SLACK {
            return Err(Error::Domain {
                what: "coating map needs |z| <= 1",
                z,
            });
        }
        Ok(-self.unit_side_sum(z) / self.lambda)
    }

    pub fn omega_derivative(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() > 1.0 + CLOSURE_SLACK {
            return Err(Error::Domain {
                what: "coating map needs |z| <= 1",
                z,
            });
        }
        Ok(-self.unit_side_sum_derivative(z) / self.lambda)
    }

    /// `phi(z)` on the closure of the perforated disk.
    pub fn phi(&self, z: Complex64) -> Result<Complex64> {
        self.check_interior(z)?;
        Ok(-self.exterior_sum(z) + self.unit_side_sum(z) / self.lambda)
    }

    pub fn phi_derivative(&self, z: Complex64) -> Result<Complex64> {
        self.check_interior(z)?;
        let s: Complex64 = self
            .config
            .disks()
            .iter()
            .enumerate()
            .map(|(m, d)| d.contrast * self.reflected_derivative(m, z))
            .sum();
        Ok(-s + self.unit_side_sum_derivative(z) / self.lambda)
    }

    fn check_exterior(&self, z: Complex64) -> Result<()> {
        if z.norm() < 1.0 - CLOSURE_SLACK {
            return Err(Error::Domain {
                what: "exterior potential needs |z| >= 1",
                z,
            });
        }
        Ok(())
    }

    fn check_interior(&self, z: Complex64) -> Result<()> {
        if z.norm() > 1.0 + CLOSURE_SLACK {
            return Err(Error::Domain {
                what: "interior potential needs |z| <= 1",
                z,
            });
        }
        for d in self.config.disks() {
            if (z - d.center).norm() < d.radius * (1.0 - CLOSURE_SLACK) {
                return Err(Error::Domain {
                    what: "interior potential is undefined inside an inclusion",
                    z,
                });
            }
        }
        Ok(())
    }

    /// Left minus right side of the undifferentiated system at `z` in disk `k`.
    pub fn integrated_mismatch(&self, k: usize, z: Complex64) -> Complex64 {
        let mut rhs = ZERO;
        for (m, d) in self.config.disks().iter().enumerate() {
            if m != k {
                rhs -= d.contrast * self.reflected(m, z);
            }
        }
        let ck = self.constants.get(k).copied().unwrap_or(ZERO);
        rhs += self.config.disks()[k].contrast * ck.conj();
        rhs += self.unit_side_sum(z) / self.lambda;
        self.phi_k(k, z) - rhs
    }

    /// Largest mismatch of the two transmission conditions at `samples`
    /// points per contour, relative to the largest potential value seen.
    pub fn boundary_residual(&self, samples: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for (k, d) in self.config.disks().iter().enumerate() {
            for j in 0..samples {
                let t = d.boundary_point(2.0 * PI * j as f64 / samples as f64);
                let inner = self.phi_k(k, t);
                let outer = self.phi(t)?;
                worst = worst.max((outer - (inner - d.contrast * inner.conj())).norm());
                scale = scale.max(inner.norm()).max(outer.norm());
            }
        }
        for j in 0..samples {
            let t = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / samples as f64);
            let inner = self.phi(t)?;
            let outer = self.phi0(t)?;
            worst = worst.max((inner - (self.lambda.conj() * outer - outer.conj())).norm());
            scale = scale.max(inner.norm()).max(outer.norm());
        }
        Ok(if scale > 0.0 { worst / scale } else { worst })
    }
}
