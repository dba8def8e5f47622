use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::DiskConfig;
use crate::numerics::{dft_project, RealMatrix};
use crate::par;

use super::field::TaylorField;

/// Sample count and analyticity tolerance for the circle projections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projector {
    pub samples: usize,
    /// Largest admissible `|c_l|`, `l >= P/2`, relative to the input Hardy norm.
    pub defect_tol: f64,
}

impl Projector {
    pub const DEFAULT_DEFECT_TOL: f64 = 1e-11;

    /// Smallest power of two `>= 4 (L + 1)`.
    pub fn default_samples(degree: usize) -> usize {
        (4 * (degree + 1)).next_power_of_two()
    }

    pub fn for_degree(degree: usize) -> Self {
        Self {
            samples: Self::default_samples(degree),
            defect_tol: Self::DEFAULT_DEFECT_TOL,
        }
    }

    fn check(&self, degree: usize) -> Result<()> {
        if !self.samples.is_power_of_two() || self.samples < 4 * (degree + 1) {
            return Err(Error::Parameter(format!(
                "sample count {} must be a power of two >= 4 (L + 1) = {}",
                self.samples,
                4 * (degree + 1)
            )));
        }
        Ok(())
    }
}

/// Output of a projected operator application.
#[derive(Debug, Clone)]
pub struct Applied {
    pub field: TaylorField,
    /// Largest discarded coefficient `|c_l|`, `L < l < P/2`.
    pub tail: f64,
    /// Largest aliased coefficient `|c_l|`, `l >= P/2`.
    pub defect: f64,
}

fn project<F>(
    config: &DiskConfig,
    degree: usize,
    proj: &Projector,
    scale: f64,
    eval: F,
) -> Result<Applied>
where
    F: Fn(usize, Complex64) -> Complex64,
{
    proj.check(degree)?;
    let p = proj.samples;
    let mut coefficients = Vec::with_capacity(config.len());
    let mut tail = 0.0f64;
    let mut defect = 0.0f64;
    for (k, disk) in config.disks().iter().enumerate() {
        let samples: Vec<Complex64> = (0..p)
            .map(|j| {
                let z = disk.center
                    + Complex64::from_polar(disk.radius, 2.0 * PI * j as f64 / p as f64);
                eval(k, z)
            })
            .collect();
        let pr = dft_project(&samples);
        tail = tail.max(pr.tail(degree + 1));
        defect = defect.max(pr.defect);
        coefficients.push(pr.coefficients[..=degree].to_vec());
    }
    if !defect.is_finite() {
        return Err(Error::NonFinite);
    }
    if defect > proj.defect_tol * scale {
        return Err(Error::AnalyticityDefect {
            defect,
            tolerance: proj.defect_tol * scale,
            samples: p,
        });
    }
    Ok(Applied {
        field: TaylorField::from_coefficients(coefficients)?,
        tail,
        defect,
    })
}

fn check_shape(field: &TaylorField, config: &DiskConfig) -> Result<()> {
    if field.disks() != config.len() {
        return Err(Error::DimensionMismatch {
            expected: config.len(),
            got: field.disks(),
        });
    }
    Ok(())
}

/// Reflection operator: on circle `k`,
/// `sum_{m != k} rho_m (r_m / (z - a_m))^2 conj(psi_m(z*_(m)))`.
pub fn apply_a(field: &TaylorField, config: &DiskConfig, proj: &Projector) -> Result<Applied> {
    check_shape(field, config)?;
    let disks = config.disks();
    project(config, field.degree(), proj, field.hardy_norm(), |k, z| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, d) in disks.iter().enumerate() {
            if m == k || d.contrast == Complex64::new(0.0, 0.0) {
                continue;
            }
            let s = d.radius / (z - d.center);
            acc += d.contrast * s * s * field.eval_conj_series(m, s);
        }
        acc
    })
}

/// Unit-circle operator: on circle `k`,
/// `sum_m conj(rho_m) (r_m / (1 - conj(a_m) z))^2 psi_m(w_m(z))`.
pub fn apply_b(field: &TaylorField, config: &DiskConfig, proj: &Projector) -> Result<Applied> {
    check_shape(field, config)?;
    let disks = config.disks();
    project(config, field.degree(), proj, field.hardy_norm(), |_, z| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, d) in disks.iter().enumerate() {
            if d.contrast == Complex64::new(0.0, 0.0) {
                continue;
            }
            let q = d.radius / (1.0 - d.center.conj() * z);
            let t = q * z;
            debug_assert!(t.norm() <= 1.0 + 1e-12, "w_m(z) left disk {m}");
            acc += d.contrast.conj() * q * q * field.eval_series(m, t);
        }
        acc
    })
}

/// Realified `A` and `B` on the layout `(Re beta ; Im beta)`.
#[derive(Debug, Clone)]
pub struct RealifiedOperator {
    pub a_real: RealMatrix,
    pub b_real: RealMatrix,
    pub degree: usize,
    pub samples: usize,
    pub max_tail: f64,
    pub max_defect: f64,
}

impl RealifiedOperator {
    /// Complex unknowns `N`; the matrices are `2N x 2N`.
    pub fn complex_dim(&self) -> usize {
        self.a_real.rows() / 2
    }

    /// Realified multiplication by `i`: `[[0, -I], [I, 0]]`.
    pub fn j_matrix(dim: usize) -> RealMatrix {
        RealMatrix::from_fn(2 * dim, 2 * dim, |i, j| {
            if i >= dim && j + dim == i {
                1.0
            } else if i < dim && j == i + dim {
                -1.0
            } else {
                0.0
            }
        })
    }
}

/// Assembles the realified operators column by column from unit fields.
pub fn assemble(
    config: &DiskConfig,
    degree: usize,
    proj: &Projector,
    parallel: bool,
) -> Result<RealifiedOperator> {
    proj.check(degree)?;
    let n = config.len();
    let dim = n * (degree + 1);
    let columns = par::map_indexed(2 * dim, parallel, |j| -> Result<(Applied, Applied)> {
        let idx = j % dim;
        let value = if j < dim {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        let unit = TaylorField::unit(n, degree, idx / (degree + 1), idx % (degree + 1), value);
        Ok((apply_a(&unit, config, proj)?, apply_b(&unit, config, proj)?))
    });
    let mut a_cols = Vec::with_capacity(2 * dim);
    let mut b_cols = Vec::with_capacity(2 * dim);
    let mut max_tail = 0.0f64;
    let mut max_defect = 0.0f64;
    for col in columns {
        let (a, b) = col?;
        max_tail = max_tail.max(a.tail).max(b.tail);
        max_defect = max_defect.max(a.defect).max(b.defect);
        a_cols.push(a.field.to_realified());
        b_cols.push(b.field.to_realified());
    }
    Ok(RealifiedOperator {
        a_real: RealMatrix::from_columns(&a_cols),
        b_real: RealMatrix::from_columns(&b_cols),
        degree,
        samples: proj.samples,
        max_tail,
        max_defect,
    })
}

/// Assembles at the default sample count, doubling it while the
/// analyticity defect is too large, up to `max_samples`.
pub fn assemble_adaptive(
    config: &DiskConfig,
    degree: usize,
    samples: Option<usize>,
    defect_tol: f64,
    max_samples: usize,
    parallel: bool,
) -> Result<RealifiedOperator> {
    let mut proj = Projector {
        samples: samples.unwrap_or_else(|| Projector::default_samples(degree)),
        defect_tol,
    };
    loop {
        match assemble(config, degree, &proj, parallel) {
            Err(Error::AnalyticityDefect { .. }) if proj.samples * 2 <= max_samples => {
                proj.samples *= 2;
            }
            other => return other,
        }
    }
}

/// Serializable summary of an assembly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssemblyStats {
    pub degree: usize,
    pub samples: usize,
    pub max_tail: f64,
    pub max_defect: f64,
}

impl From<&RealifiedOperator> for AssemblyStats {
    fn from(op: &RealifiedOperator) -> Self {
        Self {
            degree: op.degree,
            samples: op.samples,
            max_tail: op.max_tail,
            max_defect: op.max_defect,
        }
    }
}
