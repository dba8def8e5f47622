use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::DiskConfig;

/// Truncated Taylor expansions `psi_k(z) = sum_l beta_l^(k) ((z - a_k) / r_k)^l`,
/// `l = 0..=degree`, one per disk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaylorField {
    coefficients: Vec<Vec<Complex64>>,
}

impl TaylorField {
    pub fn zeros(disks: usize, degree: usize) -> Self {
        Self {
            coefficients: vec![vec![Complex64::new(0.0, 0.0); degree + 1]; disks],
        }
    }

    /// Every per-disk array must have the same nonzero length.
    pub fn from_coefficients(coefficients: Vec<Vec<Complex64>>) -> Result<Self> {
        let len = coefficients.first().map_or(0, Vec::len);
        if len == 0 {
            return Err(Error::Parameter("empty Taylor field".into()));
        }
        if let Some(bad) = coefficients.iter().find(|c| c.len() != len) {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: bad.len(),
            });
        }
        Ok(Self { coefficients })
    }

    /// Unit field: `beta_l^(k) = value`, every other coefficient zero.
    pub fn unit(disks: usize, degree: usize, k: usize, l: usize, value: Complex64) -> Self {
        let mut f = Self::zeros(disks, degree);
        f.coefficients[k][l] = value;
        f
    }

    pub fn disks(&self) -> usize {
        self.coefficients.len()
    }

    pub fn degree(&self) -> usize {
        self.coefficients[0].len() - 1
    }

    /// Number of complex unknowns, `n (L + 1)`.
    pub fn len(&self) -> usize {
        self.disks() * (self.degree() + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn disk(&self, k: usize) -> &[Complex64] {
        &self.coefficients[k]
    }

    pub fn coefficients(&self) -> &[Vec<Complex64>] {
        &self.coefficients
    }

    /// `(sum_k sum_l |beta_l^(k)|^2)^(1/2)`; the per-disk scaling makes the
    /// Hardy norm a plain coefficient norm.
    pub fn hardy_norm(&self) -> f64 {
        self.coefficients
            .iter()
            .flatten()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            coefficients: self
                .coefficients
                .iter()
                .map(|c| c.iter().map(|&b| b * s).collect())
                .collect(),
        }
    }

    /// Disk-major flattening `k (L + 1) + l`.
    pub fn to_vector(&self) -> Vec<Complex64> {
        self.coefficients.iter().flatten().copied().collect()
    }

    pub fn from_vector(disks: usize, v: &[Complex64]) -> Self {
        let per = v.len() / disks;
        Self {
            coefficients: v.chunks(per).map(<[Complex64]>::to_vec).collect(),
        }
    }

    /// Real layout `(Re beta ; Im beta)`.
    pub fn to_realified(&self) -> Vec<f64> {
        let v = self.to_vector();
        v.iter()
            .map(|z| z.re)
            .chain(v.iter().map(|z| z.im))
            .collect()
    }

    pub fn from_realified(disks: usize, x: &[f64]) -> Self {
        let n = x.len() / 2;
        let v: Vec<Complex64> = (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect();
        Self::from_vector(disks, &v)
    }

    /// Coefficients in the common-radius convention
    /// `psi_k = sum_l alpha_l ((z - a_k) / r_max)^l`, i.e. `alpha_l = beta_l nu_k^(-l/2)`.
    pub fn common_radius_coefficients(&self, config: &DiskConfig) -> Vec<Vec<Complex64>> {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let ratio = config.r_max() / config.disks()[k].radius;
                c.iter()
                    .enumerate()
                    .map(|(l, &b)| b * ratio.powi(l as i32))
                    .collect()
            })
            .collect()
    }

    /// `sum_l beta_l u^l`.
    pub fn eval_series(&self, k: usize, u: Complex64) -> Complex64 {
        horner(&self.coefficients[k], u)
    }

    /// `sum_l conj(beta_l) u^l`.
    pub fn eval_conj_series(&self, k: usize, u: Complex64) -> Complex64 {
        self.coefficients[k]
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &b| acc * u + b.conj())
    }

    /// `sum_l beta_l / (l + 1) u^(l + 1)`, the antiderivative series vanishing at 0.
    pub fn eval_integrated(&self, k: usize, u: Complex64) -> Complex64 {
        let c = &self.coefficients[k];
        c.iter()
            .enumerate()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (l, &b)| {
                acc * u + b / (l as f64 + 1.0)
            })
            * u
    }

    /// `sum_l conj(beta_l) / (l + 1) u^(l + 1)`.
    pub fn eval_conj_integrated(&self, k: usize, u: Complex64) -> Complex64 {
        let c = &self.coefficients[k];
        c.iter()
            .enumerate()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (l, &b)| {
                acc * u + b.conj() / (l as f64 + 1.0)
            })
            * u
    }
}

fn horner(c: &[Complex64], u: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &b| acc * u + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Disk;

    #[test]
    fn norms_and_layout() {
        let f = TaylorField::from_coefficients(vec![
            vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(f.hardy_norm(), 5.0);
        assert_eq!(f.degree(), 1);
        assert_eq!(f.len(), 4);
        let x = f.to_realified();
        assert_eq!(x, vec![3.0, 0.0, 0.0, 0.0, 0.0, 4.0, 0.0, 0.0]);
        assert_eq!(TaylorField::from_realified(2, &x), f);
        assert!(
            TaylorField::from_coefficients(vec![vec![Complex64::new(1.0, 0.0)], vec![]]).is_err()
        );
    }

    #[test]
    fn series_evaluations() {
        let f = TaylorField::from_coefficients(vec![vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(3.0, 0.0),
        ]])
        .unwrap();
        let u = Complex64::new(0.3, -0.2);
        assert!(
            (f.eval_series(0, u) - (1.0 + Complex64::new(0.0, 2.0) * u + 3.0 * u * u)).norm()
                < 1e-15
        );
        assert!(
            (f.eval_conj_series(0, u) - (1.0 - Complex64::new(0.0, 2.0) * u + 3.0 * u * u)).norm()
                < 1e-15
        );
        let integ = u + Complex64::new(0.0, 1.0) * u * u + u * u * u;
        assert!((f.eval_integrated(0, u) - integ).norm() < 1e-15);
    }

    #[test]
    fn common_radius_conversion() {
        let cfg =
            DiskConfig::new(vec![Disk::real(0.5, 0.1, 0.2), Disk::real(-0.5, 0.05, 0.2)]).unwrap();
        let f = TaylorField::from_coefficients(vec![vec![Complex64::new(1.0, 0.0); 3]; 2]).unwrap();
        let alpha = f.common_radius_coefficients(&cfg);
        assert_eq!(alpha[0][2], Complex64::new(1.0, 0.0));
        // nu = 1/4, so alpha_2 = beta_2 * nu^-1 = 4.
        assert!((alpha[1][2] - 4.0).norm() < 1e-14);
    }
}
