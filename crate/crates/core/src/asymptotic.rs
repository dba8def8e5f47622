//! Leading-order spectrum for small inclusions: `lambda ~ r_max^2 mu` where
//! `mu` runs over the eigenvalues of the `n x n` matrix `F`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::DiskConfig;
use crate::numerics::{eig_complex_general, eig_hermitian, ComplexMatrix};

/// Iteration matrix with `matrix[(k, m)] = conj(rho_m) nu_m / (1 - conj(a_m) a_k)^2`,
/// so that `mu v = matrix v` in row-times-column convention.
#[derive(Debug, Clone)]
pub struct SpectralMatrixF {
    pub matrix: ComplexMatrix,
    pub is_hermitian: bool,
}

pub fn build_f(config: &DiskConfig) -> SpectralMatrixF {
    let disks = config.disks();
    let n = disks.len();
    let matrix = ComplexMatrix::from_fn(n, n, |k, m| {
        let den = 1.0 - disks[m].center.conj() * disks[k].center;
        disks[m].contrast.conj() * config.nu(m) / (den * den)
    });
    let is_hermitian =
        (&matrix - &matrix.adjoint()).max_abs() <= 1e-13 * matrix.max_abs().max(f64::MIN_POSITIVE);
    SpectralMatrixF {
        matrix,
        is_hermitian,
    }
}

/// One root `mu` of `det(mu I - F) = 0` with its eigenvector.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticEigenpair {
    /// 1-based position in the ordering by nonincreasing `|mu|`.
    pub order: usize,
    pub mu: Complex64,
    /// Leading Taylor coefficients `alpha_0^(k)`; unit Euclidean norm, first
    /// nonzero component positive real.
    pub v: Vec<Complex64>,
    /// `r_max^2 mu`.
    pub lambda_estimate: Complex64,
}

/// All `n` eigenpairs of `F`, sorted by nonincreasing `|mu|`.
///
/// Repeated eigenvalues come back with an orthonormal (but not canonical)
/// basis of the eigenspace.
pub fn leading_spectrum(config: &DiskConfig) -> Result<Vec<AsymptoticEigenpair>> {
    let f = build_f(config);
    let dec = if f.is_hermitian {
        eig_hermitian(&f.matrix)?
    } else {
        eig_complex_general(&f.matrix)?
    };
    let mut vectors = dec.eigenvectors;
    orthonormalize_clusters(&dec.eigenvalues, &mut vectors, f.matrix.max_abs());
    let r2 = config.r_max() * config.r_max();
    Ok(dec
        .eigenvalues
        .into_iter()
        .zip(vectors)
        .enumerate()
        .map(|(i, (mu, mut v))| {
            let mu = if f.is_hermitian {
                Complex64::new(mu.re, 0.0)
            } else {
                mu
            };
            normalize_first_positive(&mut v);
            AsymptoticEigenpair {
                order: i + 1,
                mu,
                v,
                lambda_estimate: mu * r2,
            }
        })
        .collect())
}

/// Gram-Schmidt within groups of numerically equal eigenvalues.
fn orthonormalize_clusters(values: &[Complex64], vectors: &mut [Vec<Complex64>], scale: f64) {
    let tol = 1e-10 * scale.max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && (values[end] - values[start]).norm() <= tol {
            end += 1;
        }
        for i in start..end {
            for j in start..i {
                let (head, tail) = vectors.split_at_mut(i);
                let q = &head[j];
                let v = &mut tail[0];
                let dot: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= dot * qi;
                }
            }
            let norm = vectors[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 {
                vectors[i].iter_mut().for_each(|z| *z /= norm);
            }
        }
        start = end;
    }
}

fn normalize_first_positive(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .find(|z| z.norm() > 1e-10 * big)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
}

/// Leading-order exterior potential
/// `phi_0(z) = -r^2 sum_m rho_m nu_m conj(v_m) / (z - a_m)` for `|z| >= 1`.
#[derive(Debug, Clone)]
pub struct LeadingPhi0 {
    centers: Vec<Complex64>,
    /// `-rho_m r_m^2 conj(v_m)`.
    weights: Vec<Complex64>,
}

pub fn leading_phi0(pair: &AsymptoticEigenpair, config: &DiskConfig) -> LeadingPhi0 {
    let r2 = config.r_max() * config.r_max();
    let disks = config.disks();
    LeadingPhi0 {
        centers: disks.iter().map(|d| d.center).collect(),
        weights: disks
            .iter()
            .zip(&pair.v)
            .enumerate()
            .map(|(m, (d, v))| -r2 * d.contrast * config.nu(m) * v.conj())
            .collect(),
    }
}

impl LeadingPhi0 {
    /// Evaluates at `|z| >= 1`; vanishes at infinity.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() < 1.0 {
            return Err(Error::Domain {
                what: "exterior potential",
                z,
            });
        }
        Ok(self
            .centers
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| w / (z - a))
            .sum())
    }

    /// `omega(z) = conj(phi_0(1 / conj z))` on the closed unit disk, with `omega(0) = 0`.
    pub fn omega(&self, z: Complex64) -> Complex64 {
        self.centers
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| w.conj() * z / (1.0 - a.conj() * z))
            .sum()
    }
}

/// First-order Taylor coefficients `alpha_1^(k)` of the eigenfield induced by a
/// leading eigenpair, with `lambda = r_max^2 mu`.
pub fn first_order_alpha1(
    pair: &AsymptoticEigenpair,
    config: &DiskConfig,
) -> Result<Vec<Complex64>> {
    let f_scale = build_f(config).matrix.max_abs();
    if pair.mu.norm() == 0.0 || pair.mu.norm() <= f64::EPSILON * f_scale {
        return Err(Error::ZeroEigenvalue);
    }
    let r = config.r_max();
    let r3 = r * r * r;
    let lambda = r * r * pair.mu;
    let disks = config.disks();
    let alpha0 = &pair.v;
    Ok((0..disks.len())
        .map(|k| {
            let ak = disks[k].center;
            let mut reflect = Complex64::new(0.0, 0.0);
            let mut image = Complex64::new(0.0, 0.0);
            for (m, dm) in disks.iter().enumerate() {
                let num = config.nu(m);
                if m != k {
                    let d = ak - dm.center;
                    reflect += dm.contrast * num * alpha0[m].conj() / (d * d * d);
                }
                let den = 1.0 - dm.center.conj() * ak;
                image +=
                    dm.contrast.conj() * num * dm.center.conj() * alpha0[m] / (den * den * den);
            }
            -2.0 * r3 * reflect + 2.0 * r3 / lambda * image
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Disk;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_disks(a: f64, r: f64, rho: f64) -> DiskConfig {
        DiskConfig::new(vec![Disk::real(a, r, rho), Disk::real(-a, r, rho)]).unwrap()
    }

    #[test]
    fn single_centered_disk() {
        let cfg = DiskConfig::new(vec![Disk::real(0.0, 0.1, 0.3)]).unwrap();
        let f = build_f(&cfg);
        assert_eq!(f.matrix[(0, 0)], c(0.3, 0.0));
        let spec = leading_spectrum(&cfg).unwrap();
        assert!((spec[0].mu - 0.3).norm() < 1e-15);
        assert!((spec[0].lambda_estimate - 0.003).norm() < 1e-15);
        assert_eq!(spec[0].v, vec![c(1.0, 0.0)]);
    }

    #[test]
    fn two_disk_entries_by_hand() {
        let f = build_f(&two_disks(0.5, 0.1, 0.5));
        // 0.5 / 0.75^2 and 0.5 / 1.25^2.
        assert!((f.matrix[(0, 0)] - 0.5 / 0.5625).norm() < 1e-15);
        assert!((f.matrix[(0, 0)].re - 0.888_888_888_888_889).abs() < 1e-14);
        assert!((f.matrix[(0, 1)] - 0.32).norm() < 1e-15);
        assert!(f.is_hermitian);
    }

    #[test]
    fn rotation_leaves_entries_unchanged() {
        let cfg = DiskConfig::new(vec![
            Disk::new(c(0.3, 0.2), 0.1, c(0.4, 0.1)),
            Disk::new(c(-0.4, 0.1), 0.05, c(-0.2, 0.0)),
        ])
        .unwrap();
        let a = build_f(&cfg).matrix;
        let b = build_f(&cfg.rotated(std::f64::consts::FRAC_PI_3)).matrix;
        assert!((&a - &b).max_abs() < 1e-15);
    }

    #[test]
    fn example_two_closed_forms() {
        let a: f64 = 0.5;
        let rho = 0.5;
        let spec = leading_spectrum(&two_disks(a, 0.05, rho)).unwrap();
        let a4 = a.powi(4);
        let mu1 = rho * 2.0 * (1.0 + a4) / (1.0 - a4).powi(2);
        let mu2 = rho * 4.0 * a * a / (1.0 - a4).powi(2);
        assert!((mu1 - 1.208_888_888_888_889).abs() < 1e-14);
        assert!((mu2 - 0.568_888_888_888_889).abs() < 1e-14);
        assert!((spec[0].mu.re - mu1).abs() < 1e-12 && spec[0].mu.im == 0.0);
        assert!((spec[1].mu.re - mu2).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((spec[0].v[0] - s).norm() < 1e-12 && (spec[0].v[1] - s).norm() < 1e-12);
        // (-1, 1) up to phase: first component made positive.
        assert!((spec[1].v[0] - s).norm() < 1e-12 && (spec[1].v[1] + s).norm() < 1e-12);
    }

    #[test]
    fn zero_contrast_gives_zero_spectrum() {
        let spec = leading_spectrum(&two_disks(0.5, 0.1, 0.0)).unwrap();
        assert!(spec.iter().all(|p| p.mu.norm() == 0.0));
        assert!(matches!(
            first_order_alpha1(&spec[0], &two_disks(0.5, 0.1, 0.0)),
            Err(Error::ZeroEigenvalue)
        ));
    }

    #[test]
    fn symmetrized_cross_check() {
        // Real positive weights: F = G D with D = diag(conj(rho) nu) is similar
        // to the Hermitian D^1/2 G D^1/2.
        let cfg = DiskConfig::new(vec![
            Disk::new(c(0.4, 0.1), 0.1, c(0.6, 0.0)),
            Disk::new(c(-0.3, 0.3), 0.07, c(0.2, 0.0)),
            Disk::new(c(0.0, -0.5), 0.04, c(0.9, 0.0)),
        ])
        .unwrap();
        let disks = cfg.disks();
        let w: Vec<f64> = (0..3)
            .map(|m| (disks[m].contrast.re * cfg.nu(m)).sqrt())
            .collect();
        let sym = ComplexMatrix::from_fn(3, 3, |k, m| {
            let den = 1.0 - disks[m].center.conj() * disks[k].center;
            w[k] * w[m] / (den * den)
        });
        let reference = eig_hermitian(&sym).unwrap().eigenvalues;
        let spec = leading_spectrum(&cfg).unwrap();
        assert!(!build_f(&cfg).is_hermitian);
        for (p, mu) in spec.iter().zip(&reference) {
            assert!((p.mu - mu).norm() < 1e-11, "{} vs {}", p.mu, mu);
        }
    }

    #[test]
    fn leading_phi0_example_one() {
        let (r, rho) = (0.2, 0.3);
        let cfg = DiskConfig::new(vec![Disk::real(0.0, r, rho)]).unwrap();
        let spec = leading_spectrum(&cfg).unwrap();
        let phi0 = leading_phi0(&spec[0], &cfg);
        let z = c(1.5, -0.7);
        assert!((phi0.eval(z).unwrap() + rho * r * r / z).norm() < 1e-15);
        assert!(phi0.eval(c(0.5, 0.0)).is_err());
        assert_eq!(phi0.omega(c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn leading_phi0_example_two() {
        let (a, r, rho) = (0.5, 0.05, 0.5);
        let cfg = two_disks(a, r, rho);
        let spec = leading_spectrum(&cfg).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let w1 = leading_phi0(&spec[0], &cfg);
        let w2 = leading_phi0(&spec[1], &cfg);
        for z in [c(0.3, 0.2), c(-0.7, 0.1), c(0.0, 0.9)] {
            let omega1 = -rho * r * r * 2.0 * z / (1.0 - a * a * z * z);
            let omega2 = rho * r * r * 2.0 * a * z * z / (1.0 - a * a * z * z);
            // v1 = (1,1)/sqrt2, v2 = (1,-1)/sqrt2 = -(-1,1)/sqrt2.
            assert!((w1.omega(z) - s * omega1).norm() < 1e-15);
            assert!((w2.omega(z) + s * omega2).norm() < 1e-15);
            let zz = 1.0 / z.conj();
            assert!(
                (w1.eval(zz).unwrap() - s * (-rho * r * r * 2.0 * zz / (zz * zz - a * a))).norm()
                    < 1e-14
            );
        }
    }

    #[test]
    fn alpha1_examples() {
        let cfg = DiskConfig::new(vec![Disk::real(0.0, 0.1, 0.4)]).unwrap();
        let spec = leading_spectrum(&cfg).unwrap();
        assert_eq!(
            first_order_alpha1(&spec[0], &cfg).unwrap(),
            vec![c(0.0, 0.0)]
        );

        let cfg = two_disks(0.5, 0.05, 0.5);
        let spec = leading_spectrum(&cfg).unwrap();
        let alpha = first_order_alpha1(&spec[0], &cfg).unwrap();
        assert!(alpha[0].norm() > 0.0);
        assert!((alpha[0] + alpha[1]).norm() < 1e-15);
    }

    #[test]
    fn repeated_eigenvalues_get_orthonormal_basis() {
        // Zero-contrast disks give zero columns, so mu = 0 is double.
        let cfg = DiskConfig::new(vec![
            Disk::real(0.5, 0.1, 0.0),
            Disk::real(-0.5, 0.1, 0.0),
            Disk::real(0.0, 0.1, 0.5),
        ])
        .unwrap();
        let spec = leading_spectrum(&cfg).unwrap();
        let zeros: Vec<_> = spec.iter().filter(|p| p.mu.norm() < 1e-14).collect();
        assert_eq!(zeros.len(), 2);
        let dot: Complex64 = zeros[0]
            .v
            .iter()
            .zip(&zeros[1].v)
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!(dot.norm() < 1e-12);
    }
}
