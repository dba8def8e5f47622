use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Contour sampling controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindingOptions {
    pub initial_samples: usize,
    pub max_samples: usize,
    /// `|f|` below `zero_tol * max |f|` counts as a zero on the contour.
    pub zero_tol: f64,
}

impl Default for WindingOptions {
    fn default() -> Self {
        Self {
            initial_samples: 256,
            max_samples: 1 << 20,
            zero_tol: 1e-12,
        }
    }
}

/// Images `f(exp(2 pi i j / M))`, `j = 0..M`, of the unit circle.
#[derive(Debug, Clone, Serialize)]
pub struct CurveSamples {
    pub values: Vec<Complex64>,
    /// Number of doublings beyond the initial count.
    pub refinements: usize,
    /// Largest `|arg(f_{j+1} / f_j)|`.
    pub max_increment: f64,
}

impl CurveSamples {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn parameter(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.values.len() as f64
    }

    /// Total argument increment over `2 pi`, rounded.
    pub fn winding(&self) -> i64 {
        (total_increment(&self.values) / (2.0 * PI)).round() as i64
    }
}

fn total_increment(values: &[Complex64]) -> f64 {
    let m = values.len();
    (0..m)
        .map(|j| (values[(j + 1) % m] / values[j]).arg())
        .sum()
}

fn max_increment(values: &[Complex64]) -> f64 {
    let m = values.len();
    (0..m)
        .map(|j| (values[(j + 1) % m] / values[j]).arg().abs())
        .fold(0.0, f64::max)
}

/// Samples `f` at `m` equally spaced points of the unit circle, rejecting
/// zeros on the contour.
pub fn sample_unit_circle<F>(f: &F, m: usize, zero_tol: f64) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let values = (0..m)
        .map(|j| f(Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64)))
        .collect::<Result<Vec<_>>>()?;
    let big = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !big.is_finite() {
        return Err(Error::NonFinite);
    }
    if let Some((j, v)) = values
        .iter()
        .enumerate()
        .find(|(_, v)| v.norm() <= zero_tol * big || big == 0.0)
    {
        return Err(Error::ZeroOnCurve {
            t: 2.0 * PI * j as f64 / m as f64,
            value: v.norm(),
        });
    }
    Ok(values)
}

/// Doubles the sample count until every argument increment is below `pi/2`.
pub fn sample_curve<F>(f: &F, options: &WindingOptions) -> Result<CurveSamples>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut m = options.initial_samples.max(256);
    let mut refinements = 0;
    loop {
        let values = sample_unit_circle(f, m, options.zero_tol)?;
        let max_increment = max_increment(&values);
        if max_increment < FRAC_PI_2 {
            return Ok(CurveSamples {
                values,
                refinements,
                max_increment,
            });
        }
        m *= 2;
        refinements += 1;
        if m > options.max_samples {
            return Err(Error::RefinementExhausted { samples: m });
        }
    }
}

/// Winding number of `f` along the positively oriented unit circle.
pub fn winding_number<F>(f: F, options: &WindingOptions) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    Ok(sample_curve(&f, options)?.winding())
}

/// Winding number along the unit circle traversed as the boundary of the
/// exterior domain (clockwise), the orientation for maps defined on `|z| >= 1`.
pub fn winding_number_exterior<F>(f: F, options: &WindingOptions) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    Ok(-winding_number(f, options)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> WindingOptions {
        WindingOptions::default()
    }

    #[test]
    fn monomials_and_constants() {
        for p in 1..=3 {
            assert_eq!(
                winding_number(|z: Complex64| Ok(z.powi(p)), &opts()).unwrap(),
                p as i64
            );
        }
        assert_eq!(
            winding_number(|_| Ok(Complex64::new(1.0, 1.0)), &opts()).unwrap(),
            0
        );
        assert_eq!(
            winding_number(|z: Complex64| Ok(z.inv()), &opts()).unwrap(),
            -1
        );
        assert_eq!(
            winding_number_exterior(|z: Complex64| Ok(-z.inv()), &opts()).unwrap(),
            1
        );
    }

    #[test]
    fn high_degree_triggers_refinement() {
        // 2 pi 150 / M exceeds pi/2 until M = 1024.
        let c = sample_curve(&|z: Complex64| Ok(z.powi(150)), &opts()).unwrap();
        assert_eq!(c.refinements, 2);
        assert_eq!(c.winding(), 150);
        assert!(c.max_increment < FRAC_PI_2);
    }

    #[test]
    fn refinement_stable_and_multiplicative() {
        let f = |z: Complex64| Ok((z - 0.3) * (z + Complex64::new(0.1, 0.5)) * (z - 2.0));
        let c = sample_curve(&f, &opts()).unwrap();
        let w = c.winding();
        assert_eq!(w, 2);
        for m in [2 * c.len(), 4 * c.len()] {
            let v = sample_unit_circle(&f, m, 1e-12).unwrap();
            assert_eq!((total_increment(&v) / (2.0 * PI)).round() as i64, w);
        }
        for (p, q) in [(1, 2), (2, 3), (3, 1)] {
            let fg = winding_number(|z: Complex64| Ok(z.powi(p) * z.powi(q)), &opts()).unwrap();
            assert_eq!(fg, (p + q) as i64);
        }
    }

    #[test]
    fn starting_point_independent() {
        let f = |z: Complex64| Ok(z * z - 0.25);
        let shifted = |z: Complex64| f(z * Complex64::from_polar(1.0, 0.377));
        assert_eq!(
            winding_number(f, &opts()).unwrap(),
            winding_number(shifted, &opts()).unwrap()
        );
    }

    #[test]
    fn errors() {
        let err = winding_number(|z: Complex64| Ok(z - 1.0), &opts()).unwrap_err();
        assert!(matches!(err, Error::ZeroOnCurve { .. }));
        let small = WindingOptions {
            max_samples: 256,
            ..opts()
        };
        let err = winding_number(|z: Complex64| Ok(z.powi(150)), &small).unwrap_err();
        assert!(matches!(err, Error::RefinementExhausted { .. }));
    }
}
