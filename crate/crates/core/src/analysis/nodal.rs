use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polar grid over the annulus `1 < |z| < outer_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NodalOptions {
    pub outer_radius: f64,
    /// Cells per direction, `G x G`.
    pub grid: usize,
    /// Cells with `|value| < sign_tol * max |value|` are left unlabeled.
    pub sign_tol: f64,
}

impl Default for NodalOptions {
    fn default() -> Self {
        Self {
            outer_radius: 5.0,
            grid: 400,
            sign_tol: 1e-13,
        }
    }
}

/// Grid estimate of the number of nodal domains; a heuristic that depends
/// on the resolution it reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodalCount {
    pub count: usize,
    pub grid: usize,
    pub outer_radius: f64,
    pub unlabeled_cells: usize,
}

/// Counts 4-connected sign components of the real function `u` on the
/// polar grid, with periodic wraparound in angle.
pub fn nodal_domain_count<F>(u: F, options: &NodalOptions) -> Result<NodalCount>
where
    F: Fn(Complex64) -> Result<f64>,
{
    let g = options.grid;
    if !(options.outer_radius > 1.0) || g < 2 {
        return Err(Error::Parameter(format!(
            "nodal grid needs outer_radius > 1 and grid >= 2, got {} and {g}",
            options.outer_radius
        )));
    }
    let mut values = Vec::with_capacity(g * g);
    for i in 0..g {
        let radius = 1.0 + (options.outer_radius - 1.0) * (i as f64 + 0.5) / g as f64;
        for j in 0..g {
            values.push(u(Complex64::from_polar(
                radius,
                2.0 * PI * j as f64 / g as f64,
            ))?);
        }
    }
    let big = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if !big.is_finite() {
        return Err(Error::NonFinite);
    }
    let signs: Vec<i8> = values
        .iter()
        .map(|&v| {
            if v.abs() < options.sign_tol * big || v == 0.0 {
                0
            } else if v > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    Ok(NodalCount {
        count: count_components(&signs, g, g, true),
        grid: g,
        outer_radius: options.outer_radius,
        unlabeled_cells: signs.iter().filter(|&&s| s == 0).count(),
    })
}

/// Connected components of equal nonzero sign on a `rows x cols` grid,
/// optionally periodic in the column index.
pub fn count_components(signs: &[i8], rows: usize, cols: usize, periodic: bool) -> usize {
    let mut seen = vec![false; signs.len()];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..signs.len() {
        if seen[start] || signs[start] == 0 {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(cell) = queue.pop_front() {
            let (i, j) = (cell / cols, cell % cols);
            let mut neighbors = Vec::with_capacity(4);
            if i > 0 {
                neighbors.push(cell - cols);
            }
            if i + 1 < rows {
                neighbors.push(cell + cols);
            }
            if j > 0 {
                neighbors.push(cell - 1);
            } else if periodic {
                neighbors.push(cell + cols - 1);
            }
            if j + 1 < cols {
                neighbors.push(cell + 1);
            } else if periodic {
                neighbors.push(cell + 1 - cols);
            }
            for nb in neighbors {
                if !seen[nb] && signs[nb] == signs[start] {
                    seen[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_powers_have_2p_sectors() {
        for p in 1..=4 {
            let n = nodal_domain_count(|z: Complex64| Ok(z.powi(-p).re), &NodalOptions::default())
                .unwrap();
            assert_eq!(n.count, 2 * p as usize, "p={p}");
        }
    }

    #[test]
    fn single_sign_patch() {
        // Re(1/z) on the right half of a small grid patch.
        let (rows, cols) = (20, 10);
        let signs: Vec<i8> = (0..rows * cols)
            .map(|c| {
                let z = Complex64::new(1.0 + (c % cols) as f64, (c / cols) as f64 - 10.0);
                if z.inv().re > 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        assert_eq!(count_components(&signs, rows, cols, false), 1);
    }

    #[test]
    fn wraparound_joins_sectors() {
        // Positive on both sides of the seam at angle 0.
        let n = nodal_domain_count(
            |z: Complex64| Ok(z.re),
            &NodalOptions {
                grid: 64,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(n.count, 2);
        assert!(nodal_domain_count(
            |z: Complex64| Ok(z.re),
            &NodalOptions {
                outer_radius: 1.0,
                ..Default::default()
            }
        )
        .is_err());
    }
}
