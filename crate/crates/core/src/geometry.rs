//! Problem instance: circular inclusions inside the unit disk, and the
//! elementary conformal maps built from them.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default admissibility margin for the strict inequalities of [`validate`].
pub const DEFAULT_MARGIN: f64 = 1e-9;

/// One circular inclusion `|z - center| < radius` with contrast parameter `contrast`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
    pub contrast: Complex64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64, contrast: Complex64) -> Self {
        Self {
            center,
            radius,
            contrast,
        }
    }

    /// Disk with a real center and real contrast.
    pub fn real(center: f64, radius: f64, contrast: f64) -> Self {
        Self::new(
            Complex64::new(center, 0.0),
            radius,
            Complex64::new(contrast, 0.0),
        )
    }

    /// Point `center + radius * exp(i theta)` on the boundary circle.
    pub fn boundary_point(&self, theta: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, theta)
    }
}

/// A validated, immutable set of non-overlapping disks inside the unit disk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskConfig {
    disks: Vec<Disk>,
    r_max: f64,
}

impl DiskConfig {
    /// Validates with [`DEFAULT_MARGIN`].
    pub fn new(disks: Vec<Disk>) -> Result<Self> {
        Self::with_margin(disks, DEFAULT_MARGIN)
    }

    pub fn with_margin(disks: Vec<Disk>, margin: f64) -> Result<Self> {
        let report = validate(&disks, margin);
        if !report.is_ok() {
            return Err(Error::InvalidConfig(report));
        }
        let r_max = disks.iter().map(|d| d.radius).fold(0.0, f64::max);
        Ok(Self { disks, r_max })
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    pub fn len(&self) -> usize {
        self.disks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty()
    }

    /// The largest radius.
    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Relative area weight `r_k^2 / r_max^2`, in `(0, 1]`.
    pub fn nu(&self, k: usize) -> f64 {
        let q = self.disks[k].radius / self.r_max;
        q * q
    }

    /// Whether every contrast has vanishing imaginary part.
    pub fn has_real_contrasts(&self) -> bool {
        self.disks.iter().all(|d| d.contrast.im == 0.0)
    }

    /// The same configuration with every center rotated by `exp(i theta)`.
    pub fn rotated(&self, theta: f64) -> Self {
        let rot = Complex64::from_polar(1.0, theta);
        let disks = self
            .disks
            .iter()
            .map(|d| Disk {
                center: d.center * rot,
                ..*d
            })
            .collect();
        Self {
            disks,
            r_max: self.r_max,
        }
    }
}

/// One violated admissibility condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Empty,
    NonFinite {
        index: usize,
    },
    RadiusNotPositive {
        index: usize,
        radius: f64,
    },
    ContrastTooLarge {
        index: usize,
        modulus: f64,
    },
    /// `|a_k| + r_k < 1 - margin` fails; `slack = 1 - (|a_k| + r_k)`.
    OutsideUnitDisk {
        index: usize,
        extent: f64,
        slack: f64,
    },
    /// `|a_i - a_j| > r_i + r_j + margin` fails; `slack = distance - radii_sum`.
    Overlap {
        first: usize,
        second: usize,
        distance: f64,
        radii_sum: f64,
        slack: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "configuration has no disks"),
            Violation::NonFinite { index } => write!(f, "disk {index}: non-finite parameter"),
            Violation::RadiusNotPositive { index, radius } => {
                write!(f, "disk {index}: radius {radius} is not positive")
            }
            Violation::ContrastTooLarge { index, modulus } => {
                write!(f, "disk {index}: |contrast| = {modulus} is not < 1")
            }
            Violation::OutsideUnitDisk {
                index,
                extent,
                slack,
            } => write!(
                f,
                "disk {index}: |a|+r = {extent} is not < 1 (slack {slack:e})"
            ),
            Violation::Overlap {
                first,
                second,
                distance,
                radii_sum,
                slack,
            } => write!(
                f,
                "disks {first},{second}: |a_{first}-a_{second}| = {distance} is not > r_{first}+r_{second} = {radii_sum} (slack {slack:e})"
            ),
        }
    }
}

/// Outcome of [`validate`]; empty means admissible.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every admissibility condition, collecting all violations.
///
/// Both geometric inequalities are strict and must hold with slack at least
/// `margin`, so tangent configurations are rejected.
pub fn validate(disks: &[Disk], margin: f64) -> ValidationReport {
    let mut violations = Vec::new();
    if disks.is_empty() {
        violations.push(Violation::Empty);
    }
    for (index, d) in disks.iter().enumerate() {
        let finite = d.center.re.is_finite()
            && d.center.im.is_finite()
            && d.radius.is_finite()
            && d.contrast.re.is_finite()
            && d.contrast.im.is_finite();
        if !finite {
            violations.push(Violation::NonFinite { index });
            continue;
        }
        if d.radius <= 0.0 {
            violations.push(Violation::RadiusNotPositive {
                index,
                radius: d.radius,
            });
        }
        let modulus = d.contrast.norm();
        if modulus >= 1.0 {
            violations.push(Violation::ContrastTooLarge { index, modulus });
        }
        let extent = d.center.norm() + d.radius;
        let slack = 1.0 - extent;
        if slack <= margin {
            violations.push(Violation::OutsideUnitDisk {
                index,
                extent,
                slack,
            });
        }
    }
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            let distance = (disks[i].center - disks[j].center).norm();
            let radii_sum = disks[i].radius + disks[j].radius;
            let slack = distance - radii_sum;
            // NaN slack (non-finite input) is already reported above.
            if slack <= margin {
                violations.push(Violation::Overlap {
                    first: i,
                    second: j,
                    distance,
                    radii_sum,
                    slack,
                });
            }
        }
    }
    ValidationReport { violations }
}

/// Reflection in the circle of `d`: `r^2 / conj(z - a) + a`.
pub fn invert_in_disk(z: Complex64, d: &Disk) -> Result<Complex64> {
    let dz = z - d.center;
    if dz == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole {
            map: "inversion in disk",
            z,
        });
    }
    Ok(d.radius * d.radius / dz.conj() + d.center)
}

/// `w(z) = a + r^2 z / (1 - conj(a) z)`, the reflection of `1/conj(z)` in the
/// circle of `d`. Maps the closed unit disk into the closed disk `d`.
pub fn mobius_w(z: Complex64, d: &Disk) -> Result<Complex64> {
    let den = 1.0 - d.center.conj() * z;
    if den == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole { map: "mobius_w", z });
    }
    Ok(d.center + d.radius * d.radius * z / den)
}

/// `1 / conj(z)`.
pub fn invert_in_unit_circle(z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole {
            map: "inversion in unit circle",
            z,
        });
    }
    Ok(1.0 / z.conj())
}
