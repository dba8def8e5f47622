//! Analysis of eigenpairs: the coating map, winding numbers, univalence,
//! nodal domains, the harmonic boundary form and the conjecture report.

mod curve;
mod harmonic;
mod nodal;
mod univalence;

pub use curve::{
    sample_curve, sample_unit_circle, winding_number, winding_number_exterior, CurveSamples,
    WindingOptions,
};
pub use harmonic::harmonic_residual;
pub use nodal::{count_components, nodal_domain_count, NodalCount, NodalOptions};
pub use univalence::{
    probe_points, segments_meet, self_intersection, univalence_check, UnivalenceReport,
    MAX_POLYLINE,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fullsolver::EigenResult;
use crate::geometry::DiskConfig;
use crate::numerics::spectral_order;
use crate::par;

/// `omega(z) = conj(phi_0(1 / conj(z)))` on the closed unit disk.
pub fn omega(eigen: &EigenResult, config: &DiskConfig, z: Complex64) -> Result<Complex64> {
    eigen.potentials(config).omega(z)
}

/// Boundary curve of `omega` for plotting, at the adaptive sample count.
pub fn omega_curve(
    eigen: &EigenResult,
    config: &DiskConfig,
    options: &WindingOptions,
) -> Result<CurveSamples> {
    let pot = eigen.potentials(config);
    sample_curve(&|z| pot.omega(z), options)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisOptions {
    pub winding: WindingOptions,
    pub nodal: NodalOptions,
    /// Analyze only the leading `max_p` eigenpairs.
    pub max_p: Option<usize>,
    pub harmonic_samples: usize,
    /// Relative gap in `|lambda|` below which neighbours count as tied.
    pub tie_tol: f64,
    pub parallel: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            winding: WindingOptions::default(),
            nodal: NodalOptions::default(),
            max_p: None,
            harmonic_samples: 128,
            tie_tol: 1e-9,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairAnalysis {
    /// 1-based position in the sorted spectrum.
    pub p: usize,
    pub lambda: Complex64,
    /// Winding of `omega_p` on the positively oriented unit circle.
    pub wind_omega: i64,
    /// Winding of `phi_0` on the unit circle as boundary of the exterior.
    pub wind_phi0: i64,
    pub wind_agree: bool,
    pub univalent: bool,
    pub univalence: UnivalenceReport,
    pub nodal: NodalCount,
    pub harmonic_residual: Option<f64>,
    pub wind_pass: bool,
    pub nodal_pass: bool,
    /// Index into [`ConjectureReport::tie_groups`] when `|lambda_p|` is tied.
    pub tie_group: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureReport {
    pub pairs: Vec<PairAnalysis>,
    /// Whether `omega_1` of the largest-modulus eigenvalue is univalent.
    pub leading_univalent: Option<bool>,
    /// Groups of 1-based indices sharing `|lambda|`.
    pub tie_groups: Vec<Vec<usize>>,
    pub wind_disagreements: usize,
    pub all_pass: bool,
}

/// Winding, univalence and nodal analysis of each eigenpair in order.
pub fn conjecture_report(
    spectrum: &[EigenResult],
    config: &DiskConfig,
    options: &AnalysisOptions,
) -> Result<ConjectureReport> {
    if spectrum
        .windows(2)
        .any(|w| spectral_order(w[0].lambda, w[1].lambda) == std::cmp::Ordering::Greater)
    {
        return Err(Error::Parameter(
            "spectrum must be sorted by nonincreasing |lambda|".into(),
        ));
    }
    let count = options
        .max_p
        .map_or(spectrum.len(), |m| m.min(spectrum.len()));
    let spectrum = &spectrum[..count];

    let mut tie_groups: Vec<Vec<usize>> = Vec::new();
    for p in 1..count {
        let (a, b) = (spectrum[p - 1].lambda.norm(), spectrum[p].lambda.norm());
        if (a - b).abs() <= options.tie_tol * a {
            match tie_groups.last_mut() {
                Some(g) if g.last() == Some(&p) => g.push(p + 1),
                _ => tie_groups.push(vec![p, p + 1]),
            }
        }
    }

    let pairs = par::map_indexed(count, options.parallel, |i| {
        analyze_pair(i, &spectrum[i], config, options)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<PairAnalysis> = pairs
        .into_iter()
        .map(|mut a| {
            a.tie_group = tie_groups.iter().position(|g| g.contains(&a.p));
            a
        })
        .collect();
    Ok(ConjectureReport {
        leading_univalent: pairs.first().map(|a| a.univalent),
        wind_disagreements: pairs.iter().filter(|a| !a.wind_agree).count(),
        all_pass: pairs.iter().all(|a| a.wind_pass && a.nodal_pass),
        pairs,
        tie_groups,
    })
}

fn analyze_pair(
    i: usize,
    eigen: &EigenResult,
    config: &DiskConfig,
    options: &AnalysisOptions,
) -> Result<PairAnalysis> {
    let p = i + 1;
    let pot = eigen.potentials(config);
    let wind_omega = winding_number(|z| pot.omega(z), &options.winding)?;
    let wind_phi0 = winding_number_exterior(|z| pot.phi0(z), &options.winding)?;
    let univalence = univalence_check(|z| pot.omega(z), &options.winding)?;
    let nodal = nodal_domain_count(|z| Ok(pot.phi0(z)?.re), &options.nodal)?;
    let harmonic_residual = if eigen.is_real_lambda {
        Some(harmonic_residual(eigen, config, options.harmonic_samples)?)
    } else {
        None
    };
    Ok(PairAnalysis {
        p,
        lambda: eigen.lambda,
        wind_omega,
        wind_phi0,
        wind_agree: wind_omega == wind_phi0,
        univalent: univalence.univalent,
        univalence,
        nodal,
        harmonic_residual,
        wind_pass: wind_omega <= p as i64,
        nodal_pass: nodal.count <= 2 * p,
        tie_group: None,
    })
}

#[cfg(test)]
mod tests;
