//! Serialized result records. Complex numbers serialize as `[re, im]`.

use num_complex::Complex64;
use rlinear_core::analysis::ConjectureReport;
use rlinear_core::asymptotic::AsymptoticEigenpair;
use rlinear_core::fullsolver::{Candidate, Diagnostics, EigenResult};
use rlinear_core::geometry::DiskConfig;
use serde::Serialize;

use crate::config::DiskSpec;

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Asymptotic(AsymptoticRecord),
    Full(FullRecord),
    Analyze(AnalyzeRecord),
    SweepItem(SweepItem),
    SweepSummary(SweepSummary),
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticRecord {
    pub digest: String,
    pub r_max: f64,
    pub hermitian: bool,
    pub eigenpairs: Vec<AsymptoticEigenpair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenRow {
    pub p: usize,
    pub lambda: Complex64,
    pub functional_residual: f64,
    pub boundary_residual: f64,
    pub is_real_lambda: bool,
    pub realified_multiplicity: usize,
    pub phase_free: bool,
    pub constants: Vec<Complex64>,
    /// Coefficients of `((z - a_k) / r_k)^l`.
    pub coefficients: Vec<Vec<Complex64>>,
    /// Coefficients of `((z - a_k) / r_max)^l`.
    pub common_radius_coefficients: Vec<Vec<Complex64>>,
}

impl EigenRow {
    pub fn new(p: usize, e: &EigenResult, config: &DiskConfig) -> Self {
        Self {
            p,
            lambda: e.lambda,
            functional_residual: e.functional_residual,
            boundary_residual: e.boundary_residual,
            is_real_lambda: e.is_real_lambda,
            realified_multiplicity: e.realified_multiplicity,
            phase_free: e.phase_free,
            constants: e.constants.clone(),
            coefficients: e.field.coefficients().to_vec(),
            common_radius_coefficients: e.field.common_radius_coefficients(config),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FullRecord {
    pub digest: String,
    pub eigenpairs: Vec<EigenRow>,
    pub candidates: Vec<Candidate>,
    pub diagnostics: Diagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub p: usize,
    pub t: Vec<f64>,
    pub omega: Vec<Complex64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeRecord {
    pub spectrum: FullRecord,
    pub report: ConjectureReport,
    pub curves: Vec<CurveRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemStatus {
    Ok,
    SamplingError,
    SolveError,
    AnalysisError,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairSummary {
    pub p: usize,
    pub lambda: Complex64,
    pub wind_omega: i64,
    pub wind_phi0: i64,
    pub univalent: bool,
    pub nodal_count: usize,
    pub wind_pass: bool,
    pub nodal_pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub config: usize,
    pub disks: Vec<DiskSpec>,
    pub p: usize,
    pub lambda: Complex64,
    pub wind_omega: i64,
    pub degree: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NonrealFinding {
    pub config: usize,
    pub disks: Vec<DiskSpec>,
    pub lambda: Complex64,
    pub functional_residual: f64,
    pub degree: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Recheck {
    pub degree: usize,
    pub samples: usize,
    pub nonreal_confirmed: Vec<NonrealFinding>,
    pub counterexamples_confirmed: Vec<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepItem {
    pub index: usize,
    pub digest: String,
    pub disks: Vec<DiskSpec>,
    pub status: ItemStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub degree: usize,
    pub samples: usize,
    pub converged: bool,
    pub eigenvalues: Vec<Complex64>,
    pub functional_residuals: Vec<f64>,
    pub filtered_count: usize,
    pub nonreal_candidates: Vec<Complex64>,
    pub bojarski_violations: usize,
    pub analysis: Vec<PairSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recheck: Option<Recheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub digest: String,
    pub seed: u64,
    pub count: usize,
    pub succeeded: usize,
    pub failed: usize,
    pub accepted_eigenvalues: usize,
    pub max_modulus: f64,
    pub bojarski_violations: usize,
    /// Nonreal candidates before the recheck.
    pub nonreal_flagged: usize,
    /// Nonreal findings that survive the recheck, verbatim.
    pub nonreal_confirmed: Vec<NonrealFinding>,
    /// Pairs with `wind_p > p` before the recheck.
    pub counterexamples_flagged: usize,
    /// Counterexamples that survive the recheck, verbatim.
    pub counterexamples: Vec<Counterexample>,
    pub pairs_analyzed: usize,
    pub wind_disagreements: usize,
    pub nodal_exceedances: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}
