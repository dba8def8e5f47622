//! Run configuration: JSON schema, validation and environment overrides.

use std::fmt;

use num_complex::Complex64;
use rlinear_core::analysis::AnalysisOptions;
use rlinear_core::fullsolver::SolverOptions;
use rlinear_core::geometry::{self, Disk, DiskConfig, ValidationReport};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Asymptotic,
    Full,
    Analyze,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskSpec {
    pub center_re: f64,
    #[serde(default)]
    pub center_im: f64,
    pub radius: f64,
    pub contrast_re: f64,
    #[serde(default)]
    pub contrast_im: f64,
}

impl DiskSpec {
    pub fn to_disk(self) -> Disk {
        Disk::new(
            Complex64::new(self.center_re, self.center_im),
            self.radius,
            Complex64::new(self.contrast_re, self.contrast_im),
        )
    }

    pub fn from_disk(d: &Disk) -> Self {
        Self {
            center_re: d.center.re,
            center_im: d.center.im,
            radius: d.radius,
            contrast_re: d.contrast.re,
            contrast_im: d.contrast.im,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub count: usize,
    pub seed: u64,
    pub n_min: usize,
    pub n_max: usize,
    pub radius_min: f64,
    pub radius_max: f64,
    pub contrast_min: f64,
    pub contrast_max: f64,
    /// Imaginary contrast range; zero width keeps contrasts real.
    pub contrast_im_min: f64,
    pub contrast_im_max: f64,
    /// Clearance `delta` from the unit circle and between disks.
    pub margin: f64,
    pub max_retries: usize,
    /// Degree increase for the recheck of suspicious findings.
    pub recheck_degree_step: usize,
    /// Leading eigenpairs analyzed per configuration.
    pub max_p: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            count: 200,
            seed: 0,
            n_min: 1,
            n_max: 4,
            radius_min: 0.02,
            radius_max: 0.1,
            contrast_min: -0.9,
            contrast_max: 0.9,
            contrast_im_min: 0.0,
            contrast_im_max: 0.0,
            margin: 0.02,
            max_retries: 10_000,
            recheck_degree_step: 8,
            max_p: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// `None` writes to standard output.
    pub path: Option<String>,
    pub format: Format,
    /// Include wall-clock timings; off by default so output is reproducible.
    pub timing: bool,
    /// Emit boundary curves of the coating maps in analyze mode.
    pub curves: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: None,
            format: Format::Jsonl,
            timing: false,
            curves: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default)]
    pub disks: Vec<DiskSpec>,
    /// Clearance required by geometry validation of `disks`.
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub analysis: AnalysisOptions,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_mode() -> Mode {
    Mode::Full
}

fn default_margin() -> f64 {
    geometry::DEFAULT_MARGIN
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: default_mode(),
            disks: Vec::new(),
            margin: default_margin(),
            solver: SolverOptions::default(),
            analysis: AnalysisOptions::default(),
            sweep: SweepConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn disk_config(&self) -> Result<DiskConfig, ConfigError> {
        let disks: Vec<Disk> = self.disks.iter().map(|d| d.to_disk()).collect();
        DiskConfig::with_margin(disks, self.margin).map_err(|_| {
            ConfigError::Geometry(geometry::validate(
                &self.disks.iter().map(|d| d.to_disk()).collect::<Vec<_>>(),
                self.margin,
            ))
        })
    }

    /// SHA-256 of the canonical JSON serialization. The parallelism switches
    /// do not change results and are left out.
    pub fn digest(&self) -> String {
        let mut canonical = self.clone();
        canonical.solver.parallel = true;
        canonical.analysis.parallel = true;
        digest_json(&canonical)
    }
}

pub fn digest_json<T: Serialize>(value: &T) -> String {
    let text = serde_json::to_string(value).expect("serializable");
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid configuration:{}", .0.iter().map(|e| format!("\n  {e}")).collect::<String>())]
    Schema(Vec<FieldError>),
    #[error("invalid geometry: {0}")]
    Geometry(ValidationReport),
    #[error("environment override {name}={value:?}: {message}")]
    Env {
        name: String,
        value: String,
        message: String,
    },
}

/// Parses and validates a configuration, applying no environment overrides.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config = parse_config_raw(text)?;
    validate_config(&config)?;
    Ok(config)
}

/// Deserializes without validation, for callers that adjust fields first.
pub fn parse_config_raw(text: &str) -> Result<RunConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Schema and geometry checks. Geometry is only checked when disks are
/// needed (every mode except sweep).
pub fn validate_config(config: &RunConfig) -> Result<(), ConfigError> {
    let mut errors = Vec::new();
    let mut push = |field: String, message: String| errors.push(FieldError { field, message });

    for (i, d) in config.disks.iter().enumerate() {
        if !(d.radius > 0.0) {
            push(
                format!("disks[{i}].radius"),
                format!("must be positive, got {}", d.radius),
            );
        }
        let rho = Complex64::new(d.contrast_re, d.contrast_im).norm();
        if !(rho < 1.0) {
            push(
                format!("disks[{i}].contrast"),
                format!("|rho| must be < 1, got {rho}"),
            );
        }
        for (name, v) in [("center_re", d.center_re), ("center_im", d.center_im)] {
            if !v.is_finite() {
                push(
                    format!("disks[{i}].{name}"),
                    format!("must be finite, got {v}"),
                );
            }
        }
    }
    if !(config.margin >= 0.0) {
        push(
            "margin".into(),
            format!("must be nonnegative, got {}", config.margin),
        );
    }
    if let Err(e) = config.solver.validate() {
        push("solver".into(), e.to_string());
    }
    let a = &config.analysis;
    for (name, v) in [
        ("analysis.winding.zero_tol", a.winding.zero_tol),
        ("analysis.nodal.sign_tol", a.nodal.sign_tol),
        ("analysis.tie_tol", a.tie_tol),
    ] {
        if !(v.is_finite() && v > 0.0) {
            push(name.into(), format!("must be positive, got {v}"));
        }
    }
    if !(a.nodal.outer_radius > 1.0) {
        push(
            "analysis.nodal.outer_radius".into(),
            format!("must exceed 1, got {}", a.nodal.outer_radius),
        );
    }
    if a.nodal.grid < 400 {
        push(
            "analysis.nodal.grid".into(),
            format!("must be at least 400, got {}", a.nodal.grid),
        );
    }
    if a.winding.initial_samples < 256 || a.winding.max_samples < a.winding.initial_samples {
        push(
            "analysis.winding".into(),
            "need initial_samples >= 256 and max_samples >= initial_samples".into(),
        );
    }
    if a.harmonic_samples == 0 {
        push(
            "analysis.harmonic_samples".into(),
            "must be positive".into(),
        );
    }

    let s = &config.sweep;
    if s.n_min == 0 || s.n_max < s.n_min {
        push(
            "sweep.n_min".into(),
            format!("need 1 <= n_min <= n_max, got {}..{}", s.n_min, s.n_max),
        );
    }
    if !(s.radius_min > 0.0 && s.radius_max >= s.radius_min && s.radius_max < 1.0) {
        push(
            "sweep.radius_min".into(),
            format!(
                "need 0 < radius_min <= radius_max < 1, got {}..{}",
                s.radius_min, s.radius_max
            ),
        );
    }
    if !(s.contrast_max >= s.contrast_min && s.contrast_im_max >= s.contrast_im_min) {
        push(
            "sweep.contrast_min".into(),
            "contrast ranges must be ordered".into(),
        );
    }
    let worst = [
        Complex64::new(s.contrast_min, s.contrast_im_min),
        Complex64::new(s.contrast_min, s.contrast_im_max),
        Complex64::new(s.contrast_max, s.contrast_im_min),
        Complex64::new(s.contrast_max, s.contrast_im_max),
    ]
    .iter()
    .map(|c| c.norm())
    .fold(0.0, f64::max);
    if !(worst < 1.0) {
        push(
            "sweep.contrast_max".into(),
            format!("contrast range reaches |rho| = {worst}"),
        );
    }
    if !(s.margin > 0.0 && s.margin < 1.0) {
        push(
            "sweep.margin".into(),
            format!("must lie in (0, 1), got {}", s.margin),
        );
    }
    if s.max_p == 0 {
        push("sweep.max_p".into(), "must be positive".into());
    }
    if s.max_retries == 0 {
        push("sweep.max_retries".into(), "must be positive".into());
    }

    if !errors.is_empty() {
        return Err(ConfigError::Schema(errors));
    }
    if config.mode != Mode::Sweep {
        if config.disks.is_empty() {
            return Err(ConfigError::Schema(vec![FieldError {
                field: "disks".into(),
                message: "at least one disk is required".into(),
            }]));
        }
        config.disk_config()?;
    }
    Ok(())
}

/// Recognized tolerance overrides, each parsed as a decimal float.
pub const ENV_OVERRIDES: &[&str] = &[
    "RLINEAR_REAL_TOL",
    "RLINEAR_SPURIOUS_ABS",
    "RLINEAR_SPURIOUS_REL",
    "RLINEAR_RESIDUAL_TOL",
    "RLINEAR_DEFECT_TOL",
    "RLINEAR_CTOL",
    "RLINEAR_MAX_CONDITION",
    "RLINEAR_ZERO_TOL",
    "RLINEAR_SIGN_TOL",
];

/// Applies `RLINEAR_*` overrides found through `lookup`.
pub fn apply_env_overrides<F>(config: &mut RunConfig, lookup: F) -> Result<(), ConfigError>
where
    F: Fn(&str) -> Option<String>,
{
    for &name in ENV_OVERRIDES {
        let Some(value) = lookup(name) else { continue };
        let parsed: f64 = value
            .trim()
            .parse()
            .map_err(|e: std::num::ParseFloatError| ConfigError::Env {
                name: name.into(),
                value: value.clone(),
                message: e.to_string(),
            })?;
        let slot = match name {
            "RLINEAR_REAL_TOL" => &mut config.solver.real_tol,
            "RLINEAR_SPURIOUS_ABS" => &mut config.solver.spurious_abs,
            "RLINEAR_SPURIOUS_REL" => &mut config.solver.spurious_rel,
            "RLINEAR_RESIDUAL_TOL" => &mut config.solver.residual_tol,
            "RLINEAR_DEFECT_TOL" => &mut config.solver.defect_tol,
            "RLINEAR_CTOL" => &mut config.solver.ctol,
            "RLINEAR_MAX_CONDITION" => &mut config.solver.max_condition,
            "RLINEAR_ZERO_TOL" => &mut config.analysis.winding.zero_tol,
            "RLINEAR_SIGN_TOL" => &mut config.analysis.nodal.sign_tol,
            _ => unreachable!(),
        };
        *slot = parsed;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c =
            parse_config(r#"{"disks": [{"center_re": 0.0, "radius": 0.5, "contrast_re": 0.4}]}"#)
                .unwrap();
        assert_eq!(c.mode, Mode::Full);
        assert_eq!(c.solver, SolverOptions::default());
        assert_eq!(c.analysis.max_p, None);
        assert_eq!(c.sweep.max_p, 8);
        assert_eq!(c.output.format, Format::Jsonl);
        assert_eq!(c.disk_config().unwrap().len(), 1);
    }

    #[test]
    fn negative_radius_names_field() {
        let err =
            parse_config(r#"{"disks": [{"center_re": 0.0, "radius": -0.1, "contrast_re": 0.4}]}"#)
                .unwrap_err();
        match err {
            ConfigError::Schema(errs) => assert_eq!(errs[0].field, "disks[0].radius"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn overlap_reports_geometry() {
        let err = parse_config(
            r#"{"disks": [{"center_re": 0.1, "radius": 0.2, "contrast_re": 0.4},
                          {"center_re": -0.1, "radius": 0.2, "contrast_re": 0.4}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::Geometry(_)));
        assert!(err.to_string().contains("is not >"), "{err}");
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_config("{\n  \"mode\": \"full\",\n  oops\n}").unwrap_err();
        match err {
            ConfigError::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("{other}"),
        }
        assert!(parse_config(r#"{"mode": "full", "bogus": 1}"#).is_err());
        assert!(parse_config(r#"{"mode": "sideways"}"#).is_err());
    }

    #[test]
    fn sweep_needs_no_disks() {
        let c = parse_config(
            r#"{"mode": "sweep", "sweep": {"count": 3, "seed": 18446744073709551615}}"#,
        )
        .unwrap();
        assert_eq!(c.sweep.seed, u64::MAX);
        assert!(parse_config(
            r#"{"mode": "sweep", "sweep": {"radius_min": 0.2, "radius_max": 0.1}}"#
        )
        .is_err());
    }

    #[test]
    fn tolerances_must_be_positive() {
        let err = parse_config(
            r#"{"disks": [{"center_re": 0.0, "radius": 0.5, "contrast_re": 0.4}], "solver": {"real_tol": 0.0}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("real_tol"));
    }

    #[test]
    fn env_overrides() {
        let mut c = RunConfig::default();
        apply_env_overrides(&mut c, |k| {
            (k == "RLINEAR_REAL_TOL").then(|| "2.5e-7".to_string())
        })
        .unwrap();
        assert_eq!(c.solver.real_tol, 2.5e-7);
        let err = apply_env_overrides(&mut c, |k| {
            (k == "RLINEAR_CTOL").then(|| "tiny".to_string())
        });
        assert!(matches!(err, Err(ConfigError::Env { .. })));
    }

    #[test]
    fn digest_is_stable() {
        let c = RunConfig::default();
        assert_eq!(c.digest(), c.clone().digest());
        assert_eq!(c.digest().len(), 64);
        let mut d = c.clone();
        d.sweep.seed = 1;
        assert_ne!(c.digest(), d.digest());
        let mut e = c.clone();
        e.solver.parallel = false;
        e.analysis.parallel = false;
        assert_eq!(c.digest(), e.digest());
    }
}
