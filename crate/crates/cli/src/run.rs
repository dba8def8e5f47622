//! Orchestration of the four run modes.

use std::time::Instant;

use rlinear_core::analysis::{conjecture_report, omega_curve, AnalysisOptions, ConjectureReport};
use rlinear_core::asymptotic::{build_f, leading_spectrum};
use rlinear_core::fullsolver::{solve_spectrum, CandidateReason, SolverOptions, Spectrum};
use rlinear_core::geometry::DiskConfig;
use rlinear_core::par;

use crate::config::{digest_json, ConfigError, DiskSpec, Mode, RunConfig};
use crate::records::*;
use crate::rng::SweepRng;
use crate::sampling::{generate_random_config, SamplingExhausted};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] rlinear_core::Error),
}

fn elapsed(start: Instant, enabled: bool) -> Option<f64> {
    enabled.then(|| start.elapsed().as_secs_f64() * 1e3)
}

/// Runs the configured mode and returns its records in output order.
pub fn run(config: &RunConfig) -> Result<Vec<Record>, RunError> {
    match config.mode {
        Mode::Asymptotic => Ok(vec![Record::Asymptotic(run_asymptotic(config)?)]),
        Mode::Full => Ok(vec![Record::Full(run_full(config)?.0)]),
        Mode::Analyze => Ok(vec![Record::Analyze(run_analyze(config)?)]),
        Mode::Sweep => Ok(run_sweep(config)),
    }
}

pub fn run_asymptotic(config: &RunConfig) -> Result<AsymptoticRecord, RunError> {
    let start = Instant::now();
    let disks = config.disk_config()?;
    let f = build_f(&disks);
    let eigenpairs = leading_spectrum(&disks)?;
    Ok(AsymptoticRecord {
        digest: config.digest(),
        r_max: disks.r_max(),
        hermitian: f.is_hermitian,
        eigenpairs,
        timing_ms: elapsed(start, config.output.timing),
    })
}

fn full_record(
    digest: String,
    spectrum: &Spectrum,
    disks: &DiskConfig,
    timing_ms: Option<f64>,
) -> FullRecord {
    FullRecord {
        digest,
        eigenpairs: spectrum
            .eigenpairs
            .iter()
            .enumerate()
            .map(|(i, e)| EigenRow::new(i + 1, e, disks))
            .collect(),
        candidates: spectrum.candidates.clone(),
        diagnostics: spectrum.diagnostics.clone(),
        timing_ms,
    }
}

pub fn run_full(config: &RunConfig) -> Result<(FullRecord, Spectrum), RunError> {
    let start = Instant::now();
    let disks = config.disk_config()?;
    let spectrum = solve_spectrum(&disks, &config.solver)?;
    let record = full_record(
        config.digest(),
        &spectrum,
        &disks,
        elapsed(start, config.output.timing),
    );
    Ok((record, spectrum))
}

pub fn run_analyze(config: &RunConfig) -> Result<AnalyzeRecord, RunError> {
    let start = Instant::now();
    let disks = config.disk_config()?;
    let spectrum = solve_spectrum(&disks, &config.solver)?;
    let report = conjecture_report(&spectrum.eigenpairs, &disks, &config.analysis)?;
    let mut curves = Vec::new();
    if config.output.curves {
        for a in &report.pairs {
            let c = omega_curve(
                &spectrum.eigenpairs[a.p - 1],
                &disks,
                &config.analysis.winding,
            )?;
            curves.push(CurveRow {
                p: a.p,
                t: (0..c.len()).map(|j| c.parameter(j)).collect(),
                omega: c.values,
            });
        }
    }
    let spectrum = full_record(
        config.digest(),
        &spectrum,
        &disks,
        elapsed(start, config.output.timing),
    );
    Ok(AnalyzeRecord {
        spectrum,
        report,
        curves,
    })
}

fn specs(disks: &DiskConfig) -> Vec<DiskSpec> {
    disks.disks().iter().map(DiskSpec::from_disk).collect()
}

fn pair_summaries(report: &ConjectureReport) -> Vec<PairSummary> {
    report
        .pairs
        .iter()
        .map(|a| PairSummary {
            p: a.p,
            lambda: a.lambda,
            wind_omega: a.wind_omega,
            wind_phi0: a.wind_phi0,
            univalent: a.univalent,
            nodal_count: a.nodal.count,
            wind_pass: a.wind_pass,
            nodal_pass: a.nodal_pass,
        })
        .collect()
}

fn sweep_analysis(config: &RunConfig) -> AnalysisOptions {
    AnalysisOptions {
        max_p: Some(
            config
                .analysis
                .max_p
                .map_or(config.sweep.max_p, |m| m.min(config.sweep.max_p)),
        ),
        parallel: false,
        ..config.analysis
    }
}

/// Re-solves at a higher degree and doubled sample count without escalation.
pub fn recheck_options(base: &SolverOptions, used: &Spectrum, degree_step: usize) -> SolverOptions {
    let samples = 2 * used.diagnostics.samples;
    SolverOptions {
        degree: used.diagnostics.degree + degree_step,
        adaptive: false,
        samples: Some(samples),
        max_samples: base.max_samples.max(samples),
        parallel: false,
        ..*base
    }
}

fn sweep_item(
    index: usize,
    drawn: &Result<DiskConfig, SamplingExhausted>,
    config: &RunConfig,
) -> SweepItem {
    let start = Instant::now();
    let disks = match drawn {
        Ok(d) => d,
        Err(e) => {
            return SweepItem {
                index,
                digest: String::new(),
                disks: Vec::new(),
                status: ItemStatus::SamplingError,
                error: Some(e.to_string()),
                degree: 0,
                samples: 0,
                converged: false,
                eigenvalues: Vec::new(),
                functional_residuals: Vec::new(),
                filtered_count: 0,
                nonreal_candidates: Vec::new(),
                bojarski_violations: 0,
                analysis: Vec::new(),
                recheck: None,
                timing_ms: elapsed(start, config.output.timing),
            }
        }
    };
    let spec = specs(disks);
    let mut item = SweepItem {
        index,
        digest: digest_json(&spec),
        disks: spec.clone(),
        status: ItemStatus::Ok,
        error: None,
        degree: 0,
        samples: 0,
        converged: false,
        eigenvalues: Vec::new(),
        functional_residuals: Vec::new(),
        filtered_count: 0,
        nonreal_candidates: Vec::new(),
        bojarski_violations: 0,
        analysis: Vec::new(),
        recheck: None,
        timing_ms: None,
    };
    let solver = SolverOptions {
        parallel: false,
        ..config.solver
    };
    let spectrum = match solve_spectrum(disks, &solver) {
        Ok(s) => s,
        Err(e) => {
            item.status = ItemStatus::SolveError;
            item.error = Some(e.to_string());
            item.timing_ms = elapsed(start, config.output.timing);
            return item;
        }
    };
    let d = &spectrum.diagnostics;
    item.degree = d.degree;
    item.samples = d.samples;
    item.converged = d.converged;
    item.filtered_count = d.filtered_count;
    item.bojarski_violations = d.bojarski_violations;
    item.eigenvalues = spectrum.eigenpairs.iter().map(|e| e.lambda).collect();
    item.functional_residuals = spectrum
        .eigenpairs
        .iter()
        .map(|e| e.functional_residual)
        .collect();
    item.nonreal_candidates = nonreal(&spectrum).map(|c| c.0).collect();

    let analysis = sweep_analysis(config);
    let report = match conjecture_report(&spectrum.eigenpairs, disks, &analysis) {
        Ok(r) => Some(r),
        Err(e) => {
            item.status = ItemStatus::AnalysisError;
            item.error = Some(e.to_string());
            None
        }
    };
    if let Some(r) = &report {
        item.analysis = pair_summaries(r);
    }
    let suspicious_wind = item.analysis.iter().any(|a| !a.wind_pass);
    if suspicious_wind || !item.nonreal_candidates.is_empty() {
        item.recheck = Some(recheck(index, disks, &spec, &spectrum, config, &analysis));
    }
    item.timing_ms = elapsed(start, config.output.timing);
    item
}

fn nonreal(spectrum: &Spectrum) -> impl Iterator<Item = (num_complex::Complex64, f64)> + '_ {
    spectrum
        .candidates
        .iter()
        .filter(|c| c.reason == CandidateReason::NonReal)
        .map(|c| (c.lambda, c.functional_residual))
}

fn recheck(
    index: usize,
    disks: &DiskConfig,
    spec: &[DiskSpec],
    used: &Spectrum,
    config: &RunConfig,
    analysis: &AnalysisOptions,
) -> Recheck {
    let options = recheck_options(&config.solver, used, config.sweep.recheck_degree_step);
    let degree = options.degree;
    let samples = options.samples.unwrap_or_default();
    let mut out = Recheck {
        degree,
        samples,
        nonreal_confirmed: Vec::new(),
        counterexamples_confirmed: Vec::new(),
        error: None,
    };
    let refined = match solve_spectrum(disks, &options) {
        Ok(s) => s,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    out.nonreal_confirmed = nonreal(&refined)
        .map(|(lambda, functional_residual)| NonrealFinding {
            config: index,
            disks: spec.to_vec(),
            lambda,
            functional_residual,
            degree,
            samples,
        })
        .collect();
    match conjecture_report(&refined.eigenpairs, disks, analysis) {
        Ok(r) => {
            out.counterexamples_confirmed = r
                .pairs
                .iter()
                .filter(|a| !a.wind_pass)
                .map(|a| Counterexample {
                    config: index,
                    disks: spec.to_vec(),
                    p: a.p,
                    lambda: a.lambda,
                    wind_omega: a.wind_omega,
                    degree,
                    samples,
                })
                .collect();
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

/// Draws every configuration in sequence from the seeded generator, solves
/// and analyzes them in parallel, and returns the items in draw order
/// followed by a summary.
pub fn run_sweep(config: &RunConfig) -> Vec<Record> {
    let start = Instant::now();
    let mut rng = SweepRng::new(config.sweep.seed);
    let drawn: Vec<Result<DiskConfig, SamplingExhausted>> = (0..config.sweep.count)
        .map(|_| generate_random_config(&mut rng, &config.sweep))
        .collect();
    let items = par::map_indexed(drawn.len(), config.solver.parallel, |i| {
        sweep_item(i, &drawn[i], config)
    });
    let summary = summarize(config, &items, elapsed(start, config.output.timing));
    items
        .into_iter()
        .map(Record::SweepItem)
        .chain(std::iter::once(Record::SweepSummary(summary)))
        .collect()
}

fn summarize(config: &RunConfig, items: &[SweepItem], timing_ms: Option<f64>) -> SweepSummary {
    let ok = |i: &&SweepItem| i.status == ItemStatus::Ok;
    let eigenvalues = items.iter().flat_map(|i| &i.eigenvalues);
    SweepSummary {
        digest: config.digest(),
        seed: config.sweep.seed,
        count: items.len(),
        succeeded: items.iter().filter(ok).count(),
        failed: items.iter().filter(|i| i.status != ItemStatus::Ok).count(),
        accepted_eigenvalues: eigenvalues.clone().count(),
        max_modulus: eigenvalues.map(|l| l.norm()).fold(0.0, f64::max),
        bojarski_violations: items.iter().map(|i| i.bojarski_violations).sum(),
        nonreal_flagged: items.iter().map(|i| i.nonreal_candidates.len()).sum(),
        nonreal_confirmed: items
            .iter()
            .filter_map(|i| i.recheck.as_ref())
            .flat_map(|r| r.nonreal_confirmed.clone())
            .collect(),
        counterexamples_flagged: items
            .iter()
            .flat_map(|i| &i.analysis)
            .filter(|a| !a.wind_pass)
            .count(),
        counterexamples: items
            .iter()
            .filter_map(|i| i.recheck.as_ref())
            .flat_map(|r| r.counterexamples_confirmed.clone())
            .collect(),
        pairs_analyzed: items.iter().map(|i| i.analysis.len()).sum(),
        wind_disagreements: items
            .iter()
            .flat_map(|i| &i.analysis)
            .filter(|a| a.wind_omega != a.wind_phi0)
            .count(),
        nodal_exceedances: items
            .iter()
            .flat_map(|i| &i.analysis)
            .filter(|a| !a.nodal_pass)
            .count(),
        timing_ms,
    }
}
