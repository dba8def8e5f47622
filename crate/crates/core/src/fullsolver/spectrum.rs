use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DiskConfig;
use crate::numerics::{eig_real_general, spectral_order, Lu, RealMatrix};

use super::field::TaylorField;
use super::operators::{assemble_adaptive, RealifiedOperator};
use super::potentials::{recover_constants, Potentials};

/// Tunables of the full solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Truncation degree `L` (first degree when adaptive).
    pub degree: usize,
    /// Escalate `L` until the leading eigenvalue is Cauchy below `ctol`.
    pub adaptive: bool,
    pub max_degree: usize,
    pub degree_step: usize,
    /// Samples per circle; `None` picks the smallest power of two `>= 4 (L + 1)`.
    pub samples: Option<usize>,
    pub max_samples: usize,
    pub defect_tol: f64,
    pub ctol: f64,
    pub real_tol: f64,
    pub spurious_abs: f64,
    pub spurious_rel: f64,
    pub residual_tol: f64,
    pub max_condition: f64,
    /// Points per contour for the boundary-condition residual.
    pub boundary_samples: usize,
    pub parallel: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            degree: 12,
            adaptive: true,
            max_degree: 24,
            degree_step: 4,
            samples: None,
            max_samples: 4096,
            defect_tol: 1e-11,
            ctol: 1e-9,
            real_tol: 1e-8,
            spurious_abs: 1e-12,
            spurious_rel: 1e-10,
            residual_tol: 1e-8,
            max_condition: 1e12,
            boundary_samples: 64,
            parallel: true,
        }
    }
}

impl SolverOptions {
    /// Fixed degree, no escalation.
    pub fn fixed(degree: usize) -> Self {
        Self {
            degree,
            adaptive: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("defect_tol", self.defect_tol),
            ("ctol", self.ctol),
            ("real_tol", self.real_tol),
            ("spurious_abs", self.spurious_abs),
            ("spurious_rel", self.spurious_rel),
            ("residual_tol", self.residual_tol),
            ("max_condition", self.max_condition),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.adaptive && (self.degree_step == 0 || self.max_degree < self.degree) {
            return Err(Error::Parameter(
                "need degree_step > 0 and max_degree >= degree".into(),
            ));
        }
        if self.boundary_samples == 0 {
            return Err(Error::Parameter("boundary_samples must be positive".into()));
        }
        Ok(())
    }
}

/// One accepted eigenpair.
#[derive(Debug, Clone, Serialize)]
pub struct EigenResult {
    pub lambda: Complex64,
    /// Unit Hardy norm.
    pub field: TaylorField,
    pub constants: Vec<Complex64>,
    pub functional_residual: f64,
    pub boundary_residual: f64,
    pub is_real_lambda: bool,
    /// Number of eigenvalues of the realified operator collapsed into this
    /// cluster (a complex-linear problem doubles every eigenvalue).
    pub realified_multiplicity: usize,
    /// Whether `i * field` is an eigenfield too, fixing the phase by convention.
    pub phase_free: bool,
}

impl EigenResult {
    pub fn potentials<'a>(&'a self, config: &'a DiskConfig) -> Potentials<'a> {
        Potentials {
            config,
            field: &self.field,
            lambda: self.lambda,
            constants: &self.constants,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateReason {
    /// `|Im lambda| > real_tol |lambda|`.
    NonReal,
    /// Real, but the functional residual exceeds `residual_tol`.
    Residual,
}

/// Eigenvalue of the realified operator that was not accepted.
#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub lambda: Complex64,
    pub functional_residual: f64,
    pub reason: CandidateReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CauchyStep {
    pub degree: usize,
    pub samples: usize,
    pub leading: Option<Complex64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub degree: usize,
    pub samples: usize,
    pub max_tail: f64,
    pub max_defect: f64,
    /// One-norm condition number of `I - A`.
    pub condition: f64,
    /// Power-iteration estimate of `||A||_2`; below 1 the Neumann series converges.
    pub a_norm: f64,
    pub neumann_convergent: bool,
    pub realified_dim: usize,
    pub spurious_tol: f64,
    /// Absolute floor under `real_tol |lambda|` when classifying reality.
    pub imag_floor: f64,
    pub filtered_count: usize,
    pub nonreal_count: usize,
    pub residual_rejected_count: usize,
    pub bojarski_violations: usize,
    pub cauchy: Vec<CauchyStep>,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    /// Sorted by nonincreasing `|lambda|`.
    pub eigenpairs: Vec<EigenResult>,
    pub candidates: Vec<Candidate>,
    pub diagnostics: Diagnostics,
}

impl Spectrum {
    pub fn leading(&self) -> Option<Complex64> {
        self.eigenpairs.first().map(|e| e.lambda)
    }
}

/// Solves at `options.degree`, escalating the degree when `options.adaptive`.
pub fn solve_spectrum(config: &DiskConfig, options: &SolverOptions) -> Result<Spectrum> {
    options.validate()?;
    let mut spectrum = solve_at_degree(config, options.degree, options)?;
    let mut history = vec![step(&spectrum)];
    let mut converged = !options.adaptive;
    let mut degree = options.degree;
    if options.adaptive {
        loop {
            let next = degree + options.degree_step;
            if next > options.max_degree {
                break;
            }
            let refined = solve_at_degree(config, next, options)?;
            history.push(step(&refined));
            let change = match (spectrum.leading(), refined.leading()) {
                (Some(a), Some(b)) => (a - b).norm() / b.norm(),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            };
            spectrum = refined;
            degree = next;
            if change <= options.ctol {
                converged = true;
                break;
            }
        }
    }
    spectrum.diagnostics.cauchy = history;
    spectrum.diagnostics.converged = converged;
    Ok(spectrum)
}

fn step(s: &Spectrum) -> CauchyStep {
    CauchyStep {
        degree: s.diagnostics.degree,
        samples: s.diagnostics.samples,
        leading: s.leading(),
    }
}

/// Assembles and extracts the spectrum at one truncation degree.
pub fn solve_at_degree(
    config: &DiskConfig,
    degree: usize,
    options: &SolverOptions,
) -> Result<Spectrum> {
    let op = assemble_adaptive(
        config,
        degree,
        options.samples,
        options.defect_tol,
        options.max_samples,
        options.parallel,
    )?;
    extract(config, &op, options)
}

/// `(I - A)^{-1} B` and the condition number of `I - A`.
pub fn transfer_matrix(op: &RealifiedOperator, max_condition: f64) -> Result<(RealMatrix, f64)> {
    let dim = op.a_real.rows();
    let lhs = &RealMatrix::identity(dim) - &op.a_real;
    let lu = Lu::factor(&lhs)?;
    let condition = lu.condition();
    if !(condition <= max_condition) {
        return Err(Error::IllConditioned { condition });
    }
    Ok((lu.solve_matrix(&op.b_real), condition))
}

/// `||x - A x - B x / lambda|| / ||x||` in realified coordinates.
pub fn functional_residual(op: &RealifiedOperator, x: &[f64], lambda: Complex64) -> f64 {
    let n = x.len() / 2;
    let ax = op.a_real.mul_vec(x);
    let bx = op.b_real.mul_vec(x);
    let inv = 1.0 / lambda;
    let mut r2 = 0.0;
    let mut x2 = 0.0;
    for i in 0..n {
        let b = Complex64::new(bx[i], bx[n + i]) * inv;
        let re = x[i] - ax[i] - b.re;
        let im = x[n + i] - ax[n + i] - b.im;
        r2 += re * re + im * im;
        x2 += x[i] * x[i] + x[n + i] * x[n + i];
    }
    if x2 > 0.0 {
        (r2 / x2).sqrt()
    } else {
        f64::INFINITY
    }
}

fn spectral_norm_estimate(m: &RealMatrix) -> f64 {
    let n = m.cols();
    if n == 0 || m.max_abs() == 0.0 {
        return 0.0;
    }
    let mt = m.transpose();
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + (i as f64 * 0.618_033_988_75).fract())
        .collect();
    let mut estimate = 0.0;
    for _ in 0..60 {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        let w = mt.mul_vec(&m.mul_vec(&v));
        let next = w.iter().map(|x| x * x).sum::<f64>().sqrt().sqrt();
        if (next - estimate).abs() <= 1e-12 * next {
            return next;
        }
        estimate = next;
        v = w;
    }
    estimate
}

fn realified_to_complex(x: &[f64]) -> Vec<Complex64> {
    let n = x.len() / 2;
    (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Rotates the first largest coefficient to the positive real axis
/// (`phase_free`) or flips the sign so its real part (else imaginary part)
/// is positive. Returns the unit-norm vector.
fn normalize_phase(x: &[f64], phase_free: bool) -> Vec<f64> {
    let v = realified_to_complex(x);
    let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .copied()
        .find(|z| z.norm() >= big * (1.0 - 1e-9))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let factor = if phase_free {
        pivot.conj() / pivot.norm()
    } else {
        let positive = if pivot.re.abs() > 1e-9 * pivot.norm() {
            pivot.re > 0.0
        } else {
            pivot.im > 0.0
        };
        Complex64::new(if positive { 1.0 } else { -1.0 }, 0.0)
    };
    let nrm = norm(x);
    let rotated: Vec<Complex64> = v.iter().map(|z| z * factor / nrm).collect();
    rotated
        .iter()
        .map(|z| z.re)
        .chain(rotated.iter().map(|z| z.im))
        .collect()
}

fn extract(
    config: &DiskConfig,
    op: &RealifiedOperator,
    options: &SolverOptions,
) -> Result<Spectrum> {
    let (t, condition) = transfer_matrix(op, options.max_condition)?;
    let dec = eig_real_general(&t)?;
    let dim = op.complex_dim();
    let spurious_tol = options
        .spurious_abs
        .max(options.spurious_rel * op.b_real.norm_frobenius());
    let a_norm = spectral_norm_estimate(&op.a_real);
    // Imaginary parts below the eigensolver's backward error carry no information.
    let imag_floor = 64.0 * f64::EPSILON * t.norm_frobenius();

    let mut filtered_count = 0;
    let mut candidates = Vec::new();
    // Real eigenvalues with their real eigenvector candidates.
    let mut reals: Vec<(f64, Vec<Vec<f64>>, usize)> = Vec::new();
    for (lambda, y) in dec.eigenvalues.iter().zip(&dec.eigenvectors) {
        if lambda.norm() <= spurious_tol {
            filtered_count += 1;
            continue;
        }
        let re: Vec<f64> = y.iter().map(|z| z.re).collect();
        let im: Vec<f64> = y.iter().map(|z| z.im).collect();
        if lambda.im.abs() > (options.real_tol * lambda.norm()).max(imag_floor) {
            // Each conjugate pair is reported once, as whichever member the
            // real and imaginary parts of its eigenvector satisfy best.
            if lambda.im > 0.0 {
                let (best, residual) = [*lambda, lambda.conj()]
                    .into_iter()
                    .flat_map(|l| {
                        [&re, &im]
                            .into_iter()
                            .filter(|v| norm(v) > 1e-8)
                            .map(move |v| (l, v))
                    })
                    .map(|(l, v)| (l, functional_residual(op, v, l)))
                    .fold(
                        (*lambda, f64::INFINITY),
                        |acc, x| if x.1 < acc.1 { x } else { acc },
                    );
                candidates.push(Candidate {
                    lambda: best,
                    functional_residual: residual,
                    reason: CandidateReason::NonReal,
                });
            }
            continue;
        }
        let vectors: Vec<Vec<f64>> = if lambda.im == 0.0 {
            vec![re]
        } else if lambda.im > 0.0 {
            [re, im].into_iter().filter(|v| norm(v) > 1e-8).collect()
        } else {
            Vec::new()
        };
        match reals.last_mut() {
            Some((value, vs, count))
                if (*value - lambda.re).abs() <= options.real_tol * lambda.norm() =>
            {
                vs.extend(vectors);
                *count += 1;
            }
            _ => reals.push((lambda.re, vectors, 1)),
        }
    }

    let mut eigenpairs = Vec::new();
    let mut residual_rejected_count = 0;
    for (value, vectors, multiplicity) in reals {
        let lambda = Complex64::new(value, 0.0);
        let mut basis: Vec<Vec<Complex64>> = Vec::new();
        for x in vectors {
            let mut w = realified_to_complex(&x);
            let nx = norm(&x);
            w.iter_mut().for_each(|z| *z /= nx);
            let original = w.clone();
            for q in &basis {
                let proj: Complex64 = q.iter().zip(&original).map(|(a, b)| a.conj() * b).sum();
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= proj * qi);
            }
            let rest = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if rest <= 1e-6 {
                continue;
            }
            basis.push(w.iter().map(|z| z / rest).collect());

            let residual = functional_residual(op, &x, lambda);
            if residual > options.residual_tol {
                residual_rejected_count += 1;
                candidates.push(Candidate {
                    lambda,
                    functional_residual: residual,
                    reason: CandidateReason::Residual,
                });
                continue;
            }
            let jx: Vec<f64> = x[dim..]
                .iter()
                .map(|v| -v)
                .chain(x[..dim].iter().copied())
                .collect();
            let phase_free = functional_residual(op, &jx, lambda) <= options.residual_tol;
            let xn = normalize_phase(&x, phase_free);
            let field = TaylorField::from_realified(config.len(), &xn);
            let functional_residual = functional_residual(op, &xn, lambda);
            let constants = recover_constants(&field, lambda, config)?;
            let mut result = EigenResult {
                lambda,
                field,
                constants,
                functional_residual,
                boundary_residual: 0.0,
                is_real_lambda: true,
                realified_multiplicity: multiplicity,
                phase_free,
            };
            result.boundary_residual = result
                .potentials(config)
                .boundary_residual(options.boundary_samples)?;
            eigenpairs.push(result);
        }
    }
    eigenpairs.sort_by(|a, b| spectral_order(a.lambda, b.lambda));
    candidates.sort_by(|a, b| spectral_order(a.lambda, b.lambda));
    let nonreal_count = candidates
        .iter()
        .filter(|c| c.reason == CandidateReason::NonReal)
        .count();
    let bojarski_violations = eigenpairs
        .iter()
        .filter(|e| e.lambda.norm() > 1.0 + 1e-9)
        .count();

    Ok(Spectrum {
        eigenpairs,
        candidates,
        diagnostics: Diagnostics {
            degree: op.degree,
            samples: op.samples,
            max_tail: op.max_tail,
            max_defect: op.max_defect,
            condition,
            a_norm,
            neumann_convergent: a_norm < 1.0,
            realified_dim: 2 * dim,
            spurious_tol,
            imag_floor,
            filtered_count,
            nonreal_count,
            residual_rejected_count,
            bojarski_violations,
            cauchy: Vec::new(),
            converged: true,
        },
    })
}
