use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::*;
use crate::fullsolver::{solve_spectrum, EigenResult, SolverOptions, TaylorField};
use crate::geometry::Disk;

fn example1() -> DiskConfig {
    DiskConfig::new(vec![Disk::real(0.0, 0.5, 0.4)]).unwrap()
}

fn example2(r: f64) -> DiskConfig {
    DiskConfig::new(vec![Disk::real(0.5, r, 0.5), Disk::real(-0.5, r, 0.5)]).unwrap()
}

fn opts() -> AnalysisOptions {
    AnalysisOptions::default()
}

#[test]
fn example1_omega_is_linear() {
    let cfg = example1();
    let s = solve_spectrum(&cfg, &SolverOptions::fixed(6)).unwrap();
    let e = &s.eigenpairs[0];
    let z = Complex64::new(0.3, -0.4);
    let c = omega(e, &cfg, Complex64::new(1.0, 0.0)).unwrap();
    assert!((omega(e, &cfg, z).unwrap() - c * z).norm() < 1e-14);
    assert_eq!(
        omega(e, &cfg, Complex64::new(0.0, 0.0)).unwrap(),
        Complex64::new(0.0, 0.0)
    );
    // omega(z) = conj(phi_0(1 / conj z)).
    let pot = e.potentials(&cfg);
    let direct = pot
        .phi0(Complex64::new(1.0, 0.0) / z.conj())
        .unwrap()
        .conj();
    assert!((omega(e, &cfg, z).unwrap() - direct).norm() < 1e-14);
}

#[test]
fn example1_report() {
    let cfg = example1();
    let s = solve_spectrum(&cfg, &SolverOptions::fixed(6)).unwrap();
    let report = conjecture_report(&s.eigenpairs[..4], &cfg, &opts()).unwrap();
    for a in &report.pairs {
        assert_eq!(a.wind_omega, a.p as i64);
        assert_eq!(a.wind_phi0, a.p as i64);
        assert_eq!(a.univalent, a.p == 1);
        assert!(a.harmonic_residual.unwrap() <= 1e-10);
    }
    for a in &report.pairs[..3] {
        assert_eq!(a.nodal.count, 2 * a.p);
    }
    assert!(report.all_pass);
    assert_eq!(report.leading_univalent, Some(true));
    assert!(report.tie_groups.is_empty());
}

#[test]
fn example2_omega_windings() {
    let cfg = example2(0.05);
    let s = solve_spectrum(&cfg, &SolverOptions::fixed(10)).unwrap();
    let report = conjecture_report(
        &s.eigenpairs,
        &cfg,
        &AnalysisOptions {
            max_p: Some(4),
            ..opts()
        },
    )
    .unwrap();
    assert_eq!(report.pairs[0].wind_omega, 1);
    assert!(report.pairs[0].univalent);
    // The third pair is the leading one of the second branch.
    assert_eq!(report.pairs[2].wind_omega, 2);
    assert!(report.all_pass);
    // Double zero at the origin for the antisymmetric branch.
    let e = &s.eigenpairs[2];
    let ratio = omega(e, &cfg, Complex64::new(1e-3, 0.0)).unwrap()
        / omega(e, &cfg, Complex64::new(2e-3, 0.0)).unwrap();
    assert!((ratio.norm() - 0.25).abs() < 1e-3);
}

#[test]
fn empty_spectrum_report() {
    let cfg = example1();
    let r = conjecture_report(&[], &cfg, &opts()).unwrap();
    assert!(r.pairs.is_empty());
    assert_eq!(r.leading_univalent, None);
    assert!(r.all_pass);
}

#[test]
fn unsorted_spectrum_rejected() {
    let cfg = example1();
    let s = solve_spectrum(&cfg, &SolverOptions::fixed(3)).unwrap();
    let rev: Vec<EigenResult> = s.eigenpairs.iter().rev().cloned().collect();
    assert!(conjecture_report(&rev, &cfg, &opts()).is_err());
}

#[test]
fn ties_are_grouped() {
    let cfg = example1();
    let s = solve_spectrum(&cfg, &SolverOptions::fixed(3)).unwrap();
    let doubled = vec![
        s.eigenpairs[0].clone(),
        s.eigenpairs[0].clone(),
        s.eigenpairs[1].clone(),
    ];
    let r = conjecture_report(&doubled, &cfg, &opts()).unwrap();
    assert_eq!(r.tie_groups, vec![vec![1, 2]]);
    assert_eq!(r.pairs[1].tie_group, Some(0));
    assert_eq!(r.pairs[2].tie_group, None);
}

#[test]
fn harmonic_residual_behaviour() {
    let cfg = example1();
    let s = solve_spectrum(&cfg, &SolverOptions::fixed(6)).unwrap();
    for e in &s.eigenpairs[..4] {
        assert!(harmonic_residual(e, &cfg, 128).unwrap() <= 1e-10);
    }
    let mut nonreal = s.eigenpairs[0].clone();
    nonreal.is_real_lambda = false;
    assert!(matches!(
        harmonic_residual(&nonreal, &cfg, 128),
        Err(Error::NonRealEigenvalue { .. })
    ));
    // lambda = 1: the first relation reads u = const.
    let mut unit = s.eigenpairs[0].clone();
    unit.lambda = Complex64::new(1.0, 0.0);
    assert!(harmonic_residual(&unit, &cfg, 128).unwrap().is_finite());
}

#[test]
fn perturbed_eigenfield_breaks_transmission_condition() {
    let cfg = example2(0.05);
    let s = solve_spectrum(&cfg, &SolverOptions::fixed(10)).unwrap();
    let mut rng = StdRng::seed_from_u64(4);
    let e = &s.eigenpairs[0];
    let noisy: Vec<Vec<Complex64>> = e
        .field
        .coefficients()
        .iter()
        .map(|c| {
            c.iter()
                .map(|b| {
                    b + Complex64::new(rng.random_range(-1e-3..1e-3), rng.random_range(-1e-3..1e-3))
                })
                .collect()
        })
        .collect();
    let mut perturbed = e.clone();
    perturbed.field = TaylorField::from_coefficients(noisy).unwrap();
    let residual = perturbed.potentials(&cfg).boundary_residual(64).unwrap();
    assert!(residual > 1e-4, "{residual}");
    // The unit-circle relations are built into the representation.
    assert!(harmonic_residual(&perturbed, &cfg, 128).unwrap() <= 1e-10);
}
