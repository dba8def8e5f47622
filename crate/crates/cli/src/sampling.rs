//! Rejection sampling of random disk configurations.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rlinear_core::geometry::{validate, Disk, DiskConfig};

use crate::config::SweepConfig;
use crate::rng::SweepRng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("placed {placed} of {requested} disks before exhausting {retries} retries")]
pub struct SamplingExhausted {
    pub placed: usize,
    pub requested: usize,
    pub retries: usize,
}

/// Draws `n`, then disks one at a time: center uniform in `|a| < 1 - delta`
/// (radius `(1 - delta) sqrt(u)`, angle `2 pi u`), radius log-uniform, real
/// and imaginary contrast uniform. A disk violating the margins is redrawn;
/// `max_retries` bounds the total number of redraws.
pub fn generate_random_config(
    rng: &mut SweepRng,
    params: &SweepConfig,
) -> Result<DiskConfig, SamplingExhausted> {
    let n = rng.integer(params.n_min, params.n_max);
    let mut disks: Vec<Disk> = Vec::with_capacity(n);
    let mut retries = 0;
    while disks.len() < n {
        let rc = (1.0 - params.margin) * rng.next_f64().sqrt();
        let center = Complex64::from_polar(rc, TAU * rng.next_f64());
        let radius = rng.log_uniform(params.radius_min, params.radius_max);
        let contrast = Complex64::new(
            rng.uniform(params.contrast_min, params.contrast_max),
            rng.uniform(params.contrast_im_min, params.contrast_im_max),
        );
        disks.push(Disk::new(center, radius, contrast));
        if !validate(&disks, params.margin).is_ok() {
            disks.pop();
            retries += 1;
            if retries >= params.max_retries {
                return Err(SamplingExhausted {
                    placed: disks.len(),
                    requested: n,
                    retries,
                });
            }
        }
    }
    Ok(DiskConfig::with_margin(disks, params.margin).expect("validated disk by disk"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_fixed_radius() {
        let params = SweepConfig {
            n_min: 1,
            n_max: 1,
            radius_min: 0.05,
            radius_max: 0.05,
            ..SweepConfig::default()
        };
        let mut rng = SweepRng::new(3);
        let cfg = generate_random_config(&mut rng, &params).unwrap();
        assert_eq!(cfg.len(), 1);
        assert_eq!(cfg.disks()[0].radius, 0.05);
        assert!(cfg.disks()[0].center.norm() < 1.0 - params.margin);
    }

    #[test]
    fn infeasible_request() {
        let params = SweepConfig {
            n_min: 50,
            n_max: 50,
            radius_min: 0.3,
            radius_max: 0.3,
            max_retries: 10_000,
            ..SweepConfig::default()
        };
        let err = generate_random_config(&mut SweepRng::new(0), &params).unwrap_err();
        assert_eq!(err.requested, 50);
        assert!(err.placed < 50);
    }

    #[test]
    fn seed_reproduces_sequence() {
        let params = SweepConfig::default();
        let draw = |seed| {
            let mut rng = SweepRng::new(seed);
            (0..5)
                .map(|_| generate_random_config(&mut rng, &params).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
        for cfg in draw(9) {
            assert!(validate(cfg.disks(), params.margin).is_ok());
            assert!(cfg.has_real_contrasts());
        }
    }
}
