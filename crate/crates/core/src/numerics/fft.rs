use std::f64::consts::PI;

use num_complex::Complex64;

/// In-place radix-2 forward DFT, `X_k = sum_j x_j exp(-2 pi i j k / P)`.
///
/// Panics unless the length is a power of two.
pub fn fft_in_place(data: &mut [Complex64]) {
    let n = data.len();
    assert!(n.is_power_of_two(), "FFT length {n} is not a power of two");
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = -2.0 * PI / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                // Direct twiddles; recurrence drift would show up in the defect.
                let w = Complex64::from_polar(1.0, step * k as f64);
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len *= 2;
    }
}

/// Taylor coefficients recovered from samples on a circle.
#[derive(Debug, Clone)]
pub struct Projection {
    /// `c_0 .. c_{P-1}`.
    pub coefficients: Vec<Complex64>,
    /// Largest modulus among `c_{P/2} .. c_{P-1}`: aliased negative or overflow modes.
    pub defect: f64,
}

impl Projection {
    /// Largest modulus among `c_{from} .. c_{P/2 - 1}`.
    pub fn tail(&self, from: usize) -> f64 {
        let half = self.coefficients.len() / 2;
        self.coefficients
            .get(from..half)
            .unwrap_or(&[])
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Projects samples `f(a + R exp(2 pi i j / P))` onto powers of `(z - a) / R`.
pub fn dft_project(samples: &[Complex64]) -> Projection {
    let p = samples.len();
    let mut coefficients = samples.to_vec();
    fft_in_place(&mut coefficients);
    let inv = 1.0 / p as f64;
    for c in &mut coefficients {
        *c *= inv;
    }
    let defect = coefficients[p / 2..]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    Projection {
        coefficients,
        defect,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(
        p: usize,
        a: Complex64,
        r: f64,
        f: impl Fn(Complex64) -> Complex64,
    ) -> Vec<Complex64> {
        (0..p)
            .map(|j| f(a + Complex64::from_polar(r, 2.0 * PI * j as f64 / p as f64)))
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let x: Vec<Complex64> = (0..16)
            .map(|j| Complex64::new((j as f64).sin(), (j as f64 * 0.3).cos()))
            .collect();
        let mut y = x.clone();
        fft_in_place(&mut y);
        for (k, yk) in y.iter().enumerate() {
            let naive: Complex64 = x
                .iter()
                .enumerate()
                .map(|(j, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / 16.0))
                .sum();
            assert!((naive - yk).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_function() {
        let pr = dft_project(&vec![Complex64::new(5.0, 0.0); 32]);
        assert!((pr.coefficients[0] - 5.0).norm() < 1e-15);
        assert!(pr.coefficients[1..].iter().all(|c| c.norm() <= 1e-15));
        assert!(pr.defect <= 1e-15);
    }

    #[test]
    fn pure_mode() {
        let a = Complex64::new(0.2, -0.1);
        let r = 0.3;
        let s = samples(32, a, r, |z| ((z - a) / r).powi(3));
        let pr = dft_project(&s);
        assert!((pr.coefficients[3] - 1.0).norm() < 1e-14);
        assert!(pr.defect <= 1e-15);
    }

    #[test]
    fn defect_decays_geometrically_for_exterior_pole() {
        // Pole at distance 2R: coefficients decay like 2^-l, so the defect at
        // index P/2 behaves like 2^(-P/2).
        let a = Complex64::new(0.1, 0.0);
        let r = 0.2;
        let f = |z: Complex64| 1.0 / (z - a - 2.0 * r);
        let mut prev = f64::INFINITY;
        for p in [8usize, 16, 32, 64] {
            let d = dft_project(&samples(p, a, r, f)).defect;
            // c_l = -(1/(2R)) 2^-l, so max over the top half is at l = P/2.
            let expected = (1.0 / (2.0 * r)) * 0.5f64.powi(p as i32 / 2);
            assert!(d < prev);
            assert!(
                (d / expected - 1.0).abs() < 0.01,
                "P={p}: {d} vs {expected}"
            );
            prev = d;
        }
    }

    #[test]
    fn re_evaluation_reproduces_samples() {
        let a = Complex64::new(0.0, 0.3);
        let r = 0.1;
        let f = |z: Complex64| (z * 2.0).exp() / (z - 1.0);
        let s = samples(64, a, r, f);
        let pr = dft_project(&s);
        for (j, sj) in s.iter().enumerate() {
            let u = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / 64.0);
            let v: Complex64 = pr.coefficients[..32]
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c);
            assert!((v - sj).norm() <= pr.defect + 1e-13);
        }
    }
}
