use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, RealMatrix};

/// Eigenpairs sorted by nonincreasing modulus, then real part, then imaginary part.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<Complex64>,
    /// Unit 2-norm eigenvectors, `eigenvectors[j]` belongs to `eigenvalues[j]`.
    pub eigenvectors: Vec<Vec<Complex64>>,
    /// Backward error estimate `||M v - lambda v|| / ||M||_F` per pair.
    pub residuals: Vec<f64>,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    fn from_pairs(m: &ComplexMatrix, mut pairs: Vec<(Complex64, Vec<Complex64>)>) -> Self {
        pairs.sort_by(|a, b| spectral_order(a.0, b.0));
        let scale = m.norm_frobenius();
        let residuals = pairs
            .iter()
            .map(|(lambda, v)| {
                let mv = m.mul_vec(v);
                let r = mv
                    .iter()
                    .zip(v)
                    .map(|(a, b)| (a - lambda * b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if scale > 0.0 {
                    r / scale
                } else {
                    r
                }
            })
            .collect();
        let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
        Self {
            eigenvalues,
            eigenvectors,
            residuals,
        }
    }
}

/// Rounds to 12 significant digits so that values equal up to rounding tie.
fn quantize(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let e = x.abs().log10().floor() as i32 - 11;
    let unit = 10f64.powi(e);
    (x / unit).round() * unit
}

/// Total order used for every spectrum in the crate: nonincreasing modulus,
/// then nonincreasing real part, then nonincreasing imaginary part, each
/// compared at 12 significant digits.
pub fn spectral_order(a: Complex64, b: Complex64) -> Ordering {
    quantize(b.norm())
        .total_cmp(&quantize(a.norm()))
        .then(quantize(b.re).total_cmp(&quantize(a.re)))
        .then(quantize(b.im).total_cmp(&quantize(a.im)))
}

/// Sorts values by nonincreasing modulus with the crate's tie-break.
pub fn sort_spectrum(values: &mut [Complex64]) {
    values.sort_by(|&a, &b| spectral_order(a, b));
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    // Rotate the (first) largest component onto the positive real axis.
    let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .find(|z| z.norm() >= big * (1.0 - 1e-12))
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.rows();
    let tolerance = 1e-12 * m.max_abs();
    let deviation = (m - &m.adjoint()).max_abs();
    if deviation > tolerance {
        return Err(Error::NotHermitian {
            deviation,
            tolerance,
        });
    }

    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let total = m.norm_frobenius();
    const MAX_SWEEPS: usize = 100;
    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            index: 0,
            iterations: MAX_SWEEPS,
        });
    }

    let pairs = (0..n)
        .map(|j| {
            let mut vec = v.column(j);
            normalize(&mut vec);
            (Complex64::new(a[(j, j)].re, 0.0), vec)
        })
        .collect();
    Ok(EigenDecomposition::from_pairs(m, pairs))
}

/// Zeroes `a[p][q]` with `a <- J^H a J`, `v <- v J`, where `J = D R`, `D`
/// removes the phase of `a[p][q]` and `R` is a real plane rotation.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let n = a.rows();
    let phase = apq / g; // e^{i theta}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = 0.5 * (aqq - app) / g;
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = [[c, s], [-s e^{-i theta}, c e^{-i theta}]] on rows/cols (p, q).
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -s * phase.conj();
    let jqq = c * phase.conj();

    // a <- a J
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * jpp + aiq * jqp;
        a[(i, q)] = aip * jpq + aiq * jqq;
    }
    // a <- J^H a
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = jpp.conj() * apj + jqp.conj() * aqj;
        a[(q, j)] = jpq.conj() * apj + jqq.conj() * aqj;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * jpp + viq * jqp;
        v[(i, q)] = vip * jpq + viq * jqq;
    }
}

/// Eigendecomposition of a general complex matrix: Householder reduction to
/// Hessenberg form, Wilkinson-shifted QR to complex Schur form, and
/// triangular back-substitution for the eigenvectors.
pub fn eig_complex_general(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.rows();
    let mut h = m.clone();
    let mut q = ComplexMatrix::identity(n);
    complex_hessenberg(&mut h, &mut q);
    complex_schur(&mut h, &mut q)?;

    let norm = h.norm_frobenius().max(f64::MIN_POSITIVE);
    let pairs = (0..n)
        .map(|k| {
            let lambda = h[(k, k)];
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            x[k] = Complex64::new(1.0, 0.0);
            for i in (0..k).rev() {
                let s: Complex64 = (i + 1..=k).map(|j| h[(i, j)] * x[j]).sum();
                let mut den = h[(i, i)] - lambda;
                if den.norm() < f64::EPSILON * norm {
                    den = Complex64::new(f64::EPSILON * norm, 0.0);
                }
                x[i] = -s / den;
            }
            let mut v = q.mul_vec(&x);
            normalize(&mut v);
            (lambda, v)
        })
        .collect();
    Ok(EigenDecomposition::from_pairs(m, pairs))
}

fn complex_hessenberg(a: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // a <- (I - 2 v v^H) a on rows k+1..
        for j in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt.conj() * a[(k + 1 + t, j)])
                .sum();
            for (t, vt) in v.iter().enumerate() {
                a[(k + 1 + t, j)] -= 2.0 * vt * dot;
            }
        }
        // a <- a (I - 2 v v^H), q <- q (I - 2 v v^H) on columns k+1..
        for mat in [&mut *a, &mut *q] {
            for i in 0..n {
                let dot: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(t, vt)| mat[(i, k + 1 + t)] * vt)
                    .sum();
                for (t, vt) in v.iter().enumerate() {
                    mat[(i, k + 1 + t)] -= 2.0 * dot * vt.conj();
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

fn complex_schur(h: &mut ComplexMatrix, q: &mut ComplexMatrix) -> Result<()> {
    let n = h.rows();
    if n < 2 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let norm = h.norm_frobenius();
    let max_iter = 60 * n;
    let mut total = 0usize;
    let mut iter = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        // Deflation search.
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { norm } else { s };
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::NoConvergence {
                index: hi,
                iterations: total,
            });
        }
        let shift = if iter.is_multiple_of(10) {
            // Exceptional shift.
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * 0.75
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let tr2 = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
            let (l1, l2) = (tr2 + disc, tr2 - disc);
            if (l1 - d).norm() < (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let a = h[(k, k)];
            let b = h[(k + 1, k)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (1.0, Complex64::new(0.0, 0.0))
            } else if a.norm() == 0.0 {
                (0.0, Complex64::new(1.0, 0.0))
            } else {
                (a.norm() / r, b.conj() * a / (a.norm() * r))
            };
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = c * x + s * y;
                h[(k + 1, j)] = -s.conj() * x + c * y;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            for i in 0..=(k + 2).min(hi) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let x = q[(i, k)];
                let y = q[(i, k + 1)];
                q[(i, k)] = x * c + y * s.conj();
                q[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    Ok(())
}

/// Eigendecomposition of a general real matrix: diagonal balancing,
/// Householder reduction to Hessenberg form, then Francis double-shift QR
/// with eigenvector back-substitution (the EISPACK `orthes`/`hqr2` scheme).
pub fn eig_real_general(m: &RealMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.rows();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![],
            eigenvectors: vec![],
            residuals: vec![],
        });
    }
    let mut h = m.as_slice().to_vec();
    let scale = balance(&mut h, n);
    let mut v = vec![0.0; n * n];
    orthes(&mut h, &mut v, n);
    let (d, e) = hqr2(&mut h, &mut v, n)?;

    let mut pairs = Vec::with_capacity(n);
    let mut j = 0;
    while j < n {
        let column = |k: usize| -> Vec<f64> { (0..n).map(|i| v[i * n + k] * scale[i]).collect() };
        if e[j] == 0.0 {
            let mut vec: Vec<Complex64> = column(j)
                .into_iter()
                .map(|x| Complex64::new(x, 0.0))
                .collect();
            normalize(&mut vec);
            pairs.push((Complex64::new(d[j], 0.0), vec));
            j += 1;
        } else {
            let re = column(j);
            let im = column(j + 1);
            let mut vec: Vec<Complex64> = re
                .iter()
                .zip(&im)
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect();
            normalize(&mut vec);
            let conj: Vec<Complex64> = vec.iter().map(|z| z.conj()).collect();
            pairs.push((Complex64::new(d[j], e[j]), vec));
            pairs.push((Complex64::new(d[j + 1], e[j + 1]), conj));
            j += 2;
        }
    }
    Ok(EigenDecomposition::from_pairs(&m.to_complex(), pairs))
}

/// Diagonal similarity `D^-1 A D` with power-of-two entries equalizing row
/// and column norms. Returns `D`.
fn balance(a: &mut [f64], n: usize) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut scale = vec![1.0; n];
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].abs();
                    r += a[i * n + j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                scale[i] *= f;
                for j in 0..n {
                    a[i * n + j] /= f;
                    a[j * n + i] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
    scale
}

fn orthes(h: &mut [f64], v: &mut [f64], n: usize) {
    let mut ort = vec![0.0; n];
    let high = n - 1;
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[i * n + m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i * n + m - 1] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let f = (m..=high).rev().map(|i| ort[i] * h[i * n + j]).sum::<f64>() / hh;
            for i in m..=high {
                h[i * n + j] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let f = (m..=high).rev().map(|j| ort[j] * h[i * n + j]).sum::<f64>() / hh;
            for j in m..=high {
                h[i * n + j] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[m * n + m - 1] = scale * g;
    }

    for i in 0..n {
        for j in 0..n {
            v[i * n + j] = if i == j { 1.0 } else { 0.0 };
        }
    }
    for m in (1..high).rev() {
        if h[m * n + m - 1] == 0.0 {
            continue;
        }
        for i in m + 1..=high {
            ort[i] = h[i * n + m - 1];
        }
        for j in m..=high {
            let mut g: f64 = (m..=high).map(|i| ort[i] * v[i * n + j]).sum();
            g = (g / ort[m]) / h[m * n + m - 1];
            for i in m..=high {
                v[i * n + j] += g * ort[i];
            }
        }
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

/// Hessenberg QR to real Schur form plus eigenvector back-substitution.
/// Returns real and imaginary parts of the eigenvalues; `v` receives the
/// eigenvectors (real pairs as `(Re, Im)` adjacent columns).
#[allow(clippy::many_single_char_names)]
fn hqr2(hm: &mut [f64], vm: &mut [f64], nn: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let idx = |i: isize, j: isize| i as usize * nn + j as usize;
    macro_rules! h {
        ($i:expr, $j:expr) => {
            hm[idx($i as isize, $j as isize)]
        };
    }
    macro_rules! v {
        ($i:expr, $j:expr) => {
            vm[idx($i as isize, $j as isize)]
        };
    }

    let nn_i = nn as isize;
    let mut d = vec![0.0; nn];
    let mut e = vec![0.0; nn];
    let mut n: isize = nn_i - 1;
    let low: isize = 0;
    let high: isize = nn_i - 1;
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut t, mut w, mut x, mut y);

    let mut norm = 0.0;
    for i in 0..nn_i {
        for j in (i - 1).max(0)..nn_i {
            norm += h!(i, j).abs();
        }
    }

    let max_iter = 60 * nn.max(1);
    let mut iter = 0usize;
    let mut total_iter = 0usize;
    while n >= low {
        let mut l = n;
        while l > low {
            s = h!(l - 1, l - 1).abs() + h!(l, l).abs();
            if s == 0.0 {
                s = norm;
            }
            if h!(l, l - 1) == 0.0 || h!(l, l - 1).abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // One root.
            h!(n, n) += exshift;
            d[n as usize] = h!(n, n);
            e[n as usize] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // Two roots.
            w = h!(n, n - 1) * h!(n - 1, n);
            p = (h!(n - 1, n - 1) - h!(n, n)) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h!(n, n) += exshift;
            h!(n - 1, n - 1) += exshift;
            x = h!(n, n);
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[(n - 1) as usize] = x + z;
                d[n as usize] = d[(n - 1) as usize];
                if z != 0.0 {
                    d[n as usize] = x - w / z;
                }
                e[(n - 1) as usize] = 0.0;
                e[n as usize] = 0.0;
                x = h!(n, n - 1);
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;
                for j in (n - 1)..nn_i {
                    z = h!(n - 1, j);
                    h!(n - 1, j) = q * z + p * h!(n, j);
                    h!(n, j) = q * h!(n, j) - p * z;
                }
                for i in 0..=n {
                    z = h!(i, n - 1);
                    h!(i, n - 1) = q * z + p * h!(i, n);
                    h!(i, n) = q * h!(i, n) - p * z;
                }
                for i in low..=high {
                    z = v!(i, n - 1);
                    v!(i, n - 1) = q * z + p * v!(i, n);
                    v!(i, n) = q * v!(i, n) - p * z;
                }
            } else {
                d[(n - 1) as usize] = x + p;
                d[n as usize] = x + p;
                e[(n - 1) as usize] = z;
                e[n as usize] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h!(n, n);
            y = 0.0;
            w = 0.0;
            if l < n {
                y = h!(n - 1, n - 1);
                w = h!(n, n - 1) * h!(n - 1, n);
            }
            // Exceptional shifts.
            if iter == 10 {
                exshift += x;
                for i in low..=n {
                    h!(i, i) -= x;
                }
                s = h!(n, n - 1).abs() + h!(n - 1, n - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        h!(i, i) -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            total_iter += 1;
            if total_iter > max_iter {
                return Err(Error::NoConvergence {
                    index: n as usize,
                    iterations: total_iter,
                });
            }

            // Two consecutive small subdiagonal elements.
            let mut m = n - 2;
            while m >= l {
                z = h!(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / h!(m + 1, m) + h!(m, m + 1);
                q = h!(m + 1, m + 1) - z - r - s;
                r = h!(m + 2, m + 1);
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h!(m, m - 1).abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h!(m - 1, m - 1).abs() + z.abs() + h!(m + 1, m + 1).abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=n {
                h!(i, i - 2) = 0.0;
                if i > m + 2 {
                    h!(i, i - 3) = 0.0;
                }
            }

            // Double QR step on rows l..=n and columns m..=n.
            let mut k = m;
            while k < n {
                let notlast = k != n - 1;
                if k != m {
                    p = h!(k, k - 1);
                    q = h!(k + 1, k - 1);
                    r = if notlast { h!(k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h!(k, k - 1) = -s * x;
                    } else if l != m {
                        h!(k, k - 1) = -h!(k, k - 1);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..nn_i {
                        p = h!(k, j) + q * h!(k + 1, j);
                        if notlast {
                            p += r * h!(k + 2, j);
                            h!(k + 2, j) -= p * z;
                        }
                        h!(k, j) -= p * x;
                        h!(k + 1, j) -= p * y;
                    }
                    for i in 0..=n.min(k + 3) {
                        p = x * h!(i, k) + y * h!(i, k + 1);
                        if notlast {
                            p += z * h!(i, k + 2);
                            h!(i, k + 2) -= p * r;
                        }
                        h!(i, k) -= p;
                        h!(i, k + 1) -= p * q;
                    }
                    for i in low..=high {
                        p = x * v!(i, k) + y * v!(i, k + 1);
                        if notlast {
                            p += z * v!(i, k + 2);
                            v!(i, k + 2) -= p * r;
                        }
                        v!(i, k) -= p;
                        v!(i, k + 1) -= p * q;
                    }
                }
                k += 1;
            }
        }
    }

    if norm == 0.0 {
        // Zero matrix: V already holds the identity.
        return Ok((d, e));
    }

    // Back-substitute to find vectors of the upper triangular form.
    for n in (0..nn_i).rev() {
        p = d[n as usize];
        q = e[n as usize];
        if q == 0.0 {
            let mut l = n;
            h!(n, n) = 1.0;
            for i in (0..n).rev() {
                w = h!(i, i) - p;
                r = 0.0;
                for j in l..=n {
                    r += h!(i, j) * h!(j, n);
                }
                if e[i as usize] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        h!(i, n) = if w != 0.0 { -r / w } else { -r / (eps * norm) };
                    } else {
                        x = h!(i, i + 1);
                        y = h!(i + 1, i);
                        q = (d[i as usize] - p) * (d[i as usize] - p)
                            + e[i as usize] * e[i as usize];
                        t = (x * s - z * r) / q;
                        h!(i, n) = t;
                        h!(i + 1, n) = if x.abs() > z.abs() {
                            (-r - w * t) / x
                        } else {
                            (-s - y * t) / z
                        };
                    }
                    t = h!(i, n).abs();
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            h!(j, n) /= t;
                        }
                    }
                }
            }
        } else if q < 0.0 {
            let mut l = n - 1;
            if h!(n, n - 1).abs() > h!(n - 1, n).abs() {
                h!(n - 1, n - 1) = q / h!(n, n - 1);
                h!(n - 1, n) = -(h!(n, n) - p) / h!(n, n - 1);
            } else {
                let (cr, ci) = cdiv(0.0, -h!(n - 1, n), h!(n - 1, n - 1) - p, q);
                h!(n - 1, n - 1) = cr;
                h!(n - 1, n) = ci;
            }
            h!(n, n - 1) = 0.0;
            h!(n, n) = 1.0;
            for i in (0..n - 1).rev() {
                let mut ra = 0.0;
                let mut sa = 0.0;
                for j in l..=n {
                    ra += h!(i, j) * h!(j, n - 1);
                    sa += h!(i, j) * h!(j, n);
                }
                w = h!(i, i) - p;
                if e[i as usize] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i as usize] == 0.0 {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        h!(i, n - 1) = cr;
                        h!(i, n) = ci;
                    } else {
                        x = h!(i, i + 1);
                        y = h!(i + 1, i);
                        let di = d[i as usize] - p;
                        let mut vr = di * di + e[i as usize] * e[i as usize] - q * q;
                        let vi = di * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (cr, ci) =
                            cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        h!(i, n - 1) = cr;
                        h!(i, n) = ci;
                        if x.abs() > z.abs() + q.abs() {
                            h!(i + 1, n - 1) = (-ra - w * h!(i, n - 1) + q * h!(i, n)) / x;
                            h!(i + 1, n) = (-sa - w * h!(i, n) - q * h!(i, n - 1)) / x;
                        } else {
                            let (cr, ci) = cdiv(-r - y * h!(i, n - 1), -s - y * h!(i, n), z, q);
                            h!(i + 1, n - 1) = cr;
                            h!(i + 1, n) = ci;
                        }
                    }
                    t = h!(i, n - 1).abs().max(h!(i, n).abs());
                    if (eps * t) * t > 1.0 {
                        for j in i..=n {
                            h!(j, n - 1) /= t;
                            h!(j, n) /= t;
                        }
                    }
                }
            }
        }
    }

    // Back-transform to eigenvectors of the original matrix.
    for j in (low..nn_i).rev() {
        for i in low..=high {
            z = 0.0;
            for k in low..=j.min(high) {
                z += v!(i, k) * h!(k, j);
            }
            v!(i, j) = z;
        }
    }
    Ok((d, e))
}
