use crate::error::{Error, Result};

use super::matrix::{Matrix, Scalar};

/// Condition estimates above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    norm_one: f64,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(m: &Matrix<T>) -> Result<Self> {
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
        let norm_one = m.norm_one();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].modulus()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot == 0.0 {
                return Err(Error::IllConditioned {
                    condition: f64::INFINITY,
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f == T::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm, norm_one })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Solves for every column of `b`.
    pub fn solve_matrix(&self, b: &Matrix<T>) -> Matrix<T> {
        let cols: Vec<Vec<T>> = (0..b.cols()).map(|j| self.solve(&b.column(j))).collect();
        Matrix::from_columns(&cols)
    }

    pub fn inverse(&self) -> Matrix<T> {
        self.solve_matrix(&Matrix::identity(self.dim()))
    }

    /// `||M||_1 ||M^-1||_1`, from the explicit inverse.
    pub fn condition(&self) -> f64 {
        self.norm_one * self.inverse().norm_one()
    }
}

/// Solution of a square system with its diagnostics.
#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub x: Vec<T>,
    pub condition: f64,
    /// `||M x - b|| / (||M|| ||x||)` with one-norms.
    pub relative_residual: f64,
}

/// Solves `M x = b`, rejecting systems with condition estimate above [`MAX_CONDITION`].
pub fn solve_linear<T: Scalar>(m: &Matrix<T>, b: &[T]) -> Result<Solution<T>> {
    if b.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            got: b.len(),
        });
    }
    let lu = Lu::factor(m)?;
    let condition = lu.condition();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let x = lu.solve(b);
    let r = m.mul_vec(&x);
    let res: f64 = r.iter().zip(b).map(|(&a, &b)| (a - b).modulus()).sum();
    let xn: f64 = x.iter().map(|v| v.modulus()).sum();
    let denom = lu.norm_one * xn;
    let relative_residual = if denom > 0.0 { res / denom } else { res };
    Ok(Solution {
        x,
        condition,
        relative_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RealMatrix;
    use num_complex::Complex64;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    #[test]
    fn identity_and_diagonal() {
        let b = vec![1.5, -2.0, 3.0];
        let s = solve_linear(&RealMatrix::identity(3), &b).unwrap();
        assert_eq!(s.x, b);
        let m = RealMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]);
        let s = solve_linear(&m, &[2.0, 4.0]).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-15 && (s.x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_round_trip() {
        let mut rng = StdRng::seed_from_u64(7);
        let m = RealMatrix::from_fn(10, 10, |_, _| rng.random_range(-1.0..1.0));
        let x: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = m.mul_vec(&x);
        let s = solve_linear(&m, &b).unwrap();
        let err =
            s.x.iter()
                .zip(&x)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
        assert!(err < 1e-10, "err {err}");
        let xn: f64 = s.x.iter().map(|v| v.abs()).sum();
        assert!(s.relative_residual * m.norm_one() * xn <= 1e-10 * m.norm_one() * xn);
    }

    #[test]
    fn complex_system() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let m = crate::numerics::ComplexMatrix::from_rows(&[vec![one, i], vec![-i, 2.0 * one]]);
        let x = vec![Complex64::new(0.5, 0.25), Complex64::new(-1.0, 2.0)];
        let s = solve_linear(&m, &m.mul_vec(&x)).unwrap();
        assert!((s.x[0] - x[0]).norm() < 1e-14 && (s.x[1] - x[1]).norm() < 1e-14);
    }

    #[test]
    fn singular_rejected() {
        let m = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(
            solve_linear(&m, &[1.0, 1.0]),
            Err(Error::IllConditioned { .. })
        ));
        let m = RealMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0 + 1e-15]]);
        assert!(matches!(
            solve_linear(&m, &[1.0, 1.0]),
            Err(Error::IllConditioned { .. })
        ));
    }
}
