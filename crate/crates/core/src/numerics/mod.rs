//! Dense linear-algebra and Fourier kernels. Nothing in here knows about disks.

mod eigen;
mod fft;
mod linsolve;
mod matrix;

pub use eigen::{
    eig_complex_general, eig_hermitian, eig_real_general, sort_spectrum, spectral_order,
    EigenDecomposition,
};
pub use fft::{dft_project, fft_in_place, Projection};
pub use linsolve::{solve_linear, Lu, Solution, MAX_CONDITION};
pub use matrix::{ComplexMatrix, Matrix, RealMatrix, Scalar};
