//! Dense complex linear algebra for small Hermitian problems.

pub mod decomp;
mod eig;
mod hermitian;
mod matrix;

pub use eig::{jacobi_eigh, Eigen};
pub use hermitian::{HermitianMatrix, Subsystem, TOL_HERM};
pub use matrix::ComplexMatrix;

pub type C64 = num_complex::Complex64;

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn eig_hermitian(m: &HermitianMatrix) -> crate::Result<Eigen> {
    m.eig()
}

/// Real-valued wrapper around [`HermitianMatrix::matrix_func`].
pub fn matrix_func(m: &HermitianMatrix, f: impl Fn(f64) -> f64) -> crate::Result<HermitianMatrix> {
    m.matrix_func(f)
}

/// `|Φ+⟩ = Σ_i |ii⟩/√d`.
pub fn max_entangled_vector(d: usize) -> alloc::vec::Vec<C64> {
    #[allow(unused_imports)]
    use crate::math::Float;
    let s = 1.0 / (d as f64).sqrt();
    let mut v = alloc::vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = C64::new(s, 0.0);
    }
    v
}
