//! Block-diagonal Hermitian semidefinite programming.

mod diamond;
mod presolve;
mod problem;
mod solver;

use alloc::vec::Vec;

pub use diamond::diamond_norm;
pub use problem::{Constraint, SdpProblem};
pub use solver::{
    solve_sdp, solve_sdp_traced, SdpSolution, SolveStatus, GAP_LIMIT, RESIDUAL_LIMIT,
};

use crate::linalg::{ComplexMatrix, HermitianMatrix, C64};

/// Hermitian basis `{E_k}` with `tr(M E_k)` returning, in order, the
/// diagonal entries and the real and imaginary parts of each `M_ab`, `a < b`.
pub fn hermitian_basis(d: usize) -> Vec<HermitianMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        out.push(HermitianMatrix::basis_projector(d, a));
        for b in a + 1..d {
            let mut re = ComplexMatrix::zeros(d, d);
            re[(a, b)] = C64::new(0.5, 0.0);
            re[(b, a)] = C64::new(0.5, 0.0);
            out.push(HermitianMatrix::hermitian_part(&re));
            let mut im = ComplexMatrix::zeros(d, d);
            im[(a, b)] = C64::new(0.0, 0.5);
            im[(b, a)] = C64::new(0.0, -0.5);
            out.push(HermitianMatrix::hermitian_part(&im));
        }
    }
    out
}

/// Inverse of the coordinate map `M ↦ (tr(M E_k))_k` for [`hermitian_basis`].
pub fn from_basis_coords(d: usize, coords: &[f64]) -> HermitianMatrix {
    assert_eq!(coords.len(), d * d, "coordinate count");
    let mut m = ComplexMatrix::zeros(d, d);
    let mut it = coords.iter().copied();
    for a in 0..d {
        m[(a, a)] = C64::new(it.next().unwrap(), 0.0);
        for b in a + 1..d {
            let re = it.next().unwrap();
            let im = it.next().unwrap();
            m[(a, b)] = C64::new(re, im);
            m[(b, a)] = C64::new(re, -im);
        }
    }
    HermitianMatrix::hermitian_part(&m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_coordinates_roundtrip() {
        let m = HermitianMatrix::pauli_y().kron(&HermitianMatrix::diag(&[0.3, -1.2]));
        let coords: Vec<f64> = hermitian_basis(4).iter().map(|e| m.inner(e)).collect();
        assert!(from_basis_coords(4, &coords).max_abs_diff(&m) < 1e-15);
    }
}
