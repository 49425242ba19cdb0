use alloc::vec::Vec;

use super::{ComplexMatrix, C64};
use crate::error::{bail, Result};
#[allow(unused_imports)]
use crate::math::Float;

const MAX_SWEEPS: usize = 80;

/// Eigendecomposition `A = V diag(values) V†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.col(k)
    }

    /// `V diag(f(values)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let fv: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        self.reconstruct_values(&fv)
    }

    /// `V diag(fv) V†` for replacement eigenvalues `fv`.
    pub fn reconstruct_values(&self, fv: &[f64]) -> ComplexMatrix {
        let n = self.values.len();
        assert_eq!(fv.len(), n, "eigenvalue count");
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                if fv[k] != 0.0 {
                    acc += v[(i, k)] * v[(j, k)].conj() * fv[k];
                }
            }
            acc
        })
    }
}

/// Cyclic complex Jacobi eigensolver for a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot with a diagonal
/// unitary and then applies a real Givens rotation.
pub fn jacobi_eigh(a: &ComplexMatrix) -> Result<Eigen> {
    let n = a.rows();
    if !a.is_square() {
        bail!(
            Shape,
            "eigendecomposition of a {}x{} matrix",
            a.rows(),
            a.cols()
        );
    }
    if a.as_slice()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        bail!(NumericalFailure, "non-finite entry in eigenvalue input");
    }
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let frob = m.frobenius_norm();
    if frob == 0.0 || n == 1 {
        return Ok(sorted(m, v));
    }
    let target = f64::EPSILON * frob;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q, target * 1e-3 / n as f64);
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > 1e3 * target {
        bail!(
            NumericalFailure,
            "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
        );
    }
    Ok(sorted(m, v))
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, skip: f64) {
    let n = m.rows();
    let apq = m[(p, q)];
    let r = apq.norm();
    if r <= skip {
        return;
    }
    let phase = (apq / r).conj();
    let theta = (m[(q, q)].re - m[(p, p)].re) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = phase * (-s);
    let g_qq = phase * c;

    for k in 0..n {
        let (kp, kq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = kp * g_pp + kq * g_qp;
        m[(k, q)] = kp * g_pq + kq * g_qq;
    }
    for k in 0..n {
        let (pk, qk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = g_pp.conj() * pk + g_qp.conj() * qk;
        m[(q, k)] = g_pq.conj() * pk + g_qq.conj() * qk;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
    for k in 0..n {
        let (kp, kq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = kp * g_pp + kq * g_qp;
        v[(k, q)] = kp * g_pq + kq * g_qq;
    }
}

fn sorted(m: ComplexMatrix, v: ComplexMatrix) -> Eigen {
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Eigen { values, vectors }
}
