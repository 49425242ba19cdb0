//! Cholesky factorisations and dense real solves.

use alloc::vec;
use alloc::vec::Vec;

use super::{ComplexMatrix, C64};
use crate::error::{bail, Result};
#[allow(unused_imports)]
use crate::math::Float;

/// Lower Cholesky factor of a Hermitian positive definite matrix.
///
/// Returns `None` when a pivot is not strictly positive.
pub fn cholesky(a: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = a.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Solves `L X = B` for lower-triangular `L`.
pub fn solve_lower(l: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    let mut x = b.clone();
    for c in 0..b.cols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Inverse of a lower-triangular matrix.
pub fn invert_lower(l: &ComplexMatrix) -> ComplexMatrix {
    solve_lower(l, &ComplexMatrix::identity(l.rows()))
}

/// Inverse of a Hermitian positive definite matrix via its Cholesky factor.
pub fn inverse_hpd(a: &ComplexMatrix) -> Option<ComplexMatrix> {
    let l = cholesky(a)?;
    let li = invert_lower(&l);
    let inv = &li.adjoint() * &li;
    Some(hermitian_part(&inv))
}

pub(crate) fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    ComplexMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

/// Solves the symmetric positive definite system `M x = rhs` (row-major `M`).
///
/// Falls back to partially pivoted LU when the Cholesky pivots break down.
pub fn solve_spd(m: &[f64], n: usize, rhs: &[f64]) -> Result<Vec<f64>> {
    if m.len() != n * n || rhs.len() != n {
        bail!(
            Shape,
            "system of order {n} with {} entries and rhs {}",
            m.len(),
            rhs.len()
        );
    }
    match real_cholesky(m, n) {
        Some(l) => Ok(cholesky_solve(&l, n, rhs)),
        None => solve_lu(m, n, rhs),
    }
}

fn real_cholesky(m: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    let scale = (0..n).fold(0.0f64, |s, i| s.max(m[i * n + i].abs()));
    for j in 0..n {
        let mut d = m[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 1e-15 * scale) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in j + 1..n {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[f64], n: usize, rhs: &[f64]) -> Vec<f64> {
    let mut y = rhs.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    y
}

/// Dense LU solve with partial pivoting.
pub fn solve_lu(m: &[f64], n: usize, rhs: &[f64]) -> Result<Vec<f64>> {
    let mut a = m.to_vec();
    let mut b = rhs.to_vec();
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    for col in 0..n {
        let (piv, pmax) =
            (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if !(pmax > 1e-300) || pmax < 1e-15 * scale {
            bail!(
                NumericalFailure,
                "singular linear system (pivot {pmax:.3e})"
            );
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        for r in col + 1..n {
            let f = a[r * n + col] / a[col * n + col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[r * n + k] -= f * a[col * n + k];
            }
            b[r] -= f * b[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    Ok(b)
}
