use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use super::decomp::hermitian_part;
use super::eig::{jacobi_eigh, Eigen};
use super::{ComplexMatrix, C64};
use crate::error::{bail, Result};
#[allow(unused_imports)]
use crate::math::Float;

/// Hermiticity tolerance enforced by the validating constructors.
pub const TOL_HERM: f64 = 1e-12;

/// Which factor of a bipartite space to keep in a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Subsystem {
    A,
    B,
}

/// Dense Hermitian matrix.
///
/// Validating constructors reject inputs whose entries differ from the
/// conjugate transpose by more than [`TOL_HERM`] and then store the exact
/// Hermitian part, so every value of this type is Hermitian to rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        Self::from_matrix_tol(m, TOL_HERM)
    }

    pub fn from_matrix_tol(m: ComplexMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            bail!(
                Shape,
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            );
        }
        if m.rows() == 0 {
            bail!(Shape, "Hermitian matrix must have dimension at least 1");
        }
        let n = m.rows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if !(worst <= tol) {
            bail!(
                Validation,
                "matrix is not Hermitian (asymmetry {worst:.3e} > {tol:.1e})"
            );
        }
        Ok(Self {
            m: hermitian_part(&m),
        })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        Self::from_matrix(ComplexMatrix::from_rows(rows)?)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Hermitian part `(m + m†)/2` without a tolerance check.
    pub fn hermitian_part(m: &ComplexMatrix) -> Self {
        assert!(
            m.is_square() && m.rows() > 0,
            "Hermitian part of a non-square matrix"
        );
        Self {
            m: hermitian_part(m),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: ComplexMatrix::identity(dim),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::identity(dim).scale(1.0 / dim as f64)
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self {
            m: ComplexMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(values[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// `|ψ⟩⟨ψ|` (not normalised).
    pub fn projector(psi: &[C64]) -> Self {
        let n = psi.len();
        Self {
            m: ComplexMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj()),
        }
    }

    /// `|i⟩⟨i|` in dimension `dim`.
    pub fn basis_projector(dim: usize, i: usize) -> Self {
        let mut v = alloc::vec![0.0; dim];
        v[i] = 1.0;
        Self::diag(&v)
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[alloc::vec![0.0, 1.0], alloc::vec![1.0, 0.0]]).unwrap()
    }

    pub fn pauli_y() -> Self {
        let z = C64::new(0.0, 0.0);
        Self::from_rows(&[
            alloc::vec![z, C64::new(0.0, -1.0)],
            alloc::vec![C64::new(0.0, 1.0), z],
        ])
        .unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::diag(&[1.0, -1.0])
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        self.m.to_rows()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// `tr(self · other)`, real for Hermitian arguments.
    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(
            self.dim(),
            other.dim(),
            "dimension mismatch in inner product"
        );
        let s = self.m.as_slice();
        let o = other.m.as_slice();
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = s[i * n + j];
                let b = o[j * n + i];
                acc += a.re * b.re - a.im * b.im;
            }
        }
        acc
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: self.m.scale_real(s),
        }
    }

    /// `self + s · other`.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in sum");
        let data = self
            .m
            .as_slice()
            .iter()
            .zip(other.m.as_slice())
            .map(|(a, b)| a + b * s)
            .collect();
        Self {
            m: ComplexMatrix::from_row_major(self.dim(), self.dim(), data).unwrap(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.frobenius_norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.max_abs()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m.max_abs_diff(&other.m)
    }

    pub fn is_finite(&self) -> bool {
        self.m
            .as_slice()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Entrywise transpose, equal to the complex conjugate.
    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
        }
    }

    pub fn eig(&self) -> Result<Eigen> {
        jacobi_eigh(&self.m)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eig()?.values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eigenvalues()?.last().unwrap())
    }

    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -tol)
    }

    /// `V diag(f(λ)) V†`; fails with a domain error when `f` is not finite
    /// on some eigenvalue.
    pub fn matrix_func(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let e = self.eig()?;
        for &v in &e.values {
            let fv = f(v);
            if !fv.is_finite() {
                bail!(Domain, "function undefined at eigenvalue {v:e}");
            }
        }
        Ok(Self::hermitian_part(&e.reconstruct_with(f)))
    }

    pub fn exp(&self) -> Result<Self> {
        self.matrix_func(|x| x.exp())
    }

    pub fn log(&self) -> Result<Self> {
        self.matrix_func(|x| if x > 0.0 { x.ln() } else { f64::NAN })
    }

    /// Square root with negative rounding noise clamped to zero.
    pub fn sqrt_psd(&self, tol: f64) -> Result<Self> {
        self.matrix_func(|x| {
            if x >= 0.0 {
                x.sqrt()
            } else if x >= -tol {
                0.0
            } else {
                f64::NAN
            }
        })
    }

    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().map(|v| v.abs()).sum())
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            m: self.m.kron(&other.m),
        }
    }

    /// Partial trace over the factor not named by `keep`.
    pub fn partial_trace(&self, dims: (usize, usize), keep: Subsystem) -> Result<Self> {
        let (da, db) = dims;
        if da == 0 || db == 0 || da * db != self.dim() {
            bail!(
                Shape,
                "partial trace of dimension {} over {}x{}",
                self.dim(),
                da,
                db
            );
        }
        let m = &self.m;
        let out = match keep {
            Subsystem::A => ComplexMatrix::from_fn(da, da, |i, j| {
                (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
            }),
            Subsystem::B => ComplexMatrix::from_fn(db, db, |k, l| {
                (0..da).map(|i| m[(i * db + k, i * db + l)]).sum()
            }),
        };
        Ok(Self::hermitian_part(&out))
    }

    /// `K · self · K†`, possibly changing dimension.
    pub fn conjugate_by(&self, k: &ComplexMatrix) -> Self {
        Self::hermitian_part(&k.sandwich(&self.m))
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            m: &self.m + &rhs.m,
        }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            m: &self.m - &rhs.m,
        }
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scale(rhs)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for HermitianMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&self.to_rows(), s)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let rows: Vec<Vec<C64>> = serde::Deserialize::deserialize(d)?;
        HermitianMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&self.to_rows(), s)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let rows: Vec<Vec<C64>> = serde::Deserialize::deserialize(d)?;
        ComplexMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}
