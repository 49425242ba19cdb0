//! Samplers for operations that are free by construction.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::{DeterministicAllowedOperation, Lf1Filter};
use crate::error::Result;
use crate::linalg::{ComplexMatrix, HermitianMatrix, C64};
#[allow(unused_imports)]
use crate::math::Float;
use crate::quantum::QuantumChannelChoi;

/// Eigenvalues of `γ` closer than this share an eigenspace.
const DEGENERACY_TOL: f64 = 1e-12;

/// Haar-random `d×d` unitary (Gram–Schmidt on a complex Ginibre matrix).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d)
            .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        for _ in 0..2 {
            for c in &cols {
                let dot: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= dot * ci;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Unitary commuting with `γ`: Haar-random within each eigenspace.
pub fn random_commuting_unitary<R: Rng + ?Sized>(
    gamma: &HermitianMatrix,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    let e = gamma.eig()?;
    let d = gamma.dim();
    let mut block = ComplexMatrix::zeros(d, d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (e.values[end] - e.values[start]).abs() < DEGENERACY_TOL {
            end += 1;
        }
        let u = random_unitary(end - start, rng);
        for i in 0..end - start {
            for j in 0..end - start {
                block[(start + i, start + j)] = u[(i, j)];
            }
        }
        start = end;
    }
    let v = &e.vectors;
    Ok(&(v * &block) * &v.adjoint())
}

/// Probability vector of length `n`, uniform on the simplex.
pub fn random_distribution<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Convex mixture of `n_unitaries` conjugations by `γ`-commuting unitaries
/// and the full thermalisation `ρ ↦ γ tr ρ`.
pub fn random_gibbs_preserving_channel<R: Rng + ?Sized>(
    gamma: &HermitianMatrix,
    n_unitaries: usize,
    rng: &mut R,
) -> Result<QuantumChannelChoi> {
    let w = random_distribution(n_unitaries + 1, rng);
    let mut ch = QuantumChannelChoi::full_thermalisation(gamma).scale(w[n_unitaries]);
    for &wk in &w[..n_unitaries] {
        let u = random_commuting_unitary(gamma, rng)?;
        ch = ch.add_scaled(wk, &QuantumChannelChoi::unitary(&u)?)?;
    }
    Ok(ch)
}

/// Random operation mapping families with `n_y` settings × `n_b` outcomes to
/// `n_x` settings × `n_a` outcomes on the system of `γ`.
pub fn random_dao<R: Rng + ?Sized>(
    (n_a, n_x): (usize, usize),
    (n_b, n_y): (usize, usize),
    gamma: &HermitianMatrix,
    rng: &mut R,
) -> Result<DeterministicAllowedOperation> {
    let pre: Vec<Vec<f64>> = (0..n_x)
        .map(|_| sharpen(random_distribution(n_y, rng), rng))
        .collect();
    let mut post = Vec::with_capacity(n_x * n_y * n_b);
    for _ in 0..n_x * n_y * n_b {
        post.push(sharpen(random_distribution(n_a, rng), rng));
    }
    let pre_channel = random_gibbs_preserving_channel(gamma, 2, rng)?;
    let post_channel = random_gibbs_preserving_channel(gamma, 2, rng)?;
    DeterministicAllowedOperation::new(n_a, pre, post, pre_channel, post_channel)
}

/// With probability one half, replaces a distribution by a point mass so
/// samples include deterministic relabelings.
fn sharpen<R: Rng + ?Sized>(p: Vec<f64>, rng: &mut R) -> Vec<f64> {
    if rng.random::<bool>() {
        return p;
    }
    let k = rng.random_range(0..p.len());
    (0..p.len())
        .map(|i| if i == k { 1.0 } else { 0.0 })
        .collect()
}

/// `K = √p·U` with `U` commuting with `γ` and `p ∈ (0.05, 1]`.
pub fn random_lf1_filter<R: Rng + ?Sized>(
    gamma: &HermitianMatrix,
    rng: &mut R,
) -> Result<Lf1Filter> {
    let p = 0.05 + 0.95 * rng.random::<f64>();
    let u = random_commuting_unitary(gamma, rng)?;
    Lf1Filter::new(u.scale_real(p.sqrt()))
}
