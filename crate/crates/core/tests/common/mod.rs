#![allow(dead_code)]

use incotherm_core::linalg::{ComplexMatrix, HermitianMatrix, C64};
use incotherm_core::quantum::{Assemblage, InstrumentFamily};
use incotherm_core::resource::random::random_unitary;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> HermitianMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    HermitianMatrix::hermitian_part(&g)
}

/// Full-rank density matrix from a Ginibre matrix.
pub fn random_state<R: Rng>(d: usize, rng: &mut R) -> HermitianMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let m = HermitianMatrix::hermitian_part(&(&g * &g.adjoint()))
        .add_scaled(1e-3, &HermitianMatrix::identity(d));
    let t = m.trace();
    m.scale(1.0 / t)
}

/// Pure qubit projector on Bloch vector `n`.
pub fn bloch_projector(n: [f64; 3]) -> HermitianMatrix {
    let i = HermitianMatrix::identity(2);
    i.add_scaled(n[0], &HermitianMatrix::pauli_x())
        .add_scaled(n[1], &HermitianMatrix::pauli_y())
        .add_scaled(n[2], &HermitianMatrix::pauli_z())
        .scale(0.5)
}

/// Steering assemblage of a two-qubit state with visibility `v` towards
/// `|Φ+⟩` measured along the rows of a random rotation: for Bloch direction
/// `n_x`, `σ_{±|x} = (I ± v·n̄_x·σ)/4` (conjugated direction for `Φ+`).
pub fn werner_like_assemblage<R: Rng>(v: f64, n_settings: usize, rng: &mut R) -> Assemblage {
    let u = random_unitary(2, rng);
    let mut members = Vec::with_capacity(2 * n_settings);
    for x in 0..n_settings {
        let axis = match x % 3 {
            0 => [1.0, 0.0, 0.0],
            1 => [0.0, 0.0, 1.0],
            _ => [0.0, 1.0, 0.0],
        };
        for sign in [1.0, -1.0] {
            let n = [sign * v * axis[0], sign * v * axis[1], sign * v * axis[2]];
            let m = bloch_projector(n).scale(0.5).conjugate_by(&u);
            members.push(m);
        }
    }
    Assemblage::new(2, n_settings, members).unwrap()
}

/// `2^{SR}` of a qubit assemblage with two mutually unbiased settings and
/// visibility `v` relative to `γ = I/2`: the boundary sits at `v = 1/√2`.
pub fn two_setting_ratio(v: f64) -> f64 {
    (v * SQRT2).max(1.0)
}

/// Family whose output on `γ` is `√γ P_{a|x} √γ` for the X and Z projectors.
pub fn purified_family(gamma: &HermitianMatrix) -> InstrumentFamily {
    let root = gamma.sqrt_psd(1e-12).unwrap();
    let taus: Vec<Vec<HermitianMatrix>> = [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]
        .iter()
        .map(|n| {
            [1.0, -1.0]
                .iter()
                .map(|s| {
                    bloch_projector([s * n[0], s * n[1], s * n[2]]).conjugate_by(root.as_matrix())
                })
                .collect()
        })
        .collect();
    InstrumentFamily::conditional_preparation(&taus).unwrap()
}
