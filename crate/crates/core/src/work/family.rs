use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::linalg::HermitianMatrix;
use crate::BOLTZMANN_EV;

/// Hamiltonians `H_{a|x}` in eV, setting-major.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HamiltonianFamily {
    n_outcomes: usize,
    n_settings: usize,
    members: Vec<HermitianMatrix>,
}

impl HamiltonianFamily {
    pub fn new(
        n_outcomes: usize,
        n_settings: usize,
        members: Vec<HermitianMatrix>,
    ) -> Result<Self> {
        if n_outcomes == 0 || n_settings == 0 || members.len() != n_outcomes * n_settings {
            bail!(
                Shape,
                "{} Hamiltonians for {n_outcomes} outcomes x {n_settings} settings",
                members.len()
            );
        }
        let d = members[0].dim();
        if members.iter().any(|m| m.dim() != d) {
            bail!(Shape, "Hamiltonians differ in dimension");
        }
        if members.iter().any(|m| !m.is_finite()) {
            bail!(Domain, "Hamiltonian family has non-finite entries");
        }
        Ok(Self {
            n_outcomes,
            n_settings,
            members,
        })
    }

    pub fn from_fn(
        n_outcomes: usize,
        n_settings: usize,
        mut f: impl FnMut(usize, usize) -> HermitianMatrix,
    ) -> Result<Self> {
        let mut members = Vec::with_capacity(n_outcomes * n_settings);
        for x in 0..n_settings {
            for a in 0..n_outcomes {
                members.push(f(a, x));
            }
        }
        Self::new(n_outcomes, n_settings, members)
    }

    pub fn zeros(n_outcomes: usize, n_settings: usize, dim: usize) -> Self {
        Self::from_fn(n_outcomes, n_settings, |_, _| HermitianMatrix::zeros(dim)).unwrap()
    }

    /// `H_{a|x} = kT·δ·F_{a|x}` with `F_{0|0} = −F_{1|0} = X` and
    /// `F_{0|1} = −F_{1|1} = Z`.
    pub fn pauli(delta: f64, temperature: f64) -> Result<Self> {
        let e = BOLTZMANN_EV * temperature * delta;
        let ops = [HermitianMatrix::pauli_x(), HermitianMatrix::pauli_z()];
        Self::from_fn(2, 2, |a, x| ops[x].scale(if a == 0 { e } else { -e }))
    }

    pub fn n_outcomes(&self) -> usize {
        self.n_outcomes
    }

    pub fn n_settings(&self) -> usize {
        self.n_settings
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    pub fn member(&self, a: usize, x: usize) -> &HermitianMatrix {
        &self.members[x * self.n_outcomes + a]
    }

    pub fn members(&self) -> &[HermitianMatrix] {
        &self.members
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            members: self.members.iter().map(|m| m.scale(s)).collect(),
            ..self.clone()
        }
    }

    /// Largest entry modulus over all members.
    pub fn max_abs(&self) -> f64 {
        self.members
            .iter()
            .map(HermitianMatrix::max_abs)
            .fold(0.0, f64::max)
    }
}
