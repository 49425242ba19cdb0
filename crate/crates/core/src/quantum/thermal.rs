use crate::error::{bail, Result};
use crate::linalg::HermitianMatrix;
use crate::math::log_partition;
#[allow(unused_imports)]
use crate::math::Float;
use crate::BOLTZMANN_EV;

/// Hamiltonian (eV) at temperature `T` (K).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThermalContext {
    pub hamiltonian: HermitianMatrix,
    pub temperature: f64,
}

impl ThermalContext {
    pub fn new(hamiltonian: HermitianMatrix, temperature: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature > 0.0) {
            bail!(
                Domain,
                "temperature must be finite and positive, got {temperature}"
            );
        }
        if !hamiltonian.is_finite() {
            bail!(Domain, "Hamiltonian has non-finite entries");
        }
        Ok(Self {
            hamiltonian,
            temperature,
        })
    }

    /// Zero Hamiltonian in dimension `d`, so that `γ = I/d`.
    pub fn trivial(d: usize, temperature: f64) -> Result<Self> {
        Self::new(HermitianMatrix::zeros(d), temperature)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn kt(&self) -> f64 {
        BOLTZMANN_EV * self.temperature
    }

    /// `ln tr exp(−H/kT)`.
    pub fn log_partition(&self) -> Result<f64> {
        Ok(log_partition(&self.hamiltonian.eigenvalues()?, self.kt()))
    }

    /// `γ = exp(−H/kT)/Z`, with the ground energy shifted to zero first.
    pub fn thermal_state(&self) -> Result<HermitianMatrix> {
        gibbs_state(&self.hamiltonian, self.kt())
    }
}

pub fn thermal_state(ctx: &ThermalContext) -> Result<HermitianMatrix> {
    ctx.thermal_state()
}

pub(crate) fn gibbs_state(h: &HermitianMatrix, kt: f64) -> Result<HermitianMatrix> {
    let e = h.eig()?;
    let e_min = e.values[0];
    let weights: alloc::vec::Vec<f64> = e
        .values
        .iter()
        .map(|&v| (-(v - e_min) / kt).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let p: alloc::vec::Vec<f64> = weights.iter().map(|w| w / z).collect();
    Ok(HermitianMatrix::hermitian_part(&e.reconstruct_values(&p)))
}
