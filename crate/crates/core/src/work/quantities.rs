use crate::error::{bail, Result};
use crate::linalg::HermitianMatrix;
use crate::math::log_partition;
#[allow(unused_imports)]
use crate::math::Float;
use crate::BOLTZMANN_EV;

const TOL_STATE: f64 = 1e-9;

pub(crate) fn kt(temperature: f64) -> Result<f64> {
    if !(temperature.is_finite() && temperature > 0.0) {
        bail!(
            Domain,
            "temperature must be finite and positive, got {temperature}"
        );
    }
    Ok(BOLTZMANN_EV * temperature)
}

fn check_state(rho: &HermitianMatrix) -> Result<()> {
    if (rho.trace() - 1.0).abs() > TOL_STATE {
        bail!(Domain, "state has trace {}", rho.trace());
    }
    if !rho.is_psd(TOL_STATE)? {
        bail!(Domain, "state is not positive semidefinite");
    }
    Ok(())
}

fn check_pair(rho: &HermitianMatrix, h: &HermitianMatrix) -> Result<()> {
    if rho.dim() != h.dim() {
        bail!(
            Shape,
            "state of dimension {} with Hamiltonian of dimension {}",
            rho.dim(),
            h.dim()
        );
    }
    if !h.is_finite() {
        bail!(Domain, "Hamiltonian has non-finite entries");
    }
    check_state(rho)
}

/// `tr ρ ln ρ`, with `0 ln 0 = 0`.
fn neg_entropy(rho: &HermitianMatrix) -> Result<f64> {
    Ok(rho
        .eigenvalues()?
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum())
}

/// Optimal extractable work `kT ln2 · D(ρ‖γ_H)`, in eV:
/// `kT tr ρ ln ρ + tr(ρH) + kT ln Z`.
pub fn work_ext(rho: &HermitianMatrix, h: &HermitianMatrix, temperature: f64) -> Result<f64> {
    let kt = kt(temperature)?;
    check_pair(rho, h)?;
    let ln_z = log_partition(&h.eigenvalues()?, kt);
    Ok(kt * neg_entropy(rho)? + rho.inner(h) + kt * ln_z)
}

/// `W_ext(ρ, 0)`.
pub fn w_inf(rho: &HermitianMatrix, temperature: f64) -> Result<f64> {
    work_ext(rho, &HermitianMatrix::zeros(rho.dim()), temperature)
}

/// Work deficit `tr(Hρ) + kT ln Z − kT ln d`.
pub fn delta(rho: &HermitianMatrix, h: &HermitianMatrix, temperature: f64) -> Result<f64> {
    let kt = kt(temperature)?;
    check_pair(rho, h)?;
    let d = h.dim() as f64;
    let ln_z = log_partition(&h.eigenvalues()?, kt);
    Ok(rho.inner(h) + kt * (ln_z - d.ln()))
}
