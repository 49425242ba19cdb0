use alloc::vec::Vec;

use crate::error::{bail, Error, FilterCondition, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::quantum::Assemblage;

/// Slack on `K†K ⪯ I`.
pub const TOL_CONTRACTION: f64 = 1e-10;
/// Tolerance of condition (i), preserved statistics.
pub const TOL_STATISTICS: f64 = 1e-8;
/// Tolerance of condition (ii), preserved thermal state.
pub const TOL_THERMAL: f64 = 1e-9;

/// Single-Kraus stochastic filter `ρ ↦ KρK†/p_γ`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Lf1Filter {
    k: ComplexMatrix,
}

impl Lf1Filter {
    pub fn new(k: ComplexMatrix) -> Result<Self> {
        if !k.is_square() {
            bail!(Shape, "filter Kraus operator must be square");
        }
        let kk = HermitianMatrix::hermitian_part(&(&k.adjoint() * &k));
        let top = kk.max_eigenvalue()?;
        if top > 1.0 + TOL_CONTRACTION {
            bail!(Validation, "K†K has eigenvalue {top}, exceeding 1");
        }
        Ok(Self { k })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            k: ComplexMatrix::identity(d),
        }
    }

    pub fn kraus(&self) -> &ComplexMatrix {
        &self.k
    }

    pub fn dim(&self) -> usize {
        self.k.rows()
    }

    /// `p_γ = tr(KγK†)`.
    pub fn success_probability(&self, gamma: &HermitianMatrix) -> Result<f64> {
        self.check_dim(gamma)?;
        Ok(gamma.conjugate_by(&self.k).trace())
    }

    /// `K₂K₁`, i.e. `self` after `first`.
    pub fn compose(&self, first: &Self) -> Result<Self> {
        if self.dim() != first.dim() {
            bail!(
                Shape,
                "filters act on dimensions {} and {}",
                self.dim(),
                first.dim()
            );
        }
        Self::new(&self.k * &first.k)
    }

    /// Checks (ii) `KγK†/p_γ = γ`, then (i) `tr(Kσ_{a|x}K†)/p_γ = tr σ_{a|x}`.
    pub fn check_conditions(&self, sigma: &Assemblage, gamma: &HermitianMatrix) -> Result<()> {
        let p = self.nonzero_probability(gamma)?;
        if gamma
            .conjugate_by(&self.k)
            .scale(1.0 / p)
            .max_abs_diff(gamma)
            > TOL_THERMAL
        {
            return Err(Error::ConditionViolated(FilterCondition::ThermalState));
        }
        for m in sigma.members() {
            if (m.conjugate_by(&self.k).trace() / p - m.trace()).abs() > TOL_STATISTICS {
                return Err(Error::ConditionViolated(FilterCondition::Statistics));
            }
        }
        Ok(())
    }

    fn nonzero_probability(&self, gamma: &HermitianMatrix) -> Result<f64> {
        let p = self.success_probability(gamma)?;
        if !(p > 0.0) {
            return Err(Error::ZeroSuccessProbability);
        }
        Ok(p)
    }

    fn check_dim(&self, m: &HermitianMatrix) -> Result<()> {
        if m.dim() != self.dim() {
            bail!(
                Shape,
                "filter on dimension {} applied to dimension {}",
                self.dim(),
                m.dim()
            );
        }
        Ok(())
    }
}

/// `ω_{a|x} = Kσ_{a|x}K†/p_γ`; with `enforce_conditions` the filter must
/// satisfy conditions (i) and (ii) on this `σ`.
pub fn apply_lf1(
    filter: &Lf1Filter,
    sigma: &Assemblage,
    gamma: &HermitianMatrix,
    enforce_conditions: bool,
) -> Result<Assemblage> {
    sigma.check_dim(gamma)?;
    let p = filter.nonzero_probability(gamma)?;
    if enforce_conditions {
        filter.check_conditions(sigma, gamma)?;
    }
    let members: Vec<HermitianMatrix> = sigma
        .members()
        .iter()
        .map(|m| m.conjugate_by(&filter.k).scale(1.0 / p))
        .collect();
    Assemblage::new_unchecked(sigma.n_outcomes(), sigma.n_settings(), members)
}
