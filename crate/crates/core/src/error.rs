use alloc::string::String;

use crate::sdp::SolveStatus;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Which thermodynamic filter condition failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterCondition {
    /// Classical statistics changed.
    Statistics,
    /// Thermal state not fixed.
    ThermalState,
}

impl core::fmt::Display for FilterCondition {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FilterCondition::Statistics => f.write_str("(i) measurement statistics"),
            FilterCondition::ThermalState => f.write_str("(ii) thermal state"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("solver finished with status {0:?}")]
    Solver(SolveStatus),
    #[error("filter violates condition {0}")]
    ConditionViolated(FilterCondition),
    #[error("filter has zero success probability on the thermal state")]
    ZeroSuccessProbability,
    #[error("still steerable at t_max (margin {margin:.3e})")]
    Inconclusive { margin: f64 },
    #[error("no candidate Hamiltonian family reaches the energy threshold")]
    NoAdmissibleHamiltonian,
    #[error("assemblage is not steerable")]
    NotSteerable,
    #[error("no work-extraction advantage: assemblage admits an LHS model")]
    NoAdvantage,
}

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
