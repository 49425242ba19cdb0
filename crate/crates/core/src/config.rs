//! Tolerances shared by the linear algebra, the solver and the tests.

/// Numerical tolerances and solver settings.
///
/// One record is threaded through every computation so that validation
/// checks and solver stopping rules agree.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct NumericConfig {
    /// Hermiticity tolerance enforced at construction.
    pub tol_herm: f64,
    /// Smallest eigenvalue still accepted as positive semidefinite.
    pub tol_psd: f64,
    /// Eigensolver accuracy target.
    pub tol_eig: f64,
    /// Interior-point iteration cap.
    pub max_iters: usize,
    /// Relative duality-gap target.
    pub gap_tol: f64,
    /// Relative primal/dual infeasibility target.
    pub feas_tol: f64,
    /// Fraction-to-boundary for interior-point steps.
    pub step_fraction: f64,
    /// Robustness values at or below this are treated as zero (LHS).
    pub tol_sr: f64,
    /// Emit one trace line per solver iteration.
    pub trace: bool,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            tol_herm: 1e-12,
            tol_psd: 1e-9,
            tol_eig: 1e-10,
            max_iters: 200,
            gap_tol: 1e-10,
            feas_tol: 1e-11,
            step_fraction: 0.98,
            tol_sr: 1e-7,
            trace: false,
        }
    }
}
