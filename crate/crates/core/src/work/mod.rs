//! Work extraction figures of merit and witness-derived Hamiltonians.

mod advantage;
mod family;
mod quantities;

pub use advantage::{
    certificate_hamiltonians, delta_bar, delta_bar_linear, max_delta_bar_lhs, pauli_work_point,
    sr_from_work, tmin_from_ratio, tmin_from_work, work_figure, Certificate, LhsWorkOptimum,
    PauliWorkPoint, WorkRatio, WorkReport, WorkRow, DEFAULT_ETA,
};
pub use family::HamiltonianFamily;
pub use quantities::{delta, w_inf, work_ext};

/// `δ` of the NV nuclear-spin example.
pub const NV_DELTA: f64 = 1.59976e-7;
/// Temperature of the NV example, in K.
pub const NV_TEMPERATURE: f64 = 300.0;
