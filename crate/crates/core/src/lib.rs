//! Thermodynamic quantification of quantum instrument incompatibility.
//!
//! The crate computes the thermalisation steering robustness of a state
//! assemblage with a primal-dual interior-point SDP solver, converts it into
//! the longest time an instrument family's incompatibility signature
//! survives a thermalisation schedule, and certifies the equivalent
//! work-extraction advantage with Hamiltonians read off the dual witness.
//!
//! Everything here is `no_std` + `alloc`; file formats, the scenario runner
//! and the command-line front end live in the `incotherm` crate.
//!
//! ```
//! use incotherm_core::prelude::*;
//!
//! let gamma = HermitianMatrix::maximally_mixed(2);
//! let fam = InstrumentFamily::pauli_xz();
//! let sigma = fam.apply(&gamma).unwrap();
//! let sr = sr_gamma(&sigma, &gamma, &NumericConfig::default()).unwrap();
//! assert!((sr.sr - 0.5).abs() < 1e-6);
//! ```
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod config;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod quantum;
pub mod resource;
pub mod sdp;
pub mod steering;
pub mod work;

mod math;

pub use config::NumericConfig;
pub use error::{Error, Result};

/// Boltzmann constant in eV/K.
pub const BOLTZMANN_EV: f64 = 8.617333262e-5;

pub mod prelude {
    pub use crate::config::NumericConfig;
    pub use crate::dynamics::{
        davies_map, find_t_star, t_min, thermalise, Evolution, TStarOptions, ThermalisationSchedule,
    };
    pub use crate::error::{Error, Result};
    pub use crate::linalg::{ComplexMatrix, HermitianMatrix, Subsystem, C64};
    pub use crate::quantum::{
        isotropic_state, Assemblage, InstrumentFamily, QuantumChannelChoi, ThermalContext,
    };
    pub use crate::resource::{
        apply_dao, apply_lf1, compose_dao, DeterministicAllowedOperation, Lf1Filter,
    };
    pub use crate::sdp::{diamond_norm, solve_sdp, SdpProblem, SdpSolution, SolveStatus};
    pub use crate::steering::{
        enumerate_strategies, lhs_membership, sr_gamma, sr_gamma_dual, Membership,
    };
    pub use crate::work::{
        certificate_hamiltonians, delta, delta_bar, max_delta_bar_lhs, sr_from_work, w_inf,
        work_ext, HamiltonianFamily,
    };
    pub use crate::BOLTZMANN_EV;
}
