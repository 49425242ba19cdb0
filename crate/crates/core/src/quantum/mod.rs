//! Thermal states, channels, instruments and assemblages.

mod assemblage;
mod channel;
mod instrument;
mod states;
mod thermal;

pub use assemblage::{label, parse_label, Assemblage, TOL_REDUCED};
pub use channel::{
    choi_of_map, is_gibbs_preserving, map_of_choi, QuantumChannelChoi, TOL_GIBBS, TOL_TP,
};
pub use instrument::{
    apply_instrument, extend_with_ancilla, xz_projectors, InstrumentFamily, TOL_AVERAGE_CHANNEL,
};
pub use states::{isotropic_state, isotropic_state_with};
pub use thermal::{thermal_state, ThermalContext};

#[cfg(test)]
pub(crate) use thermal::gibbs_state;
