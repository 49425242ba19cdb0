//! Local-hidden-state models and the thermalisation steering robustness.

mod lhs;
mod strategies;

pub use lhs::{
    lhs_membership, lhs_model, sr_gamma, sr_gamma_dual, LhsModel, Membership, SrResult,
    SteeringWitness,
};
pub use strategies::{
    enumerate_strategies, enumerate_strategies_capped, DeterministicStrategySet, STRATEGY_CAP,
};

pub(crate) use lhs::check_gamma;
