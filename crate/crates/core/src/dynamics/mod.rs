//! Thermalisation schedules, evolutions and survival times.

mod evolution;
mod schedule;
mod tstar;

pub use evolution::{davies_map, thermalisation_channel, Evolution, Positivity};
pub use schedule::{
    ScheduleTable, ThermalisationSchedule, BISECTION_INVERSE_TOL, VALIDATION_POINTS,
};
pub use tstar::{
    find_t_star, Crossing, CrossingKind, TStarOptions, TStarReport, CONVERGENCE_LIMIT,
};

use crate::config::NumericConfig;
use crate::error::{bail, Result};
use crate::linalg::HermitianMatrix;
use crate::quantum::{Assemblage, InstrumentFamily, ThermalContext};
use crate::steering::sr_gamma;

/// `σ_{a|x} ↦ h(t)·σ_{a|x} + (1 − h(t))·tr(σ_{a|x})·γ`.
pub fn thermalise(
    sigma: &Assemblage,
    gamma: &HermitianMatrix,
    schedule: &ThermalisationSchedule,
    t: f64,
) -> Result<Assemblage> {
    thermalise_at(sigma, gamma, schedule.h(t)?)
}

/// [`thermalise`] at a given value `h ∈ [0, 1]`.
pub fn thermalise_at(sigma: &Assemblage, gamma: &HermitianMatrix, h: f64) -> Result<Assemblage> {
    if !(0.0..=1.0).contains(&h) {
        bail!(Domain, "schedule value {h} outside [0, 1]");
    }
    sigma.mix(h, &sigma.flat(gamma)?)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TMinReport {
    pub t_min: f64,
    pub sr: f64,
    /// `2^{−SR}`, the value of `h` at `t_min`.
    pub h_target: f64,
}

/// Survival time `h⁻¹(2^{−SR_γ(𝓔(γ))})` of the family's output assemblage.
pub fn t_min_report(
    fam: &InstrumentFamily,
    ctx: &ThermalContext,
    schedule: &ThermalisationSchedule,
    cfg: &NumericConfig,
) -> Result<TMinReport> {
    fam.validate(cfg)?;
    schedule.validate()?;
    let gamma = ctx.thermal_state()?;
    let sigma = fam.apply(&gamma)?;
    let r = sr_gamma(&sigma, &gamma, cfg)?;
    if r.sr <= cfg.tol_sr {
        return Ok(TMinReport {
            t_min: 0.0,
            sr: 0.0,
            h_target: 1.0,
        });
    }
    let h_target = r.q_star;
    Ok(TMinReport {
        t_min: schedule.h_inv(h_target)?,
        sr: r.sr,
        h_target,
    })
}

pub fn t_min(
    fam: &InstrumentFamily,
    ctx: &ThermalContext,
    schedule: &ThermalisationSchedule,
    cfg: &NumericConfig,
) -> Result<f64> {
    Ok(t_min_report(fam, ctx, schedule, cfg)?.t_min)
}
