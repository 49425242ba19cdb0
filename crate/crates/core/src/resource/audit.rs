use alloc::vec::Vec;

use super::{apply_dao, apply_lf1, DeterministicAllowedOperation, Lf1Filter};
use crate::config::NumericConfig;
use crate::dynamics::ThermalisationSchedule;
use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;
use crate::quantum::{Assemblage, InstrumentFamily};
use crate::steering::sr_gamma;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum AuditKind {
    Dao,
    Filter,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuditRow {
    pub kind: AuditKind,
    pub index: usize,
    pub sr_before: f64,
    pub sr_after: f64,
    pub t_min_before: f64,
    pub t_min_after: f64,
    pub pass: bool,
    /// False when a filter was applied despite violating its conditions.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub tol: f64,
    /// All certified rows pass.
    pub pass: bool,
}

impl AuditReport {
    pub fn failures(&self) -> impl Iterator<Item = &AuditRow> {
        self.rows.iter().filter(|r| r.certified && !r.pass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditOptions {
    pub tol: f64,
    /// Apply condition-violating filters anyway and mark them non-certified.
    pub permissive: bool,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            permissive: false,
        }
    }
}

/// Robustness and survival time of an assemblage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Baseline {
    pub sr: f64,
    pub t_min: f64,
}

pub fn baseline(
    sigma: &Assemblage,
    gamma: &HermitianMatrix,
    schedule: &ThermalisationSchedule,
    cfg: &NumericConfig,
) -> Result<Baseline> {
    let r = sr_gamma(sigma, gamma, cfg)?;
    if r.sr <= cfg.tol_sr {
        return Ok(Baseline {
            sr: r.sr,
            t_min: 0.0,
        });
    }
    Ok(Baseline {
        sr: r.sr,
        t_min: schedule.h_inv(r.q_star)?,
    })
}

fn row(
    kind: AuditKind,
    index: usize,
    before: Baseline,
    after: Baseline,
    tol: f64,
    certified: bool,
) -> AuditRow {
    AuditRow {
        kind,
        index,
        sr_before: before.sr,
        sr_after: after.sr,
        t_min_before: before.t_min,
        t_min_after: after.t_min,
        pass: after.sr <= before.sr + tol && after.t_min <= before.t_min + tol,
        certified,
    }
}

/// One deterministic operation checked against the baseline of `fam(γ)`.
#[allow(clippy::too_many_arguments)]
pub fn audit_dao(
    index: usize,
    op: &DeterministicAllowedOperation,
    fam: &InstrumentFamily,
    gamma: &HermitianMatrix,
    schedule: &ThermalisationSchedule,
    before: Baseline,
    opts: &AuditOptions,
    cfg: &NumericConfig,
) -> Result<AuditRow> {
    let out = apply_dao(op, fam, gamma)?.apply(gamma)?;
    let after = baseline(&out, gamma, schedule, cfg)?;
    Ok(row(AuditKind::Dao, index, before, after, opts.tol, true))
}

/// One filter checked against the baseline of `σ`.
#[allow(clippy::too_many_arguments)]
pub fn audit_filter(
    index: usize,
    filter: &Lf1Filter,
    sigma: &Assemblage,
    gamma: &HermitianMatrix,
    schedule: &ThermalisationSchedule,
    before: Baseline,
    opts: &AuditOptions,
    cfg: &NumericConfig,
) -> Result<AuditRow> {
    let certified = match filter.check_conditions(sigma, gamma) {
        Ok(()) => true,
        Err(Error::ConditionViolated(_)) if opts.permissive => false,
        Err(e) => return Err(e),
    };
    let out = apply_lf1(filter, sigma, gamma, false)?;
    let after = baseline(&out, gamma, schedule, cfg)?;
    Ok(row(
        AuditKind::Filter,
        index,
        before,
        after,
        opts.tol,
        certified,
    ))
}

/// Checks that no operation or filter increases `SR_γ` or `t_min` of
/// `fam(γ)`. Operations that are not Gibbs preserving are rejected before
/// any row is computed.
pub fn monotone_audit(
    fam: &InstrumentFamily,
    gamma: &HermitianMatrix,
    schedule: &ThermalisationSchedule,
    ops: &[DeterministicAllowedOperation],
    filters: &[Lf1Filter],
    opts: &AuditOptions,
    cfg: &NumericConfig,
) -> Result<AuditReport> {
    for op in ops {
        op.check_gibbs(gamma)?;
    }
    let sigma = fam.apply(gamma)?;
    if !opts.permissive {
        for f in filters {
            f.check_conditions(&sigma, gamma)?;
        }
    }
    let before = baseline(&sigma, gamma, schedule, cfg)?;
    let mut rows = Vec::with_capacity(ops.len() + filters.len());
    for (i, op) in ops.iter().enumerate() {
        rows.push(audit_dao(i, op, fam, gamma, schedule, before, opts, cfg)?);
    }
    for (i, f) in filters.iter().enumerate() {
        rows.push(audit_filter(
            i, f, &sigma, gamma, schedule, before, opts, cfg,
        )?);
    }
    let pass = rows.iter().all(|r| !r.certified || r.pass);
    Ok(AuditReport {
        rows,
        tol: opts.tol,
        pass,
    })
}
