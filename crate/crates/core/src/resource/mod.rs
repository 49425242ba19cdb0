//! Allowed operations of the resource theory and monotonicity audits.

mod audit;
mod dao;
mod lf1;
pub mod random;

pub use audit::{
    audit_dao, audit_filter, baseline, monotone_audit, AuditKind, AuditOptions, AuditReport,
    AuditRow, Baseline,
};
pub use dao::{apply_dao, compose_dao, DeterministicAllowedOperation};
pub use lf1::{apply_lf1, Lf1Filter, TOL_CONTRACTION, TOL_STATISTICS, TOL_THERMAL};
