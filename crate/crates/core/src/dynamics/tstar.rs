use alloc::vec::Vec;

use super::{Evolution, Positivity};
use crate::config::NumericConfig;
use crate::error::{bail, Error, Result};
use crate::linalg::HermitianMatrix;
use crate::quantum::{Assemblage, QuantumChannelChoi};
use crate::sdp::diamond_norm;
use crate::steering::sr_gamma;

/// Diamond distance to `γ tr(·)` at `t_max` above which convergence is
/// flagged.
pub const CONVERGENCE_LIMIT: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct TStarOptions {
    pub t_max: f64,
    /// Number of grid intervals on `[0, t_max]`.
    pub grid: usize,
    /// Bisection width; defaults to `1e−3·t_max`.
    pub tol: Option<f64>,
}

impl TStarOptions {
    pub fn new(t_max: f64) -> Self {
        Self {
            t_max,
            grid: 200,
            tol: None,
        }
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = Some(tol);
        self
    }

    fn bisection_tol(&self) -> f64 {
        self.tol.unwrap_or(1e-3 * self.t_max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CrossingKind {
    /// Steerable before, LHS after.
    Vanishing,
    /// LHS before, steerable after.
    Reviving,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Crossing {
    pub t: f64,
    pub kind: CrossingKind,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TStarReport {
    pub t_star: f64,
    pub crossings: Vec<Crossing>,
    /// Diamond distance between `𝓝_{t_max}` and `γ tr(·)`.
    pub convergence_distance: f64,
    pub converged: bool,
    /// Worst positivity class seen on the grid.
    pub positivity: Positivity,
}

fn evolve(sigma: &Assemblage, map: &QuantumChannelChoi) -> Result<Assemblage> {
    let members = sigma
        .members()
        .iter()
        .map(|m| map.apply(m))
        .collect::<Result<Vec<_>>>()?;
    Assemblage::new_unchecked(sigma.n_outcomes(), sigma.n_settings(), members)
}

/// Last time the evolved assemblage `{𝓝_t(σ_{a|x})}` turns from steerable to
/// LHS, located on a grid and refined by bisection.
pub fn find_t_star(
    sigma: &Assemblage,
    gamma: &HermitianMatrix,
    ev: &Evolution,
    opts: &TStarOptions,
    cfg: &NumericConfig,
) -> Result<TStarReport> {
    if !(opts.t_max > 0.0 && opts.t_max.is_finite()) || opts.grid == 0 {
        bail!(
            Domain,
            "need a finite t_max > 0 and at least one grid interval"
        );
    }
    for x in 0..sigma.n_settings() {
        let diff = sigma.reduced_state(x).max_abs_diff(gamma);
        if diff > 1e-8 {
            bail!(
                Domain,
                "reduced state of setting {x} differs from γ by {diff:.3e}"
            );
        }
        for a in 0..sigma.n_outcomes() {
            if !(sigma.probability(a, x) > 0.0) {
                bail!(Domain, "member {a}|{x} has zero trace");
            }
        }
    }
    let end = ev.map_at(opts.t_max)?;
    let delta = &end.choi().clone() - QuantumChannelChoi::full_thermalisation(gamma).choi();
    let convergence_distance = diamond_norm(&delta, (ev.dim(), ev.dim()), cfg)?;

    let steerable = |t: f64| -> Result<(bool, f64)> {
        let r = sr_gamma(&evolve(sigma, &ev.map_at(t)?)?, gamma, cfg)?;
        Ok((r.sr > cfg.tol_sr, r.q_star))
    };

    let n = opts.grid;
    let times: Vec<f64> = (0..=n).map(|k| opts.t_max * k as f64 / n as f64).collect();
    let mut positivity = Positivity::CompletelyPositive;
    let mut states = Vec::with_capacity(times.len());
    for &t in &times {
        match ev.positivity_at(t, cfg.tol_psd)? {
            Positivity::Violated => bail!(Validation, "evolution is not positive at t = {t}"),
            Positivity::PositiveOnly => positivity = Positivity::PositiveOnly,
            Positivity::CompletelyPositive => {}
        }
        states.push(steerable(t)?);
    }
    if let Some(&(true, q)) = states.last() {
        return Err(Error::Inconclusive { margin: 1.0 - q });
    }

    let tol = opts.bisection_tol();
    let mut crossings = Vec::new();
    for k in 0..n {
        let (s_lo, s_hi) = (states[k].0, states[k + 1].0);
        if s_lo == s_hi {
            continue;
        }
        let (mut lo, mut hi) = (times[k], times[k + 1]);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if steerable(mid)?.0 == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let kind = if s_lo {
            CrossingKind::Vanishing
        } else {
            CrossingKind::Reviving
        };
        crossings.push(Crossing {
            t: 0.5 * (lo + hi),
            kind,
        });
    }
    let t_star = crossings
        .iter()
        .rev()
        .find(|c| c.kind == CrossingKind::Vanishing)
        .map_or(0.0, |c| c.t);
    Ok(TStarReport {
        t_star,
        crossings,
        convergence_distance,
        converged: convergence_distance < CONVERGENCE_LIMIT,
        positivity,
    })
}
