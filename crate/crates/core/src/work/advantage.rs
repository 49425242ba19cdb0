use alloc::vec::Vec;

use super::quantities::{delta, kt, w_inf, work_ext};
use super::HamiltonianFamily;
use crate::config::NumericConfig;
use crate::error::{bail, Error, Result};
use crate::linalg::HermitianMatrix;
#[allow(unused_imports)]
use crate::math::Float;
use crate::quantum::{Assemblage, InstrumentFamily, ThermalContext, TOL_GIBBS};
use crate::sdp::{solve_sdp, Constraint, SdpProblem};
use crate::steering::{
    check_gamma, enumerate_strategies, sr_gamma, sr_gamma_dual, DeterministicStrategySet, LhsModel,
    SteeringWitness,
};

/// Default lower bound `η` in `Δ̄_γ ≥ kT·η`.
pub const DEFAULT_ETA: f64 = 1e-3;
const TOL_CROSS_CHECK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WorkRow {
    pub outcome: usize,
    pub setting: usize,
    /// `P(a, x) = tr(σ_{a|x})/|x|`.
    pub probability: f64,
    pub w_ext: f64,
    pub w_inf: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WorkReport {
    pub rows: Vec<WorkRow>,
    /// `Σ P(a,x)[Δ(σ̂_{a|x}) − Δ(γ)]`, in eV.
    pub delta_bar: f64,
    pub eta_threshold: f64,
    pub in_h_eta: bool,
}

fn check_family(sigma: &Assemblage, fam: &HamiltonianFamily) -> Result<()> {
    if (sigma.n_outcomes(), sigma.n_settings(), sigma.dim())
        != (fam.n_outcomes(), fam.n_settings(), fam.dim())
    {
        bail!(
            Shape,
            "Hamiltonian family does not match the assemblage's outcomes, settings or dimension"
        );
    }
    Ok(())
}

fn check_positive_traces(sigma: &Assemblage) -> Result<()> {
    for x in 0..sigma.n_settings() {
        for a in 0..sigma.n_outcomes() {
            if !(sigma.probability(a, x) > 0.0) {
                bail!(Domain, "member {a}|{x} has zero trace");
            }
        }
    }
    Ok(())
}

/// `(1/|x|) Σ tr[H_{a|x}(σ_{a|x} − tr(σ_{a|x})γ)]`.
pub fn delta_bar_linear(
    sigma: &Assemblage,
    gamma: &HermitianMatrix,
    fam: &HamiltonianFamily,
) -> Result<f64> {
    check_family(sigma, fam)?;
    sigma.check_dim(gamma)?;
    let mut s = 0.0;
    for x in 0..sigma.n_settings() {
        for a in 0..sigma.n_outcomes() {
            let h = fam.member(a, x);
            s += h.inner(sigma.member(a, x)) - sigma.probability(a, x) * h.inner(gamma);
        }
    }
    Ok(s / sigma.n_settings() as f64)
}

/// Four-batch report; the aggregate is computed from the work deficits and
/// cross-checked against the linear form.
pub fn delta_bar(
    sigma: &Assemblage,
    gamma: &HermitianMatrix,
    fam: &HamiltonianFamily,
    temperature: f64,
    eta: f64,
) -> Result<WorkReport> {
    let kt = kt(temperature)?;
    check_family(sigma, fam)?;
    sigma.check_dim(gamma)?;
    check_positive_traces(sigma)?;
    let n_x = sigma.n_settings() as f64;
    let mut rows = Vec::with_capacity(sigma.members().len());
    let mut agg = 0.0;
    let mut scale = 0.0;
    let mut total_p = 0.0;
    for x in 0..sigma.n_settings() {
        for a in 0..sigma.n_outcomes() {
            let p = sigma.probability(a, x);
            let h = fam.member(a, x);
            let normalised = sigma.member(a, x).scale(1.0 / p);
            let d = delta(&normalised, h, temperature)?;
            let d_gamma = delta(gamma, h, temperature)?;
            let prob = p / n_x;
            agg += prob * (d - d_gamma);
            scale += prob * (normalised.inner(h).abs() + gamma.inner(h).abs());
            total_p += prob;
            rows.push(WorkRow {
                outcome: a,
                setting: x,
                probability: prob,
                w_ext: work_ext(&normalised, h, temperature)?,
                w_inf: w_inf(&normalised, temperature)?,
                delta: d,
            });
        }
    }
    if (total_p - 1.0).abs() > TOL_CROSS_CHECK {
        bail!(Domain, "batch probabilities sum to {total_p}");
    }
    let linear = delta_bar_linear(sigma, gamma, fam)?;
    if (agg - linear).abs() > TOL_CROSS_CHECK * scale.max(f64::MIN_POSITIVE) {
        bail!(
            NumericalFailure,
            "aggregate {agg:.12e} disagrees with linear form {linear:.12e}"
        );
    }
    Ok(WorkReport {
        rows,
        delta_bar: agg,
        eta_threshold: eta,
        in_h_eta: agg >= kt * eta,
    })
}

/// `Σ_{a,x} tr(σ_{a|x}) Δ(σ̂_{a|x})`, the summed four-batch work deficit.
pub fn work_figure(sigma: &Assemblage, fam: &HamiltonianFamily, temperature: f64) -> Result<f64> {
    let kt = kt(temperature)?;
    check_family(sigma, fam)?;
    let ln_d = (sigma.dim() as f64).ln();
    let mut s = 0.0;
    for x in 0..sigma.n_settings() {
        for a in 0..sigma.n_outcomes() {
            let h = fam.member(a, x);
            let ln_z = crate::math::log_partition(&h.eigenvalues()?, kt);
            s += h.inner(sigma.member(a, x)) + sigma.probability(a, x) * kt * (ln_z - ln_d);
        }
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LhsWorkOptimum {
    /// `max_{τ ∈ LHS(σ)} Δ̄_γ(τ, H)` in eV.
    pub value: f64,
    pub model: LhsModel,
}

impl LhsWorkOptimum {
    pub fn assemblage(&self) -> Result<Assemblage> {
        self.model.assemblage()
    }
}

/// Maximum of `Δ̄_γ(τ, H)` over LHS assemblages `τ` with `tr τ_{a|x} = tr σ_{a|x}`.
pub fn max_delta_bar_lhs(
    sigma: &Assemblage,
    gamma: &HermitianMatrix,
    fam: &HamiltonianFamily,
    cfg: &NumericConfig,
) -> Result<LhsWorkOptimum> {
    check_family(sigma, fam)?;
    sigma.check_dim(gamma)?;
    check_positive_traces(sigma)?;
    let (n_a, n_x, d) = (sigma.n_outcomes(), sigma.n_settings(), sigma.dim());
    let strategies = enumerate_strategies(n_a, n_x)?;
    let offset: f64 = (0..n_x)
        .flat_map(|x| (0..n_a).map(move |a| (a, x)))
        .map(|(a, x)| sigma.probability(a, x) * fam.member(a, x).inner(gamma))
        .sum();
    let norm = fam.max_abs();
    if norm == 0.0 {
        return Ok(LhsWorkOptimum {
            value: 0.0,
            model: product_model(sigma, gamma, strategies),
        });
    }
    let mut p = SdpProblem::new(alloc::vec![d; strategies.len()]);
    for (i, s) in strategies.iter().enumerate() {
        let mut c = HermitianMatrix::zeros(d);
        for (x, &a) in s.iter().enumerate() {
            c = c.add_scaled(-1.0 / norm, fam.member(a, x));
        }
        p.set_objective(i, c);
    }
    let id = HermitianMatrix::identity(d);
    for x in 0..n_x {
        for a in 0..n_a {
            let mut row = Constraint::new(sigma.probability(a, x));
            for i in 0..strategies.len() {
                if strategies.d(a, x, i) != 0.0 {
                    row.add_term(i, id.clone());
                }
            }
            p.push(row);
        }
    }
    let sol = solve_sdp(&p, cfg)?.into_optimal()?;
    let total = -sol.primal_obj * norm;
    let value = (total - offset) / n_x as f64;
    Ok(LhsWorkOptimum {
        value,
        model: LhsModel {
            strategies,
            etas: sol.x,
        },
    })
}

/// `η_i = Π_x p(s_i(x)|x)·γ`, which reproduces the flat assemblage.
fn product_model(
    sigma: &Assemblage,
    gamma: &HermitianMatrix,
    strategies: DeterministicStrategySet,
) -> LhsModel {
    let etas = strategies
        .iter()
        .map(|st| {
            gamma.scale(
                st.iter()
                    .enumerate()
                    .map(|(x, &a)| sigma.probability(a, x))
                    .product(),
            )
        })
        .collect();
    LhsModel { strategies, etas }
}

/// Best admitted candidate for the ratio `Δ̄_γ(σ, H) / max_{τ∈LHS(σ)} Δ̄_γ(τ, H)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkRatio {
    pub ratio: f64,
    pub index: usize,
    pub delta_bar: f64,
    pub lhs_max: f64,
    pub sr: f64,
}

pub fn sr_from_work(
    sigma: &Assemblage,
    gamma: &HermitianMatrix,
    candidates: &[HamiltonianFamily],
    eta: f64,
    temperature: f64,
    cfg: &NumericConfig,
) -> Result<WorkRatio> {
    if !(eta > 0.0 && eta.is_finite()) {
        bail!(Domain, "threshold η = {eta} must be positive and finite");
    }
    let kt = kt(temperature)?;
    check_gamma(sigma, gamma)?;
    let sr = sr_gamma(sigma, gamma, cfg)?.sr;
    if sr <= cfg.tol_sr {
        return Err(Error::NotSteerable);
    }
    let mut best: Option<WorkRatio> = None;
    for (index, fam) in candidates.iter().enumerate() {
        let db = delta_bar(sigma, gamma, fam, temperature, eta)?.delta_bar;
        if db < kt * eta {
            continue;
        }
        let lhs_max = max_delta_bar_lhs(sigma, gamma, fam, cfg)?.value;
        let ratio = db / lhs_max;
        if best.as_ref().is_none_or(|b| ratio > b.ratio) {
            best = Some(WorkRatio {
                ratio,
                index,
                delta_bar: db,
                lhs_max,
                sr,
            });
        }
    }
    best.ok_or(Error::NoAdmissibleHamiltonian)
}

/// Hamiltonians `H_{a|x} = −kT·|x|·Y_{a|x}` read off the dual witness,
/// with the work gap they certify.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub family: HamiltonianFamily,
    pub witness: SteeringWitness,
    pub delta_bar: f64,
    pub lhs_max: f64,
    /// `delta_bar − lhs_max`.
    pub gap: f64,
}

impl Certificate {
    pub fn ratio(&self) -> f64 {
        self.delta_bar / self.lhs_max
    }
}

pub fn certificate_hamiltonians(
    sigma: &Assemblage,
    gamma: &HermitianMatrix,
    temperature: f64,
    cfg: &NumericConfig,
) -> Result<Certificate> {
    let kt = kt(temperature)?;
    check_positive_traces(sigma)?;
    let witness = sr_gamma_dual(sigma, gamma, cfg)?;
    if witness.value >= 1.0 - cfg.tol_sr {
        return Err(Error::NoAdvantage);
    }
    let n_x = sigma.n_settings() as f64;
    let family = HamiltonianFamily::new(
        sigma.n_outcomes(),
        sigma.n_settings(),
        witness.y.iter().map(|y| y.scale(-kt * n_x)).collect(),
    )?;
    let delta_bar = delta_bar_linear(sigma, gamma, &family)?;
    let lhs_max = max_delta_bar_lhs(sigma, gamma, &family, cfg)?.value;
    Ok(Certificate {
        family,
        witness,
        delta_bar,
        lhs_max,
        gap: delta_bar - lhs_max,
    })
}

/// `t0 · ln(ratio)` for partial thermalisation.
pub fn tmin_from_ratio(ratio: f64, t0: f64) -> Result<f64> {
    if !(ratio >= 1.0 && ratio.is_finite()) {
        bail!(Domain, "work ratio {ratio} must be finite and at least 1");
    }
    if !(t0 > 0.0 && t0.is_finite()) {
        bail!(Domain, "time scale t0 = {t0} must be finite and positive");
    }
    Ok(t0 * ratio.ln())
}

/// Partial-thermalisation survival time of `fam` measured through the
/// certificate's work ratio.
pub fn tmin_from_work(
    fam: &InstrumentFamily,
    ctx: &ThermalContext,
    t0: f64,
    cfg: &NumericConfig,
) -> Result<f64> {
    let gamma = ctx.thermal_state()?;
    let (_, res) = fam.average_channel().is_gibbs_preserving(&gamma)?;
    if res > TOL_GIBBS {
        bail!(Validation, "average channel moves γ by {res:.3e}");
    }
    let sigma = fam.apply(&gamma)?;
    let cert =
        certificate_hamiltonians(&sigma, &gamma, ctx.temperature, cfg).map_err(|e| match e {
            Error::NoAdvantage => Error::NotSteerable,
            e => e,
        })?;
    tmin_from_ratio(cert.ratio(), t0)
}

/// One row of the Pauli work sweep.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PauliWorkPoint {
    pub delta: f64,
    /// Summed work deficit maximised over `LHS(σ)`, in eV.
    pub classical_bound: f64,
    /// Summed work deficit of the Pauli assemblage, in eV.
    pub quantum_value: f64,
    /// `Δ̄_γ(σ, H) / max_{τ∈LHS(σ)} Δ̄_γ(τ, H)`.
    pub ratio: f64,
    pub sr: f64,
    pub t_min_over_t0: f64,
}

/// Work figures of the X,Z family on `γ = I/2` with `H_{a|x} = kT·δ·F_{a|x}`.
pub fn pauli_work_point(
    delta: f64,
    temperature: f64,
    cfg: &NumericConfig,
) -> Result<PauliWorkPoint> {
    if !(delta > 0.0 && delta.is_finite()) {
        bail!(
            Domain,
            "energy ratio δ = {delta} must be positive and finite"
        );
    }
    let gamma = HermitianMatrix::maximally_mixed(2);
    let sigma = InstrumentFamily::pauli_xz().apply(&gamma)?;
    let fam = HamiltonianFamily::pauli(delta, temperature)?;
    let opt = max_delta_bar_lhs(&sigma, &gamma, &fam, cfg)?;
    let tau = opt.assemblage()?;
    let classical_bound = work_figure(&tau, &fam, temperature)?;
    let quantum_value = work_figure(&sigma, &fam, temperature)?;
    let db = delta_bar_linear(&sigma, &gamma, &fam)?;
    let ratio = db / opt.value;
    let sr = sr_gamma(&sigma, &gamma, cfg)?.sr;
    Ok(PauliWorkPoint {
        delta,
        classical_bound,
        quantum_value,
        ratio,
        sr,
        t_min_over_t0: ratio.ln(),
    })
}
