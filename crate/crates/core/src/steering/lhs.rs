use alloc::vec::Vec;

use super::strategies::{enumerate_strategies, DeterministicStrategySet};
use crate::config::NumericConfig;
use crate::error::{bail, Result};
use crate::linalg::HermitianMatrix;
#[allow(unused_imports)]
use crate::math::Float;
use crate::quantum::Assemblage;
use crate::sdp::{from_basis_coords, hermitian_basis, solve_sdp, Constraint, SdpProblem};

/// Collapsed LHS model `σ_{a|x} = Σ_i D(a|x,i) η_i`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LhsModel {
    pub strategies: DeterministicStrategySet,
    pub etas: Vec<HermitianMatrix>,
}

impl LhsModel {
    /// The assemblage `{Σ_i D(a|x,i) η_i}`.
    pub fn assemblage(&self) -> Result<Assemblage> {
        let s = &self.strategies;
        let d = self.etas[0].dim();
        let mut members = Vec::with_capacity(s.n_outcomes() * s.n_settings());
        for x in 0..s.n_settings() {
            for a in 0..s.n_outcomes() {
                let mut acc = HermitianMatrix::zeros(d);
                for (i, eta) in self.etas.iter().enumerate() {
                    if s.d(a, x, i) != 0.0 {
                        acc = &acc + eta;
                    }
                }
                members.push(acc);
            }
        }
        Assemblage::new_unchecked(s.n_outcomes(), s.n_settings(), members)
    }

    pub fn total_weight(&self) -> f64 {
        self.etas.iter().map(HermitianMatrix::trace).sum()
    }
}

/// Dual certificate of the robustness program.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SteeringWitness {
    pub n_outcomes: usize,
    pub n_settings: usize,
    /// `Y_{a|x}` in setting-major order.
    pub y: Vec<HermitianMatrix>,
    pub omega: f64,
    /// `Σ tr(Y_{a|x} γ) p_{a|x} + ω`, equal to `2^{−SR}` at the optimum.
    pub value: f64,
}

impl SteeringWitness {
    pub fn member(&self, a: usize, x: usize) -> &HermitianMatrix {
        &self.y[x * self.n_outcomes + a]
    }

    /// Smallest eigenvalue over `Σ_{a,x} D(a|x,i) Y_{a|x}` for all `i`.
    pub fn min_strategy_eigenvalue(&self) -> Result<f64> {
        let s = enumerate_strategies(self.n_outcomes, self.n_settings)?;
        let d = self.y[0].dim();
        let mut worst = f64::INFINITY;
        for i in 0..s.len() {
            let mut acc = HermitianMatrix::zeros(d);
            for x in 0..self.n_settings {
                acc = &acc + self.member(s.strategy(i)[x], x);
            }
            worst = worst.min(acc.min_eigenvalue()?);
        }
        Ok(worst)
    }

    /// `Σ tr(Y_{a|x} σ_{a|x})`.
    pub fn pairing(&self, sigma: &Assemblage) -> f64 {
        self.y
            .iter()
            .zip(sigma.members())
            .map(|(y, s)| y.inner(s))
            .sum()
    }
}

/// Optimal robustness with the LHS model certifying it.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SrResult {
    /// `SR_γ = −log₂ q*`.
    pub sr: f64,
    pub q_star: f64,
    /// Model of `q* σ + (1 − q*) {p γ}`.
    pub model: LhsModel,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    Member { model: LhsModel, residual: f64 },
    NotMember { margin: f64 },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

pub(crate) fn check_gamma(sigma: &Assemblage, gamma: &HermitianMatrix) -> Result<()> {
    sigma.check_dim(gamma)?;
    if (gamma.trace() - 1.0).abs() > 1e-9 {
        bail!(Domain, "thermal state has trace {}", gamma.trace());
    }
    let min = gamma.min_eigenvalue()?;
    if !(min > 1e-12) {
        bail!(
            Domain,
            "thermal state is not full rank (min eigenvalue {min:.3e})"
        );
    }
    Ok(())
}

/// Appends one block per strategy and the rows `Σ_i D(a|x,i) η_i + … = …`
/// for each `(a, x)` and Hermitian basis element.
pub(crate) struct LhsBlocks {
    pub strategies: DeterministicStrategySet,
    pub first: usize,
    pub dim: usize,
}

impl LhsBlocks {
    pub fn add(
        p: &mut SdpProblem,
        n_outcomes: usize,
        n_settings: usize,
        dim: usize,
    ) -> Result<Self> {
        let strategies = enumerate_strategies(n_outcomes, n_settings)?;
        let first = p.blocks.len();
        for _ in 0..strategies.len() {
            p.add_block(dim);
        }
        Ok(Self {
            strategies,
            first,
            dim,
        })
    }

    /// Rows equating `Σ_i D(a|x,i) η_i` with `target(a,x)` plus any extra
    /// terms added by `extra(a, x, E_k, row)`.
    pub fn push_rows(
        &self,
        p: &mut SdpProblem,
        rhs: impl Fn(usize, usize, &HermitianMatrix) -> f64,
        mut extra: impl FnMut(usize, usize, &HermitianMatrix, &mut Constraint),
    ) {
        let basis = hermitian_basis(self.dim);
        let s = &self.strategies;
        for x in 0..s.n_settings() {
            for a in 0..s.n_outcomes() {
                for e in &basis {
                    let mut row = Constraint::new(rhs(a, x, e));
                    for i in 0..s.len() {
                        if s.d(a, x, i) != 0.0 {
                            row.add_term(self.first + i, e.clone());
                        }
                    }
                    extra(a, x, e, &mut row);
                    p.push(row);
                }
            }
        }
    }

    pub fn model(&self, x: &[HermitianMatrix]) -> LhsModel {
        LhsModel {
            strategies: self.strategies.clone(),
            etas: x[self.first..self.first + self.strategies.len()].to_vec(),
        }
    }
}

/// Joint SDP in `(q, η_i)`: maximise `q` subject to
/// `Σ_i D(a|x,i) η_i + q (p_{a|x} γ − σ_{a|x}) = p_{a|x} γ`.
pub fn sr_gamma(
    sigma: &Assemblage,
    gamma: &HermitianMatrix,
    cfg: &NumericConfig,
) -> Result<SrResult> {
    check_gamma(sigma, gamma)?;
    let d = sigma.dim();
    let mut p = SdpProblem::new(Vec::new());
    let lhs = LhsBlocks::add(&mut p, sigma.n_outcomes(), sigma.n_settings(), d)?;
    let q = p.add_block(1);
    let slack = p.add_block(1);
    p.set_objective(q, HermitianMatrix::diag(&[-1.0]));
    lhs.push_rows(
        &mut p,
        |a, x, e| sigma.probability(a, x) * gamma.inner(e),
        |a, x, e, row| {
            let coef = sigma.probability(a, x) * gamma.inner(e) - sigma.member(a, x).inner(e);
            if coef != 0.0 {
                row.add_term(q, HermitianMatrix::diag(&[coef]));
            }
        },
    );
    p.push(
        Constraint::new(1.0)
            .with_block(q, HermitianMatrix::diag(&[1.0]))
            .with_block(slack, HermitianMatrix::diag(&[1.0])),
    );
    let sol = solve_sdp(&p, cfg)?.into_optimal()?;
    let q_star = sol.x[q].get(0, 0).re.clamp(f64::MIN_POSITIVE, 1.0);
    let sr = (-q_star.log2()).max(0.0);
    Ok(SrResult {
        sr,
        q_star,
        model: lhs.model(&sol.x),
        gap: sol.gap,
    })
}

/// Witness from the dual program, solved as its own SDP:
/// minimise `Σ tr(Y_{a|x} γ) p_{a|x} + ω` subject to
/// `Σ_{a,x} D(a|x,i) Y_{a|x} ⪰ 0`, `ω ≥ 0` and
/// `Σ tr(Y_{a|x} γ) p_{a|x} + ω ≥ Σ tr(Y_{a|x} σ_{a|x}) + 1`.
pub fn sr_gamma_dual(
    sigma: &Assemblage,
    gamma: &HermitianMatrix,
    cfg: &NumericConfig,
) -> Result<SteeringWitness> {
    check_gamma(sigma, gamma)?;
    let d = sigma.dim();
    let (n_a, n_x) = (sigma.n_outcomes(), sigma.n_settings());
    let strategies = enumerate_strategies(n_a, n_x)?;
    let n_i = strategies.len();
    let dd = d * d;
    let dual_basis: Vec<HermitianMatrix> = (0..dd)
        .map(|k| {
            let mut c = alloc::vec![0.0; dd];
            c[k] = 1.0;
            from_basis_coords(d, &c)
        })
        .collect();

    let mut blocks = alloc::vec![d; n_i];
    blocks.push(1);
    blocks.push(1);
    let (b_omega, b_norm) = (n_i, n_i + 1);
    let mut p = SdpProblem::new(blocks);
    p.set_objective(b_norm, HermitianMatrix::diag(&[-1.0]));
    for x in 0..n_x {
        for a in 0..n_a {
            let pr = sigma.probability(a, x);
            for bk in &dual_basis {
                let g = gamma.inner(bk);
                let mut row = Constraint::new(-pr * g);
                for i in 0..n_i {
                    if strategies.d(a, x, i) != 0.0 {
                        row.add_term(i, bk.scale(-1.0));
                    }
                }
                let t = pr * g - sigma.member(a, x).inner(bk);
                if t != 0.0 {
                    row.add_term(b_norm, HermitianMatrix::diag(&[-t]));
                }
                p.push(row);
            }
        }
    }
    p.push(
        Constraint::new(-1.0)
            .with_block(b_omega, HermitianMatrix::diag(&[-1.0]))
            .with_block(b_norm, HermitianMatrix::diag(&[-1.0])),
    );
    let sol = solve_sdp(&p, cfg)?.into_optimal()?;
    let y: Vec<HermitianMatrix> = (0..n_a * n_x)
        .map(|k| from_basis_coords(d, &sol.y[k * dd..(k + 1) * dd]))
        .collect();
    let omega = sol.y[n_a * n_x * dd];
    let value = y
        .iter()
        .zip(sigma.probabilities())
        .map(|(y, p)| p * y.inner(gamma))
        .sum::<f64>()
        + omega;
    Ok(SteeringWitness {
        n_outcomes: n_a,
        n_settings: n_x,
        y,
        omega,
        value,
    })
}

/// Decides `σ ∈ LHS` from the robustness; members come with an explicit
/// model from a direct feasibility solve.
pub fn lhs_membership(
    sigma: &Assemblage,
    gamma: &HermitianMatrix,
    match_statistics: bool,
    cfg: &NumericConfig,
) -> Result<Membership> {
    let r = sr_gamma(sigma, gamma, cfg)?;
    if r.sr > cfg.tol_sr {
        return Ok(Membership::NotMember {
            margin: 1.0 - r.q_star,
        });
    }
    let mut model = r.model;
    let mut residual = model.assemblage()?.distance(sigma)?;
    if let Ok(direct) = lhs_model(sigma, match_statistics, cfg) {
        let res = direct.assemblage()?.distance(sigma)?;
        if res < residual {
            model = direct;
            residual = res;
        }
    }
    Ok(Membership::Member { model, residual })
}

/// Solves `Σ_i D(a|x,i) η_i = σ_{a|x}` with `η_i ⪰ 0`.
pub fn lhs_model(
    sigma: &Assemblage,
    match_statistics: bool,
    cfg: &NumericConfig,
) -> Result<LhsModel> {
    let mut p = SdpProblem::new(Vec::new());
    let lhs = LhsBlocks::add(&mut p, sigma.n_outcomes(), sigma.n_settings(), sigma.dim())?;
    lhs.push_rows(
        &mut p,
        |a, x, e| sigma.member(a, x).inner(e),
        |_, _, _, _| {},
    );
    if match_statistics {
        let id = HermitianMatrix::identity(sigma.dim());
        for x in 0..sigma.n_settings() {
            for a in 0..sigma.n_outcomes() {
                let mut row = Constraint::new(sigma.probability(a, x));
                for i in 0..lhs.strategies.len() {
                    if lhs.strategies.d(a, x, i) != 0.0 {
                        row.add_term(lhs.first + i, id.clone());
                    }
                }
                p.push(row);
            }
        }
    }
    let sol = solve_sdp(&p, cfg)?.into_optimal()?;
    Ok(lhs.model(&sol.x))
}
