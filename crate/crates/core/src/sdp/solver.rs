use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use super::presolve::{presolve, Presolved};
use super::problem::SdpProblem;
use crate::config::NumericConfig;
use crate::error::Result;
use crate::linalg::decomp::{cholesky, hermitian_part, inverse_hpd, invert_lower, solve_spd};
use crate::linalg::{jacobi_eigh, ComplexMatrix, HermitianMatrix};
use crate::math::max_abs;
#[allow(unused_imports)]
use crate::math::Float;

/// Absolute equality residual required of an optimal solution.
pub const RESIDUAL_LIMIT: f64 = 1e-8;
/// Relative duality gap required of an optimal solution.
pub const GAP_LIMIT: f64 = 1e-7;

const INFEASIBILITY_RATIO: f64 = 1e8;
const STAGNATION_ITERS: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SolveStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    NumericalFailure,
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SdpSolution {
    pub x: Vec<HermitianMatrix>,
    pub y: Vec<f64>,
    pub s: Vec<HermitianMatrix>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub gap: f64,
    /// `max_k |Σ_j tr(A_kj X_j) − b_k|` on the original constraints.
    pub primal_residual: f64,
    /// Largest entry of `C − S − Σ_k y_k A_k`.
    pub dual_residual: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// The solution when optimal, otherwise the status as an error.
    pub fn into_optimal(self) -> Result<Self> {
        if self.is_optimal() {
            Ok(self)
        } else {
            Err(crate::Error::Solver(self.status))
        }
    }
}

struct Row {
    terms: Vec<(usize, ComplexMatrix)>,
    b: f64,
}

struct Work<'a> {
    dims: &'a [usize],
    c: Vec<ComplexMatrix>,
    rows: Vec<Row>,
    n_total: f64,
}

fn inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let (sa, sb) = (a.as_slice(), b.as_slice());
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = sa[i * n + j];
            let y = sb[j * n + i];
            acc += x.re * y.re - x.im * y.im;
        }
    }
    acc
}

fn axpy(y: &mut ComplexMatrix, alpha: f64, x: &ComplexMatrix) {
    for (a, b) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *a += b * alpha;
    }
}

impl Work<'_> {
    fn apply_a(&self, x: &[ComplexMatrix]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.terms.iter().map(|(j, a)| inner(a, &x[*j])).sum())
            .collect()
    }

    fn apply_at(&self, y: &[f64]) -> Vec<ComplexMatrix> {
        let mut out: Vec<ComplexMatrix> = self
            .dims
            .iter()
            .map(|&d| ComplexMatrix::zeros(d, d))
            .collect();
        for (r, &yk) in self.rows.iter().zip(y) {
            if yk != 0.0 {
                for (j, a) in &r.terms {
                    axpy(&mut out[*j], yk, a);
                }
            }
        }
        out
    }

    fn objective(&self, x: &[ComplexMatrix]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| inner(c, x)).sum()
    }

    fn schur(&self, x: &[ComplexMatrix], z: &[ComplexMatrix]) -> Vec<f64> {
        let m = self.rows.len();
        let mut out = vec![0.0; m * m];
        for j in 0..self.dims.len() {
            let members: Vec<(usize, &ComplexMatrix)> = self
                .rows
                .iter()
                .enumerate()
                .filter_map(|(k, r)| r.terms.iter().find(|(b, _)| *b == j).map(|(_, a)| (k, a)))
                .collect();
            for &(l, al) in &members {
                let p = &(&x[j] * al) * &z[j];
                for &(k, ak) in &members {
                    if k <= l {
                        out[k * m + l] += inner(ak, &p);
                    }
                }
            }
        }
        for k in 0..m {
            for l in 0..k {
                out[k * m + l] = out[l * m + k];
            }
        }
        out
    }

    /// HKM direction for `ΔX = K − sym(X ΔS Z)`.
    fn direction(
        &self,
        x: &[ComplexMatrix],
        z: &[ComplexMatrix],
        schur: &[f64],
        rp: &[f64],
        rd: &[ComplexMatrix],
        k: &[ComplexMatrix],
    ) -> Result<(Vec<ComplexMatrix>, Vec<f64>, Vec<ComplexMatrix>)> {
        let m = self.rows.len();
        let t: Vec<ComplexMatrix> = (0..x.len())
            .map(|j| &k[j] - &hermitian_part(&(&(&x[j] * &rd[j]) * &z[j])))
            .collect();
        let at = self.apply_a(&t);
        let rhs: Vec<f64> = rp.iter().zip(&at).map(|(r, a)| r - a).collect();
        let dy = if m == 0 {
            Vec::new()
        } else {
            solve_schur(schur, m, &rhs)?
        };
        let aty = self.apply_at(&dy);
        let ds: Vec<ComplexMatrix> = rd.iter().zip(&aty).map(|(r, a)| r - a).collect();
        let dx: Vec<ComplexMatrix> = (0..x.len())
            .map(|j| &k[j] - &hermitian_part(&(&(&x[j] * &ds[j]) * &z[j])))
            .collect();
        Ok((dx, dy, ds))
    }
}

/// `solve_spd`, retried with a growing diagonal shift and refined against
/// the unshifted matrix when the Schur complement is numerically singular.
fn solve_schur(m: &[f64], n: usize, rhs: &[f64]) -> Result<Vec<f64>> {
    if let Ok(x) = solve_spd(m, n, rhs) {
        return Ok(x);
    }
    let scale = (0..n).fold(0.0f64, |s, i| s.max(m[i * n + i].abs()));
    let mut shift = 1e-14 * scale.max(f64::MIN_POSITIVE);
    loop {
        let mut reg = m.to_vec();
        for i in 0..n {
            reg[i * n + i] += shift;
        }
        if let Ok(mut x) = solve_spd(&reg, n, rhs) {
            for _ in 0..3 {
                let r: Vec<f64> = (0..n)
                    .map(|i| rhs[i] - (0..n).map(|k| m[i * n + k] * x[k]).sum::<f64>())
                    .collect();
                let dx = solve_spd(&reg, n, &r)?;
                for (a, b) in x.iter_mut().zip(&dx) {
                    *a += b;
                }
            }
            return Ok(x);
        }
        shift *= 100.0;
        if shift > 1e-6 * scale {
            return solve_spd(m, n, rhs);
        }
    }
}

/// Largest `α` with `X + α ΔX ⪰ 0`, capped at `f64::INFINITY`.
fn max_step(x: &ComplexMatrix, dx: &ComplexMatrix) -> f64 {
    if x.rows() == 1 {
        let (v, d) = (x[(0, 0)].re, dx[(0, 0)].re);
        return if d >= 0.0 { f64::INFINITY } else { -v / d };
    }
    let Some(l) = cholesky(x) else { return 0.0 };
    let li = invert_lower(&l);
    let w = hermitian_part(&(&(&li * dx) * &li.adjoint()));
    match jacobi_eigh(&w) {
        Ok(e) if e.values[0] < 0.0 => -1.0 / e.values[0],
        Ok(_) => f64::INFINITY,
        Err(_) => 0.0,
    }
}

fn step_length(x: &[ComplexMatrix], dx: &[ComplexMatrix]) -> f64 {
    x.iter()
        .zip(dx)
        .map(|(x, d)| max_step(x, d))
        .fold(f64::INFINITY, f64::min)
}

fn combine(x: &[ComplexMatrix], alpha: f64, dx: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    x.iter()
        .zip(dx)
        .map(|(x, d)| {
            let mut out = x.clone();
            axpy(&mut out, alpha, d);
            hermitian_part(&out)
        })
        .collect()
}

fn to_hermitian(v: &[ComplexMatrix]) -> Vec<HermitianMatrix> {
    v.iter().map(HermitianMatrix::hermitian_part).collect()
}

/// `(X, S, y)` of one interior-point iteration.
type Iterate = (Vec<ComplexMatrix>, Vec<ComplexMatrix>, Vec<f64>);

/// Solves `p` with default tracing disabled.
pub fn solve_sdp(p: &SdpProblem, cfg: &NumericConfig) -> Result<SdpSolution> {
    solve_sdp_traced(p, cfg, None)
}

/// Primal-dual interior-point solve (HKM direction, Mehrotra corrector).
///
/// When `cfg.trace` is set and a sink is given, one line per iteration is
/// written with the objectives, gap, residuals and step lengths.
pub fn solve_sdp_traced(
    p: &SdpProblem,
    cfg: &NumericConfig,
    mut sink: Option<&mut dyn Write>,
) -> Result<SdpSolution> {
    p.validate()?;
    let dims = &p.blocks;
    let to_cm = |h: &HermitianMatrix| h.as_matrix().clone();
    let kept = match presolve(p) {
        Presolved::Rows(r) => r,
        Presolved::Inconsistent => {
            return Ok(SdpSolution {
                x: dims.iter().map(|&d| HermitianMatrix::zeros(d)).collect(),
                y: vec![0.0; p.constraints.len()],
                s: dims.iter().map(|&d| HermitianMatrix::zeros(d)).collect(),
                primal_obj: f64::NAN,
                dual_obj: f64::NAN,
                gap: f64::NAN,
                primal_residual: f64::NAN,
                dual_residual: f64::NAN,
                iterations: 0,
                status: SolveStatus::PrimalInfeasible,
            })
        }
    };
    let work = Work {
        dims,
        c: p.objective.iter().map(to_cm).collect(),
        rows: kept
            .iter()
            .map(|&k| Row {
                terms: p.constraints[k]
                    .terms
                    .iter()
                    .map(|(j, a)| (*j, to_cm(a)))
                    .collect(),
                b: p.constraints[k].b,
            })
            .collect(),
        n_total: dims.iter().sum::<usize>() as f64,
    };
    let b: Vec<f64> = work.rows.iter().map(|r| r.b).collect();
    let b_norm = max_abs(b.iter().copied());
    let c_norm = work
        .c
        .iter()
        .map(ComplexMatrix::max_abs)
        .fold(0.0, f64::max);

    let tau = 1.0 + c_norm;
    let mut x: Vec<ComplexMatrix> = dims
        .iter()
        .map(|&d| ComplexMatrix::identity(d).scale_real(tau))
        .collect();
    let mut s = x.clone();
    let mut y = vec![0.0; work.rows.len()];

    let mut status = SolveStatus::NumericalFailure;
    let mut best_merit = f64::INFINITY;
    let mut since_best = 0usize;
    let mut best_iterate: Option<(f64, Iterate)> = None;
    let mut iterations = 0usize;
    let mut last_steps = (0.0, 0.0);

    loop {
        let ax = work.apply_a(&x);
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let aty = work.apply_at(&y);
        let rd: Vec<ComplexMatrix> = (0..dims.len())
            .map(|j| &(&work.c[j] - &s[j]) - &aty[j])
            .collect();
        let pobj = work.objective(&x);
        let dobj: f64 = b.iter().zip(&y).map(|(b, y)| b * y).sum();
        let xs: f64 = x.iter().zip(&s).map(|(x, s)| inner(x, s)).sum();
        let mu = xs / work.n_total;
        let p_inf = max_abs(rp.iter().copied());
        let d_inf = rd.iter().map(ComplexMatrix::max_abs).fold(0.0, f64::max);
        let gap = (pobj - dobj).abs();
        let scale = 1.0 + pobj.abs();

        if cfg.trace {
            if let Some(w) = sink.as_deref_mut() {
                let _ = writeln!(
                    w,
                    "{iterations:3} pobj {pobj:+.10e} dobj {dobj:+.10e} gap {gap:.3e} mu {mu:.3e} pinf {p_inf:.3e} dinf {d_inf:.3e} ap {:.3} ad {:.3}",
                    last_steps.0, last_steps.1
                );
            }
        }

        let rel_p = p_inf / (1.0 + b_norm);
        let rel_d = d_inf / (1.0 + c_norm);
        if rel_p <= cfg.feas_tol
            && rel_d <= cfg.feas_tol
            && gap <= cfg.gap_tol * scale
            && xs.abs() <= cfg.gap_tol * scale
        {
            status = SolveStatus::Optimal;
            break;
        }

        if dobj > 0.0 {
            let at_norm: f64 = (0..dims.len())
                .map(|j| (&aty[j] + &s[j]).frobenius_norm())
                .sum();
            if dobj / (1.0 + at_norm) > INFEASIBILITY_RATIO {
                status = SolveStatus::PrimalInfeasible;
                break;
            }
        }
        if pobj < 0.0 {
            let ax_norm = ax.iter().map(|v| v * v).sum::<f64>().sqrt();
            if -pobj / (1.0 + ax_norm) > INFEASIBILITY_RATIO {
                status = SolveStatus::DualInfeasible;
                break;
            }
        }

        let merit = rel_p.max(rel_d).max(gap / scale).max(xs.abs() / scale);
        if best_iterate.as_ref().is_none_or(|b| merit < b.0) {
            best_iterate = Some((merit, (x.clone(), s.clone(), y.clone())));
        }
        if merit < 0.5 * best_merit {
            best_merit = merit;
            since_best = 0;
        } else {
            since_best += 1;
        }
        if since_best >= STAGNATION_ITERS || iterations >= cfg.max_iters {
            break;
        }
        iterations += 1;

        let Some(z) = s.iter().map(inverse_hpd).collect::<Option<Vec<_>>>() else {
            break;
        };
        let schur = work.schur(&x, &z);

        let k_aff: Vec<ComplexMatrix> = x.iter().map(|x| x.scale_real(-1.0)).collect();
        let Ok((dx_a, _, ds_a)) = work.direction(&x, &z, &schur, &rp, &rd, &k_aff) else {
            break;
        };
        let ap = step_length(&x, &dx_a).min(1.0);
        let ad = step_length(&s, &ds_a).min(1.0);
        let xs_aff: f64 = combine(&x, ap, &dx_a)
            .iter()
            .zip(&combine(&s, ad, &ds_a))
            .map(|(x, s)| inner(x, s))
            .sum();
        let mu_aff = (xs_aff / work.n_total).max(0.0);
        let sigma = if mu > 0.0 {
            (mu_aff / mu).powi(3).min(1.0)
        } else {
            0.0
        };

        let k_cor: Vec<ComplexMatrix> = (0..dims.len())
            .map(|j| {
                let mut k = z[j].scale_real(sigma * mu);
                axpy(&mut k, -1.0, &x[j]);
                let cross = hermitian_part(&(&(&dx_a[j] * &ds_a[j]) * &z[j]));
                axpy(&mut k, -1.0, &cross);
                k
            })
            .collect();
        let Ok((dx, dy, ds)) = work.direction(&x, &z, &schur, &rp, &rd, &k_cor) else {
            break;
        };
        let ap = (cfg.step_fraction * step_length(&x, &dx)).min(1.0);
        let ad = (cfg.step_fraction * step_length(&s, &ds)).min(1.0);
        if !(ap > 0.0 && ad > 0.0) {
            break;
        }
        x = combine(&x, ap, &dx);
        s = combine(&s, ad, &ds);
        for (yk, dk) in y.iter_mut().zip(&dy) {
            *yk += ad * dk;
        }
        last_steps = (ap, ad);
    }

    if status == SolveStatus::NumericalFailure {
        if let Some((_, (bx, bs, by))) = best_iterate {
            x = bx;
            s = bs;
            y = by;
        }
    }
    let mut y_full = vec![0.0; p.constraints.len()];
    for (&k, &v) in kept.iter().zip(&y) {
        y_full[k] = v;
    }
    let x_h = to_hermitian(&x);
    let s_h = to_hermitian(&s);
    let primal_obj: f64 = p.objective.iter().zip(&x_h).map(|(c, x)| c.inner(x)).sum();
    let dual_obj: f64 = p
        .constraints
        .iter()
        .zip(&y_full)
        .map(|(c, y)| c.b * y)
        .sum();
    let primal_residual = max_abs(
        p.constraints
            .iter()
            .map(|c| c.terms.iter().map(|(j, a)| a.inner(&x_h[*j])).sum::<f64>() - c.b),
    );
    let mut dual_residual = 0.0f64;
    for j in 0..dims.len() {
        let mut r = &p.objective[j] - &s_h[j];
        for (c, &yk) in p.constraints.iter().zip(&y_full) {
            if let Some(a) = c.block(j) {
                r = r.add_scaled(-yk, a);
            }
        }
        dual_residual = dual_residual.max(r.max_abs());
    }
    let gap = (primal_obj - dual_obj).abs();

    if status == SolveStatus::NumericalFailure {
        let psd_ok = x_h
            .iter()
            .chain(&s_h)
            .all(|m| m.is_psd(cfg.tol_psd).unwrap_or(false));
        if psd_ok
            && primal_residual <= RESIDUAL_LIMIT
            && dual_residual <= RESIDUAL_LIMIT * (1.0 + c_norm)
            && gap <= GAP_LIMIT * (1.0 + primal_obj.abs())
        {
            status = SolveStatus::Optimal;
        }
    }

    Ok(SdpSolution {
        x: x_h,
        y: y_full,
        s: s_h,
        primal_obj,
        dual_obj,
        gap,
        primal_residual,
        dual_residual,
        iterations,
        status,
    })
}
