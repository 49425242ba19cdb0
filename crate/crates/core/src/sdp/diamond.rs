use alloc::vec;

use super::{hermitian_basis, solve_sdp, Constraint, SdpProblem};
use crate::config::NumericConfig;
use crate::error::{bail, Result};
use crate::linalg::{HermitianMatrix, Subsystem};

/// Diamond norm of a Hermiticity-preserving map given its trace-one Choi
/// operator (output factor first).
///
/// Solves `max tr(J(P − N))` over `P, N ⪰ 0` with `P + N ⪯ I_out ⊗ ρ` and
/// `ρ` a density matrix, where `J = d_in · delta_choi`.
pub fn diamond_norm(
    delta_choi: &HermitianMatrix,
    dims: (usize, usize),
    cfg: &NumericConfig,
) -> Result<f64> {
    let (d_in, d_out) = dims;
    let n = d_in * d_out;
    if delta_choi.dim() != n {
        bail!(
            Shape,
            "Choi operator of dimension {} for maps {}→{}",
            delta_choi.dim(),
            d_in,
            d_out
        );
    }
    let j = delta_choi.scale(d_in as f64);
    if j.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let mut p = SdpProblem::new(vec![n, n, n, d_in]);
    p.set_objective(0, j.scale(-1.0));
    p.set_objective(1, j.clone());
    for e in hermitian_basis(n) {
        let rho_part = e.partial_trace((d_out, d_in), Subsystem::B)?;
        p.push(
            Constraint::new(0.0)
                .with_block(0, e.clone())
                .with_block(1, e.clone())
                .with_block(2, e)
                .with_block(3, rho_part.scale(-1.0)),
        );
    }
    p.push(Constraint::new(1.0).with_block(3, HermitianMatrix::identity(d_in)));
    let sol = solve_sdp(&p, cfg)?.into_optimal()?;
    Ok((-sol.primal_obj).max(0.0))
}
