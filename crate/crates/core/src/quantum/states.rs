use crate::error::{bail, Result};
use crate::linalg::{max_entangled_vector, HermitianMatrix};

/// `(1−ε)|Φ+⟩⟨Φ+| + ε I/d²` for `0 < ε ≤ 1`.
pub fn isotropic_state(d: usize, eps: f64) -> Result<HermitianMatrix> {
    isotropic_state_with(d, eps, true)
}

/// As [`isotropic_state`]; with `full_rank_check` off, `ε = 0` is allowed.
pub fn isotropic_state_with(d: usize, eps: f64, full_rank_check: bool) -> Result<HermitianMatrix> {
    if d == 0 {
        bail!(Shape, "dimension must be positive");
    }
    let lower_ok = if full_rank_check {
        eps > 0.0
    } else {
        eps >= 0.0
    };
    if !(lower_ok && eps <= 1.0) {
        bail!(Domain, "isotropic mixing parameter {eps} outside (0, 1]");
    }
    let phi = HermitianMatrix::projector(&max_entangled_vector(d));
    let n = (d * d) as f64;
    Ok(phi
        .scale(1.0 - eps)
        .add_scaled(eps / n, &HermitianMatrix::identity(d * d)))
}
