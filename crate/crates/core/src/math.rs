// Float methods for `no_std`, backed by libm. When std is linked elsewhere in
// the build its inherent methods take precedence and the import goes unused.
pub(crate) use num_traits::Float;

#[allow(dead_code)]
pub(crate) const LN_2: f64 = core::f64::consts::LN_2;

/// `ln Σ exp(-e_i / kt)` evaluated with the minimum energy factored out.
pub(crate) fn log_partition(energies: &[f64], kt: f64) -> f64 {
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let sum: f64 = energies.iter().map(|&e| (-(e - e_min) / kt).exp()).sum();
    -e_min / kt + sum.ln()
}

pub(crate) fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}
