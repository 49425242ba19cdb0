use crate::error::{bail, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, Subsystem, C64};

/// Gibbs-preservation tolerance in trace norm.
pub const TOL_GIBBS: f64 = 1e-9;
/// Trace-preservation tolerance on `tr_out(choi)`.
pub const TOL_TP: f64 = 1e-9;

/// Linear map stored as its trace-one Choi operator
/// `(N ⊗ I)(|Φ+⟩⟨Φ+|)`, output factor first.
///
/// Entry `[(o·d_in + i), (o'·d_in + j)]` equals `N(|i⟩⟨j|)[o, o'] / d_in`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumChannelChoi {
    choi: HermitianMatrix,
    d_in: usize,
    d_out: usize,
}

impl QuantumChannelChoi {
    /// Validates shape and complete positivity.
    pub fn from_choi(
        choi: HermitianMatrix,
        d_in: usize,
        d_out: usize,
        tol_psd: f64,
    ) -> Result<Self> {
        let ch = Self::from_choi_unchecked(choi, d_in, d_out)?;
        let min = ch.choi.min_eigenvalue()?;
        if min < -tol_psd {
            bail!(
                Validation,
                "Choi operator not positive semidefinite (min eigenvalue {min:.3e})"
            );
        }
        Ok(ch)
    }

    /// Shape check only; the map may be merely Hermiticity preserving.
    pub fn from_choi_unchecked(choi: HermitianMatrix, d_in: usize, d_out: usize) -> Result<Self> {
        if d_in == 0 || d_out == 0 || choi.dim() != d_in * d_out {
            bail!(
                Shape,
                "Choi operator of dimension {} for a map {}→{}",
                choi.dim(),
                d_in,
                d_out
            );
        }
        Ok(Self { choi, d_in, d_out })
    }

    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<Self> {
        let Some(first) = kraus.first() else {
            bail!(Shape, "empty Kraus list");
        };
        let (d_out, d_in) = (first.rows(), first.cols());
        for k in kraus {
            k.check_shape(d_out, d_in, "Kraus operator")?;
        }
        let n = d_in * d_out;
        let scale = 1.0 / d_in as f64;
        let m = ComplexMatrix::from_fn(n, n, |r, c| {
            let (o, i) = (r / d_in, r % d_in);
            let (o2, j) = (c / d_in, c % d_in);
            kraus
                .iter()
                .map(|k| k[(o, i)] * k[(o2, j)].conj())
                .sum::<C64>()
                * scale
        });
        Ok(Self {
            choi: HermitianMatrix::hermitian_part(&m),
            d_in,
            d_out,
        })
    }

    /// Choi operator of the linear map `f`, evaluated on matrix units.
    /// `f` must be Hermiticity preserving; positivity is not checked.
    pub fn from_linear_map(
        d_in: usize,
        d_out: usize,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Self {
        let n = d_in * d_out;
        let mut m = ComplexMatrix::zeros(n, n);
        let scale = 1.0 / d_in as f64;
        for i in 0..d_in {
            for j in 0..d_in {
                let mut e = ComplexMatrix::zeros(d_in, d_in);
                e[(i, j)] = C64::new(1.0, 0.0);
                let out = f(&e);
                assert_eq!((out.rows(), out.cols()), (d_out, d_out), "map output shape");
                for o in 0..d_out {
                    for o2 in 0..d_out {
                        m[(o * d_in + i, o2 * d_in + j)] = out[(o, o2)] * scale;
                    }
                }
            }
        }
        Self {
            choi: HermitianMatrix::hermitian_part(&m),
            d_in,
            d_out,
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_kraus(&[ComplexMatrix::identity(d)]).unwrap()
    }

    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        Self::from_kraus(core::slice::from_ref(u))
    }

    /// `ρ ↦ tr(ρ) γ`.
    pub fn full_thermalisation(gamma: &HermitianMatrix) -> Self {
        let d = gamma.dim();
        let choi = gamma.kron(&HermitianMatrix::maximally_mixed(d));
        Self {
            choi,
            d_in: d,
            d_out: d,
        }
    }

    pub fn choi(&self) -> &HermitianMatrix {
        &self.choi
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// `N(X) = d_in · tr_in[(I ⊗ Xᵀ) choi]` for any square `X`.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (x.rows(), x.cols()),
            (self.d_in, self.d_in),
            "channel input shape"
        );
        let (di, d_out) = (self.d_in, self.d_out);
        let c = self.choi.as_matrix();
        let scale = di as f64;
        ComplexMatrix::from_fn(d_out, d_out, |o, o2| {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..di {
                for j in 0..di {
                    let xij = x[(i, j)];
                    if xij.re != 0.0 || xij.im != 0.0 {
                        acc += c[(o * di + i, o2 * di + j)] * xij;
                    }
                }
            }
            acc * scale
        })
    }

    pub fn apply(&self, rho: &HermitianMatrix) -> Result<HermitianMatrix> {
        if rho.dim() != self.d_in {
            bail!(
                Shape,
                "state of dimension {} into a channel with input {}",
                rho.dim(),
                self.d_in
            );
        }
        Ok(HermitianMatrix::hermitian_part(
            &self.apply_matrix(rho.as_matrix()),
        ))
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &Self) -> Result<Self> {
        if first.d_out != self.d_in {
            bail!(
                Shape,
                "composing {}→{} after {}→{}",
                self.d_in,
                self.d_out,
                first.d_in,
                first.d_out
            );
        }
        Ok(Self::from_linear_map(first.d_in, self.d_out, |x| {
            self.apply_matrix(&first.apply_matrix(x))
        }))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            choi: self.choi.scale(s),
            d_in: self.d_in,
            d_out: self.d_out,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            choi: &self.choi + &other.choi,
            d_in: self.d_in,
            d_out: self.d_out,
        })
    }

    /// `self + s · other`.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            choi: self.choi.add_scaled(s, &other.choi),
            d_in: self.d_in,
            d_out: self.d_out,
        })
    }

    /// Sum of maps with identical shapes.
    pub fn sum<'a>(maps: impl IntoIterator<Item = &'a Self>) -> Result<Self> {
        let mut it = maps.into_iter();
        let Some(first) = it.next() else {
            bail!(Shape, "sum of no maps");
        };
        it.try_fold(first.clone(), |acc, m| acc.add(m))
    }

    /// `N ⊗ id_E` with the ancilla as second tensor factor on both sides.
    pub fn tensor_identity(&self, d_e: usize) -> Self {
        let (di, d_out) = (self.d_in, self.d_out);
        Self::from_linear_map(di * d_e, d_out * d_e, |x| {
            let mut out = ComplexMatrix::zeros(d_out * d_e, d_out * d_e);
            for e in 0..d_e {
                for e2 in 0..d_e {
                    let block =
                        ComplexMatrix::from_fn(di, di, |s, s2| x[(s * d_e + e, s2 * d_e + e2)]);
                    let img = self.apply_matrix(&block);
                    for o in 0..d_out {
                        for o2 in 0..d_out {
                            out[(o * d_e + e, o2 * d_e + e2)] = img[(o, o2)];
                        }
                    }
                }
            }
            out
        })
    }

    /// Largest entry of `tr_out(choi) − I/d_in`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let marginal = self
            .choi
            .partial_trace((self.d_out, self.d_in), Subsystem::B)
            .unwrap();
        marginal.max_abs_diff(&HermitianMatrix::maximally_mixed(self.d_in))
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_preservation_residual() <= tol
    }

    /// Largest eigenvalue of `tr_out(d_in · choi) = Σ K†K`, transposed.
    pub fn max_trace_gain(&self) -> Result<f64> {
        let marginal = self
            .choi
            .partial_trace((self.d_out, self.d_in), Subsystem::B)?;
        marginal.scale(self.d_in as f64).max_eigenvalue()
    }

    pub fn is_completely_positive(&self, tol: f64) -> Result<bool> {
        self.choi.is_psd(tol)
    }

    /// Trace-norm distance between Choi operators.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        (&self.choi - &other.choi).trace_norm()
    }

    pub fn is_gibbs_preserving(&self, gamma: &HermitianMatrix) -> Result<(bool, f64)> {
        is_gibbs_preserving(self, gamma)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if (self.d_in, self.d_out) != (other.d_in, other.d_out) {
            bail!(
                Shape,
                "maps {}→{} and {}→{} differ in shape",
                self.d_in,
                self.d_out,
                other.d_in,
                other.d_out
            );
        }
        Ok(())
    }
}

pub fn choi_of_map(kraus: &[ComplexMatrix]) -> Result<QuantumChannelChoi> {
    QuantumChannelChoi::from_kraus(kraus)
}

pub fn map_of_choi(c: &QuantumChannelChoi, rho: &HermitianMatrix) -> Result<HermitianMatrix> {
    c.apply(rho)
}

/// `‖N(γ) − γ‖₁ ≤ 1e-9`, with the residual.
pub fn is_gibbs_preserving(
    ch: &QuantumChannelChoi,
    gamma: &HermitianMatrix,
) -> Result<(bool, f64)> {
    if ch.d_in != gamma.dim() || ch.d_out != gamma.dim() {
        bail!(
            Shape,
            "thermal state of dimension {} for a map {}→{}",
            gamma.dim(),
            ch.d_in,
            ch.d_out
        );
    }
    let residual = (&ch.apply(gamma)? - gamma).trace_norm()?;
    Ok((residual <= TOL_GIBBS, residual))
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::*;

    #[derive(serde::Serialize, serde::Deserialize)]
    struct Repr {
        d_in: usize,
        d_out: usize,
        choi: HermitianMatrix,
    }

    impl serde::Serialize for QuantumChannelChoi {
        fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            Repr {
                d_in: self.d_in,
                d_out: self.d_out,
                choi: self.choi.clone(),
            }
            .serialize(s)
        }
    }

    impl<'de> serde::Deserialize<'de> for QuantumChannelChoi {
        fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
            let r = Repr::deserialize(d)?;
            QuantumChannelChoi::from_choi(
                r.choi,
                r.d_in,
                r.d_out,
                crate::NumericConfig::default().tol_psd,
            )
            .map_err(serde::de::Error::custom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_entangled_vector;
    use alloc::vec;
    use alloc::vec::Vec;

    fn amplitude_damping(g: f64) -> Vec<ComplexMatrix> {
        let k0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - g).sqrt()]).unwrap();
        let k1 = ComplexMatrix::from_real(2, 2, &[0.0, g.sqrt(), 0.0, 0.0]).unwrap();
        vec![k0, k1]
    }

    #[test]
    fn identity_choi_is_bell_projector() {
        let id = QuantumChannelChoi::identity(2);
        let phi = HermitianMatrix::projector(&max_entangled_vector(2));
        assert!(id.choi().max_abs_diff(&phi) < 1e-15);
        assert!((id.choi().trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unnormalised_choi_marginal_is_identity() {
        let ch = QuantumChannelChoi::from_kraus(&amplitude_damping(0.3)).unwrap();
        let m = ch
            .choi()
            .scale(2.0)
            .partial_trace((2, 2), Subsystem::B)
            .unwrap();
        assert!(m.max_abs_diff(&HermitianMatrix::identity(2)) < 1e-15);
        assert!(ch.is_trace_preserving(1e-12));
    }

    #[test]
    fn amplitude_damping_breaks_thermal_state() {
        let ch = QuantumChannelChoi::from_kraus(&amplitude_damping(1.0)).unwrap();
        let gamma = HermitianMatrix::diag(&[2.0 / 3.0, 1.0 / 3.0]);
        let out = ch.apply(&gamma).unwrap();
        assert!(out.max_abs_diff(&HermitianMatrix::diag(&[1.0, 0.0])) < 1e-15);
        let (ok, res) = is_gibbs_preserving(&ch, &gamma).unwrap();
        assert!(!ok);
        assert!((res - 2.0 / 3.0).abs() < 1e-12);
        assert!(
            is_gibbs_preserving(&QuantumChannelChoi::identity(2), &gamma)
                .unwrap()
                .0
        );
    }

    #[test]
    fn non_psd_choi_rejected() {
        let bad = HermitianMatrix::diag(&[0.5, 0.5, 0.5, -0.5]);
        assert!(matches!(
            QuantumChannelChoi::from_choi(bad, 2, 2, 1e-9),
            Err(crate::Error::Validation(_))
        ));
    }

    #[test]
    fn tensor_identity_on_bell_state_gives_choi() {
        let ch = QuantumChannelChoi::from_kraus(&amplitude_damping(0.4)).unwrap();
        let ext = ch.tensor_identity(2);
        let phi = HermitianMatrix::projector(&max_entangled_vector(2));
        assert!(ext.apply(&phi).unwrap().max_abs_diff(ch.choi()) < 1e-15);
    }

    #[test]
    fn composition_matches_sequential_application() {
        let a = QuantumChannelChoi::from_kraus(&amplitude_damping(0.4)).unwrap();
        let h = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0])
            .unwrap()
            .scale_real(0.5f64.sqrt());
        let b = QuantumChannelChoi::unitary(&h).unwrap();
        let ab = a.compose(&b).unwrap();
        let rho = HermitianMatrix::from_real_rows(&[vec![0.8, 0.1], vec![0.1, 0.2]]).unwrap();
        let seq = a.apply(&b.apply(&rho).unwrap()).unwrap();
        assert!(ab.apply(&rho).unwrap().max_abs_diff(&seq) < 1e-15);
    }
}
