use alloc::vec::Vec;

use super::assemblage::Assemblage;
use super::channel::{QuantumChannelChoi, TOL_TP};
use crate::config::NumericConfig;
use crate::error::{bail, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix};

/// Maximum Choi distance between the average channels of two settings.
pub const TOL_AVERAGE_CHANNEL: f64 = 1e-9;

/// Instruments `{E_{a|x}}` on a `d`-dimensional system, stored setting-major.
///
/// Every setting sums to a channel, and all settings share one average
/// channel; families violating either are rejected at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct InstrumentFamily {
    n_outcomes: usize,
    n_settings: usize,
    dim: usize,
    filters: Vec<QuantumChannelChoi>,
}

impl InstrumentFamily {
    pub fn from_filters(
        n_outcomes: usize,
        n_settings: usize,
        filters: Vec<QuantumChannelChoi>,
    ) -> Result<Self> {
        let fam = Self::from_filters_unchecked(n_outcomes, n_settings, filters)?;
        fam.validate(&NumericConfig::default())?;
        Ok(fam)
    }

    pub(crate) fn from_filters_unchecked(
        n_outcomes: usize,
        n_settings: usize,
        filters: Vec<QuantumChannelChoi>,
    ) -> Result<Self> {
        if n_outcomes == 0 || n_settings == 0 {
            bail!(
                Shape,
                "instrument family needs at least one outcome and one setting"
            );
        }
        if filters.len() != n_outcomes * n_settings {
            bail!(
                Shape,
                "{} filters for {} outcomes x {} settings",
                filters.len(),
                n_outcomes,
                n_settings
            );
        }
        let dim = filters[0].d_in();
        if filters.iter().any(|f| f.d_in() != dim || f.d_out() != dim) {
            bail!(Shape, "filters must all act on dimension {dim}");
        }
        Ok(Self {
            n_outcomes,
            n_settings,
            dim,
            filters,
        })
    }

    /// `E_{a|x}(ρ) = Σ_k K ρ K†` from `kraus[x·|a| + a]`.
    pub fn from_kraus(
        n_outcomes: usize,
        n_settings: usize,
        kraus: &[Vec<ComplexMatrix>],
    ) -> Result<Self> {
        let filters = kraus
            .iter()
            .map(|k| QuantumChannelChoi::from_kraus(k))
            .collect::<Result<Vec<_>>>()?;
        Self::from_filters(n_outcomes, n_settings, filters)
    }

    /// Lüders instruments `ρ ↦ √E ρ √E` for POVMs `povms[x][a]`.
    pub fn luders(povms: &[Vec<HermitianMatrix>]) -> Result<Self> {
        let (n_a, n_x) = povm_shape(povms)?;
        let tol = NumericConfig::default().tol_psd;
        let mut kraus = Vec::with_capacity(n_a * n_x);
        for povm in povms {
            for e in povm {
                kraus.push(alloc::vec![e.sqrt_psd(tol)?.into_matrix()]);
            }
        }
        Self::from_kraus(n_a, n_x, &kraus)
    }

    /// `E_{a|x}(ρ) = tr(M_{a|x} ρ) ω`.
    pub fn measure_prepare(
        povms: &[Vec<HermitianMatrix>],
        omega: &HermitianMatrix,
    ) -> Result<Self> {
        let (n_a, n_x) = povm_shape(povms)?;
        let d = omega.dim();
        let mut filters = Vec::with_capacity(n_a * n_x);
        for povm in povms {
            for m in povm {
                if m.dim() != d {
                    bail!(
                        Shape,
                        "POVM element of dimension {} with output state of dimension {d}",
                        m.dim()
                    );
                }
                let choi = omega.kron(&m.transpose()).scale(1.0 / d as f64);
                filters.push(QuantumChannelChoi::from_choi(
                    choi,
                    d,
                    d,
                    NumericConfig::default().tol_psd,
                )?);
            }
        }
        Self::from_filters(n_a, n_x, filters)
    }

    /// `E_{a|x}(ρ) = tr(ρ) τ_{a|x}` for sub-normalised states `taus[x][a]`.
    pub fn conditional_preparation(taus: &[Vec<HermitianMatrix>]) -> Result<Self> {
        let (n_a, n_x) = povm_shape(taus)?;
        let d = taus[0][0].dim();
        let mut filters = Vec::with_capacity(n_a * n_x);
        for row in taus {
            for t in row {
                let choi = t.kron(&HermitianMatrix::maximally_mixed(d));
                filters.push(QuantumChannelChoi::from_choi(
                    choi,
                    d,
                    d,
                    NumericConfig::default().tol_psd,
                )?);
            }
        }
        Self::from_filters(n_a, n_x, filters)
    }

    /// Qubit X and Z instruments that prepare `|±⟩⟨±|/2` and `|0⟩⟨0|/2, |1⟩⟨1|/2`.
    ///
    /// Their average channel is `ρ ↦ tr(ρ) I/2` for both settings, so the
    /// family is valid and maps any input to the Pauli assemblage.
    pub fn pauli_xz() -> Self {
        Self::conditional_preparation(&xz_projectors(0.5)).unwrap()
    }

    /// Measure X or Z and prepare `I/2`.
    pub fn xz_measure_prepare() -> Self {
        Self::measure_prepare(&xz_projectors(1.0), &HermitianMatrix::maximally_mixed(2)).unwrap()
    }

    /// Compatible family: one parent instrument `{G_λ}` post-processed by
    /// `post(a, x, λ) = P(a|x, λ)`.
    pub fn from_parent(
        parent: &[QuantumChannelChoi],
        n_outcomes: usize,
        n_settings: usize,
        post: impl Fn(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        if parent.is_empty() {
            bail!(Shape, "empty parent instrument");
        }
        let mut filters = Vec::with_capacity(n_outcomes * n_settings);
        for x in 0..n_settings {
            for a in 0..n_outcomes {
                let mut acc = parent[0].scale(post(a, x, 0));
                for (l, g) in parent.iter().enumerate().skip(1) {
                    acc = acc.add_scaled(post(a, x, l), g)?;
                }
                filters.push(acc);
            }
        }
        Self::from_filters(n_outcomes, n_settings, filters)
    }

    /// Two settings that both perform the Z measure-and-prepare instrument.
    pub fn compatible_control() -> Self {
        let parent: Vec<QuantumChannelChoi> = Self::xz_measure_prepare().filters[2..4].to_vec();
        Self::from_parent(&parent, 2, 2, |a, _, l| if a == l { 1.0 } else { 0.0 }).unwrap()
    }

    pub fn validate(&self, cfg: &NumericConfig) -> Result<()> {
        for (k, f) in self.filters.iter().enumerate() {
            let min = f.choi().min_eigenvalue()?;
            if min < -cfg.tol_psd {
                let (a, x) = (k % self.n_outcomes, k / self.n_outcomes);
                bail!(
                    Validation,
                    "filter {a}|{x} is not completely positive (min eigenvalue {min:.3e})"
                );
            }
        }
        let avg0 = self.setting_channel(0)?;
        for x in 0..self.n_settings {
            let avg = self.setting_channel(x)?;
            let res = avg.trace_preservation_residual();
            if res > TOL_TP {
                bail!(
                    Validation,
                    "setting {x} is not trace preserving (residual {res:.3e})"
                );
            }
            if x > 0 {
                let dist = avg.distance(&avg0)?;
                if dist > TOL_AVERAGE_CHANNEL {
                    bail!(
                        Validation,
                        "settings 0 and {x} have different average channels (distance {dist:.3e}); the family is trivially incompatible"
                    );
                }
            }
        }
        Ok(())
    }

    pub fn n_outcomes(&self) -> usize {
        self.n_outcomes
    }

    pub fn n_settings(&self) -> usize {
        self.n_settings
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn filter(&self, a: usize, x: usize) -> &QuantumChannelChoi {
        &self.filters[x * self.n_outcomes + a]
    }

    pub fn filters(&self) -> &[QuantumChannelChoi] {
        &self.filters
    }

    /// `Σ_a E_{a|x}`.
    pub fn setting_channel(&self, x: usize) -> Result<QuantumChannelChoi> {
        QuantumChannelChoi::sum(&self.filters[x * self.n_outcomes..(x + 1) * self.n_outcomes])
    }

    /// Shared average channel.
    pub fn average_channel(&self) -> QuantumChannelChoi {
        self.setting_channel(0).unwrap()
    }

    /// `{E_{a|x}(ρ)}`.
    pub fn apply(&self, rho: &HermitianMatrix) -> Result<Assemblage> {
        if rho.dim() != self.dim {
            bail!(
                Shape,
                "state of dimension {} for instruments on dimension {}",
                rho.dim(),
                self.dim
            );
        }
        let members = self
            .filters
            .iter()
            .map(|f| f.apply(rho))
            .collect::<Result<Vec<_>>>()?;
        Assemblage::new_unchecked(self.n_outcomes, self.n_settings, members)
    }

    /// `{E_{a|x} ⊗ id_E}` with an ancilla of the same dimension.
    pub fn extend_with_ancilla(&self) -> Self {
        let filters = self
            .filters
            .iter()
            .map(|f| f.tensor_identity(self.dim))
            .collect();
        Self {
            n_outcomes: self.n_outcomes,
            n_settings: self.n_settings,
            dim: self.dim * self.dim,
            filters,
        }
    }

    /// Applies `f(a, x, E_{a|x})` and re-validates the result.
    pub fn map_filters(
        &self,
        f: impl Fn(usize, usize, &QuantumChannelChoi) -> Result<QuantumChannelChoi>,
    ) -> Result<Self> {
        let mut filters = Vec::with_capacity(self.filters.len());
        for x in 0..self.n_settings {
            for a in 0..self.n_outcomes {
                filters.push(f(a, x, self.filter(a, x))?);
            }
        }
        Self::from_filters(self.n_outcomes, self.n_settings, filters)
    }
}

pub fn apply_instrument(fam: &InstrumentFamily, rho: &HermitianMatrix) -> Result<Assemblage> {
    fam.apply(rho)
}

pub fn extend_with_ancilla(fam: &InstrumentFamily) -> InstrumentFamily {
    fam.extend_with_ancilla()
}

fn povm_shape<T>(rows: &[Vec<T>]) -> Result<(usize, usize)> {
    let n_x = rows.len();
    let n_a = rows.first().map_or(0, Vec::len);
    if n_x == 0 || n_a == 0 || rows.iter().any(|r| r.len() != n_a) {
        bail!(
            Shape,
            "every setting needs the same non-zero number of outcomes"
        );
    }
    Ok((n_a, n_x))
}

/// `[[s·|+⟩⟨+|, s·|−⟩⟨−|], [s·|0⟩⟨0|, s·|1⟩⟨1|]]`.
pub fn xz_projectors(s: f64) -> Vec<Vec<HermitianMatrix>> {
    let i = HermitianMatrix::identity(2);
    let x = HermitianMatrix::pauli_x();
    let z = HermitianMatrix::pauli_z();
    let h = 0.5 * s;
    alloc::vec![
        alloc::vec![
            i.add_scaled(1.0, &x).scale(h),
            i.add_scaled(-1.0, &x).scale(h)
        ],
        alloc::vec![
            i.add_scaled(1.0, &z).scale(h),
            i.add_scaled(-1.0, &z).scale(h)
        ],
    ]
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::*;
    use crate::quantum::assemblage::label;
    use alloc::collections::BTreeMap;
    use alloc::string::String;

    #[derive(serde::Serialize, serde::Deserialize)]
    struct Repr {
        n_outcomes: usize,
        n_settings: usize,
        filters: BTreeMap<String, QuantumChannelChoi>,
    }

    impl serde::Serialize for InstrumentFamily {
        fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            let mut filters = BTreeMap::new();
            for x in 0..self.n_settings {
                for a in 0..self.n_outcomes {
                    filters.insert(label(a, x), self.filter(a, x).clone());
                }
            }
            Repr {
                n_outcomes: self.n_outcomes,
                n_settings: self.n_settings,
                filters,
            }
            .serialize(s)
        }
    }

    impl<'de> serde::Deserialize<'de> for InstrumentFamily {
        fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
            use serde::de::Error as _;
            let mut r = Repr::deserialize(d)?;
            let mut filters = Vec::new();
            for x in 0..r.n_settings {
                for a in 0..r.n_outcomes {
                    let f = r.filters.remove(&label(a, x)).ok_or_else(|| {
                        D::Error::custom(alloc::format!("missing filter {a}|{x}"))
                    })?;
                    filters.push(f);
                }
            }
            if let Some(k) = r.filters.keys().next() {
                return Err(D::Error::custom(alloc::format!("unexpected filter {k}")));
            }
            InstrumentFamily::from_filters(r.n_outcomes, r.n_settings, filters)
                .map_err(D::Error::custom)
        }
    }
}
