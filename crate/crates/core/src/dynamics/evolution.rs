use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use crate::error::{bail, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, C64};
#[allow(unused_imports)]
use crate::math::Float;
use crate::quantum::QuantumChannelChoi;

use super::ThermalisationSchedule;

type MapFn = Arc<dyn Fn(f64) -> Result<QuantumChannelChoi> + Send + Sync>;

/// `h·𝓘 + (1 − h)·γ tr(·)`.
pub fn thermalisation_channel(gamma: &HermitianMatrix, h: f64) -> QuantumChannelChoi {
    let d = gamma.dim();
    let id = QuantumChannelChoi::identity(d);
    id.scale(h)
        .add_scaled(1.0 - h, &QuantumChannelChoi::full_thermalisation(gamma))
        .unwrap()
}

/// Single-qubit Davies map with ground population `p`, relaxation rate `A`
/// and dephasing rate `Γ`.
pub fn davies_map(p: f64, a: f64, gamma_rate: f64, t: f64) -> Result<QuantumChannelChoi> {
    if !(p > 0.0 && p < 1.0) {
        bail!(Domain, "ground population {p} outside (0, 1)");
    }
    if !(a >= 0.0 && a / 2.0 <= gamma_rate && gamma_rate.is_finite()) {
        bail!(Domain, "rates need 0 ≤ A/2 ≤ Γ (A = {a}, Γ = {gamma_rate})");
    }
    if !(t >= 0.0) {
        bail!(Domain, "time {t} must be non-negative");
    }
    let decay = 1.0 - (-a * t).exp();
    let coherence = (-gamma_rate * t).exp();
    Ok(QuantumChannelChoi::from_linear_map(2, 2, |x| {
        let mut out = ComplexMatrix::zeros(2, 2);
        out[(0, 0)] = x[(0, 0)] * (1.0 - (1.0 - p) * decay) + x[(1, 1)] * (p * decay);
        out[(1, 1)] = x[(0, 0)] * ((1.0 - p) * decay) + x[(1, 1)] * (1.0 - p * decay);
        out[(0, 1)] = x[(0, 1)] * coherence;
        out[(1, 0)] = x[(1, 0)] * coherence;
        out
    }))
}

/// How an evolution's map passed the positivity check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Positivity {
    CompletelyPositive,
    /// Positive on the probe states only; not completely positive.
    PositiveOnly,
    Violated,
}

/// One-parameter family of trace-preserving maps `t ↦ 𝓝_t`.
#[derive(Clone)]
pub struct Evolution {
    label: String,
    dim: usize,
    map: MapFn,
}

impl fmt::Debug for Evolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Evolution")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl Evolution {
    pub fn new(
        label: impl Into<String>,
        dim: usize,
        map: impl Fn(f64) -> Result<QuantumChannelChoi> + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            dim,
            map: Arc::new(map),
        }
    }

    /// `D_t` for the given schedule.
    pub fn from_schedule(gamma: &HermitianMatrix, schedule: ThermalisationSchedule) -> Self {
        let g = gamma.clone();
        Self::new(alloc::format!("{schedule:?}"), gamma.dim(), move |t| {
            Ok(thermalisation_channel(&g, schedule.h(t)?))
        })
    }

    /// `c(t)·𝓘 + (1 − c(t))·γ tr(·)` for an arbitrary envelope `c`.
    pub fn envelope(
        label: impl Into<String>,
        gamma: &HermitianMatrix,
        c: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let g = gamma.clone();
        Self::new(label, gamma.dim(), move |t| {
            if !(t >= 0.0) {
                bail!(Domain, "time {t} must be non-negative");
            }
            Ok(thermalisation_channel(&g, c(t)))
        })
    }

    /// Envelope `e^{−t}(1 + cos 10t)/2`.
    pub fn oscillatory(gamma: &HermitianMatrix) -> Self {
        Self::envelope("oscillatory", gamma, |t| {
            (-t).exp() * (1.0 + (10.0 * t).cos()) / 2.0
        })
    }

    pub fn davies(p: f64, a: f64, gamma_rate: f64) -> Result<Self> {
        davies_map(p, a, gamma_rate, 0.0)?;
        Ok(Self::new("davies", 2, move |t| {
            davies_map(p, a, gamma_rate, t)
        }))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn map_at(&self, t: f64) -> Result<QuantumChannelChoi> {
        let m = (self.map)(t)?;
        if (m.d_in(), m.d_out()) != (self.dim, self.dim) {
            bail!(
                Shape,
                "evolution map at t = {t} is {}→{}, expected {d}→{d}",
                m.d_in(),
                m.d_out(),
                d = self.dim
            );
        }
        Ok(m)
    }

    /// Choi test first; failing that, positivity on pure probe states
    /// `|i⟩` and `(|i⟩ + e^{iφ}|j⟩)/√2` for eight phases.
    pub fn positivity_at(&self, t: f64, tol: f64) -> Result<Positivity> {
        let m = self.map_at(t)?;
        if m.is_completely_positive(tol)? {
            return Ok(Positivity::CompletelyPositive);
        }
        let d = self.dim;
        let probe = |v: &[C64]| -> Result<bool> {
            Ok(m.apply(&HermitianMatrix::projector(v))?.min_eigenvalue()? >= -tol)
        };
        for i in 0..d {
            let mut v = alloc::vec![C64::new(0.0, 0.0); d];
            v[i] = C64::new(1.0, 0.0);
            if !probe(&v)? {
                return Ok(Positivity::Violated);
            }
            for j in i + 1..d {
                for k in 0..8 {
                    let phi = core::f64::consts::PI * k as f64 / 4.0;
                    let mut w = alloc::vec![C64::new(0.0, 0.0); d];
                    w[i] = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
                    w[j] = C64::from_polar(core::f64::consts::FRAC_1_SQRT_2, phi);
                    if !probe(&w)? {
                        return Ok(Positivity::Violated);
                    }
                }
            }
        }
        Ok(Positivity::PositiveOnly)
    }
}
