use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{bail, Result};
#[allow(unused_imports)]
use crate::math::Float;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Number of log-spaced points used by [`ThermalisationSchedule::validate`].
pub const VALIDATION_POINTS: usize = 64;
/// Tolerance of the opt-in bisection inverse.
pub const BISECTION_INVERSE_TOL: f64 = 1e-10;
const INVERSE_REL_TOL: f64 = 1e-9;
const TAIL_LEVEL: f64 = 1e-6;

/// Monotone decay `h(t)` with `h(0) = 1` and `h → 0`.
#[derive(Clone)]
pub enum ThermalisationSchedule {
    /// `h(t) = e^{−t/t0}`.
    Partial { t0: f64 },
    /// `h(t) = 1/(1 + t/t0)`.
    Rational { t0: f64 },
    /// Log-linear interpolation of sampled `(t, h)` pairs.
    Table(ScheduleTable),
    /// User-supplied `h` and inverse.
    Custom {
        h: ScalarFn,
        h_inv: ScalarFn,
        t_scale: f64,
    },
}

impl fmt::Debug for ThermalisationSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Partial { t0 } => f.debug_struct("Partial").field("t0", t0).finish(),
            Self::Rational { t0 } => f.debug_struct("Rational").field("t0", t0).finish(),
            Self::Table(t) => f.debug_tuple("Table").field(t).finish(),
            Self::Custom { t_scale, .. } => f
                .debug_struct("Custom")
                .field("t_scale", t_scale)
                .finish_non_exhaustive(),
        }
    }
}

fn check_t0(t0: f64) -> Result<()> {
    if !(t0.is_finite() && t0 > 0.0) {
        bail!(Domain, "time scale t0 = {t0} must be finite and positive");
    }
    Ok(())
}

impl ThermalisationSchedule {
    pub fn partial(t0: f64) -> Result<Self> {
        check_t0(t0)?;
        Ok(Self::Partial { t0 })
    }

    pub fn rational(t0: f64) -> Result<Self> {
        check_t0(t0)?;
        Ok(Self::Rational { t0 })
    }

    pub fn from_table(samples: Vec<(f64, f64)>) -> Result<Self> {
        let s = Self::Table(ScheduleTable::new(samples)?);
        s.validate()?;
        Ok(s)
    }

    /// Custom schedule with explicit inverse, validated on construction.
    pub fn custom(
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        h_inv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        t_scale: f64,
    ) -> Result<Self> {
        check_t0(t_scale)?;
        let s = Self::Custom {
            h: Arc::new(h),
            h_inv: Arc::new(h_inv),
            t_scale,
        };
        s.validate()?;
        Ok(s)
    }

    /// Custom schedule inverted numerically by bisection.
    pub fn custom_bisection(
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        t_scale: f64,
    ) -> Result<Self> {
        check_t0(t_scale)?;
        let h: ScalarFn = Arc::new(h);
        let hf = h.clone();
        let h_inv: ScalarFn = Arc::new(move |v| bisect_inverse(&*hf, v, t_scale));
        let s = Self::Custom { h, h_inv, t_scale };
        s.validate()?;
        Ok(s)
    }

    /// Characteristic time used for sampling grids.
    pub fn t_scale(&self) -> f64 {
        match self {
            Self::Partial { t0 } | Self::Rational { t0 } => *t0,
            Self::Table(t) => t.span(),
            Self::Custom { t_scale, .. } => *t_scale,
        }
    }

    pub fn h(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            bail!(Domain, "time {t} must be non-negative");
        }
        Ok(self.h_unchecked(t))
    }

    fn h_unchecked(&self, t: f64) -> f64 {
        match self {
            Self::Partial { t0 } => (-t / t0).exp(),
            Self::Rational { t0 } => 1.0 / (1.0 + t / t0),
            Self::Table(tab) => tab.eval(t),
            Self::Custom { h, .. } => h(t),
        }
    }

    /// Time at which `h` reaches `v ∈ (0, 1]`.
    pub fn h_inv(&self, v: f64) -> Result<f64> {
        if !(v > 0.0 && v <= 1.0) {
            bail!(Domain, "schedule value {v} outside (0, 1]");
        }
        Ok(match self {
            Self::Partial { t0 } => -t0 * v.ln(),
            Self::Rational { t0 } => t0 * (1.0 / v - 1.0),
            Self::Table(tab) => tab.inverse(v),
            Self::Custom { h_inv, .. } => h_inv(v),
        })
    }

    /// Samples `h` on a log grid spanning `t_scale·[1e−6, 1e12]` and checks
    /// `h(0) = 1`, strict decrease, decay below `1e−6` and the inverse.
    pub fn validate(&self) -> Result<()> {
        let h0 = self.h_unchecked(0.0);
        if (h0 - 1.0).abs() > 1e-12 {
            bail!(Validation, "h(0) = {h0}, expected 1");
        }
        let ts = self.t_scale();
        let (lo, hi) = (-6.0f64, 12.0f64);
        let mut prev = h0;
        for k in 0..VALIDATION_POINTS {
            let e = lo + (hi - lo) * k as f64 / (VALIDATION_POINTS - 1) as f64;
            let t = ts * 10f64.powf(e);
            let v = self.h_unchecked(t);
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                bail!(Validation, "h({t:.3e}) = {v} outside [0, 1]");
            }
            if !(v < prev || (v == 0.0 && prev == 0.0)) {
                bail!(Validation, "h is not strictly decreasing near t = {t:.3e}");
            }
            prev = v;
            if v > 0.0 {
                let back = self.h_inv(v)?;
                if (back - t).abs() > INVERSE_REL_TOL * t {
                    bail!(Validation, "h_inv(h({t:.6e})) = {back:.6e}");
                }
            }
        }
        if !(prev < TAIL_LEVEL) {
            bail!(Validation, "h only decays to {prev:.3e} on the sample grid");
        }
        Ok(())
    }
}

fn bisect_inverse(h: &dyn Fn(f64) -> f64, v: f64, t_scale: f64) -> f64 {
    if v >= 1.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = t_scale;
    while h(hi) > v {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    while hi - lo > BISECTION_INVERSE_TOL * hi.max(f64::MIN_POSITIVE) * 1e-3 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sampled schedule. Between samples `ln h` is linear in `t`; beyond the
/// last sample the final segment's decay rate is continued.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScheduleTable {
    t: Vec<f64>,
    ln_h: Vec<f64>,
}

impl ScheduleTable {
    /// `samples` are `(t, h)` pairs; a `(0, 1)` sample is prepended if absent.
    pub fn new(mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.first().is_none_or(|s| s.0 != 0.0) {
            samples.insert(0, (0.0, 1.0));
        }
        if samples.len() < 2 {
            bail!(Validation, "schedule table needs a sample beyond t = 0");
        }
        for w in samples.windows(2) {
            let ((t1, h1), (t2, h2)) = (w[0], w[1]);
            if !(t2 > t1 && t2.is_finite()) {
                bail!(
                    Validation,
                    "sample times must increase strictly ({t1} then {t2})"
                );
            }
            if !(h2 < h1 && h2 > 0.0) {
                bail!(
                    Validation,
                    "sample values must decrease strictly and stay positive ({h1} then {h2})"
                );
            }
        }
        if samples[0].1 != 1.0 {
            bail!(Validation, "h(0) = {}, expected 1", samples[0].1);
        }
        let (t, ln_h) = samples.into_iter().map(|(t, h)| (t, h.ln())).unzip();
        Ok(Self { t, ln_h })
    }

    pub fn samples(&self) -> Vec<(f64, f64)> {
        self.t
            .iter()
            .zip(&self.ln_h)
            .map(|(&t, &l)| (t, l.exp()))
            .collect()
    }

    fn span(&self) -> f64 {
        *self.t.last().unwrap()
    }

    fn segment(&self, k: usize) -> (f64, f64, f64) {
        let rate = (self.ln_h[k + 1] - self.ln_h[k]) / (self.t[k + 1] - self.t[k]);
        (self.t[k], self.ln_h[k], rate)
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.t.len();
        let k = match self.t.iter().rposition(|&s| s <= t) {
            Some(k) => k.min(n - 2),
            None => 0,
        };
        let (t_k, l_k, rate) = self.segment(k);
        (l_k + rate * (t - t_k)).exp()
    }

    fn inverse(&self, v: f64) -> f64 {
        let l = v.ln();
        let n = self.t.len();
        let k = match self.ln_h.iter().rposition(|&s| s >= l) {
            Some(k) => k.min(n - 2),
            None => 0,
        };
        let (t_k, l_k, rate) = self.segment(k);
        t_k + (l - l_k) / rate
    }
}
