use alloc::vec::Vec;

use crate::config::NumericConfig;
use crate::error::{bail, Result};
use crate::linalg::HermitianMatrix;

/// Tolerance for the shared reduced state and unit total trace.
pub const TOL_REDUCED: f64 = 1e-9;

/// Sub-normalised states `σ_{a|x}`, stored setting-major (`x·|a| + a`).
#[derive(Clone, Debug, PartialEq)]
pub struct Assemblage {
    n_outcomes: usize,
    n_settings: usize,
    members: Vec<HermitianMatrix>,
}

impl Assemblage {
    /// Validates positivity, a shared reduced state and unit trace.
    pub fn new(
        n_outcomes: usize,
        n_settings: usize,
        members: Vec<HermitianMatrix>,
    ) -> Result<Self> {
        let a = Self::new_unchecked(n_outcomes, n_settings, members)?;
        a.validate(&NumericConfig::default())?;
        Ok(a)
    }

    /// Shape checks only.
    pub fn new_unchecked(
        n_outcomes: usize,
        n_settings: usize,
        members: Vec<HermitianMatrix>,
    ) -> Result<Self> {
        if n_outcomes == 0 || n_settings == 0 {
            bail!(
                Shape,
                "assemblage needs at least one outcome and one setting"
            );
        }
        if members.len() != n_outcomes * n_settings {
            bail!(
                Shape,
                "{} members for {} outcomes x {} settings",
                members.len(),
                n_outcomes,
                n_settings
            );
        }
        let d = members[0].dim();
        if members.iter().any(|m| m.dim() != d) {
            bail!(Shape, "assemblage members differ in dimension");
        }
        Ok(Self {
            n_outcomes,
            n_settings,
            members,
        })
    }

    /// `σ_{a|x}` given as a function of `(a, x)`.
    pub fn from_fn(
        n_outcomes: usize,
        n_settings: usize,
        f: impl Fn(usize, usize) -> HermitianMatrix,
    ) -> Result<Self> {
        let mut members = Vec::with_capacity(n_outcomes * n_settings);
        for x in 0..n_settings {
            for a in 0..n_outcomes {
                members.push(f(a, x));
            }
        }
        Self::new(n_outcomes, n_settings, members)
    }

    pub fn validate(&self, cfg: &NumericConfig) -> Result<()> {
        for x in 0..self.n_settings {
            for a in 0..self.n_outcomes {
                let min = self.member(a, x).min_eigenvalue()?;
                if min < -cfg.tol_psd {
                    bail!(
                        Validation,
                        "member {a}|{x} not positive (min eigenvalue {min:.3e})"
                    );
                }
            }
        }
        let reduced = self.reduced_state(0);
        let tr = reduced.trace();
        if (tr - 1.0).abs() > TOL_REDUCED {
            bail!(Validation, "total trace {tr} differs from 1");
        }
        for x in 1..self.n_settings {
            let dist = (&self.reduced_state(x) - &reduced).trace_norm()?;
            if dist > TOL_REDUCED {
                bail!(
                    Validation,
                    "reduced state of setting {x} differs from setting 0 by {dist:.3e}"
                );
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
        self.members[0].dim()
    }

    pub fn index(&self, a: usize, x: usize) -> usize {
        x * self.n_outcomes + a
    }

    pub fn member(&self, a: usize, x: usize) -> &HermitianMatrix {
        &self.members[self.index(a, x)]
    }

    /// Members in storage order.
    pub fn members(&self) -> &[HermitianMatrix] {
        &self.members
    }

    /// `p_{a|x} = tr σ_{a|x}`.
    pub fn probability(&self, a: usize, x: usize) -> f64 {
        self.member(a, x).trace()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.members.iter().map(HermitianMatrix::trace).collect()
    }

    /// `Σ_a σ_{a|x}`.
    pub fn reduced_state(&self, x: usize) -> HermitianMatrix {
        let mut acc = HermitianMatrix::zeros(self.dim());
        for a in 0..self.n_outcomes {
            acc = &acc + self.member(a, x);
        }
        acc
    }

    /// `{p_{a|x} γ}`.
    pub fn flat(&self, gamma: &HermitianMatrix) -> Result<Self> {
        self.check_dim(gamma)?;
        Ok(self.map(|_, _, m| gamma.scale(m.trace())))
    }

    /// `λ·self + (1−λ)·other`.
    pub fn mix(&self, lambda: f64, other: &Self) -> Result<Self> {
        if (self.n_outcomes, self.n_settings, self.dim())
            != (other.n_outcomes, other.n_settings, other.dim())
        {
            bail!(Shape, "mixing assemblages of different shapes");
        }
        let members = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(s, o)| s.scale(lambda).add_scaled(1.0 - lambda, o))
            .collect();
        Ok(Self { members, ..*self })
    }

    /// Applies `f(a, x, σ_{a|x})` to every member without re-validating.
    pub fn map(&self, f: impl Fn(usize, usize, &HermitianMatrix) -> HermitianMatrix) -> Self {
        let mut members = Vec::with_capacity(self.members.len());
        for x in 0..self.n_settings {
            for a in 0..self.n_outcomes {
                members.push(f(a, x, self.member(a, x)));
            }
        }
        Self { members, ..*self }
    }

    /// Summed trace-norm distance `Σ_{a,x} ‖σ_{a|x} − τ_{a|x}‖₁`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.members.len() != other.members.len() {
            bail!(Shape, "comparing assemblages of different shapes");
        }
        self.members
            .iter()
            .zip(&other.members)
            .map(|(s, o)| (s - o).trace_norm())
            .sum()
    }

    pub(crate) fn check_dim(&self, m: &HermitianMatrix) -> Result<()> {
        if m.dim() != self.dim() {
            bail!(
                Shape,
                "operator of dimension {} for an assemblage of dimension {}",
                m.dim(),
                self.dim()
            );
        }
        Ok(())
    }
}

/// `"a|x"` label used by the JSON formats.
pub fn label(a: usize, x: usize) -> alloc::string::String {
    alloc::format!("{a}|{x}")
}

/// Inverse of [`label`].
pub fn parse_label(s: &str) -> Option<(usize, usize)> {
    let (a, x) = s.split_once('|')?;
    Some((a.trim().parse().ok()?, x.trim().parse().ok()?))
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::*;
    use alloc::collections::BTreeMap;
    use alloc::string::String;

    #[derive(serde::Serialize, serde::Deserialize)]
    struct Repr {
        n_outcomes: usize,
        n_settings: usize,
        members: BTreeMap<String, HermitianMatrix>,
    }

    impl serde::Serialize for Assemblage {
        fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            let mut members = BTreeMap::new();
            for x in 0..self.n_settings {
                for a in 0..self.n_outcomes {
                    members.insert(label(a, x), self.member(a, x).clone());
                }
            }
            Repr {
                n_outcomes: self.n_outcomes,
                n_settings: self.n_settings,
                members,
            }
            .serialize(s)
        }
    }

    impl<'de> serde::Deserialize<'de> for Assemblage {
        fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
            use serde::de::Error as _;
            let mut r = Repr::deserialize(d)?;
            let mut members = Vec::new();
            for x in 0..r.n_settings {
                for a in 0..r.n_outcomes {
                    let m = r.members.remove(&label(a, x)).ok_or_else(|| {
                        D::Error::custom(alloc::format!("missing member {a}|{x}"))
                    })?;
                    members.push(m);
                }
            }
            if let Some(k) = r.members.keys().next() {
                return Err(D::Error::custom(alloc::format!("unexpected member {k}")));
            }
            Assemblage::new(r.n_outcomes, r.n_settings, members).map_err(D::Error::custom)
        }
    }
}
