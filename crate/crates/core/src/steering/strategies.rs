use alloc::vec::Vec;

use crate::error::{bail, Result};

/// Default bound on `|a|^{|x|}`.
pub const STRATEGY_CAP: usize = 4096;

/// All deterministic strategies `x ↦ a`, ordered lexicographically with the
/// first setting most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeterministicStrategySet {
    n_outcomes: usize,
    n_settings: usize,
    strategies: Vec<Vec<usize>>,
}

impl DeterministicStrategySet {
    pub fn n_outcomes(&self) -> usize {
        self.n_outcomes
    }

    pub fn n_settings(&self) -> usize {
        self.n_settings
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn strategy(&self, i: usize) -> &[usize] {
        &self.strategies[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.strategies.iter().map(Vec::as_slice)
    }

    /// `D(a|x, i)`.
    pub fn d(&self, a: usize, x: usize, i: usize) -> f64 {
        if self.strategies[i][x] == a {
            1.0
        } else {
            0.0
        }
    }
}

pub fn enumerate_strategies(
    n_outcomes: usize,
    n_settings: usize,
) -> Result<DeterministicStrategySet> {
    enumerate_strategies_capped(n_outcomes, n_settings, STRATEGY_CAP)
}

pub fn enumerate_strategies_capped(
    n_outcomes: usize,
    n_settings: usize,
    cap: usize,
) -> Result<DeterministicStrategySet> {
    if n_outcomes == 0 || n_settings == 0 {
        bail!(Domain, "need at least one outcome and one setting");
    }
    let count = u32::try_from(n_settings)
        .ok()
        .and_then(|e| n_outcomes.checked_pow(e))
        .filter(|&c| c <= cap);
    let Some(count) = count else {
        bail!(
            Capacity,
            "{n_outcomes}^{n_settings} deterministic strategies exceed the cap of {cap}"
        );
    };
    let strategies = (0..count)
        .map(|mut i| {
            let mut s = alloc::vec![0; n_settings];
            for x in (0..n_settings).rev() {
                s[x] = i % n_outcomes;
                i /= n_outcomes;
            }
            s
        })
        .collect();
    Ok(DeterministicStrategySet {
        n_outcomes,
        n_settings,
        strategies,
    })
}
