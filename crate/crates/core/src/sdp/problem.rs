use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::linalg::HermitianMatrix;

/// One linear equality `Σ_j tr(A_j X_j) = b`, stored sparsely by block.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Constraint {
    pub terms: Vec<(usize, HermitianMatrix)>,
    pub b: f64,
}

impl Constraint {
    pub fn new(b: f64) -> Self {
        Self {
            terms: Vec::new(),
            b,
        }
    }

    pub fn with_block(mut self, block: usize, a: HermitianMatrix) -> Self {
        self.add_term(block, a);
        self
    }

    /// Adds `a` to the coefficient of `block`, merging with an existing term.
    pub fn add_term(&mut self, block: usize, a: HermitianMatrix) {
        if let Some((_, existing)) = self.terms.iter_mut().find(|(j, _)| *j == block) {
            *existing = &*existing + &a;
        } else {
            self.terms.push((block, a));
        }
    }

    pub fn block(&self, j: usize) -> Option<&HermitianMatrix> {
        self.terms.iter().find(|(b, _)| *b == j).map(|(_, a)| a)
    }
}

/// `min Σ_j tr(C_j X_j)` subject to equality constraints and `X_j ⪰ 0`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    pub objective: Vec<HermitianMatrix>,
    pub constraints: Vec<Constraint>,
}

impl SdpProblem {
    /// A problem with zero objective over the given block sizes.
    pub fn new(blocks: Vec<usize>) -> Self {
        let objective = blocks
            .iter()
            .map(|&d| HermitianMatrix::zeros(d.max(1)))
            .collect();
        Self {
            blocks,
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn add_block(&mut self, dim: usize) -> usize {
        self.blocks.push(dim);
        self.objective.push(HermitianMatrix::zeros(dim.max(1)));
        self.blocks.len() - 1
    }

    pub fn set_objective(&mut self, block: usize, c: HermitianMatrix) {
        self.objective[block] = c;
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Multiplies every objective block by `alpha`.
    pub fn scale_objective(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.objective {
            *c = c.scale(alpha);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            bail!(Shape, "problem has no blocks");
        }
        if self.objective.len() != self.blocks.len() {
            bail!(
                Shape,
                "{} objective blocks for {} blocks",
                self.objective.len(),
                self.blocks.len()
            );
        }
        for (j, (&d, c)) in self.blocks.iter().zip(&self.objective).enumerate() {
            if d == 0 {
                bail!(Shape, "block {j} has dimension 0");
            }
            if c.dim() != d {
                bail!(
                    Shape,
                    "objective block {j} is {}x{}, expected {d}",
                    c.dim(),
                    c.dim()
                );
            }
            if !c.is_finite() {
                bail!(Domain, "objective block {j} has non-finite entries");
            }
        }
        for (k, con) in self.constraints.iter().enumerate() {
            if !con.b.is_finite() {
                bail!(Domain, "constraint {k} has non-finite right-hand side");
            }
            for (j, a) in &con.terms {
                let Some(&d) = self.blocks.get(*j) else {
                    bail!(Shape, "constraint {k} references missing block {j}");
                };
                if a.dim() != d {
                    bail!(
                        Shape,
                        "constraint {k} block {j} is {}x{}, expected {d}",
                        a.dim(),
                        a.dim()
                    );
                }
                if !a.is_finite() {
                    bail!(Domain, "constraint {k} block {j} has non-finite entries");
                }
            }
        }
        Ok(())
    }
}
