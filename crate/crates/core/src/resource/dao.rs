use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::linalg::HermitianMatrix;
use crate::quantum::{InstrumentFamily, QuantumChannelChoi, TOL_GIBBS};

const TOL_STOCHASTIC: f64 = 1e-12;

/// `𝔽(𝓔)_{a|x} = Σ_{b,y} P'(a|x,y,b) P(y|x) 𝓠∘𝓔_{b|y}∘𝓟`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeterministicAllowedOperation {
    n_a: usize,
    n_x: usize,
    n_b: usize,
    n_y: usize,
    /// `pre[x][y] = P(y|x)`.
    pre: Vec<Vec<f64>>,
    /// `post[(x·n_y + y)·n_b + b][a] = P'(a|x,y,b)`.
    post: Vec<Vec<f64>>,
    pre_channel: QuantumChannelChoi,
    post_channel: QuantumChannelChoi,
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|&v| !(v >= 0.0)) {
        bail!(Validation, "{what} has a negative or NaN entry");
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > TOL_STOCHASTIC {
        bail!(Validation, "{what} sums to {s}");
    }
    Ok(())
}

impl DeterministicAllowedOperation {
    /// `pre[x]` is `P(·|x)` over inner settings `y`; `post` is indexed by
    /// `(x·n_y + y)·n_b + b` and holds `P'(·|x,y,b)` over outputs `a`.
    pub fn new(
        n_a: usize,
        pre: Vec<Vec<f64>>,
        post: Vec<Vec<f64>>,
        pre_channel: QuantumChannelChoi,
        post_channel: QuantumChannelChoi,
    ) -> Result<Self> {
        let n_x = pre.len();
        let n_y = pre.first().map_or(0, Vec::len);
        if n_a == 0 || n_x == 0 || n_y == 0 {
            bail!(Shape, "classical maps need non-empty alphabets");
        }
        if !post.len().is_multiple_of(n_x * n_y) || post.is_empty() {
            bail!(
                Shape,
                "{} post-processing rows for {n_x}×{n_y} setting pairs",
                post.len()
            );
        }
        let n_b = post.len() / (n_x * n_y);
        for (x, row) in pre.iter().enumerate() {
            if row.len() != n_y {
                bail!(Shape, "pre-processing rows differ in length");
            }
            check_distribution(row, &alloc::format!("P(·|x={x})"))?;
        }
        for (k, row) in post.iter().enumerate() {
            if row.len() != n_a {
                bail!(
                    Shape,
                    "post-processing row {k} has {} entries, expected {n_a}",
                    row.len()
                );
            }
            check_distribution(row, &alloc::format!("post-processing row {k}"))?;
        }
        let d = pre_channel.d_in();
        for ch in [&pre_channel, &post_channel] {
            if ch.d_in() != d || ch.d_out() != d {
                bail!(Shape, "quantum pre/post-processing must act on one system");
            }
        }
        Ok(Self {
            n_a,
            n_x,
            n_b,
            n_y,
            pre,
            post,
            pre_channel,
            post_channel,
        })
    }

    /// Identity classical maps and channels.
    pub fn identity(n_outcomes: usize, n_settings: usize, dim: usize) -> Self {
        Self::relabel(&alloc::vec![(0..n_outcomes).collect(); n_settings], dim).unwrap()
    }

    /// Outcome `b` of setting `x` becomes `perms[x][b]`.
    pub fn relabel(perms: &[Vec<usize>], dim: usize) -> Result<Self> {
        let n_x = perms.len();
        let n_a = perms.first().map_or(0, Vec::len);
        let pre = (0..n_x)
            .map(|x| (0..n_x).map(|y| f64::from(u8::from(x == y))).collect())
            .collect();
        let mut post = Vec::with_capacity(n_x * n_x * n_a);
        for x in 0..n_x {
            for y in 0..n_x {
                for b in 0..n_a {
                    let target = if x == y { perms[x][b] } else { b };
                    if target >= n_a {
                        bail!(Shape, "relabeling target {target} out of range");
                    }
                    post.push((0..n_a).map(|a| f64::from(u8::from(a == target))).collect());
                }
            }
        }
        let id = QuantumChannelChoi::identity(dim);
        Self::new(n_a, pre, post, id.clone(), id)
    }

    /// Every output setting queries inner setting `y0`.
    pub fn constant_setting(
        n_outcomes: usize,
        n_settings_out: usize,
        n_settings_in: usize,
        y0: usize,
        dim: usize,
    ) -> Result<Self> {
        if y0 >= n_settings_in {
            bail!(Shape, "setting {y0} out of range");
        }
        let pre = (0..n_settings_out)
            .map(|_| {
                (0..n_settings_in)
                    .map(|y| f64::from(u8::from(y == y0)))
                    .collect()
            })
            .collect();
        let post = (0..n_settings_out * n_settings_in * n_outcomes)
            .map(|k| {
                let b = k % n_outcomes;
                (0..n_outcomes)
                    .map(|a| f64::from(u8::from(a == b)))
                    .collect()
            })
            .collect();
        let id = QuantumChannelChoi::identity(dim);
        Self::new(n_outcomes, pre, post, id.clone(), id)
    }

    /// `(|a|, |x|)` of the produced family.
    pub fn output_shape(&self) -> (usize, usize) {
        (self.n_a, self.n_x)
    }

    /// `(|b|, |y|)` of the consumed family.
    pub fn input_shape(&self) -> (usize, usize) {
        (self.n_b, self.n_y)
    }

    pub fn dim(&self) -> usize {
        self.pre_channel.d_in()
    }

    /// `P(y|x)`.
    pub fn pre(&self, y: usize, x: usize) -> f64 {
        self.pre[x][y]
    }

    /// `P'(a|x,y,b)`.
    pub fn post(&self, a: usize, x: usize, y: usize, b: usize) -> f64 {
        self.post[(x * self.n_y + y) * self.n_b + b][a]
    }

    pub fn pre_channel(&self) -> &QuantumChannelChoi {
        &self.pre_channel
    }

    pub fn post_channel(&self) -> &QuantumChannelChoi {
        &self.post_channel
    }

    /// Both channels trace preserving and fixing `γ` within [`TOL_GIBBS`].
    pub fn check_gibbs(&self, gamma: &HermitianMatrix) -> Result<()> {
        for (name, ch) in [("pre", &self.pre_channel), ("post", &self.post_channel)] {
            let (_, res) = ch.is_gibbs_preserving(gamma)?;
            if res > TOL_GIBBS {
                bail!(Validation, "{name}-processing channel moves γ by {res:.3e}");
            }
            if !ch.is_trace_preserving(TOL_GIBBS) {
                bail!(
                    Validation,
                    "{name}-processing channel is not trace preserving"
                );
            }
        }
        Ok(())
    }
}

/// Applies `op` to `fam` after checking Gibbs preservation for `γ`.
pub fn apply_dao(
    op: &DeterministicAllowedOperation,
    fam: &InstrumentFamily,
    gamma: &HermitianMatrix,
) -> Result<InstrumentFamily> {
    if (fam.n_outcomes(), fam.n_settings()) != op.input_shape() {
        bail!(
            Shape,
            "operation expects {:?} (outcomes, settings), family has ({}, {})",
            op.input_shape(),
            fam.n_outcomes(),
            fam.n_settings()
        );
    }
    if fam.dim() != op.dim() || gamma.dim() != op.dim() {
        bail!(
            Shape,
            "operation acts on dimension {}, family on {}",
            op.dim(),
            fam.dim()
        );
    }
    op.check_gibbs(gamma)?;
    let sandwiched: Vec<QuantumChannelChoi> = fam
        .filters()
        .iter()
        .map(|e| op.post_channel.compose(&e.compose(&op.pre_channel)?))
        .collect::<Result<_>>()?;
    let mut filters = Vec::with_capacity(op.n_a * op.n_x);
    for x in 0..op.n_x {
        for a in 0..op.n_a {
            let mut acc = sandwiched[0].scale(0.0);
            for y in 0..op.n_y {
                let py = op.pre(y, x);
                if py == 0.0 {
                    continue;
                }
                for b in 0..op.n_b {
                    let w = op.post(a, x, y, b) * py;
                    if w != 0.0 {
                        acc = acc.add_scaled(w, &sandwiched[y * op.n_b + b])?;
                    }
                }
            }
            filters.push(acc);
        }
    }
    InstrumentFamily::from_filters(op.n_a, op.n_x, filters)
}

/// `op2 ∘ op1`: applying the result equals applying `op1` then `op2`.
pub fn compose_dao(
    op2: &DeterministicAllowedOperation,
    op1: &DeterministicAllowedOperation,
) -> Result<DeterministicAllowedOperation> {
    if op2.input_shape() != op1.output_shape() || op2.dim() != op1.dim() {
        bail!(
            Shape,
            "cannot chain an operation producing {:?} into one consuming {:?}",
            op1.output_shape(),
            op2.input_shape()
        );
    }
    let (n_x, n_y, n_z) = (op2.n_x, op2.n_y, op1.n_y);
    let (n_a, n_b, n_c) = (op2.n_a, op2.n_b, op1.n_b);
    let pre: Vec<Vec<f64>> = (0..n_x)
        .map(|x| {
            (0..n_z)
                .map(|z| (0..n_y).map(|y| op1.pre(z, y) * op2.pre(y, x)).sum())
                .collect()
        })
        .collect();
    let mut post = Vec::with_capacity(n_x * n_z * n_c);
    for x in 0..n_x {
        for z in 0..n_z {
            for c in 0..n_c {
                let norm = pre[x][z];
                let row: Vec<f64> = if norm > 0.0 {
                    (0..n_a)
                        .map(|a| {
                            let mut s = 0.0;
                            for y in 0..n_y {
                                let w = op1.pre(z, y) * op2.pre(y, x);
                                if w == 0.0 {
                                    continue;
                                }
                                for b in 0..n_b {
                                    s += op2.post(a, x, y, b) * op1.post(b, y, z, c) * w;
                                }
                            }
                            s / norm
                        })
                        .collect()
                } else {
                    alloc::vec![1.0 / n_a as f64; n_a]
                };
                let s: f64 = row.iter().sum();
                post.push(row.into_iter().map(|v| v / s).collect());
            }
        }
    }
    let pre = pre.into_iter().map(|r| {
        let s: f64 = r.iter().sum();
        r.into_iter().map(|v| v / s).collect()
    });
    DeterministicAllowedOperation::new(
        n_a,
        pre.collect(),
        post,
        op1.pre_channel.compose(&op2.pre_channel)?,
        op2.post_channel.compose(&op1.post_channel)?,
    )
}
