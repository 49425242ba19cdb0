//! Removal of linearly dependent equality rows.

use alloc::vec::Vec;

use super::problem::SdpProblem;
#[allow(unused_imports)]
use crate::math::Float;

const DEPENDENCE_TOL: f64 = 1e-10;
const CONSISTENCY_TOL: f64 = 1e-8;

pub(crate) enum Presolved {
    /// Indices of rows kept, in original order.
    Rows(Vec<usize>),
    /// A dependent row contradicts the rows it depends on.
    Inconsistent,
}

/// Real coordinates of all constraint blocks with `⟨u, v⟩ = Σ_j tr(A_j B_j)`.
fn vectorize(p: &SdpProblem, k: usize) -> Vec<f64> {
    let s2 = 2.0f64.sqrt();
    let mut out = Vec::new();
    for (j, &d) in p.blocks.iter().enumerate() {
        match p.constraints[k].block(j) {
            Some(a) => {
                for r in 0..d {
                    out.push(a.get(r, r).re);
                    for c in r + 1..d {
                        let z = a.get(r, c);
                        out.push(s2 * z.re);
                        out.push(s2 * z.im);
                    }
                }
            }
            None => out.extend(core::iter::repeat_n(0.0, d * d)),
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Modified Gram-Schmidt with reorthogonalisation over the constraint rows.
pub(crate) fn presolve(p: &SdpProblem) -> Presolved {
    let mut basis: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut kept = Vec::new();
    for k in 0..p.constraints.len() {
        let a = vectorize(p, k);
        let norm_a = dot(&a, &a).sqrt();
        let mut r = a;
        let mut beta = p.constraints[k].b;
        for _ in 0..2 {
            for (q, qb) in &basis {
                let c = dot(q, &r);
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= c * qi;
                }
                beta -= c * qb;
            }
        }
        let norm_r = dot(&r, &r).sqrt();
        if norm_r <= DEPENDENCE_TOL * norm_a.max(1e-300) || norm_a == 0.0 {
            let scale = 1.0 + p.constraints[k].b.abs();
            if beta.abs() > CONSISTENCY_TOL * scale {
                return Presolved::Inconsistent;
            }
            continue;
        }
        for ri in &mut r {
            *ri /= norm_r;
        }
        basis.push((r, beta / norm_r));
        kept.push(k);
    }
    Presolved::Rows(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HermitianMatrix;
    use crate::sdp::problem::Constraint;
    use alloc::vec;

    #[test]
    fn duplicate_row_dropped() {
        let mut p = SdpProblem::new(vec![2]);
        p.push(Constraint::new(1.0).with_block(0, HermitianMatrix::identity(2)));
        p.push(Constraint::new(2.0).with_block(0, HermitianMatrix::identity(2).scale(2.0)));
        p.push(Constraint::new(0.0).with_block(0, HermitianMatrix::pauli_z()));
        match presolve(&p) {
            Presolved::Rows(r) => assert_eq!(r, vec![0, 2]),
            Presolved::Inconsistent => panic!("consistent system flagged"),
        }
    }

    #[test]
    fn contradictory_rows_detected() {
        let mut p = SdpProblem::new(vec![2]);
        p.push(Constraint::new(1.0).with_block(0, HermitianMatrix::identity(2)));
        p.push(Constraint::new(3.0).with_block(0, HermitianMatrix::identity(2)));
        assert!(matches!(presolve(&p), Presolved::Inconsistent));
    }

    #[test]
    fn zero_row_with_nonzero_rhs_inconsistent() {
        let mut p = SdpProblem::new(vec![1]);
        p.push(Constraint::new(1.0));
        assert!(matches!(presolve(&p), Presolved::Inconsistent));
    }
}
