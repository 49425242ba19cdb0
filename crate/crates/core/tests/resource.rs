mod common;

use common::*;
use incotherm_core::dynamics::ThermalisationSchedule;
use incotherm_core::error::FilterCondition;
use incotherm_core::linalg::{ComplexMatrix, HermitianMatrix, C64};
use incotherm_core::quantum::{InstrumentFamily, QuantumChannelChoi};
use incotherm_core::resource::random::*;
use incotherm_core::resource::*;
use incotherm_core::steering::sr_gamma;
use incotherm_core::{Error, NumericConfig};
use proptest::prelude::*;
use rand::Rng;

fn cfg() -> NumericConfig {
    NumericConfig::default()
}

fn thermal_qubit(p: f64) -> HermitianMatrix {
    HermitianMatrix::diag(&[p, 1.0 - p])
}

fn max_filter_distance(a: &InstrumentFamily, b: &InstrumentFamily) -> f64 {
    a.filters()
        .iter()
        .zip(b.filters())
        .map(|(x, y)| x.choi().max_abs_diff(y.choi()))
        .fold(0.0, f64::max)
}

fn sr_of(fam: &InstrumentFamily, g: &HermitianMatrix) -> f64 {
    sr_gamma(&fam.apply(g).unwrap(), g, &cfg()).unwrap().sr
}

#[test]
fn composition_equals_sequential_application() {
    let mut r = rng(101);
    for &p in &[0.5, 0.73] {
        let g = thermal_qubit(p);
        let fam = purified_family(&g);
        for (mid, out) in [((2, 2), (2, 2)), ((3, 2), (2, 3)), ((2, 3), (3, 1))] {
            let op1 = random_dao(mid, (2, 2), &g, &mut r).unwrap();
            let op2 = random_dao(out, mid, &g, &mut r).unwrap();
            let seq = apply_dao(&op2, &apply_dao(&op1, &fam, &g).unwrap(), &g).unwrap();
            let comp = apply_dao(&compose_dao(&op2, &op1).unwrap(), &fam, &g).unwrap();
            assert_eq!(comp.n_outcomes(), out.0);
            assert_eq!(comp.n_settings(), out.1);
            assert!(max_filter_distance(&seq, &comp) < 1e-9);
        }
    }
}

#[test]
fn composition_shape_mismatch() {
    let g = HermitianMatrix::maximally_mixed(2);
    let mut r = rng(3);
    let op1 = random_dao((3, 2), (2, 2), &g, &mut r).unwrap();
    let op2 = random_dao((2, 2), (2, 2), &g, &mut r).unwrap();
    assert!(matches!(compose_dao(&op2, &op1), Err(Error::Shape(_))));
}

#[test]
fn filter_composition_matches_sequential() {
    let mut r = rng(55);
    let g = HermitianMatrix::diag(&[0.5, 0.3, 0.2]);
    // σ_{0|x} = √ρ E_x √ρ and σ_{1|x} = ρ − σ_{0|x} with random effects E_x.
    let rho = random_state(3, &mut r);
    let root = rho.sqrt_psd(0.0).unwrap();
    let mut members = Vec::new();
    for _ in 0..2 {
        let e = random_state(3, &mut r);
        let e = e.scale(1.0 / e.max_eigenvalue().unwrap());
        let s0 = e.conjugate_by(root.as_matrix());
        members.push(s0.clone());
        members.push(&rho - &s0);
    }
    let s3 = incotherm_core::quantum::Assemblage::new(2, 2, members).unwrap();
    for _ in 0..20 {
        let f1 = random_lf1_filter(&g, &mut r).unwrap();
        let f2 = random_lf1_filter(&g, &mut r).unwrap();
        let seq = apply_lf1(&f2, &apply_lf1(&f1, &s3, &g, false).unwrap(), &g, false).unwrap();
        let comp = apply_lf1(&f2.compose(&f1).unwrap(), &s3, &g, false).unwrap();
        assert!(seq.distance(&comp).unwrap() < 1e-10);
        let pg = f2.compose(&f1).unwrap().success_probability(&g).unwrap();
        let oracle = f1.success_probability(&g).unwrap() * f2.success_probability(&g).unwrap();
        assert!((pg - oracle).abs() < 1e-12);
    }
}

#[test]
fn shared_average_channel_is_carried_through() {
    let mut r = rng(77);
    let g = thermal_qubit(0.62);
    let fam = purified_family(&g);
    for _ in 0..10 {
        let op = random_dao((3, 3), (2, 2), &g, &mut r).unwrap();
        let out = apply_dao(&op, &fam, &g).unwrap();
        let oracle = op
            .post_channel()
            .compose(&fam.average_channel().compose(op.pre_channel()).unwrap())
            .unwrap();
        for x in 0..3 {
            let avg = out.setting_channel(x).unwrap();
            assert!(avg.choi().max_abs_diff(oracle.choi()) < 1e-12);
        }
    }
}

#[test]
fn structured_operations() {
    let g = HermitianMatrix::maximally_mixed(2);
    let fam = InstrumentFamily::pauli_xz();
    let id = DeterministicAllowedOperation::identity(2, 2, 2);
    assert!(max_filter_distance(&apply_dao(&id, &fam, &g).unwrap(), &fam) < 1e-15);
    let flip = DeterministicAllowedOperation::relabel(&[vec![1, 0], vec![0, 1]], 2).unwrap();
    let flipped = apply_dao(&flip, &fam, &g).unwrap();
    assert!(flipped.filter(0, 0).distance(fam.filter(1, 0)).unwrap() < 1e-15);
    assert!((sr_of(&flipped, &g) - 0.5).abs() < 1e-7);
    // Querying one inner setting everywhere yields a compatible family.
    let c = DeterministicAllowedOperation::constant_setting(2, 3, 2, 1, 2).unwrap();
    assert!(sr_of(&apply_dao(&c, &fam, &g).unwrap(), &g) < 1e-7);
}

#[test]
fn non_gibbs_operation_rejected_up_front() {
    let g = thermal_qubit(0.8);
    let fam = purified_family(&g);
    let x = HermitianMatrix::pauli_x().into_matrix();
    let flip = QuantumChannelChoi::unitary(&x).unwrap();
    let id = QuantumChannelChoi::identity(2);
    let op = DeterministicAllowedOperation::new(
        2,
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        (0..8)
            .map(|k| {
                if k % 2 == 0 {
                    vec![1.0, 0.0]
                } else {
                    vec![0.0, 1.0]
                }
            })
            .collect(),
        flip,
        id,
    )
    .unwrap();
    assert!(matches!(
        apply_dao(&op, &fam, &g),
        Err(Error::Validation(_))
    ));
    let sched = ThermalisationSchedule::partial(1.0).unwrap();
    let res = monotone_audit(
        &fam,
        &g,
        &sched,
        &[op],
        &[],
        &AuditOptions::default(),
        &cfg(),
    );
    assert!(matches!(res, Err(Error::Validation(_))));
}

#[test]
fn filter_conditions_are_distinguished() {
    // (ii) fails: a diagonal contraction that reweights populations.
    let g = HermitianMatrix::maximally_mixed(2);
    let s = InstrumentFamily::pauli_xz().apply(&g).unwrap();
    let k = HermitianMatrix::diag(&[1.0, 0.5]).into_matrix();
    let f = Lf1Filter::new(k).unwrap();
    assert_eq!(
        f.check_conditions(&s, &g).unwrap_err(),
        Error::ConditionViolated(FilterCondition::ThermalState)
    );

    // (ii) holds, (i) fails: K = c·√γ U γ^{-1/2} with U not commuting with γ.
    let g = thermal_qubit(0.8);
    let s = purified_family(&g).apply(&g).unwrap();
    let root = g.sqrt_psd(0.0).unwrap().into_matrix();
    let inv_root = g.matrix_func(|v| v.powf(-0.5)).unwrap().into_matrix();
    // exp(iπX/4) = (I + iX)/√2
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let x = HermitianMatrix::pauli_x().into_matrix();
    let u = &ComplexMatrix::identity(2).scale_real(c) + &x.scale(C64::new(0.0, c));
    let raw = &(&root * &u) * &inv_root;
    let top = HermitianMatrix::hermitian_part(&(&raw.adjoint() * &raw))
        .max_eigenvalue()
        .unwrap();
    let f = Lf1Filter::new(raw.scale_real(1.0 / top.sqrt())).unwrap();
    assert_eq!(
        f.check_conditions(&s, &g).unwrap_err(),
        Error::ConditionViolated(FilterCondition::Statistics)
    );
    assert!(apply_lf1(&f, &s, &g, true).is_err());
    assert!(apply_lf1(&f, &s, &g, false).is_ok());

    let zero = Lf1Filter::new(ComplexMatrix::zeros(2, 2)).unwrap();
    assert_eq!(
        apply_lf1(&zero, &s, &g, false).unwrap_err(),
        Error::ZeroSuccessProbability
    );
    assert!(Lf1Filter::new(ComplexMatrix::identity(2).scale_real(1.01)).is_err());
}

#[test]
fn permissive_audit_marks_rows() {
    let g = HermitianMatrix::maximally_mixed(2);
    let fam = InstrumentFamily::pauli_xz();
    let sched = ThermalisationSchedule::rational(2.0).unwrap();
    let bad = Lf1Filter::new(HermitianMatrix::diag(&[1.0, 0.2]).into_matrix()).unwrap();
    let good = Lf1Filter::identity(2);
    let strict = monotone_audit(
        &fam,
        &g,
        &sched,
        &[],
        &[good.clone(), bad.clone()],
        &AuditOptions::default(),
        &cfg(),
    );
    assert!(matches!(strict, Err(Error::ConditionViolated(_))));
    let opts = AuditOptions {
        permissive: true,
        ..AuditOptions::default()
    };
    let rep = monotone_audit(&fam, &g, &sched, &[], &[good, bad], &opts, &cfg()).unwrap();
    assert!(rep.rows[0].certified && rep.rows[0].pass);
    assert!(!rep.rows[1].certified);
    assert!(rep.pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operations_never_increase_robustness(seed in any::<u64>(), p in 0.5f64..0.9) {
        let mut r = rng(seed);
        let g = thermal_qubit(p);
        let fam = purified_family(&g);
        let before = sr_of(&fam, &g);
        let out = (r.random_range(2..=3), r.random_range(1..=3));
        let op = random_dao(out, (2, 2), &g, &mut r).unwrap();
        let after = sr_of(&apply_dao(&op, &fam, &g).unwrap(), &g);
        prop_assert!(after <= before + 1e-6, "{after} > {before}");
    }

    #[test]
    fn filters_never_increase_robustness(seed in any::<u64>(), p in 0.5f64..0.9) {
        let mut r = rng(seed);
        let g = thermal_qubit(p);
        let s = purified_family(&g).apply(&g).unwrap();
        let before = sr_gamma(&s, &g, &cfg()).unwrap().sr;
        let f = random_lf1_filter(&g, &mut r).unwrap();
        let w = apply_lf1(&f, &s, &g, true).unwrap();
        let after = sr_gamma(&w, &g, &cfg()).unwrap().sr;
        prop_assert!(after <= before + 1e-6);
    }

    #[test]
    fn sampled_operations_are_gibbs_preserving(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_state(3, &mut r);
        let g = HermitianMatrix::diag(&g.eigenvalues().unwrap());
        let op = random_dao((2, 2), (2, 3), &g, &mut r).unwrap();
        prop_assert!(op.check_gibbs(&g).is_ok());
        for x in 0..2 {
            let total: f64 = (0..3).map(|y| op.pre(y, x)).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
        let f = random_lf1_filter(&g, &mut r).unwrap();
        let fixed = g.conjugate_by(f.kraus()).scale(1.0 / f.success_probability(&g).unwrap());
        prop_assert!(fixed.max_abs_diff(&g) < 1e-12);
    }
}
