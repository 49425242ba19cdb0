mod common;

use common::*;
use incotherm_core::linalg::HermitianMatrix;
use incotherm_core::quantum::{isotropic_state, Assemblage, InstrumentFamily, ThermalContext};
use incotherm_core::steering::*;
use incotherm_core::{Error, NumericConfig};
use proptest::prelude::*;

fn cfg() -> NumericConfig {
    NumericConfig::default()
}

#[test]
fn pauli_primal_dual_and_model() {
    let g = HermitianMatrix::maximally_mixed(2);
    let s = InstrumentFamily::pauli_xz().apply(&g).unwrap();
    let r = sr_gamma(&s, &g, &cfg()).unwrap();
    let w = sr_gamma_dual(&s, &g, &cfg()).unwrap();
    assert!((2f64.powf(r.sr) - SQRT2).abs() < 1e-7);
    assert!((w.value - r.q_star).abs() < 1e-7);
    assert!(r.gap < 1e-8);
    let target = s.mix(r.q_star, &s.flat(&g).unwrap()).unwrap();
    let model = r.model.assemblage().unwrap();
    assert!(model.distance(&target).unwrap() < 1e-7);
    for eta in &r.model.etas {
        assert!(eta.min_eigenvalue().unwrap() > -1e-9);
    }
}

#[test]
fn visibility_sweep_matches_closed_form() {
    let mut rng = rng(5);
    for &v in &[0.3, 0.6, 0.72, 0.8, 0.95, 1.0] {
        let s = werner_like_assemblage(v, 2, &mut rng);
        let g = HermitianMatrix::maximally_mixed(2);
        let r = sr_gamma(&s, &g, &cfg()).unwrap();
        assert!(
            (2f64.powf(r.sr) - two_setting_ratio(v)).abs() < 1e-6,
            "v = {v}: sr = {}",
            r.sr
        );
    }
}

#[test]
fn three_settings_threshold() {
    // Three mutually unbiased directions: LHS exactly up to v = 1/√3.
    let mut rng = rng(6);
    let g = HermitianMatrix::maximally_mixed(2);
    let below = werner_like_assemblage(0.99 / 3f64.sqrt(), 3, &mut rng);
    assert!(sr_gamma(&below, &g, &cfg()).unwrap().sr < 1e-7);
    let above = werner_like_assemblage(0.9, 3, &mut rng);
    let r = sr_gamma(&above, &g, &cfg()).unwrap();
    assert!((2f64.powf(r.sr) - 0.9 * 3f64.sqrt()).abs() < 1e-6);
}

#[test]
fn membership_matches_statistics() {
    let g = HermitianMatrix::maximally_mixed(2);
    let mut rng = rng(7);
    let s = werner_like_assemblage(0.5, 2, &mut rng);
    match lhs_membership(&s, &g, true, &cfg()).unwrap() {
        Membership::Member { model, residual } => {
            assert!(residual < 1e-7);
            let m = model.assemblage().unwrap();
            for (a, b) in m.probabilities().iter().zip(s.probabilities()) {
                assert!((a - b).abs() < 1e-8);
            }
        }
        other => panic!("{other:?}"),
    }
    let steer = werner_like_assemblage(0.9, 2, &mut rng);
    match lhs_membership(&steer, &g, false, &cfg()).unwrap() {
        Membership::NotMember { margin } => {
            assert!((margin - (1.0 - 1.0 / (0.9 * SQRT2))).abs() < 1e-6)
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn isotropic_result_two_workflow() {
    let fam = InstrumentFamily::xz_measure_prepare().extend_with_ancilla();
    let ctl = InstrumentFamily::compatible_control().extend_with_ancilla();
    let g = ThermalContext::trivial(4, 1.0)
        .unwrap()
        .thermal_state()
        .unwrap();
    let rho = isotropic_state(2, 0.05).unwrap();
    let r = sr_gamma(&fam.apply(&rho).unwrap(), &g, &cfg()).unwrap();
    assert!((2f64.powf(r.sr) - 0.95 * SQRT2).abs() < 1e-6);
    let c = sr_gamma(&ctl.apply(&rho).unwrap(), &g, &cfg()).unwrap();
    assert!(c.sr < 1e-7);
}

#[test]
fn non_full_rank_gamma_rejected() {
    let g = HermitianMatrix::basis_projector(2, 0);
    let s = InstrumentFamily::pauli_xz()
        .apply(&HermitianMatrix::maximally_mixed(2))
        .unwrap();
    assert!(matches!(sr_gamma(&s, &g, &cfg()), Err(Error::Domain(_))));
}

#[test]
fn strategy_capacity() {
    assert!(matches!(
        enumerate_strategies(4, 7),
        Err(Error::Capacity(_))
    ));
    assert_eq!(enumerate_strategies(4, 6).unwrap().len(), 4096);
}

fn relabel(s: &Assemblage, flip: &[bool]) -> Assemblage {
    Assemblage::from_fn(s.n_outcomes(), s.n_settings(), |a, x| {
        let b = if flip[x] { s.n_outcomes() - 1 - a } else { a };
        s.member(b, x).clone()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn primal_dual_agree_on_random_assemblages(seed in any::<u64>(), v in 0.2f64..1.0) {
        let mut r = rng(seed);
        let s = werner_like_assemblage(v, 2, &mut r);
        let g = HermitianMatrix::maximally_mixed(2);
        let p = sr_gamma(&s, &g, &cfg()).unwrap();
        let d = sr_gamma_dual(&s, &g, &cfg()).unwrap();
        prop_assert!((p.q_star - d.value).abs() < 1e-6);
        prop_assert!(d.min_strategy_eigenvalue().unwrap() > -1e-8);
        prop_assert!(d.omega > -1e-9);
    }

    #[test]
    fn robustness_is_relabeling_invariant(seed in any::<u64>(), f0 in any::<bool>(), f1 in any::<bool>()) {
        let mut r = rng(seed);
        let v = 0.5 + 0.5 * rand::Rng::random::<f64>(&mut r);
        let s = werner_like_assemblage(v, 2, &mut r);
        let g = HermitianMatrix::maximally_mixed(2);
        let a = sr_gamma(&s, &g, &cfg()).unwrap().sr;
        let b = sr_gamma(&relabel(&s, &[f0, f1]), &g, &cfg()).unwrap().sr;
        prop_assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn robustness_nonnegative_with_thermal_gamma(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_state(2, &mut r);
        let s = werner_like_assemblage(1.0, 2, &mut r);
        let res = sr_gamma(&s, &g, &cfg()).unwrap();
        prop_assert!(res.sr >= 0.0);
        prop_assert!(res.q_star > 0.0 && res.q_star <= 1.0);
    }
}

#[test]
fn repeated_settings_converge_to_zero_robustness() {
    // Degenerate instance: strategies with disagreeing outputs carry no weight.
    let g = HermitianMatrix::maximally_mixed(2);
    let s = InstrumentFamily::pauli_xz().apply(&g).unwrap();
    for n_x in 1..=4 {
        let rep = Assemblage::from_fn(2, n_x, |a, _| s.member(a, 1).clone()).unwrap();
        let r = sr_gamma(&rep, &g, &cfg()).unwrap();
        assert!(r.sr < 1e-9, "{n_x} settings: sr = {}", r.sr);
    }
}
