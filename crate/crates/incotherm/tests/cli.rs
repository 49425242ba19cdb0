use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::{json, Value};

const SQRT2: f64 = std::f64::consts::SQRT_2;
const KB: f64 = 8.617333262e-5;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_incotherm"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let o = run(args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn json_of(args: &[&str]) -> Value {
    serde_json::from_str(&run_ok(args)).unwrap()
}

fn write_scenario(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn qubit(schedule: Value) -> Value {
    json!({
        "system": {"dim": 2, "temperature": 300.0},
        "instruments": {"kind": "projective-pauli"},
        "schedule": schedule
    })
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

/// Real 2×2 matrix from `[[re, im], ...]` rows, checking the imaginary parts vanish.
fn real_matrix(v: &Value) -> [[f64; 2]; 2] {
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = f(&v[i][j][0]);
            assert!(f(&v[i][j][1]).abs() < 1e-12);
        }
    }
    m
}

#[test]
fn pauli_robustness_and_witness() {
    let p = scenario("pauli-xz.json");
    let v = json_of(&["sr", "--scenario", p.to_str().unwrap()]);
    assert!((f(&v["sr"]) - 0.5).abs() < 1e-7);
    assert!((f(&v["q_star"]) - 1.0 / SQRT2).abs() < 1e-7);
    // Dual value recomputed from the witness: Σ p tr(Yγ) + ω with p = 1/2, γ = I/2.
    let w = &v["witness"];
    let mut value = f(&w["omega"]);
    let mut pairing = 0.0;
    let proj = |x: usize, a: usize| -> [[f64; 2]; 2] {
        let s = if a == 0 { 0.25 } else { -0.25 };
        if x == 0 {
            [[0.25, s], [s, 0.25]]
        } else {
            [[0.25 + s, 0.0], [0.0, 0.25 - s]]
        }
    };
    for x in 0..2 {
        for a in 0..2 {
            let y = real_matrix(&w["members"][format!("{a}|{x}")]);
            value += 0.5 * 0.5 * (y[0][0] + y[1][1]);
            let s = proj(x, a);
            pairing += (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(i, j)| y[i][j] * s[j][i])
                .sum::<f64>();
        }
    }
    assert!((value - f(&w["value"])).abs() < 1e-9);
    assert!((value - 1.0 / SQRT2).abs() < 1e-6);
    // The witness separates σ by exactly one unit.
    assert!((value - pairing - 1.0).abs() < 1e-6);
}

#[test]
fn compatible_family_has_zero_robustness() {
    let p = scenario("compatible.json");
    let p = p.to_str().unwrap();
    assert!(f(&json_of(&["sr", "--scenario", p])["sr"]).abs() < 1e-9);
    let t = json_of(&["tmin", "--scenario", p]);
    assert_eq!(f(&t["t_min"]), 0.0);
    assert_eq!(f(&t["sr"]), 0.0);
}

#[test]
fn survival_times_for_each_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let partial = json_of(&[
        "tmin",
        "--scenario",
        scenario("pauli-xz.json").to_str().unwrap(),
    ]);
    assert!((f(&partial["t_min"]) - 0.5 * std::f64::consts::LN_2).abs() < 1e-8);
    assert_eq!(partial["schedule"], json!({"kind": "partial", "t0": 1.0}));

    let rational = write_scenario(
        dir.path(),
        "r.json",
        &qubit(json!({"kind": "rational", "t0": 1.0})),
    );
    let r = json_of(&["tmin", "--scenario", &rational]);
    assert!((f(&r["t_min"]) - (SQRT2 - 1.0)).abs() < 1e-8);

    let table = json_of(&[
        "tmin",
        "--scenario",
        scenario("custom-table.json").to_str().unwrap(),
    ]);
    assert!((f(&table["t_min"]) - (SQRT2 - 1.0)).abs() < 5e-5);

    let samples: Vec<Value> = (0..=400)
        .map(|k| {
            let t = 0.0025 * k as f64;
            json!([t, 1.0 / (1.0 + t)])
        })
        .collect();
    let dense = write_scenario(
        dir.path(),
        "t.json",
        &qubit(json!({"kind": "custom-table", "samples": samples})),
    );
    let d = json_of(&["tmin", "--scenario", &dense]);
    assert!((f(&d["t_min"]) - (SQRT2 - 1.0)).abs() < 5e-6);
}

#[test]
fn validation_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"system\": ").unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec![
            "sr".into(),
            "--scenario".into(),
            bad.to_str().unwrap().into(),
        ],
        vec![
            "sr".into(),
            "--scenario".into(),
            "/nonexistent/s.json".into(),
        ],
        vec!["sr".into()],
        vec![
            "sr".into(),
            "--scenario".into(),
            write_scenario(
                dir.path(),
                "u.json",
                &json!({
                    "system": {"dim": 2, "temperature": 300.0},
                    "instruments": {"kind": "projective-pauli"},
                    "extra": 1
                }),
            ),
        ],
        vec![
            "sr".into(),
            "--scenario".into(),
            write_scenario(
                dir.path(),
                "d.json",
                &json!({
                    "system": {"dim": 3, "temperature": 300.0},
                    "instruments": {"kind": "projective-pauli"}
                }),
            ),
        ],
        vec![
            "tmin".into(),
            "--scenario".into(),
            write_scenario(
                dir.path(),
                "s.json",
                &qubit(json!({"kind": "partial", "t0": 0.0})),
            ),
        ],
        vec![
            "sr".into(),
            "--scenario".into(),
            scenario("pauli-xz.json").to_str().unwrap().into(),
            "--tol-overrides".into(),
            "{\"bogus\": 1}".into(),
        ],
        vec!["work".into(), "--sweep".into(), "2:1:5".into()],
        vec!["frobnicate".into()],
    ];
    for args in cases {
        let o = bin().args(&args).output().unwrap();
        assert_eq!(o.status.code(), Some(3), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn solver_failure_exits_two() {
    let o = run(&[
        "sr",
        "--scenario",
        scenario("pauli-xz.json").to_str().unwrap(),
        "--tol-overrides",
        "{\"max_iters\": 1}",
    ]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(!o.stderr.is_empty());
}

#[test]
fn unit_delta_work_point() {
    let v = json_of(&["work", "--delta", "1"]);
    let lc = 1f64.cosh().ln();
    assert!((f(&v["quantum_value_kt"]) - 2.0 * (1.0 + lc)).abs() < 1e-9);
    assert!((f(&v["classical_bound_kt"]) - (SQRT2 + 2.0 * lc)).abs() < 1e-6);
    assert!((f(&v["quantum_value_kt"]) / 2.86756 - 1.0).abs() < 1e-5);
    assert!((f(&v["classical_bound_kt"]) / 2.28177 - 1.0).abs() < 1e-5);
    assert!((f(&v["kt"]) - KB * 300.0).abs() < 1e-15);
}

#[test]
fn nv_preset() {
    let v = json_of(&["work", "--nv"]);
    assert!((f(&v["quantum_value"]) - 8.2714e-9).abs() < 1e-12);
    assert!((f(&v["classical_bound"]) - 5.8488e-9).abs() < 1e-12);
    assert!((f(&v["ratio"]) - SQRT2).abs() < 1e-6);
    assert_eq!(f(&v["temperature"]), 300.0);
}

#[test]
fn sweep_csv() {
    let text = run_ok(&["work", "--sweep", "0.01:2:50"]);
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rd.headers().unwrap().iter().collect::<Vec<_>>(),
        [
            "delta",
            "classical_bound",
            "quantum_value",
            "ratio",
            "sr",
            "t_min_over_t0"
        ]
    );
    let rows: Vec<Vec<f64>> = rd
        .records()
        .map(|r| r.unwrap().iter().map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 50);
    let kt = KB * 300.0;
    for (k, r) in rows.iter().enumerate() {
        let d = 0.01 + (2.0 - 0.01) * k as f64 / 49.0;
        assert!((r[0] - d).abs() < 1e-12);
        assert!((r[3] - SQRT2).abs() < 1e-4);
        assert!((r[2] - 2.0 * kt * (d + d.cosh().ln())).abs() < 1e-9 * kt);
        assert!((r[5] - r[3].ln()).abs() < 1e-12);
    }
    assert!(rows.windows(2).all(|w| w[1][2] > w[0][2]));
}

#[test]
fn work_certificate_for_scenario() {
    let v = json_of(&[
        "work",
        "--scenario",
        scenario("pauli-xz.json").to_str().unwrap(),
    ]);
    assert!((f(&v["ratio"]) - SQRT2).abs() < 1e-5);
    assert!(f(&v["gap"]) > 0.0);
    assert!((f(&v["delta_bar"]) - f(&v["lhs_max"]) - f(&v["gap"])).abs() < 1e-15);
    let o = run(&[
        "work",
        "--scenario",
        scenario("compatible.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn audit_is_reproducible() {
    let p = scenario("pauli-xz.json");
    let p = p.to_str().unwrap();
    let a = run_ok(&["audit", "--scenario", p, "--n", "24", "--format", "json"]);
    let b = run_ok(&[
        "audit",
        "--scenario",
        p,
        "--n",
        "24",
        "--format",
        "json",
        "--seed",
        "7",
    ]);
    let c = run_ok(&[
        "audit",
        "--scenario",
        p,
        "--n",
        "24",
        "--format",
        "json",
        "--seed",
        "8",
    ]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 24);
    assert_eq!(v["pass"], json!(true));
    let table = run_ok(&["audit", "--scenario", p, "--n", "24"]);
    assert_eq!(table, run_ok(&["audit", "--scenario", p, "--n", "24"]));
    assert!(table.lines().last().unwrap().ends_with("PASS"));
    assert_eq!(table.lines().count(), 26);
}

#[test]
fn permissive_audit_flags_violating_filter() {
    let p = scenario("permissive-filter.json");
    let p = p.to_str().unwrap();
    let strict = run(&["audit", "--scenario", p, "--n", "4"]);
    assert_eq!(strict.status.code(), Some(3));
    let v = json_of(&[
        "audit",
        "--scenario",
        p,
        "--n",
        "4",
        "--permissive",
        "--format",
        "json",
    ]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4]["certified"], json!(false));
    assert!(rows[..4].iter().all(|r| r["certified"] == json!(true)));
    assert_eq!(v["non_certified"], json!(1));
}

#[test]
fn tstar_matches_survival_time() {
    let p = scenario("pauli-xz.json");
    let v = json_of(&[
        "tstar",
        "--scenario",
        p.to_str().unwrap(),
        "--t-max",
        "2",
        "--grid",
        "40",
    ]);
    // Bisection tolerance defaults to 1e-3 · t_max.
    assert!((f(&v["t_star"]) - 0.5 * std::f64::consts::LN_2).abs() < 2e-3);
    assert_eq!(v["crossings"].as_array().unwrap().len(), 1);
    let o = json_of(&[
        "tstar",
        "--scenario",
        scenario("oscillatory.json").to_str().unwrap(),
    ]);
    // Envelope crosses 1/√2 on its first decline: e^{−t}(1 + cos 10t)/2 = 1/√2.
    let c = |t: f64| (-t).exp() * (1.0 + (10.0 * t).cos()) / 2.0 - 1.0 / SQRT2;
    let (mut lo, mut hi) = (0.0, 0.3);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if c(mid) > 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    assert!(
        (f(&o["t_star"]) - lo).abs() < 1e-5,
        "{} vs {lo}",
        f(&o["t_star"])
    );
}

#[test]
fn outputs_go_to_requested_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = qubit(json!({"kind": "partial", "t0": 2.0}));
    s["outputs"] = json!({"tmin": "tmin.json"});
    let path = write_scenario(dir.path(), "s.json", &s);
    assert!(run_ok(&["tmin", "--scenario", &path]).is_empty());
    let v: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("tmin.json")).unwrap())
            .unwrap();
    assert!((f(&v["t_min"]) - std::f64::consts::LN_2).abs() < 1e-8);
    let out = dir.path().join("explicit.json");
    run_ok(&["sr", "--scenario", &path, "--out", out.to_str().unwrap()]);
    assert!(std::fs::read_to_string(out).unwrap().contains("\"q_star\""));
}

#[test]
fn json_output_is_byte_identical() {
    let p = scenario("pauli-xz.json");
    let args = ["sr", "--scenario", p.to_str().unwrap()];
    let a = run_ok(&args);
    assert_eq!(a, run_ok(&args));
    let keys: Vec<&str> = a
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    assert_eq!(keys, ["q_star", "sr", "witness"]);
    assert!(a.contains("\"sr\": 5.00000000"));
    let sweep = ["work", "--sweep", "0.5:1.5:8"];
    assert_eq!(run_ok(&sweep), run_ok(&sweep));
}

#[test]
fn tolerance_overrides_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let tol = dir.path().join("tol.json");
    std::fs::write(&tol, "{\"gap_tol\": 1e-9, \"feas_tol\": 1e-10}").unwrap();
    let v = json_of(&[
        "sr",
        "--scenario",
        scenario("pauli-xz.json").to_str().unwrap(),
        "--tol-overrides",
        tol.to_str().unwrap(),
    ]);
    assert!((f(&v["sr"]) - 0.5).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn partial_survival_time_scales_with_t0(t0 in 0.01f64..100.0) {
        let dir = tempfile::tempdir().unwrap();
        let p = write_scenario(dir.path(), "s.json", &qubit(json!({"kind": "partial", "t0": t0})));
        let v = json_of(&["tmin", "--scenario", &p]);
        prop_assert!((f(&v["t_min"]) / t0 - 0.5 * std::f64::consts::LN_2).abs() < 1e-8);
        prop_assert_eq!(f(&v["schedule"]["t0"]), t0);
    }
}
