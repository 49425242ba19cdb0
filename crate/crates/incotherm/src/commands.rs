//! Command implementations. Each returns the rendered output text.

use std::collections::BTreeMap;

use incotherm_core::dynamics::{find_t_star, t_min_report, TStarReport};
use incotherm_core::linalg::HermitianMatrix;
use incotherm_core::quantum::{label, InstrumentFamily};
use incotherm_core::resource::random::{random_dao, random_lf1_filter};
use incotherm_core::resource::Lf1Filter;
use incotherm_core::resource::{audit_dao, audit_filter, baseline, AuditOptions, AuditRow};
use incotherm_core::steering::{sr_gamma, sr_gamma_dual};
use incotherm_core::work::{
    certificate_hamiltonians, delta_bar, pauli_work_point, HamiltonianFamily, PauliWorkPoint,
    DEFAULT_ETA, NV_DELTA, NV_TEMPERATURE,
};
use incotherm_core::{NumericConfig, BOLTZMANN_EV};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::format::{csv_table, to_json};
use crate::scenario::{EvolutionSpec, Resolved, ScheduleSpec};

fn members<F: Fn(usize, usize) -> HermitianMatrix>(
    n_a: usize,
    n_x: usize,
    f: F,
) -> BTreeMap<String, HermitianMatrix> {
    let mut m = BTreeMap::new();
    for x in 0..n_x {
        for a in 0..n_a {
            m.insert(label(a, x), f(a, x));
        }
    }
    m
}

#[derive(Debug, Serialize)]
pub struct WitnessOut {
    pub members: BTreeMap<String, HermitianMatrix>,
    pub omega: f64,
    /// Equals `2^{−sr}` at the optimum.
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct SrOut {
    pub sr: f64,
    pub q_star: f64,
    pub witness: WitnessOut,
}

pub fn sr(r: &Resolved) -> CliResult<SrOut> {
    let sigma = r.family.apply(&r.gamma)?;
    let (primal, dual) = rayon::join(
        || sr_gamma(&sigma, &r.gamma, &r.cfg),
        || sr_gamma_dual(&sigma, &r.gamma, &r.cfg),
    );
    let (primal, w) = (primal?, dual?);
    Ok(SrOut {
        sr: primal.sr,
        q_star: primal.q_star,
        witness: WitnessOut {
            members: members(w.n_outcomes, w.n_settings, |a, x| w.member(a, x).clone()),
            omega: w.omega,
            value: w.value,
        },
    })
}

#[derive(Debug, Serialize)]
pub struct TMinOut {
    pub t_min: f64,
    pub schedule: ScheduleSpec,
    pub sr: f64,
}

pub fn tmin(r: &Resolved) -> CliResult<TMinOut> {
    let rep = t_min_report(&r.family, &r.ctx, &r.schedule, &r.cfg)?;
    Ok(TMinOut {
        t_min: rep.t_min,
        schedule: r.scenario.schedule.clone(),
        sr: rep.sr,
    })
}

/// `lo:hi:n`, `n` points including both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sweep {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|k| self.lo + step * k as f64).collect()
    }
}

impl std::str::FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected lo:hi:n, got `{s}`"));
        };
        let lo: f64 = lo.trim().parse().map_err(|e| format!("lo: {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("hi: {e}"))?;
        let n: usize = n.trim().parse().map_err(|e| format!("n: {e}"))?;
        if n == 0 || !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
            return Err(format!("need 0 < lo ≤ hi and n ≥ 1, got `{s}`"));
        }
        Ok(Self { lo, hi, n })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WorkMode {
    Point(f64),
    Sweep(Sweep),
    Nv,
    Certificate,
}

#[derive(Debug, Serialize)]
pub struct WorkPointOut {
    #[serde(flatten)]
    pub point: PauliWorkPoint,
    pub temperature: f64,
    pub kt: f64,
    pub classical_bound_kt: f64,
    pub quantum_value_kt: f64,
    pub eta: f64,
    pub in_h_eta: bool,
}

pub fn work_point(
    delta: f64,
    temperature: f64,
    eta: f64,
    cfg: &NumericConfig,
) -> CliResult<WorkPointOut> {
    let point = pauli_work_point(delta, temperature, cfg)?;
    let gamma = HermitianMatrix::maximally_mixed(2);
    let sigma = InstrumentFamily::pauli_xz().apply(&gamma)?;
    let rep = delta_bar(
        &sigma,
        &gamma,
        &HamiltonianFamily::pauli(delta, temperature)?,
        temperature,
        eta,
    )?;
    let kt = BOLTZMANN_EV * temperature;
    Ok(WorkPointOut {
        classical_bound_kt: point.classical_bound / kt,
        quantum_value_kt: point.quantum_value / kt,
        point,
        temperature,
        kt,
        eta,
        in_h_eta: rep.in_h_eta,
    })
}

pub const SWEEP_HEADER: [&str; 6] = [
    "delta",
    "classical_bound",
    "quantum_value",
    "ratio",
    "sr",
    "t_min_over_t0",
];

pub fn work_sweep(sweep: &Sweep, temperature: f64, cfg: &NumericConfig) -> CliResult<String> {
    let rows = sweep
        .points()
        .into_par_iter()
        .map(|d| {
            let p = pauli_work_point(d, temperature, cfg)?;
            Ok(vec![
                p.delta,
                p.classical_bound,
                p.quantum_value,
                p.ratio,
                p.sr,
                p.t_min_over_t0,
            ])
        })
        .collect::<CliResult<Vec<_>>>()?;
    csv_table(&SWEEP_HEADER, &rows)
}

#[derive(Debug, Serialize)]
pub struct CertificateOut {
    pub hamiltonians: BTreeMap<String, HermitianMatrix>,
    pub delta_bar: f64,
    pub lhs_max: f64,
    pub gap: f64,
    pub ratio: f64,
    pub sr: f64,
    pub temperature: f64,
}

pub fn work_certificate(r: &Resolved) -> CliResult<CertificateOut> {
    let sigma = r.family.apply(&r.gamma)?;
    let t = r.scenario.system.temperature;
    let c = certificate_hamiltonians(&sigma, &r.gamma, t, &r.cfg)?;
    let fam = &c.family;
    Ok(CertificateOut {
        hamiltonians: members(fam.n_outcomes(), fam.n_settings(), |a, x| {
            fam.member(a, x).clone()
        }),
        delta_bar: c.delta_bar,
        lhs_max: c.lhs_max,
        gap: c.gap,
        ratio: c.ratio(),
        sr: -c.witness.value.log2(),
        temperature: t,
    })
}

/// Rendered output of the `work` command in the requested mode.
pub fn work(mode: WorkMode, r: Option<&Resolved>, cfg: &NumericConfig) -> CliResult<String> {
    let temperature = r.map_or(NV_TEMPERATURE, |r| r.scenario.system.temperature);
    let eta = r.map_or(DEFAULT_ETA, |r| r.scenario.work.eta);
    match mode {
        WorkMode::Nv => to_json(&work_point(NV_DELTA, NV_TEMPERATURE, eta, cfg)?),
        WorkMode::Point(d) => to_json(&work_point(d, temperature, eta, cfg)?),
        WorkMode::Sweep(s) => work_sweep(&s, temperature, cfg),
        WorkMode::Certificate => {
            let r = r.ok_or_else(|| {
                CliError::validation("work needs --delta, --sweep, --nv or a scenario")
            })?;
            match r.scenario.work.delta {
                Some(d) => to_json(&work_point(d, temperature, eta, cfg)?),
                None => to_json(&work_certificate(r)?),
            }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AuditOut {
    pub rows: Vec<AuditRow>,
    pub seed: u64,
    pub tol: f64,
    pub pass: bool,
    pub failures: usize,
    pub non_certified: usize,
}

enum Trial {
    Dao(incotherm_core::resource::DeterministicAllowedOperation),
    Filter(Lf1Filter),
}

/// `n` random trials, half operations and half filters, drawn from one
/// generator seeded with `seed`, followed by the scenario's explicit filters.
pub fn audit(r: &Resolved, n: usize, seed: u64, permissive: bool) -> CliResult<AuditOut> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n_b, n_y) = (r.family.n_outcomes(), r.family.n_settings());
    let n_dao = n - n / 2;
    let mut trials = Vec::with_capacity(n + r.filters.len());
    for _ in 0..n_dao {
        let out = (rng.random_range(2..=3), rng.random_range(1..=3));
        trials.push(Trial::Dao(random_dao(out, (n_b, n_y), &r.gamma, &mut rng)?));
    }
    for _ in n_dao..n {
        trials.push(Trial::Filter(random_lf1_filter(&r.gamma, &mut rng)?));
    }
    trials.extend(r.filters.iter().cloned().map(Trial::Filter));

    let opts = AuditOptions {
        tol: r.scenario.operations.audit_tol,
        permissive,
    };
    let sigma = r.family.apply(&r.gamma)?;
    if !permissive {
        for t in &trials {
            if let Trial::Filter(f) = t {
                f.check_conditions(&sigma, &r.gamma)?;
            }
        }
    }
    let before = baseline(&sigma, &r.gamma, &r.schedule, &r.cfg)?;
    let rows = trials
        .par_iter()
        .enumerate()
        .map(|(i, t)| match t {
            Trial::Dao(op) => audit_dao(
                i,
                op,
                &r.family,
                &r.gamma,
                &r.schedule,
                before,
                &opts,
                &r.cfg,
            ),
            Trial::Filter(f) => {
                audit_filter(i, f, &sigma, &r.gamma, &r.schedule, before, &opts, &r.cfg)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let failures = rows.iter().filter(|x| x.certified && !x.pass).count();
    let non_certified = rows.iter().filter(|x| !x.certified).count();
    Ok(AuditOut {
        rows,
        seed,
        tol: opts.tol,
        pass: failures == 0,
        failures,
        non_certified,
    })
}

pub fn audit_table(a: &AuditOut) -> String {
    let mut s = format!(
        "{:<7} {:>5} {:>13} {:>13} {:>13} {:>13} {:>9}  {}\n",
        "kind",
        "index",
        "sr_before",
        "sr_after",
        "t_min_before",
        "t_min_after",
        "certified",
        "result"
    );
    for r in &a.rows {
        let kind = match r.kind {
            incotherm_core::resource::AuditKind::Dao => "dao",
            incotherm_core::resource::AuditKind::Filter => "filter",
        };
        let result = match (r.certified, r.pass) {
            (true, true) => "PASS",
            (true, false) => "FAIL",
            (false, true) => "pass (not certified)",
            (false, false) => "increase (not certified)",
        };
        s.push_str(&format!(
            "{:<7} {:>5} {:>13.6e} {:>13.6e} {:>13.6e} {:>13.6e} {:>9}  {}\n",
            kind,
            r.index,
            r.sr_before,
            r.sr_after,
            r.t_min_before,
            r.t_min_after,
            r.certified,
            result
        ));
    }
    s.push_str(&format!(
        "audit: {} rows, {} failures, {} not certified, seed {}: {}\n",
        a.rows.len(),
        a.failures,
        a.non_certified,
        a.seed,
        if a.pass { "PASS" } else { "FAIL" }
    ));
    s
}

#[derive(Debug, Serialize)]
pub struct TStarOut {
    #[serde(flatten)]
    pub report: TStarReport,
    pub evolution: EvolutionSpec,
    pub t_max: f64,
    pub grid: usize,
}

pub fn tstar(r: &Resolved, t_max: Option<f64>, grid: Option<usize>) -> CliResult<TStarOut> {
    let ev = r.evolution()?;
    let opts = r.tstar_options(t_max, grid);
    if !(opts.t_max.is_finite() && opts.t_max > 0.0) || opts.grid == 0 {
        return Err(CliError::validation("need t_max > 0 and grid ≥ 1"));
    }
    let sigma = r.family.apply(&r.gamma)?;
    let report = find_t_star(&sigma, &r.gamma, &ev, &opts, &r.cfg)?;
    Ok(TStarOut {
        report,
        evolution: r.scenario.tstar.evolution.clone(),
        t_max: opts.t_max,
        grid: opts.grid,
    })
}
