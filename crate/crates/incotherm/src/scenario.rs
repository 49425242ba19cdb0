//! Scenario files: one JSON document describing the system, the instrument
//! family, the thermalisation schedule and per-command settings.
//!
//! ```json
//! {
//!   "system": { "dim": 2, "temperature": 300.0 },
//!   "instruments": { "kind": "projective-pauli", "settings": ["x", "z"] },
//!   "schedule": { "kind": "partial", "t0": 1.0 }
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs, matrices are arrays of rows and
//! instrument members are keyed `"a|x"`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use incotherm_core::dynamics::{Evolution, TStarOptions, ThermalisationSchedule};
use incotherm_core::linalg::{ComplexMatrix, HermitianMatrix};
use incotherm_core::quantum::{parse_label, InstrumentFamily, ThermalContext};
use incotherm_core::resource::Lf1Filter;
use incotherm_core::work::DEFAULT_ETA;
use incotherm_core::NumericConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub system: SystemSpec,
    pub instruments: InstrumentSpec,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub tstar: TStarSpec,
    #[serde(default)]
    pub work: WorkSpec,
    #[serde(default)]
    pub operations: OperationsSpec,
    /// Partial tolerance record merged over the defaults.
    #[serde(default)]
    pub tolerances: serde_json::Map<String, serde_json::Value>,
    /// Output file per command name, relative to the scenario file.
    #[serde(default)]
    pub outputs: BTreeMap<String, PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub dim: usize,
    /// Defaults to the zero matrix, giving `γ = I/d`.
    #[serde(default)]
    pub hamiltonian: Option<HermitianMatrix>,
    #[serde(alias = "T")]
    pub temperature: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    fn matrix(self) -> HermitianMatrix {
        match self {
            Self::X => HermitianMatrix::pauli_x(),
            Self::Y => HermitianMatrix::pauli_y(),
            Self::Z => HermitianMatrix::pauli_z(),
        }
    }
}

fn default_axes() -> Vec<PauliAxis> {
    vec![PauliAxis::X, PauliAxis::Z]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstrumentSpec {
    /// Qubit instruments preparing `(I ± σ)/4` for each Pauli axis `σ`.
    /// Every setting averages to `ρ ↦ tr(ρ) I/2`.
    ProjectivePauli {
        #[serde(default = "default_axes")]
        settings: Vec<PauliAxis>,
    },
    /// Kraus operators per member, keyed `"a|x"`.
    Kraus {
        n_outcomes: usize,
        n_settings: usize,
        operators: BTreeMap<String, Vec<ComplexMatrix>>,
    },
    /// Choi matrices per member, in the core instrument format.
    Choi(InstrumentFamily),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScheduleSpec {
    Partial {
        t0: f64,
    },
    Rational {
        t0: f64,
    },
    /// `(t, h)` samples, log-linearly interpolated.
    CustomTable {
        samples: Vec<(f64, f64)>,
    },
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        Self::Partial { t0: 1.0 }
    }
}

impl ScheduleSpec {
    pub fn build(&self) -> CliResult<ThermalisationSchedule> {
        let s = match self {
            Self::Partial { t0 } => ThermalisationSchedule::partial(*t0)?,
            Self::Rational { t0 } => ThermalisationSchedule::rational(*t0)?,
            Self::CustomTable { samples } => ThermalisationSchedule::from_table(samples.clone())?,
        };
        s.validate()?;
        Ok(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EvolutionSpec {
    /// `D_t` built from the scenario schedule.
    #[default]
    Schedule,
    /// Envelope `e^{−t}(1 + cos 10t)/2`.
    Oscillatory,
    /// Qubit Davies map with ground population `p`, dephasing rate `a` and
    /// relaxation rate `rate`.
    Davies { p: f64, a: f64, rate: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TStarSpec {
    pub evolution: EvolutionSpec,
    pub t_max: f64,
    pub grid: usize,
    pub tol: Option<f64>,
}

impl Default for TStarSpec {
    fn default() -> Self {
        Self {
            evolution: EvolutionSpec::Schedule,
            t_max: 10.0,
            grid: 100,
            tol: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkSpec {
    pub delta: Option<f64>,
    pub eta: f64,
}

impl Default for WorkSpec {
    fn default() -> Self {
        Self {
            delta: None,
            eta: DEFAULT_ETA,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperationsSpec {
    /// Kraus operators of explicit filters, audited after the random ones.
    pub filters: Vec<ComplexMatrix>,
    pub audit_tol: f64,
}

impl Default for OperationsSpec {
    fn default() -> Self {
        Self {
            filters: Vec::new(),
            audit_tol: 1e-6,
        }
    }
}

/// A scenario with every reference resolved and every object validated.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub scenario: Scenario,
    pub base_dir: PathBuf,
    pub ctx: ThermalContext,
    pub gamma: HermitianMatrix,
    pub family: InstrumentFamily,
    pub schedule: ThermalisationSchedule,
    pub filters: Vec<Lf1Filter>,
    pub cfg: NumericConfig,
}

impl Resolved {
    pub fn evolution(&self) -> CliResult<Evolution> {
        Ok(match self.scenario.tstar.evolution {
            EvolutionSpec::Schedule => Evolution::from_schedule(&self.gamma, self.schedule.clone()),
            EvolutionSpec::Oscillatory => Evolution::oscillatory(&self.gamma),
            EvolutionSpec::Davies { p, a, rate } => Evolution::davies(p, a, rate)?,
        })
    }

    pub fn tstar_options(&self, t_max: Option<f64>, grid: Option<usize>) -> TStarOptions {
        let spec = &self.scenario.tstar;
        let mut o =
            TStarOptions::new(t_max.unwrap_or(spec.t_max)).with_grid(grid.unwrap_or(spec.grid));
        if let Some(tol) = spec.tol {
            o = o.with_tol(tol);
        }
        o
    }

    pub fn output_path(&self, command: &str) -> Option<PathBuf> {
        self.scenario
            .outputs
            .get(command)
            .map(|p| self.base_dir.join(p))
    }
}

pub fn parse(text: &str) -> CliResult<Scenario> {
    serde_json::from_str(text).map_err(|e| CliError::validation(format!("malformed scenario: {e}")))
}

pub fn load(path: &Path) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

/// Merges `overrides` over `base`; unknown keys are rejected.
pub fn merge_tolerances(
    base: NumericConfig,
    overrides: &serde_json::Map<String, serde_json::Value>,
) -> CliResult<NumericConfig> {
    let mut v =
        serde_json::to_value(base).map_err(|e| CliError::validation(format!("tolerances: {e}")))?;
    let obj = v.as_object_mut().expect("config serialises to an object");
    for (k, val) in overrides {
        if !obj.contains_key(k) {
            return Err(CliError::validation(format!("unknown tolerance `{k}`")));
        }
        obj.insert(k.clone(), val.clone());
    }
    let cfg: NumericConfig =
        serde_json::from_value(v).map_err(|e| CliError::validation(format!("tolerances: {e}")))?;
    for (name, t) in [
        ("tol_herm", cfg.tol_herm),
        ("tol_psd", cfg.tol_psd),
        ("tol_eig", cfg.tol_eig),
        ("gap_tol", cfg.gap_tol),
        ("feas_tol", cfg.feas_tol),
        ("tol_sr", cfg.tol_sr),
    ] {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::validation(format!(
                "{name} = {t} must be positive"
            )));
        }
    }
    if !(cfg.step_fraction > 0.0 && cfg.step_fraction < 1.0) || cfg.max_iters == 0 {
        return Err(CliError::validation(
            "step_fraction must lie in (0, 1) and max_iters be positive",
        ));
    }
    Ok(cfg)
}

fn build_family(spec: &InstrumentSpec, dim: usize) -> CliResult<InstrumentFamily> {
    let fam = match spec {
        InstrumentSpec::ProjectivePauli { settings } => {
            if dim != 2 {
                return Err(CliError::validation(format!(
                    "projective-pauli instruments act on a qubit, system has dim {dim}"
                )));
            }
            if settings.is_empty() {
                return Err(CliError::validation(
                    "projective-pauli needs at least one setting",
                ));
            }
            let id = HermitianMatrix::identity(2);
            let taus: Vec<Vec<HermitianMatrix>> = settings
                .iter()
                .map(|ax| {
                    let s = ax.matrix();
                    vec![(&id + &s).scale(0.25), (&id - &s).scale(0.25)]
                })
                .collect();
            InstrumentFamily::conditional_preparation(&taus)?
        }
        InstrumentSpec::Kraus {
            n_outcomes,
            n_settings,
            operators,
        } => {
            let mut slots: Vec<Option<Vec<ComplexMatrix>>> = vec![None; n_outcomes * n_settings];
            for (key, ks) in operators {
                let (a, x) = parse_label(key)
                    .filter(|&(a, x)| a < *n_outcomes && x < *n_settings)
                    .ok_or_else(|| CliError::validation(format!("bad instrument key `{key}`")))?;
                slots[x * n_outcomes + a] = Some(ks.clone());
            }
            let kraus = slots
                .into_iter()
                .enumerate()
                .map(|(i, k)| {
                    k.ok_or_else(|| {
                        CliError::validation(format!(
                            "missing instrument member {}|{}",
                            i % n_outcomes,
                            i / n_outcomes
                        ))
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            InstrumentFamily::from_kraus(*n_outcomes, *n_settings, &kraus)?
        }
        InstrumentSpec::Choi(f) => f.clone(),
    };
    if fam.dim() != dim {
        return Err(CliError::validation(format!(
            "instruments act on dimension {}, system has dim {dim}",
            fam.dim()
        )));
    }
    Ok(fam)
}

/// Validates a parsed scenario and builds every object it references.
pub fn resolve(
    scenario: Scenario,
    base_dir: PathBuf,
    tol_overrides: Option<&serde_json::Map<String, serde_json::Value>>,
) -> CliResult<Resolved> {
    let mut cfg = merge_tolerances(NumericConfig::default(), &scenario.tolerances)?;
    if let Some(o) = tol_overrides {
        cfg = merge_tolerances(cfg, o)?;
    }
    let sys = &scenario.system;
    if sys.dim == 0 {
        return Err(CliError::validation("system dim must be positive"));
    }
    let h = sys
        .hamiltonian
        .clone()
        .unwrap_or_else(|| HermitianMatrix::zeros(sys.dim));
    if h.dim() != sys.dim {
        return Err(CliError::validation(format!(
            "hamiltonian has dim {}, system has dim {}",
            h.dim(),
            sys.dim
        )));
    }
    let ctx = ThermalContext::new(h, sys.temperature)?;
    let gamma = ctx.thermal_state()?;
    let family = build_family(&scenario.instruments, sys.dim)?;
    family.validate(&cfg)?;
    let schedule = scenario.schedule.build()?;
    let filters = scenario
        .operations
        .filters
        .iter()
        .map(|k| {
            if k.rows() != sys.dim || k.cols() != sys.dim {
                return Err(CliError::validation(
                    "filter Kraus operator has the wrong shape",
                ));
            }
            Ok(Lf1Filter::new(k.clone())?)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let t = &scenario.tstar;
    if !(t.t_max.is_finite() && t.t_max > 0.0) || t.grid == 0 {
        return Err(CliError::validation("tstar needs t_max > 0 and grid ≥ 1"));
    }
    if !(scenario.work.eta > 0.0 && scenario.work.eta.is_finite()) {
        return Err(CliError::validation("work.eta must be positive"));
    }
    if !(scenario.operations.audit_tol >= 0.0) {
        return Err(CliError::validation(
            "operations.audit_tol must be non-negative",
        ));
    }
    Ok(Resolved {
        scenario,
        base_dir,
        ctx,
        gamma,
        family,
        schedule,
        filters,
        cfg,
    })
}
