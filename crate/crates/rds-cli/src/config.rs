//! JSON configuration schema and scenario construction.
//!
//! Configs use exactly the key names of the structs below; unknown keys are
//! rejected so typos fail fast.  Parsing fills documented defaults
//! (`safety`, `dt_growth`, the blow-up threshold), so serializing a parsed
//! config yields its normalized form and round-trips losslessly.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rds_core::stepper::StepControl;
use rds_core::{BoundaryCondition, Grid, Params, ScalarField, State};

use crate::error::CliError;
use crate::initial::build_initial;

/// Boundary condition name as written in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcSpec {
    Neumann,
    Dirichlet,
}

impl From<BcSpec> for BoundaryCondition {
    fn from(b: BcSpec) -> BoundaryCondition {
        match b {
            BcSpec::Neumann => BoundaryCondition::Neumann,
            BcSpec::Dirichlet => BoundaryCondition::Dirichlet,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dimension: usize,
    pub cells_per_axis: usize,
    pub length: f64,
    pub bc: BcSpec,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid, CliError> {
        Ok(Grid::new(
            self.dimension,
            self.cells_per_axis,
            self.length,
            self.bc.into(),
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl ParamsSpec {
    pub fn build(&self, dimension: usize) -> Result<Params, CliError> {
        Ok(Params::new(
            self.d1, self.d2, self.d3, self.alpha, self.beta, self.gamma, dimension,
        )?)
    }
}

/// One species' initial datum.  Every variant produces a nonnegative bounded
/// field; `file` reads a field CSV (one value per line, `#` lines ignored,
/// the on-disk layout written by snapshot output).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Constant(f64),
    CosineBump {
        base: f64,
        amplitude: f64,
        mode: u32,
    },
    Checkerboard {
        low: f64,
        high: f64,
    },
    File(PathBuf),
}

impl InitialSpec {
    /// Smooth data keep the order-2 spatial convergence story honest; rough
    /// data (cell-parity patterns, arbitrary files) need not.
    pub fn is_smooth(&self) -> bool {
        matches!(
            self,
            InitialSpec::Constant(_) | InitialSpec::CosineBump { .. }
        )
    }

    /// Whether this initial datum can be re-evaluated on a refined grid.
    pub fn is_refinable(&self) -> bool {
        !matches!(self, InitialSpec::File(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSet {
    pub u: InitialSpec,
    pub v: InitialSpec,
    pub w: InitialSpec,
}

impl InitialSet {
    pub fn is_smooth(&self) -> bool {
        self.u.is_smooth() && self.v.is_smooth() && self.w.is_smooth()
    }

    pub fn is_refinable(&self) -> bool {
        self.u.is_refinable() && self.v.is_refinable() && self.w.is_refinable()
    }
}

fn default_safety() -> f64 {
    StepControl::DEFAULT_SAFETY
}

fn default_dt_growth() -> f64 {
    StepControl::DEFAULT_DT_GROWTH
}

/// Step-control knobs.  `blowup_threshold` defaults to
/// `1e6 * max(1, sup of the initial data)` when omitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSpec {
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub sample_every: f64,
    #[serde(default = "default_safety")]
    pub safety: f64,
    #[serde(default = "default_dt_growth")]
    pub dt_growth: f64,
    #[serde(default)]
    pub blowup_threshold: Option<f64>,
}

impl ControlSpec {
    pub fn build(&self, initial_sup: f64) -> Result<StepControl, CliError> {
        let threshold = self
            .blowup_threshold
            .unwrap_or_else(|| StepControl::default_blowup_threshold(initial_sup));
        Ok(StepControl::new(
            self.dt_init,
            self.dt_min,
            self.dt_max,
            self.safety,
            threshold,
            self.sample_every,
            self.dt_growth,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSpec {
    pub series_path: PathBuf,
    #[serde(default)]
    pub snapshots_path: Option<PathBuf>,
    #[serde(default)]
    pub snapshot_every: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub params: ParamsSpec,
    pub grid: GridSpec,
    pub initial: InitialSet,
    pub t_end: f64,
    pub control: ControlSpec,
    pub outputs: OutputsSpec,
}

/// Sweep driver config: Cartesian ranges over the six scalar parameters, an
/// optional shared run recipe applied to every tuple, and the output path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub d3: Vec<f64>,
    pub dimension: usize,
    #[serde(default)]
    pub run: Option<SweepRunSpec>,
    pub csv_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRunSpec {
    pub grid: GridSpec,
    pub initial: InitialSet,
    pub t_end: f64,
    pub control: ControlSpec,
}

/// Reads and parses a JSON config of any schema type above.
pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Canonical (normalized) JSON rendering of a parsed config.
pub fn to_canonical_json<T: Serialize>(cfg: &T) -> String {
    serde_json::to_string_pretty(cfg).expect("config serialization cannot fail")
}

/// A fully validated, ready-to-run scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: Params,
    pub grid: Grid,
    pub initial_u: ScalarField,
    pub initial_v: ScalarField,
    pub initial_w: ScalarField,
    pub t_end: f64,
    pub control: StepControl,
    /// Integer ratio snapshot_every / sample_every, when snapshots are on.
    pub snapshot_stride: Option<usize>,
}

impl Scenario {
    pub fn build(cfg: &ScenarioConfig) -> Result<Scenario, CliError> {
        Scenario::build_with(cfg, None, None)
    }

    /// Builds the scenario with an optional resolution override (initial data
    /// re-evaluated on the finer grid) and an optional fixed time step
    /// (`dt_init = dt_max = dt`, growth pinned to 1), used by the refinement
    /// and convergence commands.
    pub fn build_with(
        cfg: &ScenarioConfig,
        cells_override: Option<usize>,
        fixed_dt: Option<f64>,
    ) -> Result<Scenario, CliError> {
        if !(cfg.t_end.is_finite() && cfg.t_end > 0.0) {
            return Err(CliError::invalid(format!(
                "t_end must be positive and finite, got {}",
                cfg.t_end
            )));
        }
        let mut grid_spec = cfg.grid;
        if let Some(n) = cells_override {
            if n != cfg.grid.cells_per_axis && !cfg.initial.is_refinable() {
                return Err(CliError::invalid(
                    "file-based initial data cannot be re-evaluated at another resolution",
                ));
            }
            grid_spec.cells_per_axis = n;
        }
        let grid = grid_spec.build()?;
        let params = cfg.params.build(grid.dimension())?;
        let initial_u = build_initial(&cfg.initial.u, &grid)?;
        let initial_v = build_initial(&cfg.initial.v, &grid)?;
        let initial_w = build_initial(&cfg.initial.w, &grid)?;
        let initial_sup = initial_u.sup_abs() + initial_v.sup_abs() + initial_w.sup_abs();

        let mut control_spec = cfg.control;
        if let Some(dt) = fixed_dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(CliError::invalid(format!(
                    "fixed dt must be positive, got {dt}"
                )));
            }
            control_spec.dt_init = dt;
            control_spec.dt_max = dt;
            control_spec.dt_min = control_spec.dt_min.min(dt);
            control_spec.dt_growth = 1.0;
        }
        let control = control_spec.build(initial_sup)?;

        let snapshot_stride = match (&cfg.outputs.snapshots_path, cfg.outputs.snapshot_every) {
            (None, None) => None,
            (None, Some(_)) => {
                return Err(CliError::invalid(
                    "snapshot_every given without snapshots_path",
                ))
            }
            (Some(_), None) => {
                return Err(CliError::invalid(
                    "snapshots_path given without snapshot_every",
                ))
            }
            (Some(_), Some(every)) => {
                let ratio = every / control.sample_every;
                let rounded = ratio.round();
                if !(every > 0.0 && rounded >= 1.0 && (ratio - rounded).abs() <= 1e-9 * ratio) {
                    return Err(CliError::invalid(format!(
                        "snapshot_every ({every}) must be a positive integer multiple of \
                         sample_every ({})",
                        control.sample_every
                    )));
                }
                Some(rounded as usize)
            }
        };

        Ok(Scenario {
            params,
            grid,
            initial_u,
            initial_v,
            initial_w,
            t_end: cfg.t_end,
            control,
            snapshot_stride,
        })
    }

    /// Fresh state at `t = 0` with the configured starting step.
    pub fn state(&self) -> State {
        State::new(
            0.0,
            self.control.dt_init,
            self.initial_u.clone(),
            self.initial_v.clone(),
            self.initial_w.clone(),
            &self.grid,
        )
        .expect("validated scenario always yields a valid state")
    }
}
