//! Scenario configuration, the packaged validation experiments, and the
//! run loop that produces snapshots and diagnostics.

use thiserror::Error;

use crate::boundary::{BoundarySpec, InletBoundary};
use crate::geometry::{
    build_profile, load_profile, ArteryProfile, GeometryError, Grid, ProfileSpec,
};
use crate::oracles::rest_residual;
use crate::state::{elastic_pressure, PhysicalParams, State};
use crate::timestepper::{advance, compensated_sum, SchemeConfig, SourceMode, StepError};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// Where the rest geometry comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSource {
    /// One of the analytic shapes.
    Spec(ProfileSpec),
    /// An already loaded `(x, R0, k)` table, interpolated onto the grid.
    Table(Vec<(f64, f64, f64)>),
    /// A table file that still has to be read; resolve it with
    /// [`crate::config::resolve_table_file`] before running.
    TableFile(String),
}

/// Initial condition of a run. An inflow experiment is a rest initial
/// condition combined with an inflow boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `A = A0`, `Q = 0`.
    Rest,
    /// Dilated area on the left half of the domain, rest area on the right,
    /// `Q = 0`; the diaphragm sits at the domain midpoint.
    Tourniquet { a_left: f64, a_right: f64 },
    /// Radius perturbation `R = R0 (1 + eps sin(100 pi (x - x3) / (20 L)))`
    /// on `[x3, x4]`, `Q = 0`.
    PulsePerturbation { epsilon: f64, x3: f64, x4: f64 },
}

/// A complete run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub grid: Grid,
    pub profile: ProfileSource,
    pub params: PhysicalParams,
    pub scheme: SchemeConfig,
    pub boundary: BoundarySpec,
    pub initial: InitialCondition,
    pub t_end: f64,
    /// Output times, sorted, within `[0, t_end]`. The time stepping lands on
    /// each exactly.
    pub snapshots: Vec<f64>,
}

impl ScenarioConfig {
    /// Replace the cell count, keeping the physical domain.
    pub fn with_cells(mut self, cells: usize) -> Self {
        let length = self.grid.length();
        let x_left = self.grid.x_left();
        self.grid = Grid::new(cells, length, x_left).expect("cell override");
        self
    }

    pub fn with_source_mode(mut self, mode: SourceMode) -> Self {
        self.scheme.source_mode = mode;
        self
    }

    pub fn build_profile(&self) -> Result<ArteryProfile, ScenarioError> {
        match &self.profile {
            ProfileSource::Spec(spec) => Ok(build_profile(spec, &self.grid)?),
            ProfileSource::Table(rows) => Ok(load_profile(rows, &self.grid)?),
            ProfileSource::TableFile(path) => Err(ScenarioError::Invalid(format!(
                "profile table file `{path}` has not been loaded"
            ))),
        }
    }
}

/// One output record: per-cell fields at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    /// Time [s].
    pub t: f64,
    /// Cell centers [m].
    pub x: Vec<f64>,
    /// Area [m^2].
    pub a: Vec<f64>,
    /// Discharge [m^3/s].
    pub q: Vec<f64>,
    /// Velocity [m/s].
    pub u: Vec<f64>,
    /// Radius `sqrt(A / pi)` [m].
    pub r: Vec<f64>,
    /// Elastic pressure [Pa].
    pub p: Vec<f64>,
}

impl Snapshot {
    fn capture(state: &State, profile: &ArteryProfile, params: &PhysicalParams) -> Self {
        let j = state.cells();
        let mut u = Vec::with_capacity(j);
        let mut r = Vec::with_capacity(j);
        let mut p = Vec::with_capacity(j);
        for i in 0..j {
            u.push(state.q[i] / state.a[i]);
            r.push((state.a[i] / std::f64::consts::PI).sqrt());
            p.push(elastic_pressure(
                state.a[i],
                profile.a0()[i],
                profile.k()[i],
                params.p0,
            ));
        }
        Self {
            t: state.t,
            x: profile.grid().cell_centers(),
            a: state.a.clone(),
            q: state.q.clone(),
            u,
            r,
            p,
        }
    }
}

/// Health indicators recorded with every snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotDiagnostics {
    pub t: f64,
    /// Largest velocity magnitude [m/s]; machine-zero on preserved rest states.
    pub max_abs_u: f64,
    /// Largest deviation of `k sqrt(A) - k sqrt(A0)` from its mean [Pa].
    pub equilibrium_deviation: f64,
    /// Total volume `sum A dx` [m^3].
    pub mass: f64,
    /// `|(mass - mass(0)) - integrated boundary mass flux|` [m^3].
    pub mass_defect: f64,
    /// Smallest cell area [m^2].
    pub min_area: f64,
}

/// Why a run stopped early.
#[derive(Debug, Clone, PartialEq)]
pub enum RunFailure {
    Positivity { cell: usize, time: f64, area: f64 },
    Boundary { time: f64, message: String },
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunFailure::Positivity { cell, time, area } => write!(
                f,
                "area became non-positive in cell {cell} at t = {time:.9} s (A = {area:.6e})"
            ),
            RunFailure::Boundary { time, message } => {
                write!(f, "boundary treatment failed at t = {time:.9} s: {message}")
            }
        }
    }
}

/// Everything a run produced. On failure the snapshots collected so far are
/// kept and `failure` is set.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub name: String,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<SnapshotDiagnostics>,
    pub steps: u64,
    pub failure: Option<RunFailure>,
}

fn initial_state(cfg: &ScenarioConfig, profile: &ArteryProfile) -> Result<State, ScenarioError> {
    let grid = profile.grid();
    match cfg.initial {
        InitialCondition::Rest => Ok(State::at_rest(profile)),
        InitialCondition::Tourniquet { a_left, a_right } => {
            if !(a_left > 0.0 && a_right > 0.0) {
                return Err(ScenarioError::Invalid(
                    "tourniquet areas must be positive".into(),
                ));
            }
            let mid = grid.x_left() + 0.5 * grid.length();
            let a: Vec<f64> = (0..grid.cells())
                .map(|i| {
                    if grid.cell_center(i) <= mid {
                        a_left
                    } else {
                        a_right
                    }
                })
                .collect();
            let q = vec![0.0; grid.cells()];
            Ok(State::new(a, q))
        }
        InitialCondition::PulsePerturbation { epsilon, x3, x4 } => {
            if !(x3 < x4) {
                return Err(ScenarioError::Invalid(
                    "pulse support needs x3 < x4".into(),
                ));
            }
            if epsilon.abs() >= 1.0 {
                return Err(ScenarioError::Invalid(
                    "pulse amplitude must stay below 1".into(),
                ));
            }
            let l = grid.length();
            let a: Vec<f64> = (0..grid.cells())
                .map(|i| {
                    let x = grid.cell_center(i);
                    let mut r = profile.r0()[i];
                    if (x3..=x4).contains(&x) {
                        let phase = 100.0 * std::f64::consts::PI * (x - x3) / (20.0 * l);
                        r *= 1.0 + epsilon * phase.sin();
                    }
                    std::f64::consts::PI * r * r
                })
                .collect();
            let q = vec![0.0; grid.cells()];
            Ok(State::new(a, q))
        }
    }
}

fn validate(cfg: &ScenarioConfig) -> Result<(), ScenarioError> {
    if !(cfg.t_end >= 0.0) {
        return Err(ScenarioError::Invalid("t_end must be non-negative".into()));
    }
    if !(cfg.scheme.n_cfl > 0.0 && cfg.scheme.n_cfl <= 1.0) {
        return Err(ScenarioError::Invalid("n_cfl must lie in (0, 1]".into()));
    }
    let snaps = &cfg.snapshots;
    if snaps.is_empty() {
        return Err(ScenarioError::Invalid(
            "at least one snapshot time is required".into(),
        ));
    }
    for w in snaps.windows(2) {
        if w[0] >= w[1] {
            return Err(ScenarioError::Invalid(
                "snapshot times must be strictly increasing".into(),
            ));
        }
    }
    if snaps[0] < 0.0 || *snaps.last().unwrap() > cfg.t_end {
        return Err(ScenarioError::Invalid(format!(
            "snapshot times must lie within [0, {}]",
            cfg.t_end
        )));
    }
    if let InletBoundary::Inflow { tc, .. } = cfg.boundary.left {
        if !(tc > 0.0) {
            return Err(ScenarioError::Invalid("inflow period must be positive".into()));
        }
    }
    Ok(())
}

/// Run a scenario to completion. Deterministic: a second run with the same
/// configuration produces bit-identical output.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput, ScenarioError> {
    validate(cfg)?;
    let profile = cfg.build_profile()?;
    let dx = profile.grid().dx();
    let mut state = initial_state(cfg, &profile)?;

    let mass0 = compensated_sum(state.a.iter().map(|a| a * dx));
    let mut boundary_net = 0.0;
    let mut steps = 0u64;
    let mut snapshots = Vec::new();
    let mut diagnostics = Vec::new();
    let mut failure = None;

    let record = |state: &State, boundary_net: f64| {
        let (max_abs_u, equilibrium_deviation) = rest_residual(state, &profile);
        let mass = compensated_sum(state.a.iter().map(|a| a * dx));
        let min_area = state.a.iter().copied().fold(f64::INFINITY, f64::min);
        (
            Snapshot::capture(state, &profile, &cfg.params),
            SnapshotDiagnostics {
                t: state.t,
                max_abs_u,
                equilibrium_deviation,
                mass,
                mass_defect: (mass - mass0 - boundary_net).abs(),
                min_area,
            },
        )
    };

    for &t_snap in &cfg.snapshots {
        match advance(
            &mut state,
            &profile,
            &cfg.params,
            &cfg.scheme,
            &cfg.boundary,
            t_snap,
        ) {
            Ok(report) => {
                boundary_net += report.boundary_mass_net;
                steps += report.steps;
                let (snap, diag) = record(&state, boundary_net);
                snapshots.push(snap);
                diagnostics.push(diag);
            }
            Err(StepError::Positivity { cell, time, area }) => {
                failure = Some(RunFailure::Positivity { cell, time, area });
                break;
            }
            Err(StepError::Boundary(e)) => {
                failure = Some(RunFailure::Boundary {
                    time: state.t,
                    message: e.to_string(),
                });
                break;
            }
        }
    }

    Ok(RunOutput {
        name: cfg.name.clone(),
        snapshots,
        diagnostics,
        steps,
        failure,
    })
}

/// Ready-made configurations for the classic validation experiments.
pub mod presets {
    use super::*;

    pub const BLOOD_DENSITY: f64 = 1060.0; // kg/m^3
    pub const BLOOD_VISCOSITY: f64 = 3.5e-3; // Pa s

    fn grid(cells: usize, length: f64, x_left: f64) -> Grid {
        Grid::new(cells, length, x_left).expect("preset grid")
    }

    /// Artery at rest with an aneurysm-like bump: nothing should ever move.
    /// The stiff wall (k = 4e8 Pa/m) makes any source-term imbalance highly
    /// visible.
    pub fn dead_man() -> ScenarioConfig {
        ScenarioConfig {
            name: "dead-man".into(),
            grid: grid(50, 0.14, 0.0),
            profile: ProfileSource::Spec(ProfileSpec::AneurysmBump {
                r0: 4.0e-3,
                delta_r: 1.0e-3,
                x1: 1.0e-2,
                x2: 3.05e-2,
                x3: 4.95e-2,
                x4: 7.0e-2,
                k: 4.0e8,
            }),
            params: PhysicalParams::inviscid(BLOOD_DENSITY),
            scheme: SchemeConfig::default(),
            boundary: BoundarySpec::neumann(),
            initial: InitialCondition::Rest,
            t_end: 5.0,
            snapshots: vec![5.0],
        }
    }

    /// Ideal tourniquet, released at t = 0: the dam-break analogue with an
    /// exact two-wave solution.
    pub fn tourniquet() -> ScenarioConfig {
        let r0 = 4.0e-3;
        let delta_r = 1.0e-3;
        ScenarioConfig {
            name: "tourniquet".into(),
            grid: grid(100, 0.08, -0.04),
            profile: ProfileSource::Spec(ProfileSpec::Uniform { r0, k: 1.0e7 }),
            params: PhysicalParams::inviscid(BLOOD_DENSITY),
            scheme: SchemeConfig::default(),
            boundary: BoundarySpec::neumann(),
            initial: InitialCondition::Tourniquet {
                a_left: std::f64::consts::PI * (r0 + delta_r) * (r0 + delta_r),
                a_right: std::f64::consts::PI * r0 * r0,
            },
            t_end: 5.0e-3,
            snapshots: vec![2.5e-3, 5.0e-3],
        }
    }

    /// Small pulse running into a constriction; reflection and transmission
    /// at the transition are checked against the linear admittance formulas.
    pub fn constriction() -> ScenarioConfig {
        let l = 0.16;
        ScenarioConfig {
            name: "constriction".into(),
            grid: grid(1500, l, 0.0),
            profile: ProfileSource::Spec(ProfileSpec::Constriction {
                r_r: 4.0e-3,
                delta_r: 1.0e-3,
                x1: 19.0 / 40.0 * l,
                x2: 0.5 * l,
                k: 1.0e8,
            }),
            params: PhysicalParams::inviscid(BLOOD_DENSITY),
            scheme: SchemeConfig::default(),
            boundary: BoundarySpec::neumann(),
            initial: InitialCondition::PulsePerturbation {
                epsilon: 5.0e-3,
                x3: 0.15 * l,
                x4: 0.35 * l,
            },
            t_end: 8.0e-3,
            snapshots: vec![0.0, 2.0e-3, 6.0e-3],
        }
    }

    fn uniform_inflow(name: &str, cf: f64, cv: f64) -> ScenarioConfig {
        ScenarioConfig {
            name: name.into(),
            grid: grid(1500, 3.0, 0.0),
            profile: ProfileSource::Spec(ProfileSpec::Uniform { r0: 1.0e-2, k: 1.0e7 }),
            params: PhysicalParams::new(BLOOD_DENSITY, cf, cv, 0.0),
            scheme: SchemeConfig {
                enable_friction: cf > 0.0,
                enable_viscoelastic: cv > 0.0,
                ..Default::default()
            },
            boundary: BoundarySpec::inflow(1.0e-6, 0.4),
            initial: InitialCondition::Rest,
            t_end: 0.5,
            snapshots: vec![0.1, 0.2, 0.3, 0.4, 0.5],
        }
    }

    /// Frictionless pulse in a uniform vessel: pure translation at the
    /// Moens-Korteweg speed, no dissipation, no diffusion.
    pub fn dalembert() -> ScenarioConfig {
        uniform_inflow("dalembert", 0.0, 0.0)
    }

    /// Pulse damped by blood viscosity. `Cf` is the printed value of
    /// `40 pi nu` with `nu = mu / rho`; the amplitude follows the envelope
    /// `exp(-eps_f x / (2 Tc c0))` with `eps_f = Tc Cf / A0 = 0.53`.
    pub fn viscous_damping() -> ScenarioConfig {
        uniform_inflow("viscous", 4.15e-4, 0.0)
    }

    /// Pulse diffused by the viscoelastic wall. `Cv` is the printed value of
    /// `(2/3) phi h / (rho R0)` with `phi = 5000 Pa s` and `h = 5e-3 m`; the
    /// shape follows the heat-kernel solution with
    /// `eps_nu = Cv / (c0^2 Tc) = 8.3e-2`.
    pub fn viscoelastic() -> ScenarioConfig {
        uniform_inflow("viscoelastic", 0.0, 1.57)
    }

    fn tapered_profile() -> ProfileSource {
        ProfileSource::Spec(ProfileSpec::LinearTaper {
            r_left: 4.0e-3,
            slope: 1.0e-3,
            x1: 0.6,  // 4L/20
            x2: 2.4, // 16L/20
            elastic_modulus: 4.0e5,
            wall_thickness: 5.0e-4,
        })
    }

    /// Tapered artery with friction and viscoelasticity, mimicking a real
    /// vessel: `Cf = 8 pi nu`, `Cv = (2/3) phi h / (rho R0)` at the proximal
    /// radius.
    pub fn tapered() -> ScenarioConfig {
        let nu = BLOOD_VISCOSITY / BLOOD_DENSITY;
        let cf = 8.0 * std::f64::consts::PI * nu;
        let cv = 2.0 / 3.0 * 5000.0 * 5.0e-4 / (BLOOD_DENSITY * 4.0e-3);
        ScenarioConfig {
            name: "tapered".into(),
            grid: grid(1500, 3.0, 0.0),
            profile: tapered_profile(),
            params: PhysicalParams::new(BLOOD_DENSITY, cf, cv, 0.0),
            scheme: SchemeConfig {
                enable_friction: true,
                enable_viscoelastic: true,
                ..Default::default()
            },
            boundary: BoundarySpec::inflow(1.0e-6, 0.4),
            initial: InitialCondition::Rest,
            t_end: 0.5,
            snapshots: vec![0.1, 0.2, 0.3, 0.4, 0.5],
        }
    }

    /// Tapered artery without friction or viscoelasticity; isolates the
    /// continuous reflection caused by the taper.
    pub fn tapered_inviscid() -> ScenarioConfig {
        let mut cfg = tapered();
        cfg.name = "tapered-inviscid".into();
        cfg.params = PhysicalParams::inviscid(BLOOD_DENSITY);
        cfg.scheme.enable_friction = false;
        cfg.scheme.enable_viscoelastic = false;
        cfg
    }

    /// All packaged scenarios in listing order.
    pub fn all() -> Vec<ScenarioConfig> {
        vec![
            dead_man(),
            tourniquet(),
            constriction(),
            dalembert(),
            viscous_damping(),
            viscoelastic(),
            tapered(),
            tapered_inviscid(),
        ]
    }

    pub fn by_name(name: &str) -> Option<ScenarioConfig> {
        all().into_iter().find(|c| c.name == name)
    }
}
