//! Experiment configuration: TOML on disk, validated into natural-unit core types.

use std::path::Path;

use clap::ValueEnum;
use nalgebra::{Vector3, Vector4};
use rotframe_core::grid::Boundary;
use rotframe_core::phases::PhaseMethod;
use rotframe_core::rotframe::HamiltonianFlags;
use rotframe_core::setup::{C_SI, HBAR_SI};
use rotframe_core::{ClosedPath, Grid, RotationSetup, SpacetimeLoop, C64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Sagnac,
    SpinPhase,
    SpinOrbit,
    Propagate,
    Ehrenfest,
    DiracCompare,
    GaugeCheck,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Sagnac => "sagnac",
            Mode::SpinPhase => "spin-phase",
            Mode::SpinOrbit => "spin-orbit",
            Mode::Propagate => "propagate",
            Mode::Ehrenfest => "ehrenfest",
            Mode::DiracCompare => "dirac-compare",
            Mode::GaugeCheck => "gauge-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Si,
    Natural,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<Mode>,
    units: Option<Units>,
    #[serde(default)]
    seed: u64,
    setup: RawSetup,
    path: Option<RawPath>,
    method: Option<PhaseMethod>,
    spin: Option<RawSpin>,
    grid: Option<RawGrid>,
    state: Option<RawState>,
    hamiltonian: Option<RawFlags>,
    integrator: Option<RawIntegrator>,
    dirac: Option<RawDirac>,
    gauge: Option<RawGauge>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSetup {
    mass: f64,
    omega: [f64; 3],
    hbar: Option<f64>,
    c: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPath {
    vertices: Option<Vec<[f64; 3]>>,
    regular: Option<RawRegular>,
    events: Option<Vec<[f64; 4]>>,
    #[serde(default = "one")]
    subdivisions: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegular {
    n: usize,
    radius: f64,
    #[serde(default)]
    center: [f64; 3],
    #[serde(default = "z_axis")]
    normal: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpin {
    t: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    dim: usize,
    points: usize,
    length: f64,
    #[serde(default)]
    boundary: Boundary,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    #[serde(default)]
    center: [f64; 3],
    #[serde(default)]
    momentum: [f64; 3],
    width: f64,
    spinor: Option<[[f64; 2]; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFlags {
    #[serde(default)]
    include_spin: bool,
    #[serde(default)]
    include_spin_orbit: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    dt: f64,
    steps: usize,
    #[serde(default = "one")]
    record_every: usize,
    #[serde(default)]
    abort_on_warning: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDirac {
    #[serde(default = "eight")]
    levels: usize,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawGauge {
    Temporal {
        amplitude: f64,
        wavevector: [f64; 4],
        #[serde(default)]
        phase: f64,
        #[serde(default = "sixteen")]
        probes: usize,
    },
    SpatialRotation {
        b: [f64; 3],
        #[serde(default = "sixteen")]
        probes: usize,
    },
}

fn one() -> usize {
    1
}
fn eight() -> usize {
    8
}
fn sixteen() -> usize {
    16
}
fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

/// Interferometer geometry.
#[derive(Debug, Clone)]
pub enum Geometry {
    Spatial(ClosedPath),
    Spacetime(SpacetimeLoop),
}

#[derive(Debug, Clone, Copy)]
pub struct InitialState {
    pub center: Vector3<f64>,
    pub momentum: Vector3<f64>,
    pub width: f64,
    pub spinor: Option<[C64; 2]>,
}

#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub dt: f64,
    pub steps: usize,
    pub record_every: usize,
    pub abort_on_warning: bool,
}

/// `ξ₀ = amplitude · sin(k·(ct, x) + phase)` or the rigid spatial rotation
/// `ξᵢ = t(b×x)ᵢ`.
#[derive(Debug, Clone, Copy)]
pub enum GaugeSpec {
    Temporal {
        amplitude: f64,
        wavevector: Vector4<f64>,
        phase: f64,
        probes: usize,
    },
    SpatialRotation {
        b: Vector3<f64>,
        probes: usize,
    },
}

/// A validated experiment. All quantities are in the units of `setup`
/// (SI input keeps metres and seconds, with CODATA ħ and c).
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub units: Units,
    pub seed: u64,
    pub setup: RotationSetup,
    pub geometry: Option<Geometry>,
    pub method: PhaseMethod,
    pub spin_time: Option<f64>,
    pub grid: Option<Grid>,
    pub state: Option<InitialState>,
    pub flags: HamiltonianFlags,
    pub integrator: Option<Integrator>,
    pub levels: usize,
    pub gauge: Option<GaugeSpec>,
}

fn finite(field: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(field, format!("must be finite, got {v}")))
    }
}

fn positive(field: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(field, format!("must be positive and finite, got {v}")))
    }
}

fn at_least(field: &str, v: usize, min: usize) -> CliResult<usize> {
    if v >= min {
        Ok(v)
    } else {
        Err(CliError::config(field, format!("must be at least {min}, got {v}")))
    }
}

fn vec3(field: &str, v: [f64; 3]) -> CliResult<Vector3<f64>> {
    for (i, c) in v.iter().enumerate() {
        finite(&format!("{field}[{i}]"), *c)?;
    }
    Ok(Vector3::from(v))
}

fn require<T>(v: Option<T>, field: &str, mode: Mode) -> CliResult<T> {
    v.ok_or_else(|| CliError::config(field, format!("required for mode {}", mode.name())))
}

pub fn load(path: &Path, mode: Mode, units: Option<Units>) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config("--config", format!("{}: {e}", path.display())))?;
    parse(&text, mode, units)
}

/// Parse and validate a TOML config for `mode`. A `--units` flag and a
/// `units` key must agree when both are given; one of them is required.
pub fn parse(text: &str, mode: Mode, units_flag: Option<Units>) -> CliResult<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(m) = raw.mode {
        if m != mode {
            return Err(CliError::config("mode", format!("config says {} but {} was requested", m.name(), mode.name())));
        }
    }
    let units = match (units_flag, raw.units) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::config("units", "conflicts with --units"));
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => {
            return Err(CliError::config("units", "declare `units = \"si\"` or `units = \"natural\"`, or pass --units"));
        }
    };

    let s = &raw.setup;
    let mass = positive("setup.mass", s.mass)?;
    let omega = vec3("setup.omega", s.omega)?;
    let setup = match units {
        Units::Si => {
            if s.hbar.is_some() || s.c.is_some() {
                return Err(CliError::config("setup.hbar/setup.c", "fixed to CODATA values in SI units; remove them"));
            }
            RotationSetup::new(mass, HBAR_SI, C_SI, omega)?
        }
        Units::Natural => {
            let hbar = positive("setup.hbar", s.hbar.unwrap_or(1.0))?;
            let c = positive("setup.c", s.c.unwrap_or(1.0))?;
            RotationSetup::new(mass, hbar, c, omega)?
        }
    };

    let geometry = raw.path.map(parse_path).transpose()?;
    let method = raw.method.unwrap_or(PhaseMethod::ClosedForm);
    if let PhaseMethod::OrderedProduct { steps } = method {
        at_least("method.steps", steps, 1)?;
    }
    let spin_time = raw.spin.map(|sp| {
        let t = finite("spin.t", sp.t)?;
        if t < 0.0 {
            return Err(CliError::config("spin.t", format!("must be non-negative, got {t}")));
        }
        Ok(t)
    });
    let spin_time = spin_time.transpose()?;

    let grid = raw.grid.map(parse_grid).transpose()?;
    let state = raw.state.map(parse_state).transpose()?;
    let f = raw.hamiltonian.unwrap_or_default();
    let flags = HamiltonianFlags {
        include_spin: f.include_spin || f.include_spin_orbit,
        include_spin_orbit: f.include_spin_orbit,
    };
    let integrator = raw
        .integrator
        .map(|i| {
            Ok::<_, CliError>(Integrator {
                dt: positive("integrator.dt", i.dt)?,
                steps: i.steps,
                record_every: at_least("integrator.record_every", i.record_every, 1)?,
                abort_on_warning: i.abort_on_warning,
            })
        })
        .transpose()?;
    let levels = at_least("dirac.levels", raw.dirac.map_or(8, |d| d.levels), 1)?;
    let gauge = raw.gauge.map(parse_gauge).transpose()?;

    let cfg = ExperimentConfig {
        mode,
        units,
        seed: raw.seed,
        setup,
        geometry,
        method,
        spin_time,
        grid,
        state,
        flags,
        integrator,
        levels,
        gauge,
    };
    check_mode(&cfg)?;
    Ok(cfg)
}

fn parse_path(p: RawPath) -> CliResult<Geometry> {
    let subdivisions = at_least("path.subdivisions", p.subdivisions, 1)?;
    let given = [p.vertices.is_some(), p.regular.is_some(), p.events.is_some()];
    if given.iter().filter(|g| **g).count() != 1 {
        return Err(CliError::config("path", "give exactly one of `vertices`, `regular` or `events`"));
    }
    if let Some(v) = p.vertices {
        let verts = v
            .into_iter()
            .enumerate()
            .map(|(i, x)| vec3(&format!("path.vertices[{i}]"), x))
            .collect::<CliResult<Vec<_>>>()?;
        return Ok(Geometry::Spatial(ClosedPath::new(verts)?.with_subdivisions(subdivisions)?));
    }
    if let Some(r) = p.regular {
        let n = at_least("path.regular.n", r.n, 3)?;
        let radius = positive("path.regular.radius", r.radius)?;
        let normal = vec3("path.regular.normal", r.normal)?;
        if normal.norm() == 0.0 {
            return Err(CliError::config("path.regular.normal", "must be non-zero"));
        }
        let path = ClosedPath::regular_polygon(n, radius, vec3("path.regular.center", r.center)?, normal)?;
        return Ok(Geometry::Spatial(path.with_subdivisions(subdivisions)?));
    }
    let events = p.events.unwrap_or_default();
    for (i, e) in events.iter().enumerate() {
        for (j, c) in e.iter().enumerate() {
            finite(&format!("path.events[{i}][{j}]"), *c)?;
        }
    }
    let lp = SpacetimeLoop::new(events.into_iter().map(Vector4::from).collect())?;
    Ok(Geometry::Spacetime(lp.with_subdivisions(subdivisions)))
}

fn parse_grid(g: RawGrid) -> CliResult<Grid> {
    if !(1..=3).contains(&g.dim) {
        return Err(CliError::config("grid.dim", format!("must be 1, 2 or 3, got {}", g.dim)));
    }
    at_least("grid.points", g.points, 2)?;
    let length = positive("grid.length", g.length)?;
    if let Boundary::Sponge { width, strength } = g.boundary {
        positive("grid.boundary.width", width)?;
        positive("grid.boundary.strength", strength)?;
        if width >= 0.5 * length {
            return Err(CliError::config("grid.boundary.width", "must be less than half the box length"));
        }
    }
    Ok(Grid::centered(g.dim, g.points, length)?.with_boundary(g.boundary))
}

fn parse_state(s: RawState) -> CliResult<InitialState> {
    let spinor = match s.spinor {
        None => None,
        Some(c) => {
            let z = [C64::new(c[0][0], c[0][1]), C64::new(c[1][0], c[1][1])];
            let norm = z[0].norm_sqr() + z[1].norm_sqr();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(CliError::config("state.spinor", "must be finite and non-zero"));
            }
            Some(z)
        }
    };
    Ok(InitialState {
        center: vec3("state.center", s.center)?,
        momentum: vec3("state.momentum", s.momentum)?,
        width: positive("state.width", s.width)?,
        spinor,
    })
}

fn parse_gauge(g: RawGauge) -> CliResult<GaugeSpec> {
    Ok(match g {
        RawGauge::Temporal {
            amplitude,
            wavevector,
            phase,
            probes,
        } => {
            for (i, k) in wavevector.iter().enumerate() {
                finite(&format!("gauge.wavevector[{i}]"), *k)?;
            }
            GaugeSpec::Temporal {
                amplitude: finite("gauge.amplitude", amplitude)?,
                wavevector: Vector4::from(wavevector),
                phase: finite("gauge.phase", phase)?,
                probes,
            }
        }
        RawGauge::SpatialRotation { b, probes } => GaugeSpec::SpatialRotation {
            b: vec3("gauge.b", b)?,
            probes,
        },
    })
}

fn check_mode(cfg: &ExperimentConfig) -> CliResult<()> {
    let mode = cfg.mode;
    match mode {
        Mode::Sagnac | Mode::SpinOrbit => {
            if !matches!(require(cfg.geometry.as_ref(), "path", mode)?, Geometry::Spatial(_)) {
                return Err(CliError::config("path.events", "spacetime loops are only used by gauge-check"));
            }
        }
        Mode::SpinPhase => {
            require(cfg.spin_time, "spin.t", mode)?;
        }
        Mode::Propagate | Mode::Ehrenfest => {
            require(cfg.grid, "grid", mode)?;
            let st = require(cfg.state, "state", mode)?;
            let it = require(cfg.integrator, "integrator", mode)?;
            if cfg.flags.include_spin && st.spinor.is_none() {
                return Err(CliError::config("state.spinor", "required when the spin term is included"));
            }
            if !cfg.flags.include_spin && st.spinor.is_some() {
                return Err(CliError::config("state.spinor", "given but hamiltonian.include_spin is false"));
            }
            if mode == Mode::Ehrenfest && (it.steps < 2 * it.record_every || it.steps % it.record_every != 0) {
                return Err(CliError::config(
                    "integrator.steps",
                    "must be a multiple of record_every giving at least 3 samples",
                ));
            }
        }
        Mode::DiracCompare => {
            require(cfg.grid, "grid", mode)?;
        }
        Mode::GaugeCheck => {
            require(cfg.geometry.as_ref(), "path", mode)?;
            require(cfg.gauge, "gauge", mode)?;
        }
    }
    Ok(())
}
