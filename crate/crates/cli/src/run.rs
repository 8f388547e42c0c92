//! One experiment per mode.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotframe_core::dirac::{
    dirac_hermitian_hamiltonian, effective_fields, gauge_transform_unchecked, gauge_transform_weakfield,
    pauli_matrix, rotating_metric, upper_branch, GaugeVector,
};
use rotframe_core::io::{field_series, save_snapshot, trajectory_series, write_sparse_triplets};
use rotframe_core::path::enclosed_area;
use rotframe_core::phases::{
    sagnac_phase, spin_orbit_operator, spin_orbit_scalar_phase, spin_phase_operator, weakfield_phase, PhaseMethod,
};
use rotframe_core::rotframe::{
    boundary_margin, build_hamiltonian, classical_trajectory, ehrenfest_residual, mean_velocity, HamiltonianFlags,
    Propagator, RotatingHamiltonian, StabilityWarning, Trajectory, BOUNDARY_THRESHOLD,
};
use rotframe_core::{dense, ClosedPath, Error as CoreError, SpacetimeLoop, WaveState};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, GaugeSpec, Geometry, Mode, Units};
use crate::error::{CliError, CliResult};
use crate::output::{emit_plot_data, phase_json, vec_json, SCHEMA_VERSION};

/// Loop phase changes below this count as gauge invariant.
pub const GAUGE_TOLERANCE: f64 = 1e-10;
/// Largest grid the dense Dirac comparison accepts.
pub const DENSE_POINT_LIMIT: usize = 1024;

/// What a run produced. `failure` is set when the experiment itself
/// completed far enough to report but a precondition or stability check
/// failed; the summary is still written.
#[derive(Debug)]
pub struct Report {
    pub result: Value,
    pub artifacts: Vec<String>,
    pub failure: Option<CliError>,
}

impl Report {
    fn ok(result: Value) -> Self {
        Self {
            result,
            artifacts: Vec::new(),
            failure: None,
        }
    }
}

/// Envelope shared by every summary.
pub fn summary(mode: Mode, cfg: Option<&ExperimentConfig>, outcome: &CliResult<Report>) -> Value {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "mode": mode.name(),
    });
    if let Some(c) = cfg {
        v["units"] = json!(match c.units {
            Units::Si => "si",
            Units::Natural => "natural",
        });
        v["seed"] = json!(c.seed);
        v["setup"] = json!({
            "mass": c.setup.mass,
            "hbar": c.setup.hbar,
            "c": c.setup.c,
            "omega": vec_json(&c.setup.omega),
        });
    }
    let failure = match outcome {
        Ok(r) => {
            v["result"] = r.result.clone();
            v["artifacts"] = json!(r.artifacts);
            r.failure.as_ref()
        }
        Err(e) => Some(e),
    };
    match failure {
        None => {
            v["status"] = json!("ok");
            v["exit_code"] = json!(0);
        }
        Some(e) => {
            v["status"] = json!("error");
            v["exit_code"] = json!(e.exit_code());
            v["error"] = json!(e.to_string());
        }
    }
    v
}

pub fn run(cfg: &ExperimentConfig, out: &Path) -> CliResult<Report> {
    std::fs::create_dir_all(out)?;
    match cfg.mode {
        Mode::Sagnac => sagnac(cfg),
        Mode::SpinPhase => spin_phase(cfg),
        Mode::SpinOrbit => spin_orbit(cfg),
        Mode::Propagate => propagate(cfg, out),
        Mode::Ehrenfest => ehrenfest(cfg, out),
        Mode::DiracCompare => dirac_compare(cfg, out),
        Mode::GaugeCheck => gauge_check(cfg),
    }
}

fn spatial_path(cfg: &ExperimentConfig) -> CliResult<&ClosedPath> {
    match &cfg.geometry {
        Some(Geometry::Spatial(p)) => Ok(p),
        _ => Err(CliError::config("path", "a spatial loop is required")),
    }
}

fn path_summary(p: &ClosedPath) -> Value {
    json!({
        "vertices": p.vertices().len(),
        "subdivisions": p.subdivisions(),
        "area_vector": vec_json(&enclosed_area(p)),
        "perimeter": p.perimeter(),
    })
}

fn sagnac(cfg: &ExperimentConfig) -> CliResult<Report> {
    let path = spatial_path(cfg)?;
    let r = sagnac_phase(path, &cfg.setup, cfg.method);
    let mut out = phase_json(&r, path_summary(path));
    out["closed_form_rad"] = json!(sagnac_phase(path, &cfg.setup, PhaseMethod::ClosedForm).value());
    Ok(Report::ok(out))
}

fn spin_phase(cfg: &ExperimentConfig) -> CliResult<Report> {
    let t = cfg.spin_time.unwrap_or(0.0);
    let r = spin_phase_operator(&cfg.setup, t, cfg.method)?;
    let mut out = phase_json(&r, Value::Null);
    out["t"] = json!(t);
    out["omega_t"] = json!(cfg.setup.omega_norm() * t);
    out["eigenphases"] = json!(r.op().eigenphases());
    out["unitarity_defect"] = json!(r.op().unitarity_defect());
    Ok(Report::ok(out))
}

fn spin_orbit(cfg: &ExperimentConfig) -> CliResult<Report> {
    let path = spatial_path(cfg)?;
    let r = spin_orbit_operator(path, &cfg.setup, cfg.method);
    let closed = spin_orbit_operator(path, &cfg.setup, PhaseMethod::ClosedForm).op();
    let mut out = phase_json(&r, path_summary(path));
    out["distance_to_closed_form"] = json!(r.op().distance(&closed));
    out["eigenphases"] = json!(r.op().eigenphases());
    match spin_orbit_scalar_phase(path, &cfg.setup) {
        Ok(s) => out["scalar_phase_rad"] = json!(s.value()),
        Err(CoreError::NonPlanarPath { deviation }) => {
            out["scalar_phase_rad"] = Value::Null;
            out["scalar_phase_note"] = json!(format!("path is not planar (deviation {deviation:e}); no scalar reduction"));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(Report::ok(out))
}

/// A recorded run of the split-step propagator.
struct Run {
    state: WaveState,
    trajectory: Trajectory,
    warnings: Vec<StabilityWarning>,
    boundary_hit: Option<usize>,
    failure: Option<CliError>,
}

fn initial_state(cfg: &ExperimentConfig) -> CliResult<WaveState> {
    let (grid, st) = match (cfg.grid, cfg.state) {
        (Some(g), Some(s)) => (g, s),
        _ => return Err(CliError::config("grid/state", "required")),
    };
    let psi = WaveState::gaussian(grid, st.center, st.momentum, st.width, cfg.setup.hbar);
    Ok(match st.spinor {
        Some(chi) => psi.with_spinor(chi)?,
        None => psi,
    })
}

fn record(tr: &mut Trajectory, psi: &WaveState, h: &RotatingHamiltonian) -> CliResult<()> {
    tr.times.push(psi.time);
    tr.position.push(psi.expect_position());
    tr.velocity.push(mean_velocity(psi, h)?);
    Ok(())
}

fn evolve(cfg: &ExperimentConfig) -> CliResult<(RotatingHamiltonian, Run)> {
    let it = cfg.integrator.ok_or_else(|| CliError::config("integrator", "required"))?;
    let h = build_hamiltonian(&cfg.setup, cfg.flags);
    let mut psi = initial_state(cfg)?;
    let prop = Propagator::new(&h, &psi.grid, it.dt)?;
    let mut run = Run {
        state: psi.clone(),
        trajectory: Trajectory::default(),
        warnings: prop.warnings().to_vec(),
        boundary_hit: None,
        failure: None,
    };
    record(&mut run.trajectory, &psi, &h)?;
    if it.abort_on_warning && !run.warnings.is_empty() {
        run.failure = Some(CliError::Numerical(format!("stability warning before the first step: {:?}", run.warnings[0])));
        return Ok((h, run));
    }
    let margin = boundary_margin(&psi);
    for step in 1..=it.steps {
        prop.step(&mut psi)?;
        if run.boundary_hit.is_none() {
            let p = psi.boundary_probability(margin);
            if p > BOUNDARY_THRESHOLD {
                run.boundary_hit = Some(step);
                run.warnings.push(StabilityWarning::BoundaryProbability { step, probability: p });
                if it.abort_on_warning {
                    record(&mut run.trajectory, &psi, &h)?;
                    run.failure = Some(CliError::Numerical(format!(
                        "boundary probability {p:.3e} at step {step} exceeds {BOUNDARY_THRESHOLD:e}"
                    )));
                    break;
                }
            }
        }
        if step % it.record_every == 0 || step == it.steps {
            record(&mut run.trajectory, &psi, &h)?;
        }
    }
    if !psi.norm().is_finite() {
        return Err(CliError::Numerical("norm became non-finite".into()));
    }
    run.state = psi;
    Ok((h, run))
}

fn run_json(cfg: &ExperimentConfig, h: &RotatingHamiltonian, run: &Run, initial_norm: f64) -> Value {
    let it = cfg.integrator.expect("validated");
    let tr = &run.trajectory;
    let last = tr.len() - 1;
    json!({
        "dt": it.dt,
        "steps": it.steps,
        "final_time": run.state.time,
        "components": h.components(),
        "include_spin": h.include_spin,
        "include_spin_orbit": h.include_spin_orbit,
        "initial_norm": initial_norm,
        "final_norm": run.state.norm(),
        "norm_drift": (run.state.norm() - initial_norm).abs(),
        "final_position": vec_json(&tr.position[last]),
        "final_velocity": vec_json(&tr.velocity[last]),
        "samples": tr.len(),
        "boundary_hit": run.boundary_hit,
        "validity_ratio": h.validity_ratio(&run.state.grid),
        "warnings": run.warnings,
    })
}

fn propagate(cfg: &ExperimentConfig, out: &Path) -> CliResult<Report> {
    let initial_norm = initial_state(cfg)?.norm();
    let (h, run) = evolve(cfg)?;
    let mut report = Report::ok(run_json(cfg, &h, &run, initial_norm));
    emit_plot_data(&trajectory_series(&run.trajectory), &out.join("trajectory.csv"))?;
    report.artifacts.push("trajectory.csv".into());
    if run.failure.is_none() {
        save_snapshot(&run.state, out.join("final_state.rfws"))?;
        report.artifacts.push("final_state.rfws".into());
    }
    report.failure = run.failure;
    Ok(report)
}

fn ehrenfest(cfg: &ExperimentConfig, out: &Path) -> CliResult<Report> {
    let it = cfg.integrator.expect("validated");
    let initial_norm = initial_state(cfg)?.norm();
    let (h, run) = evolve(cfg)?;
    let tr = &run.trajectory;
    let classical = classical_trajectory(
        tr.position[0],
        tr.velocity[0],
        cfg.setup.omega,
        it.dt * it.record_every as f64,
        tr.len() - 1,
    );
    let mut dev: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (xq, xc) in tr.position.iter().zip(&classical.position) {
        dev = dev.max((xq - xc).norm());
        scale = scale.max(xc.norm());
    }
    let mut result = run_json(cfg, &h, &run, initial_norm);
    result["max_deviation"] = json!(dev);
    result["max_relative_deviation"] = json!(if scale > 0.0 { dev / scale } else { dev });
    result["ehrenfest_residual"] = match ehrenfest_residual(tr, &cfg.setup.omega) {
        Ok(r) => json!(r),
        Err(_) => Value::Null,
    };
    let mut report = Report::ok(result);
    emit_plot_data(&trajectory_series(tr), &out.join("quantum.csv"))?;
    emit_plot_data(&trajectory_series(&classical), &out.join("classical.csv"))?;
    report.artifacts = vec!["quantum.csv".into(), "classical.csv".into()];
    report.failure = run.failure;
    Ok(report)
}

fn dirac_compare(cfg: &ExperimentConfig, out: &Path) -> CliResult<Report> {
    let grid = cfg.grid.ok_or_else(|| CliError::config("grid", "required"))?;
    if grid.len() > DENSE_POINT_LIMIT {
        return Err(CliError::Precondition(format!(
            "dense Dirac realization is limited to {DENSE_POINT_LIMIT} grid points, got {}",
            grid.len()
        )));
    }
    let s = cfg.setup;
    let metric = rotating_metric(&s);
    let dirac = dirac_hermitian_hamiltonian(&s, &metric, &grid)?;
    let upper = upper_branch(&dense::hermitian_eigenvalues(&dirac), s.mass * s.c * s.c);
    let h5 = pauli_matrix(&s, &metric, &grid, true)?;
    let pauli = dense::hermitian_eigenvalues(&h5);
    let levels = cfg.levels.min(upper.len()).min(pauli.len());
    let scale = pauli[..levels].iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let diff = upper[..levels].iter().zip(&pauli[..levels]).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    let length = (0..grid.dim()).map(|a| grid.extent(a)).fold(0.0, f64::max);
    let w = s.omega_norm();
    let budget = 2.0 * s.mass * scale / (4.0 * s.mass * s.mass * s.c * s.c)
        + (0.5 * s.hbar * w + s.mass * (0.5 * w * length).powi(2)) / scale;
    let h4 = build_hamiltonian(&s, HamiltonianFlags { include_spin: true, include_spin_orbit: false }).minimal_coupling_matrix(&grid);
    let identity = dense::max_abs_diff(&pauli_matrix(&s, &metric, &grid, false)?, &h4);

    write_sparse_triplets(&dirac, 0.0, BufWriter::new(File::create(out.join("dirac_hamiltonian.txt"))?))?;
    write_sparse_triplets(&h5, 0.0, BufWriter::new(File::create(out.join("pauli_hamiltonian.txt"))?))?;
    let fields = effective_fields(&s);
    let series = field_series(&grid, &["h00", "h01", "h02", "h03", "ex", "ey", "ez"], |x| {
        let h = metric.h(&Vector4::new(0.0, x.x, x.y, x.z));
        let e = fields.efield_exact(x);
        Ok(vec![h[(0, 0)], h[(0, 1)], h[(0, 2)], h[(0, 3)], e.x, e.y, e.z])
    })?;
    emit_plot_data(&series, &out.join("metric_fields.csv"))?;

    let rel = if scale > 0.0 { diff / scale } else { diff };
    let mut report = Report::ok(json!({
        "levels": levels,
        "dirac_levels": &upper[..levels],
        "pauli_levels": &pauli[..levels],
        "max_abs_difference": diff,
        "max_relative_difference": rel,
        "error_budget": budget,
        "within_budget": rel <= budget,
        "pauli_without_efield_vs_spin_rotation_hamiltonian": identity,
        "darwin_shift": fields.darwin,
        "grid_points": grid.len(),
    }));
    report.artifacts = vec!["dirac_hamiltonian.txt".into(), "pauli_hamiltonian.txt".into(), "metric_fields.csv".into()];
    Ok(report)
}

fn gauge_vector(spec: &GaugeSpec, c: f64) -> GaugeVector {
    match *spec {
        GaugeSpec::Temporal {
            amplitude,
            wavevector: k,
            phase,
            ..
        } => {
            // Events hold t; the wavevector pairs with x0 = ct.
            let arg = move |e: &Vector4<f64>| k[0] * c * e[0] + k[1] * e[1] + k[2] * e[2] + k[3] * e[3] + phase;
            GaugeVector::temporal(move |e| amplitude * arg(e).sin(), move |e| k * (amplitude * arg(e).cos()))
        }
        GaugeSpec::SpatialRotation { b, .. } => GaugeVector::spatial_rotation(b, c),
    }
}

fn probe_events(lp: &SpacetimeLoop, extra: usize, seed: u64) -> Vec<Vector4<f64>> {
    let ev = lp.events();
    let mut lo = ev[0];
    let mut hi = ev[0];
    for e in ev {
        lo = lo.inf(e);
        hi = hi.sup(e);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ev.to_vec();
    for _ in 0..extra {
        out.push(Vector4::from_fn(|i, _| {
            if hi[i] > lo[i] {
                rng.random_range(lo[i]..hi[i])
            } else {
                lo[i]
            }
        }));
    }
    out
}

fn gauge_check(cfg: &ExperimentConfig) -> CliResult<Report> {
    let spec = cfg.gauge.ok_or_else(|| CliError::config("gauge", "required"))?;
    let lp = match cfg.geometry.as_ref() {
        Some(Geometry::Spatial(p)) => SpacetimeLoop::spatial(p, 0.0),
        Some(Geometry::Spacetime(l)) => l.clone(),
        None => return Err(CliError::config("path", "required")),
    };
    let s = cfg.setup;
    let metric = rotating_metric(&s);
    let probes = match spec {
        GaugeSpec::Temporal { probes, .. } | GaugeSpec::SpatialRotation { probes, .. } => probes,
    };
    let events = probe_events(&lp, probes, cfg.seed);
    let xi = gauge_vector(&spec, s.c);
    let before = weakfield_phase(&lp, &metric, s.mass, s.hbar).value();
    let kind = match spec {
        GaugeSpec::Temporal { .. } => "temporal",
        GaugeSpec::SpatialRotation { .. } => "spatial_rotation",
    };
    let loop_summary = json!({ "events": lp.events().len(), "subdivisions": lp.subdivisions() });

    match gauge_transform_weakfield(&metric, &xi, &events) {
        Ok((shifted, rep)) => {
            let after = weakfield_phase(&lp, &shifted, s.mass, s.hbar).value();
            let delta = after - before;
            Ok(Report::ok(json!({
                "gauge": kind,
                "restricted": true,
                "invariant": delta.abs() < GAUGE_TOLERANCE,
                "tolerance": GAUGE_TOLERANCE,
                "phase_before": before,
                "phase_after": after,
                "phase_delta": delta,
                "probes": rep.probes,
                "max_rest_frame_violation": rep.max_rest_frame_violation,
                "max_shift_error": rep.max_shift_error,
                "loop": loop_summary,
            })))
        }
        Err(e @ CoreError::RestFrameViolation { .. }) => {
            let after = weakfield_phase(&lp, &gauge_transform_unchecked(&metric, &xi), s.mass, s.hbar).value();
            let delta = after - before;
            let violation = events.iter().map(|e| xi.rest_frame_violation(e)).fold(0.0, f64::max);
            Ok(Report {
                result: json!({
                    "gauge": kind,
                    "restricted": false,
                    "invariant": delta.abs() < GAUGE_TOLERANCE,
                    "tolerance": GAUGE_TOLERANCE,
                    "phase_before": before,
                    "phase_after_unchecked": after,
                    "phase_delta": delta,
                    "probes": events.len(),
                    "max_rest_frame_violation": violation,
                    "loop": loop_summary,
                }),
                artifacts: Vec::new(),
                failure: Some(e.into()),
            })
        }
        Err(e) => Err(e.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse;

    #[test]
    fn probes_stay_in_loop_box_and_are_seeded() {
        let lp = SpacetimeLoop::new(vec![
            Vector4::new(0.0, 0.0, 0.0, 0.0),
            Vector4::new(1.0, 2.0, 0.0, 0.0),
            Vector4::new(0.5, 2.0, 3.0, 0.0),
        ])
        .unwrap();
        let a = probe_events(&lp, 10, 5);
        assert_eq!(a, probe_events(&lp, 10, 5));
        assert_ne!(a, probe_events(&lp, 10, 6));
        assert!(a.iter().all(|e| e[0] <= 1.0 && e[1] <= 2.0 && e[2] <= 3.0 && e[3] == 0.0));
    }

    #[test]
    fn temporal_gauge_gradient_matches_value() {
        let spec = GaugeSpec::Temporal {
            amplitude: 0.3,
            wavevector: Vector4::new(0.2, 0.5, -0.7, 0.1),
            phase: 0.4,
            probes: 0,
        };
        let c = 3.0;
        let xi = gauge_vector(&spec, c);
        let e = Vector4::new(0.3, 0.1, -0.2, 0.5);
        let j = xi.jacobian(&e);
        let h = 1e-6;
        for mu in 0..4 {
            let mut d = Vector4::zeros();
            // Time slot holds t, derivative is with respect to ct.
            d[mu] = if mu == 0 { h / c } else { h };
            let fd = (xi.value(&(e + d))[0] - xi.value(&(e - d))[0]) / (2.0 * h);
            assert!((fd - j[(0, mu)]).abs() < 1e-8);
        }
    }

    #[test]
    fn ehrenfest_needs_uniform_samples() {
        let text = r#"
            units = "natural"
            [setup]
            mass = 1.0
            omega = [0.0, 0.0, 1.0]
            [grid]
            dim = 2
            points = 16
            length = 10.0
            [state]
            width = 1.0
            [integrator]
            dt = 0.1
            steps = 10
            record_every = 3
        "#;
        let e = parse(text, Mode::Ehrenfest, None).unwrap_err();
        assert!(e.to_string().contains("integrator.steps"));
        assert!(parse(text, Mode::Propagate, None).is_ok());
    }

    #[test]
    fn spatial_rotation_reports_and_fails() {
        let text = r#"
            units = "natural"
            [setup]
            mass = 1.0
            omega = [0.0, 0.0, 0.3]
            [path]
            vertices = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]
            subdivisions = 8
            [gauge]
            kind = "spatial_rotation"
            b = [0.0, 0.0, 0.05]
        "#;
        let cfg = parse(text, Mode::GaugeCheck, None).unwrap();
        let r = gauge_check(&cfg).unwrap();
        assert_eq!(r.failure.as_ref().map(|e| e.exit_code()), Some(3));
        assert_eq!(r.result["invariant"], json!(false));
        // Discrepancy 2 b A m / hbar for the unit square.
        assert!((r.result["phase_delta"].as_f64().unwrap().abs() - 0.1).abs() < 1e-12);
    }
}
