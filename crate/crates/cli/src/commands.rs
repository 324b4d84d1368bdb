//! The five subcommands. Each resolves its configuration, computes a
//! [`Report`] and leaves rendering to [`crate::output`].

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use backreaction::constfield::{
    closed_form_coefficients, closed_form_trajectory, coefficients_from_characteristic_root,
    iterate_radiation_term, iterate_solution_general, pde_residual, self_force, SelfForceAffine,
};
use backreaction::dynamics::{
    integrate_lorentz_dirac, integrate_reduced, third_derivative_residual, ForceField, LDState, SelfForce,
    SolverKind, SolverSettings, Termination, Trajectory,
};
use backreaction::elastic::{
    cardano_roots, char_root_conditions, elastic_coefficients, iterate_radiation_term_elastic,
    iterate_solution_elastic, pde_residual_elastic, reduced_solution, ElasticSelfForce,
};
use backreaction::{ElasticParams, FieldParams, IterationStatus, IterationTrace, Vec3};
use clap::ValueEnum;
use serde_json::json;

use crate::config::{Method, RunConfig, System};
use crate::error::CliError;
use crate::output::{Cell, Report};

pub const EXIT_RESIDUAL_FAIL: u8 = 1;
pub const EXIT_NOT_CONVERGED: u8 = 3;
pub const EXIT_BLOWN_UP: u8 = 4;

/// Default bound for residual checks: the algebraic identity tolerance.
const IDENTITY_TOL: f64 = 1e-12;
/// Integrator tolerance used when a residual is measured along a trajectory.
const TRAJECTORY_RESIDUAL_SOLVER_TOL: f64 = 1e-13;
/// Time points used to compare solution iterates with the exact motion.
const COMPARISON_POINTS: usize = 101;
/// Solution-iterate discrepancy treated as divergence, relative to the
/// size of the exact motion.
const SOLUTION_DIVERGENCE: f64 = 1e8;

enum Model {
    Const(FieldParams),
    Elastic(ElasticParams),
}

fn model(cfg: &RunConfig) -> Result<Model, CliError> {
    Ok(match cfg.system {
        System::ConstField => Model::Const(FieldParams::new(cfg.e_vec, cfg.b_vec, cfg.eta)?),
        System::Elastic => Model::Elastic(ElasticParams::new(cfg.omega, cfg.eta)?),
    })
}

fn linspace(from: f64, to: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (to - from) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| if i + 1 == n && n > 1 { to } else { from + step * i as f64 })
}

fn status_exit(status: &IterationStatus) -> u8 {
    if status.is_converged() {
        0
    } else {
        EXIT_NOT_CONVERGED
    }
}

// ---------------------------------------------------------------- coeffs

pub fn coeffs(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut r = Report::new("coeffs", &["quantity", "value"]);
    let push = |r: &mut Report, name: &str, value: f64| r.row(vec![name.into(), value.into()]);
    match model(cfg)? {
        Model::Const(p) => {
            let c = closed_form_coefficients(&p);
            let [rel_beta, rel_alpha] = c.relation_residuals(p.eta);
            let (root_beta, root_alpha) = coefficients_from_characteristic_root(&p);
            for (name, value) in [
                ("phi", c.phi),
                ("beta", c.beta),
                ("alpha", c.alpha),
                ("coupling", c.coupling),
                ("contraction", c.contraction),
                ("quartic_residual", c.quartic_residual()),
                ("relation_residual_beta", rel_beta),
                ("relation_residual_alpha", rel_alpha),
                ("char_root_beta", root_beta),
                ("char_root_alpha", root_alpha),
            ] {
                push(&mut r, name, value);
            }
            r.extra.insert("phi".into(), json!(c.phi));
            r.extra.insert("beta".into(), json!(c.beta));
            r.extra.insert("alpha".into(), json!(c.alpha));
            r.extra.insert(
                "residuals".into(),
                json!({ "quartic": c.quartic_residual(), "relations": [rel_beta, rel_alpha] }),
            );
            r.extra.insert(
                "diagnostics".into(),
                json!({
                    "branch": "vanishes-with-field",
                    "coupling": c.coupling,
                    "contraction": c.contraction,
                    "within_iteration_regime": c.within_iteration_regime(),
                    "char_root_beta": root_beta,
                    "char_root_alpha": root_alpha,
                }),
            );
            r.meta("within_iteration_regime", c.within_iteration_regime());
        }
        Model::Elastic(p) => {
            let c = elastic_coefficients(&p);
            let [rel_beta, cubic] = c.relation_residuals(p.eta);
            let lambda3 = if p.omega == 0.0 { f64::NAN } else { cardano_roots(&p).lambda3 };
            let (root_beta, root_alpha) = match char_root_conditions(&p) {
                Ok(cr) => (cr.beta(p.omega), cr.damping()),
                Err(_) => (0.0, 0.0),
            };
            for (name, value) in [
                ("beta", c.beta),
                ("alpha", c.alpha),
                ("coupling", c.coupling),
                ("contraction", c.contraction),
                ("runaway_rate", lambda3),
                ("cubic_residual", cubic),
                ("relation_residual_beta", rel_beta),
                ("char_root_beta", root_beta),
                ("char_root_alpha", root_alpha),
            ] {
                push(&mut r, name, value);
            }
            r.extra.insert("phi".into(), serde_json::Value::Null);
            r.extra.insert("beta".into(), json!(c.beta));
            r.extra.insert("alpha".into(), json!(c.alpha));
            r.extra
                .insert("residuals".into(), json!({ "cubic": cubic, "relations": [rel_beta, cubic] }));
            r.extra.insert(
                "diagnostics".into(),
                json!({
                    "branch": "vanishes-with-field",
                    "coupling": c.coupling,
                    "contraction": c.contraction,
                    "within_iteration_regime": c.within_iteration_regime(),
                    "runaway_rate": lambda3,
                    "char_root_beta": root_beta,
                    "char_root_alpha": root_alpha,
                }),
            );
            r.meta("within_iteration_regime", c.within_iteration_regime());
        }
    }
    Ok(r)
}

// --------------------------------------------------------------- iterate

/// Largest difference between an iterate and the exact coefficients,
/// with `α` compared through `η α`.
fn coefficient_delta(beta: f64, alpha: f64, constant: &Vec3, exact: (f64, f64, Vec3), eta: f64) -> f64 {
    let (eb, ea, ec) = exact;
    (beta - eb)
        .abs()
        .max(eta * (alpha - ea).abs())
        .max((constant - ec).amax())
}

fn radiation_trace(m: &Model, cfg: &RunConfig) -> Result<(IterationTrace, (f64, f64, Vec3)), CliError> {
    Ok(match m {
        Model::Const(p) => {
            let c = closed_form_coefficients(p);
            (
                iterate_radiation_term(p, cfg.steps, cfg.tol())?,
                (c.beta, c.alpha, self_force(p).constant),
            )
        }
        Model::Elastic(p) => {
            let c = elastic_coefficients(p);
            (
                iterate_radiation_term_elastic(p, cfg.steps, cfg.tol())?,
                (c.beta, c.alpha, Vec3::zeros()),
            )
        }
    })
}

pub fn iterate(cfg: &RunConfig) -> Result<Report, CliError> {
    let m = model(cfg)?;
    match cfg.method.unwrap_or(Method::IterateTerm) {
        Method::IterateTerm => iterate_term(&m, cfg),
        Method::IterateSolution => iterate_solution(&m, cfg),
        other => Err(CliError::Usage(format!(
            "iterate needs --method iterate-term or iterate-solution, got {other}"
        ))),
    }
}

fn iterate_term(m: &Model, cfg: &RunConfig) -> Result<Report, CliError> {
    let (trace, exact) = radiation_trace(m, cfg)?;
    let with_constant = matches!(m, Model::Const(_));
    let columns: &[&str] = if with_constant {
        &["n", "beta", "alpha", "constant_x", "constant_y", "constant_z", "delta"]
    } else {
        &["n", "beta", "alpha", "delta"]
    };
    let mut r = Report::new("iterate", columns);
    for e in &trace.entries {
        let delta = coefficient_delta(e.beta, e.alpha, &e.constant, exact, cfg.eta);
        let mut row: Vec<Cell> = vec![e.step.into(), e.beta.into(), e.alpha.into()];
        if with_constant {
            row.extend(e.constant.iter().map(|&c| Cell::from(c)));
        }
        row.push(delta.into());
        r.row(row);
    }
    r.meta("method", "iterate-term");
    r.meta("exact_beta", exact.0);
    r.meta("exact_alpha", exact.1);
    r.meta("status", trace.status.label());
    r.exit_code = status_exit(&trace.status);
    Ok(r)
}

/// Convergence verdict for a sequence of discrepancies against the exact
/// motion.
fn solution_status(final_delta: f64, scale: f64, tol: f64) -> &'static str {
    if !final_delta.is_finite() || final_delta > SOLUTION_DIVERGENCE * scale {
        "diverged"
    } else if final_delta <= tol * scale {
        "converged"
    } else {
        "max-steps"
    }
}

fn iterate_solution(m: &Model, cfg: &RunConfig) -> Result<Report, CliError> {
    let times: Vec<f64> = linspace(0.0, cfg.t_end, COMPARISON_POINTS).collect();
    let mut r;
    let mut last_delta = 0.0;
    let mut scale: f64 = 1.0;
    match m {
        Model::Const(p) => {
            r = Report::new(
                "iterate",
                &["n", "self_force_x", "self_force_y", "self_force_z", "delta_self_force", "delta_velocity"],
            );
            let exact_s = self_force(p).eval(&cfg.v0);
            let exact_v: Vec<Vec3> = times.iter().map(|&t| closed_form_trajectory(p, &cfg.v0, t)).collect();
            scale = exact_v.iter().fold(scale, |m, v| m.max(v.amax()));
            for (n, it) in iterate_solution_general(p, &cfg.v0, cfg.steps).iter().enumerate() {
                let s = it.read_off_self_force();
                let dv = times
                    .iter()
                    .zip(&exact_v)
                    .map(|(&t, v)| (it.velocity(t) - v).amax())
                    .fold(0.0, f64::max);
                let ds = (s - exact_s).amax();
                last_delta = ds.max(dv);
                r.row(vec![n.into(), s.x.into(), s.y.into(), s.z.into(), ds.into(), dv.into()]);
            }
        }
        Model::Elastic(p) => {
            r = Report::new("iterate", &["n", "self_force", "delta_self_force", "delta_position"]);
            let (x0, v0) = (cfg.x0.x, cfg.v0.x);
            let exact_s = elastic_coefficients(p).self_force(p).eval(x0, v0);
            match iterate_solution_elastic(p, x0, v0, cfg.steps) {
                Ok(iterates) => {
                    let exact_x: Vec<f64> = times.iter().map(|&t| reduced_solution(p, x0, v0, t).0).collect();
                    scale = exact_x.iter().fold(scale, |m, x| m.max(x.abs()));
                    for (n, z) in iterates.iter().enumerate() {
                        let s = p.eta * z.derivative(3, 0.0);
                        let dx = times
                            .iter()
                            .zip(&exact_x)
                            .map(|(&t, x)| (z.position(t) - x).abs())
                            .fold(0.0, f64::max);
                        let ds = (s - exact_s).abs();
                        last_delta = ds.max(dx);
                        r.row(vec![n.into(), s.into(), ds.into(), dx.into()]);
                    }
                }
                // Without a restoring force the free motion is already exact.
                Err(backreaction::Error::FreeParticle) => {
                    r.row(vec![0usize.into(), 0.0.into(), 0.0.into(), 0.0.into()]);
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let status = solution_status(last_delta, scale, cfg.tol());
    r.meta("method", "iterate-solution");
    r.meta("status", status);
    r.exit_code = if status == "converged" { 0 } else { EXIT_NOT_CONVERGED };
    Ok(r)
}

// ------------------------------------------------------------ trajectory

/// Self-force chosen by `--method` for a reduced run.
fn chosen_self_force(m: &Model, cfg: &RunConfig) -> Result<Box<dyn SelfForce>, CliError> {
    let method = cfg.method.unwrap_or(Method::ClosedForm);
    Ok(match (m, method) {
        (Model::Const(p), Method::ClosedForm) => Box::new(self_force(p)),
        (Model::Const(p), Method::Landau) => {
            let bh = p.cross_map();
            Box::new(SelfForceAffine {
                linear: bh * bh * p.eta,
                constant: bh * p.e_vec * p.eta,
            })
        }
        (Model::Elastic(p), Method::ClosedForm) => Box::new(elastic_coefficients(p).self_force(p)),
        (Model::Elastic(p), Method::Landau) => Box::new(ElasticSelfForce::landau(p)),
        (_, Method::IterateTerm) => {
            let (trace, _) = radiation_trace(m, cfg)?;
            let IterationStatus::Converged { beta, alpha, constant } = trace.status else {
                return Err(CliError::NotConverged(format!(
                    "radiation-term iteration {}",
                    trace.status.label()
                )));
            };
            match m {
                Model::Const(p) => {
                    let mut s = SelfForceAffine::from_coefficients(p, beta, alpha);
                    s.constant = constant;
                    Box::new(s)
                }
                Model::Elastic(p) => Box::new(ElasticSelfForce {
                    beta,
                    alpha,
                    omega: p.omega,
                }),
            }
        }
        (_, Method::IterateSolution) => {
            return Err(CliError::Usage(
                "iterate-solution yields motions, not a self-force; use closed-form, landau or iterate-term".into(),
            ))
        }
    })
}

fn solver_settings(cfg: &RunConfig, default: SolverKind, tol: f64) -> SolverSettings {
    let mut s = SolverSettings::new(cfg.solver.unwrap_or(default), tol).with_output_step(cfg.dt);
    if let Some(h) = cfg.fixed_step {
        s = s.with_fixed_step(h);
    }
    s
}

fn termination_meta(r: &mut Report, traj: &Trajectory) {
    r.meta("solver", traj.solver());
    r.meta("samples", traj.samples.len());
    r.meta("termination", traj.termination.label());
    let stop = match traj.termination {
        Termination::Completed => None,
        Termination::Runaway { t }
        | Termination::BlownUp { t }
        | Termination::MaxSteps { t }
        | Termination::StepUnderflow { t } => Some(t),
    };
    if let Some(t) = stop {
        r.meta("termination_time", t);
    }
    r.exit_code = match traj.termination {
        Termination::Completed => 0,
        Termination::Runaway { .. } | Termination::BlownUp { .. } => EXIT_BLOWN_UP,
        Termination::MaxSteps { .. } | Termination::StepUnderflow { .. } => EXIT_NOT_CONVERGED,
    };
}

const XYZ_V: [&str; 7] = ["t", "x", "y", "z", "vx", "vy", "vz"];

pub fn trajectory(cfg: &RunConfig) -> Result<Report, CliError> {
    let m = model(cfg)?;
    let field: &dyn ForceField = match &m {
        Model::Const(p) => p,
        Model::Elastic(p) => p,
    };
    if let Some(a0) = cfg.a0 {
        let settings = solver_settings(cfg, SolverKind::GaussLegendre4, cfg.tol());
        let traj = integrate_lorentz_dirac(field, &LDState::new(cfg.x0, cfg.v0, a0), cfg.eta, cfg.t_end, &settings)?;
        let mut cols = XYZ_V.to_vec();
        cols.extend(["ax", "ay", "az"]);
        let mut r = Report::new("trajectory", &cols);
        for s in &traj.samples {
            let mut row = vec![Cell::from(s.t)];
            row.extend(s.x.iter().chain(s.v.iter()).chain(s.a.iter()).map(|&c| Cell::from(c)));
            r.row(row);
        }
        r.meta("equation", "lorentz-dirac");
        termination_meta(&mut r, &traj);
        return Ok(r);
    }

    let s = chosen_self_force(&m, cfg)?;
    let settings = solver_settings(cfg, SolverKind::DormandPrince45, cfg.tol());
    let traj = integrate_reduced(field, s.as_ref(), &cfg.x0, &cfg.v0, cfg.t_end, &settings)?;
    let mut cols = XYZ_V.to_vec();
    cols.push("diff_exact");
    let mut r = Report::new("trajectory", &cols);
    let mut worst: f64 = 0.0;
    for smp in &traj.samples {
        // Distance to the exact motion: velocity for the constant field,
        // position and velocity for the oscillator.
        let diff = match &m {
            Model::Const(p) => (smp.v - closed_form_trajectory(p, &cfg.v0, smp.t)).amax(),
            Model::Elastic(p) => (0..3)
                .map(|i| {
                    let (x, v) = reduced_solution(p, cfg.x0[i], cfg.v0[i], smp.t);
                    (smp.x[i] - x).abs().max((smp.v[i] - v).abs())
                })
                .fold(0.0, f64::max),
        };
        worst = worst.max(diff);
        let mut row = vec![Cell::from(smp.t)];
        row.extend(smp.x.iter().chain(smp.v.iter()).map(|&c| Cell::from(c)));
        row.push(diff.into());
        r.row(row);
    }
    r.meta("equation", "reduced");
    r.meta("method", cfg.method.unwrap_or(Method::ClosedForm).to_string());
    r.meta("max_diff_exact", worst);
    termination_meta(&mut r, &traj);
    Ok(r)
}

// -------------------------------------------------------------- residual

pub fn residual(cfg: &RunConfig, along_trajectory: bool) -> Result<Report, CliError> {
    let m = model(cfg)?;
    let bound = cfg.tol.unwrap_or(IDENTITY_TOL);
    let s = chosen_self_force(&m, cfg)?;
    let (mut r, max, mean) = if along_trajectory {
        let field: &dyn ForceField = match &m {
            Model::Const(p) => p,
            Model::Elastic(p) => p,
        };
        let settings = solver_settings(cfg, SolverKind::DormandPrince45, TRAJECTORY_RESIDUAL_SOLVER_TOL);
        let traj = integrate_reduced(field, s.as_ref(), &cfg.x0, &cfg.v0, cfg.t_end, &settings)?;
        let res = third_derivative_residual(&traj, s.as_ref(), cfg.eta)?;
        let mut r = Report::new("residual", &["samples", "max_residual"]);
        r.row(vec![traj.samples.len().into(), res.into()]);
        r.meta("domain", "trajectory");
        (r, res, f64::NAN)
    } else {
        grid_residual(&m, s.as_ref())
    };
    let pass = max <= bound;
    r.meta("method", cfg.method.unwrap_or(Method::ClosedForm).to_string());
    r.meta("max_residual", max);
    if mean.is_finite() {
        r.meta("mean_residual", mean);
    }
    r.meta("bound", bound);
    r.meta("status", if pass { "pass" } else { "fail" });
    r.exit_code = if pass { 0 } else { EXIT_RESIDUAL_FAIL };
    Ok(r)
}

/// PDE residual of the chosen self-force on a fixed grid over `[−1, 1]`:
/// 5³ velocities for the constant field, 11² phase-space points for the
/// oscillator.
fn grid_residual(m: &Model, s: &dyn SelfForce) -> (Report, f64, f64) {
    let mut values = Vec::new();
    let r = match m {
        Model::Const(p) => {
            let mut r = Report::new("residual", &["vx", "vy", "vz", "residual"]);
            // The constant-field PDE involves the linear part explicitly, so
            // recover it by probing the affine self-force.
            let affine = affine_of(s);
            for vx in linspace(-1.0, 1.0, 5) {
                for vy in linspace(-1.0, 1.0, 5) {
                    for vz in linspace(-1.0, 1.0, 5) {
                        let v = Vec3::new(vx, vy, vz);
                        let res = pde_residual(&affine, p, &v).norm();
                        values.push(res);
                        r.row(vec![vx.into(), vy.into(), vz.into(), res.into()]);
                    }
                }
            }
            r
        }
        Model::Elastic(p) => {
            let mut r = Report::new("residual", &["x", "v", "residual"]);
            let (beta, alpha) = elastic_coefficients_of(s, p);
            for x in linspace(-1.0, 1.0, 11) {
                for v in linspace(-1.0, 1.0, 11) {
                    let res = pde_residual_elastic(beta, alpha, p, x, v).abs();
                    values.push(res);
                    r.row(vec![x.into(), v.into(), res.into()]);
                }
            }
            r
        }
    };
    let max = values.iter().copied().fold(0.0, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (r, max, mean)
}

/// Columns of an affine, position-independent self-force.
fn affine_of(s: &dyn SelfForce) -> SelfForceAffine {
    let x = Vec3::zeros();
    let constant = s.eval(&x, &Vec3::zeros());
    let col = |e: Vec3| s.eval(&x, &e) - constant;
    SelfForceAffine {
        linear: backreaction::LinearMap3::from_columns(&[col(Vec3::x()), col(Vec3::y()), col(Vec3::z())]),
        constant,
    }
}

/// `(β, α)` of a linear oscillator self-force `βω²x − αv`, read from its
/// first component.
fn elastic_coefficients_of(s: &dyn SelfForce, p: &ElasticParams) -> (f64, f64) {
    let alpha = -s.eval(&Vec3::zeros(), &Vec3::x()).x;
    let w2 = p.omega * p.omega;
    let beta = if w2 == 0.0 {
        0.0
    } else {
        s.eval(&Vec3::x(), &Vec3::zeros()).x / w2
    };
    (beta, alpha)
}

// ----------------------------------------------------------------- sweep

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Eta,
    Omega,
    /// Magnitude of the magnetic vector, keeping its direction (z when
    /// the configured vector is zero).
    B,
}

pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub count: usize,
    pub workers: usize,
}

/// Coefficients and radiation-term iteration status across a parameter
/// range. Points are computed by a pool of scoped worker threads; rows are
/// collected by the calling thread and emitted in parameter order.
pub fn sweep(cfg: &RunConfig, spec: &SweepSpec) -> Result<Report, CliError> {
    if spec.count == 0 {
        return Err(CliError::Usage("count must be at least 1".into()));
    }
    if spec.param == SweepParam::Omega && cfg.system != System::Elastic {
        return Err(CliError::Usage("omega sweeps need --system elastic".into()));
    }
    if spec.param == SweepParam::B && cfg.system != System::ConstField {
        return Err(CliError::Usage("b sweeps need --system const-field".into()));
    }
    let values: Vec<f64> = linspace(spec.from, spec.to, spec.count).collect();
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    let workers = spec.workers.clamp(1, values.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, values) = (&next, &values);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&value) = values.get(i) else { break };
                if tx.send((i, sweep_point(cfg, spec.param, value))).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);
    let mut results: Vec<(usize, Result<Vec<Cell>, CliError>)> = rx.into_iter().collect();
    results.sort_by_key(|(i, _)| *i);

    let mut r = Report::new(
        "sweep",
        &["value", "coupling", "beta", "alpha", "contraction", "iteration_status", "iteration_steps", "delta"],
    );
    for (_, row) in results {
        r.row(row?);
    }
    r.meta("param", spec.param.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default());
    r.meta("points", values.len());
    Ok(r)
}

fn sweep_point(cfg: &RunConfig, param: SweepParam, value: f64) -> Result<Vec<Cell>, CliError> {
    let mut point = cfg.clone();
    match param {
        SweepParam::Eta => point.eta = value,
        SweepParam::Omega => point.omega = value,
        SweepParam::B => {
            let dir = cfg.b_vec.try_normalize(0.0).unwrap_or_else(Vec3::z);
            point.b_vec = dir * value;
        }
    }
    let m = model(&point)?;
    let (coupling, contraction) = match &m {
        Model::Const(p) => {
            let c = closed_form_coefficients(p);
            (c.coupling, c.contraction)
        }
        Model::Elastic(p) => {
            let c = elastic_coefficients(p);
            (c.coupling, c.contraction)
        }
    };
    let (trace, exact) = radiation_trace(&m, &point)?;
    let last = trace.last();
    let delta = coefficient_delta(last.beta, last.alpha, &last.constant, exact, point.eta);
    Ok(vec![
        value.into(),
        coupling.into(),
        exact.0.into(),
        exact.1.into(),
        contraction.into(),
        trace.status.label().into(),
        trace.entries.len().into(),
        delta.into(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_both_ends() {
        let v: Vec<f64> = linspace(-1.0, 1.0, 5).collect();
        assert_eq!(v, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1).collect::<Vec<_>>(), vec![2.0]);
    }

    #[test]
    fn affine_probe_recovers_the_exact_self_force() {
        let p = FieldParams::new(Vec3::new(0.1, 0.2, 0.0), Vec3::new(0.0, 0.3, 0.4), 1.0).unwrap();
        let s = self_force(&p);
        let probed = affine_of(&s);
        assert!((probed.linear - s.linear).amax() < 1e-15);
        assert!((probed.constant - s.constant).amax() < 1e-15);
    }

    #[test]
    fn solution_status_thresholds() {
        assert_eq!(solution_status(1e-12, 1.0, 1e-10), "converged");
        assert_eq!(solution_status(1e-3, 1.0, 1e-10), "max-steps");
        assert_eq!(solution_status(f64::NAN, 1.0, 1e-10), "diverged");
        assert_eq!(solution_status(1e9, 1.0, 1e-10), "diverged");
    }
}
