//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a flat `Float64Array` of fixed-width rows so the
//! page can plot without parsing anything. Row layouts are listed on each
//! function.

use backreaction::constfield::{
    closed_form_coefficients, closed_form_trajectory, iterate_radiation_term, SelfForceAffine,
};
use backreaction::dynamics::{integrate_reduced, SolverKind, SolverSettings};
use backreaction::elastic::{elastic_coefficients, iterate_radiation_term_elastic};
use backreaction::{ElasticParams, FieldParams, IterationTrace, Vec3};
use wasm_bindgen::prelude::*;

fn is_elastic(system: &str) -> Result<bool, String> {
    match system {
        "const-field" => Ok(false),
        "elastic" => Ok(true),
        other => Err(format!("unknown system '{other}'")),
    }
}

/// Rows `[coupling, β, ηα, contraction]` for `n` couplings on `[0, k_max]`.
pub fn coefficient_curves_rows(system: &str, k_max: f64, n: usize) -> Result<Vec<f64>, String> {
    let elastic = is_elastic(system)?;
    if !(k_max > 0.0 && k_max.is_finite()) || n < 2 {
        return Err("need k_max > 0 and at least two points".into());
    }
    let mut out = Vec::with_capacity(4 * n);
    for i in 0..n {
        let k = k_max * i as f64 / (n - 1) as f64;
        // η = 1 loses nothing: the curves depend on the coupling only.
        let (beta, eta_alpha, contraction) = if elastic {
            let c = elastic_coefficients(&ElasticParams::new(k, 1.0).map_err(|e| e.to_string())?);
            (c.beta, c.alpha, c.contraction)
        } else {
            let p = FieldParams::magnetic(Vec3::new(0.0, 0.0, k), 1.0).map_err(|e| e.to_string())?;
            let c = closed_form_coefficients(&p);
            (c.beta, c.alpha, c.contraction)
        };
        out.extend([k, beta, eta_alpha, contraction]);
    }
    Ok(out)
}

/// Rows `[t, vx, vy, vx_landau, vy_landau]` for a charge starting with unit
/// speed across a magnetic field of coupling `eta_b` (η = 1): the exact
/// reduced motion next to the motion under the Landau self-force `η B̂² v`.
pub fn velocity_paths_rows(eta_b: f64, t_end: f64, n: usize) -> Result<Vec<f64>, String> {
    if !(t_end > 0.0 && t_end.is_finite()) || n < 2 {
        return Err("need t_end > 0 and at least two samples".into());
    }
    let p = FieldParams::magnetic(Vec3::new(0.0, 0.0, eta_b), 1.0).map_err(|e| e.to_string())?;
    let bh = p.cross_map();
    let landau = SelfForceAffine {
        linear: bh * bh * p.eta,
        constant: Vec3::zeros(),
    };
    let v0 = Vec3::x();
    let dt = t_end / (n - 1) as f64;
    let settings = SolverSettings::new(SolverKind::DormandPrince45, 1e-10).with_output_step(dt);
    let traj = integrate_reduced(&p, &landau, &Vec3::zeros(), &v0, t_end, &settings).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(5 * traj.samples.len());
    for s in &traj.samples {
        let exact = closed_form_trajectory(&p, &v0, s.t);
        out.extend([s.t, exact.x, exact.y, s.v.x, s.v.y]);
    }
    Ok(out)
}

fn radiation_trace(system: &str, coupling: f64, steps: usize) -> Result<IterationTrace, String> {
    if is_elastic(system)? {
        let p = ElasticParams::new(coupling, 1.0).map_err(|e| e.to_string())?;
        iterate_radiation_term_elastic(&p, steps, 1e-10).map_err(|e| e.to_string())
    } else {
        let p = FieldParams::magnetic(Vec3::new(0.0, 0.0, coupling), 1.0).map_err(|e| e.to_string())?;
        iterate_radiation_term(&p, steps, 1e-10).map_err(|e| e.to_string())
    }
}

/// Rows `[n, βₙ, ηαₙ]` of the radiation-term iteration at the given
/// coupling (η = 1), stopping early on convergence, a cycle or divergence.
pub fn radiation_iteration_rows(system: &str, coupling: f64, steps: usize) -> Result<Vec<f64>, String> {
    let trace = radiation_trace(system, coupling, steps)?;
    Ok(trace
        .entries
        .iter()
        .flat_map(|e| [e.step as f64, e.beta, e.alpha])
        .collect())
}

#[wasm_bindgen]
pub fn coefficient_curves(system: &str, k_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    coefficient_curves_rows(system, k_max, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn velocity_paths(eta_b: f64, t_end: f64, n: usize) -> Result<Vec<f64>, JsError> {
    velocity_paths_rows(eta_b, t_end, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn radiation_iteration(system: &str, coupling: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    radiation_iteration_rows(system, coupling, steps).map_err(|e| JsError::new(&e))
}

/// Status label of the same iteration, e.g. `"oscillating period=2"`.
#[wasm_bindgen]
pub fn radiation_iteration_status(system: &str, coupling: f64, steps: usize) -> Result<String, JsError> {
    radiation_trace(system, coupling, steps)
        .map(|t| t.status.label())
        .map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_start_at_zero_and_grow() {
        for system in ["const-field", "elastic"] {
            let rows = coefficient_curves_rows(system, 1.0, 11).unwrap();
            assert_eq!(rows.len(), 44);
            assert_eq!(&rows[..3], &[0.0, 0.0, 0.0]);
            let betas: Vec<f64> = rows.chunks(4).map(|r| r[1]).collect();
            assert!(betas.windows(2).all(|w| w[1] > w[0]), "{system}");
        }
    }

    #[test]
    fn constant_field_curve_matches_golden_ratio_point() {
        let rows = coefficient_curves_rows("const-field", 0.5, 2).unwrap();
        // At ηb = 1/2, φ = 2/(1 + √5) and β = 1 − √φ.
        let phi = 2.0 / (1.0 + 5f64.sqrt());
        assert!((rows[5] - (1.0 - phi.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn landau_path_drifts_from_exact_path() {
        let rows = velocity_paths_rows(0.5, 10.0, 101).unwrap();
        assert_eq!(rows.len(), 5 * 101);
        assert_eq!(&rows[..5], &[0.0, 1.0, 0.0, 1.0, 0.0]);
        let last = &rows[rows.len() - 5..];
        let gap = ((last[1] - last[3]).powi(2) + (last[2] - last[4]).powi(2)).sqrt();
        assert!(gap > 1e-3, "{gap}");
    }

    #[test]
    fn iteration_trace_and_status_agree() {
        let rows = radiation_iteration_rows("elastic", 0.5, 200).unwrap();
        assert_eq!(rows.len() % 3, 0);
        assert_eq!(radiation_trace("elastic", 0.5, 200).unwrap().status.label(), "converged");
        assert_eq!(
            radiation_trace("const-field", 1.0, 200).unwrap().status.label(),
            "oscillating period=2"
        );
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(coefficient_curves_rows("plasma", 1.0, 5).is_err());
        assert!(coefficient_curves_rows("elastic", 0.0, 5).is_err());
        assert!(velocity_paths_rows(0.5, -1.0, 5).is_err());
        assert!(radiation_iteration_rows("elastic", -1.0, 5).is_err());
    }
}
