use nalgebra::SVector;

use super::field::{ForceField, SelfForce};
use super::ode::{integrate, SolverSettings};
use super::{Sample, Trajectory, TrajectoryKind};
use crate::algebra::{is_finite_vec, Vec3};
use crate::error::{Error, Result};

/// Integrates `ẋ = v, v̇ = f(x, v) + s(x, v)` on `[0, t_end]`.
pub fn integrate_reduced<F: ForceField + ?Sized, S: SelfForce + ?Sized>(
    field: &F,
    self_force: &S,
    x0: &Vec3,
    v0: &Vec3,
    t_end: f64,
    settings: &SolverSettings,
) -> Result<Trajectory> {
    if !(is_finite_vec(x0) && is_finite_vec(v0)) {
        return Err(Error::NonFinite("initial state"));
    }
    let accel = |x: &Vec3, v: &Vec3| field.accel(x, v) + self_force.eval(x, v);
    let split = |y: &SVector<f64, 6>| (Vec3::new(y[0], y[1], y[2]), Vec3::new(y[3], y[4], y[5]));
    let rhs = |_t: f64, y: &SVector<f64, 6>| {
        let (x, v) = split(y);
        let a = accel(&x, &v);
        SVector::<f64, 6>::from_iterator(v.iter().chain(a.iter()).copied())
    };
    let y0 = SVector::<f64, 6>::from_iterator(x0.iter().chain(v0.iter()).copied());
    let raw = integrate(rhs, y0, t_end, settings, |_, _| None)?;
    Ok(Trajectory {
        kind: TrajectoryKind::Reduced,
        samples: raw
            .samples
            .iter()
            .map(|(t, y)| {
                let (x, v) = split(y);
                Sample { t: *t, x, v, a: accel(&x, &v) }
            })
            .collect(),
        settings: *settings,
        termination: raw.termination,
    })
}
