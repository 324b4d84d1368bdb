use nalgebra::SVector;

use super::field::ForceField;
use super::ode::{integrate, SolverSettings, Termination};
use super::{Sample, Trajectory, TrajectoryKind};
use crate::algebra::{is_finite_vec, Vec3};
use crate::error::{Error, Result};
use crate::fit::fit_exponential_rate;

/// A run is declared a runaway once `|a|` exceeds this multiple of the
/// initial force magnitude (or of 1 when the initial force vanishes).
pub const RUNAWAY_FACTOR: f64 = 1e12;

/// Position, velocity and acceleration at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LDState {
    pub t: f64,
    pub x: Vec3,
    pub v: Vec3,
    pub a: Vec3,
}

impl LDState {
    pub fn new(x: Vec3, v: Vec3, a: Vec3) -> Self {
        LDState { t: 0.0, x, v, a }
    }
}

/// Integrates `ẋ = v, v̇ = a, ȧ = (a − f(x, v))/η` from `s0` up to `t_end`.
///
/// Stops early with [`Termination::Runaway`] when `|a|` exceeds
/// [`RUNAWAY_FACTOR`] times `|f(x₀, v₀)|`.
pub fn integrate_lorentz_dirac<F: ForceField + ?Sized>(
    field: &F,
    s0: &LDState,
    eta: f64,
    t_end: f64,
    settings: &SolverSettings,
) -> Result<Trajectory> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::invalid("eta", format!("must be positive, got {eta}")));
    }
    if !(s0.t.is_finite() && is_finite_vec(&s0.x) && is_finite_vec(&s0.v) && is_finite_vec(&s0.a)) {
        return Err(Error::NonFinite("initial state"));
    }
    let f0 = field.accel(&s0.x, &s0.v).norm();
    let threshold = RUNAWAY_FACTOR * if f0 > 0.0 { f0 } else { 1.0 };

    let split = |y: &SVector<f64, 9>| {
        (
            Vec3::new(y[0], y[1], y[2]),
            Vec3::new(y[3], y[4], y[5]),
            Vec3::new(y[6], y[7], y[8]),
        )
    };
    let rhs = |_t: f64, y: &SVector<f64, 9>| {
        let (x, v, a) = split(y);
        let jerk = (a - field.accel(&x, &v)) / eta;
        SVector::<f64, 9>::from_iterator(v.iter().chain(a.iter()).chain(jerk.iter()).copied())
    };
    let y0 = SVector::<f64, 9>::from_iterator(s0.x.iter().chain(s0.v.iter()).chain(s0.a.iter()).copied());
    let raw = integrate(rhs, y0, (t_end - s0.t).max(0.0), settings, |t, y| {
        let (_, _, a) = split(y);
        (a.norm() > threshold).then_some(Termination::Runaway { t: s0.t + t })
    })?;

    let shift = |term: Termination| match term {
        Termination::Completed | Termination::Runaway { .. } => term,
        Termination::BlownUp { t } => Termination::BlownUp { t: s0.t + t },
        Termination::MaxSteps { t } => Termination::MaxSteps { t: s0.t + t },
        Termination::StepUnderflow { t } => Termination::StepUnderflow { t: s0.t + t },
    };
    Ok(Trajectory {
        kind: TrajectoryKind::LorentzDirac,
        samples: raw
            .samples
            .iter()
            .map(|(t, y)| {
                let (x, v, a) = split(y);
                Sample { t: s0.t + t, x, v, a }
            })
            .collect(),
        settings: *settings,
        termination: shift(raw.termination),
    })
}

/// Exponential growth rate of `|a|` fitted over the last decade of growth
/// before the end of the run.
pub fn runaway_growth_rate(traj: &Trajectory) -> Option<f64> {
    let last = traj.last().a.norm();
    let window: Vec<&Sample> = traj
        .samples
        .iter()
        .rev()
        .take_while(|s| s.a.norm() >= 0.1 * last)
        .collect();
    let ts: Vec<f64> = window.iter().rev().map(|s| s.t).collect();
    let ys: Vec<f64> = window.iter().rev().map(|s| s.a.norm()).collect();
    fit_exponential_rate(&ts, &ys)
}

/// Duration over which a run started on the critical manifold is expected
/// to stay within `1e−6` of the reduced solution when integrated with local
/// tolerance `tol`: the integration error, seeded at `tol`, may grow at up
/// to the runaway rate, and a factor 4 is kept in reserve for rates above
/// `1/η`.
pub fn tracking_window(eta: f64, tol: f64) -> f64 {
    (eta * (1e-6 / tol).ln() / 4.0).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::field::FnField;
    use crate::dynamics::ode::SolverKind;
    use crate::elastic::{cardano_roots, elastic_coefficients, reduced_solution};
    use crate::params::ElasticParams;

    fn gl4(tol: f64) -> SolverSettings {
        SolverSettings::new(SolverKind::GaussLegendre4, tol)
    }

    #[test]
    fn free_particle_on_the_manifold_coasts() {
        let field = FnField(|_: &Vec3, _: &Vec3| Vec3::zeros());
        let v0 = Vec3::new(0.3, -0.2, 1.0);
        let traj = integrate_lorentz_dirac(&field, &LDState::new(Vec3::zeros(), v0, Vec3::zeros()), 1.0, 5.0, &gl4(1e-10)).unwrap();
        assert_eq!(traj.termination, Termination::Completed);
        for s in &traj.samples {
            assert_eq!(s.a, Vec3::zeros());
            assert_eq!(s.v, v0);
        }
    }

    #[test]
    fn perturbed_start_runs_away_at_the_real_root() {
        let params = ElasticParams::new(0.5, 1.0).unwrap();
        let c = elastic_coefficients(&params);
        let (x0, v0) = (Vec3::new(1.0, 0.0, 0.0), Vec3::zeros());
        let a0 = Vec3::new(-(1.0 - c.beta) * 0.25, 0.0, 0.0) + Vec3::x() * 1e-6;
        let traj = integrate_lorentz_dirac(&params, &LDState::new(x0, v0, a0), 1.0, 100.0, &gl4(1e-10)).unwrap();
        assert!(matches!(traj.termination, Termination::Runaway { .. }));
        let rate = runaway_growth_rate(&traj).unwrap();
        let lambda3 = cardano_roots(&params).lambda3;
        assert!((rate - lambda3).abs() < 1e-3 * lambda3, "{rate} vs {lambda3}");
    }

    #[test]
    fn start_on_the_manifold_tracks_reduced_solution() {
        let params = ElasticParams::new(0.5, 1.0).unwrap();
        let c = elastic_coefficients(&params);
        let tol = 1e-12;
        let a0 = Vec3::x() * (-(1.0 - c.beta) * 0.25);
        let window = tracking_window(1.0, tol);
        let traj = integrate_lorentz_dirac(&params, &LDState::new(Vec3::x(), Vec3::zeros(), a0), 1.0, window, &gl4(tol)).unwrap();
        assert_eq!(traj.termination, Termination::Completed);
        for s in &traj.samples {
            let (x, v) = reduced_solution(&params, 1.0, 0.0, s.t);
            assert!((s.x.x - x).abs() < 1e-6 && (s.v.x - v).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_non_finite_start() {
        let field = FnField(|_: &Vec3, _: &Vec3| Vec3::zeros());
        let bad = LDState::new(Vec3::new(f64::NAN, 0.0, 0.0), Vec3::zeros(), Vec3::zeros());
        assert!(integrate_lorentz_dirac(&field, &bad, 1.0, 1.0, &gl4(1e-8)).is_err());
        let good = LDState::new(Vec3::zeros(), Vec3::zeros(), Vec3::zeros());
        assert!(integrate_lorentz_dirac(&field, &good, 0.0, 1.0, &gl4(1e-8)).is_err());
    }
}
