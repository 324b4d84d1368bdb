//! Direct integration of the equations of motion.
//!
//! [`integrate_lorentz_dirac`] solves the third-order system
//! `ẋ = v, v̇ = a, ȧ = (a − f(x, v))/η`, whose generic solutions run away at
//! a rate of order `1/η`; [`integrate_reduced`] solves the second-order
//! equation `v̇ = f(x, v) + s(x, v)` for a given self-force.

mod field;
mod landau;
mod lorentz_dirac;
mod ode;
mod reduced;
mod residual;

pub use field::{field_jacobians, finite_difference_jacobians, FnField, ForceField, NoSelfForce, SelfForce};
pub use landau::{landau_first_approximation, LandauSelfForce};
pub use lorentz_dirac::{
    integrate_lorentz_dirac, runaway_growth_rate, tracking_window, LDState, RUNAWAY_FACTOR,
};
pub use ode::{SolverKind, SolverSettings, Termination};
pub use reduced::integrate_reduced;
pub use residual::third_derivative_residual;

use crate::algebra::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: Vec3,
    pub v: Vec3,
    /// Acceleration: a state variable of third-order runs, `f + s` for
    /// reduced runs.
    pub a: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    Reduced,
    LorentzDirac,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub samples: Vec<Sample>,
    pub settings: SolverSettings,
    pub termination: Termination,
}

impl Trajectory {
    pub fn solver(&self) -> &'static str {
        self.settings.kind.name()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory holds the initial sample")
    }

    /// Sample spacing of the output grid.
    pub fn output_step(&self) -> f64 {
        self.settings.output_step
    }
}
