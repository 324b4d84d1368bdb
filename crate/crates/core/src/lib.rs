//! Radiation back-reaction as a second-order equation of motion.
//!
//! The self-force of a radiating, nonrelativistic point charge is sought as
//! a function `s(x, v)` of position and velocity, so that the physical
//! motions obey `v̇ = f(x, v) + s(x, v)` while still satisfying the
//! third-order Lorentz–Dirac equality `s = η · jerk` along every solution.
//!
//! Everything is expressed in per-mass ("reduced") variables: the external
//! force enters as an acceleration field, and `η = (2/3) q² / (m c³)` is the
//! only remnant of charge, mass and the speed of light.
//!
//! Three routes to the self-force are implemented and cross-checked:
//!
//! * the closed-form solution of the self-force PDE ([`constfield::self_force`],
//!   [`elastic::elastic_coefficients`]),
//! * fixed-point iteration of the radiation term
//!   ([`constfield::iterate_radiation_term`], [`elastic::iterate_radiation_term_elastic`]),
//! * iteration of the solution with exact polynomial envelopes
//!   ([`constfield::iterate_solution_envelopes`], [`elastic::iterate_solution_elastic`]).
//!
//! The [`dynamics`] module integrates both the reduced second-order equation
//! and the raw third-order Lorentz–Dirac equation, which exhibits runaway
//! solutions off the critical manifold.

pub mod algebra;
pub mod constfield;
pub mod dynamics;
pub mod elastic;
mod error;
pub mod fit;
pub mod iteration;
pub mod params;
pub mod poly;
pub mod roots;

pub use algebra::{LinearMap3, Vec3};
pub use error::{Error, Result};
pub use iteration::{IterationEntry, IterationStatus, IterationTrace};
pub use params::{ElasticParams, FieldParams, Tolerances};
pub use poly::{Coefficient, Polynomial};
