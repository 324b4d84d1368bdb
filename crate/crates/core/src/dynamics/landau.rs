use super::field::{field_jacobians, ForceField, SelfForce};
use crate::algebra::Vec3;

/// First-order reduction `ŝ₁(x, v) = η [(∂f/∂x) v + (∂f/∂v) f(x, v)]`,
/// i.e. `η` times the jerk obtained by differentiating `f` along the
/// unperturbed motion.
pub struct LandauSelfForce<'a, F: ?Sized> {
    field: &'a F,
    eta: f64,
}

pub fn landau_first_approximation<F: ForceField + ?Sized>(field: &F, eta: f64) -> LandauSelfForce<'_, F> {
    LandauSelfForce { field, eta }
}

impl<F: ForceField + ?Sized> SelfForce for LandauSelfForce<'_, F> {
    fn eval(&self, x: &Vec3, v: &Vec3) -> Vec3 {
        let (dx, dv) = field_jacobians(self.field, x, v);
        (dx * v + dv * self.field.accel(x, v)) * self.eta
    }
}
