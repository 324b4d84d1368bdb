use crate::algebra::{LinearMap3, Vec3};
use crate::constfield::SelfForceAffine;
use crate::elastic::ElasticSelfForce;
use crate::params::{ElasticParams, FieldParams};

/// An external acceleration field `f(x, v)`.
pub trait ForceField: Sync {
    fn accel(&self, x: &Vec3, v: &Vec3) -> Vec3;

    /// Analytic `(∂f/∂x, ∂f/∂v)`, when known.
    fn jacobians(&self, _x: &Vec3, _v: &Vec3) -> Option<(LinearMap3, LinearMap3)> {
        None
    }
}

/// Analytic Jacobians if the field provides them, central differences
/// otherwise.
pub fn field_jacobians<F: ForceField + ?Sized>(field: &F, x: &Vec3, v: &Vec3) -> (LinearMap3, LinearMap3) {
    field
        .jacobians(x, v)
        .unwrap_or_else(|| finite_difference_jacobians(field, x, v))
}

/// Central differences with step `max(1e−6, 1e−6·|argument|)` per component.
pub fn finite_difference_jacobians<F: ForceField + ?Sized>(
    field: &F,
    x: &Vec3,
    v: &Vec3,
) -> (LinearMap3, LinearMap3) {
    let column = |wrt_x: bool, k: usize| {
        let arg = if wrt_x { x[k] } else { v[k] };
        let h = (1e-6 * arg.abs()).max(1e-6);
        let mut e = Vec3::zeros();
        e[k] = h;
        let (plus, minus) = if wrt_x {
            (field.accel(&(x + e), v), field.accel(&(x - e), v))
        } else {
            (field.accel(x, &(v + e)), field.accel(x, &(v - e)))
        };
        (plus - minus) / (2.0 * h)
    };
    let dx = LinearMap3::from_columns(&[column(true, 0), column(true, 1), column(true, 2)]);
    let dv = LinearMap3::from_columns(&[column(false, 0), column(false, 1), column(false, 2)]);
    (dx, dv)
}

impl ForceField for FieldParams {
    fn accel(&self, _x: &Vec3, v: &Vec3) -> Vec3 {
        self.force(v)
    }

    fn jacobians(&self, _x: &Vec3, _v: &Vec3) -> Option<(LinearMap3, LinearMap3)> {
        Some((LinearMap3::zeros(), self.cross_map()))
    }
}

/// Isotropic harmonic force `−ω² x`; each component is an independent
/// copy of the one-dimensional oscillator.
impl ForceField for ElasticParams {
    fn accel(&self, x: &Vec3, _v: &Vec3) -> Vec3 {
        -self.omega * self.omega * x
    }

    fn jacobians(&self, _x: &Vec3, _v: &Vec3) -> Option<(LinearMap3, LinearMap3)> {
        Some((
            LinearMap3::identity() * (-self.omega * self.omega),
            LinearMap3::zeros(),
        ))
    }
}

/// A force field given by a closure, without analytic derivatives.
pub struct FnField<F>(pub F);

impl<F> ForceField for FnField<F>
where
    F: Fn(&Vec3, &Vec3) -> Vec3 + Sync,
{
    fn accel(&self, x: &Vec3, v: &Vec3) -> Vec3 {
        (self.0)(x, v)
    }
}

/// A self-force `s(x, v)`.
pub trait SelfForce: Sync {
    fn eval(&self, x: &Vec3, v: &Vec3) -> Vec3;
}

impl<F> SelfForce for F
where
    F: Fn(&Vec3, &Vec3) -> Vec3 + Sync,
{
    fn eval(&self, x: &Vec3, v: &Vec3) -> Vec3 {
        self(x, v)
    }
}

impl SelfForce for SelfForceAffine {
    fn eval(&self, _x: &Vec3, v: &Vec3) -> Vec3 {
        SelfForceAffine::eval(self, v)
    }
}

impl SelfForce for ElasticSelfForce {
    fn eval(&self, x: &Vec3, v: &Vec3) -> Vec3 {
        self.beta * self.omega * self.omega * x - self.alpha * v
    }
}

/// The zero self-force.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoSelfForce;

impl SelfForce for NoSelfForce {
    fn eval(&self, _x: &Vec3, _v: &Vec3) -> Vec3 {
        Vec3::zeros()
    }
}
