//! Reduced physical parameter sets.

use crate::algebra::{cross_map, perpendicular_projector, LinearMap3, Vec3};
use crate::error::{Error, Result};

/// Constant electric and magnetic field in per-mass units:
/// `f(v) = ê + B̂ v` with `ê = q E / m`, `B̂ = (q/m)(−B×)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    pub e_vec: Vec3,
    pub b_vec: Vec3,
    pub eta: f64,
}

impl FieldParams {
    pub fn new(e_vec: Vec3, b_vec: Vec3, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::invalid("eta", format!("must be positive, got {eta}")));
        }
        if !e_vec.iter().chain(b_vec.iter()).all(|c| c.is_finite()) {
            return Err(Error::NonFinite("field vector"));
        }
        Ok(FieldParams { e_vec, b_vec, eta })
    }

    /// Pure magnetic field along `b_vec`.
    pub fn magnetic(b_vec: Vec3, eta: f64) -> Result<Self> {
        Self::new(Vec3::zeros(), b_vec, eta)
    }

    /// Magnitude of the magnetic frequency vector.
    pub fn b(&self) -> f64 {
        self.b_vec.norm()
    }

    /// Dimensionless coupling `η b`.
    pub fn coupling(&self) -> f64 {
        self.eta * self.b()
    }

    pub fn cross_map(&self) -> LinearMap3 {
        cross_map(&self.b_vec)
    }

    /// Projector onto the plane orthogonal to the magnetic field, or `None`
    /// when the field vanishes.
    pub fn projector(&self) -> Option<LinearMap3> {
        perpendicular_projector(&self.b_vec).ok()
    }

    /// External acceleration `ê + B̂ v`.
    pub fn force(&self, v: &Vec3) -> Vec3 {
        self.e_vec + self.cross_map() * v
    }
}

/// One-dimensional harmonic force `f(x) = −ω² x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticParams {
    pub omega: f64,
    pub eta: f64,
}

impl ElasticParams {
    pub fn new(omega: f64, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::invalid("eta", format!("must be positive, got {eta}")));
        }
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::invalid(
                "omega",
                format!("must be non-negative, got {omega}"),
            ));
        }
        Ok(ElasticParams { omega, eta })
    }

    /// Dimensionless coupling `η ω`.
    pub fn coupling(&self) -> f64 {
        self.eta * self.omega
    }
}

/// Tolerances shared by the iteration drivers and identity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative step size below which a fixed-point iteration is converged.
    pub fixed_point: f64,
    /// Relative residual accepted for algebraic identities.
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            fixed_point: 1e-10,
            identity: 1e-12,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_eta() {
        assert!(FieldParams::magnetic(Vec3::z(), 0.0).is_err());
        assert!(ElasticParams::new(0.5, -1.0).is_err());
        assert!(ElasticParams::new(-0.5, 1.0).is_err());
        assert!(ElasticParams::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn projector_identities() {
        let params = FieldParams::magnetic(Vec3::new(0.3, -0.4, 1.1), 1.0).unwrap();
        let p = params.projector().unwrap();
        let bh = params.cross_map();
        let b2 = params.b() * params.b();
        let id = LinearMap3::identity();
        assert!((p * p - p).norm() < 1e-14);
        assert!(((id - p) * bh).norm() < 1e-14);
        assert!((bh * p - bh).norm() < 1e-14);
        assert!((p * bh - bh).norm() < 1e-14);
        assert!((bh * bh + p * b2).norm() < 1e-14);
    }
}
