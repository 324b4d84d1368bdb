//! Three-vectors, 3×3 linear maps and the magnetic projector algebra.

use crate::error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type LinearMap3 = nalgebra::Matrix3<f64>;

/// The antisymmetric map `B̂ = (−b×)`, i.e. `B̂ v = v × b`.
pub fn cross_map(b_vec: &Vec3) -> LinearMap3 {
    let (bx, by, bz) = (b_vec.x, b_vec.y, b_vec.z);
    LinearMap3::new(
        0.0, bz, -by, //
        -bz, 0.0, bx, //
        by, -bx, 0.0,
    )
}

/// Orthogonal projector onto the plane perpendicular to `b_vec`.
pub fn perpendicular_projector(b_vec: &Vec3) -> Result<LinearMap3> {
    let b2 = b_vec.norm_squared();
    if b2 == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    Ok(LinearMap3::identity() - b_vec * b_vec.transpose() / b2)
}

/// Splits `v` into its components parallel and perpendicular to `b_vec`:
/// `((I − P) v, P v)`.
pub fn project_parallel_perp(v: &Vec3, b_vec: &Vec3) -> Result<(Vec3, Vec3)> {
    let b2 = b_vec.norm_squared();
    if b2 == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    let parallel = b_vec * (b_vec.dot(v) / b2);
    Ok((parallel, v - parallel))
}

/// `exp(s B̂)` for the cross map of `b_vec`, using `B̂² = −b² P`:
/// `(I − P) + cos(b s) P + sin(b s)/b · B̂`.
pub fn cross_map_exp(b_vec: &Vec3, s: f64) -> LinearMap3 {
    let b = b_vec.norm();
    if b == 0.0 {
        return LinearMap3::identity();
    }
    let parallel = b_vec * b_vec.transpose() / (b * b);
    let p = LinearMap3::identity() - parallel;
    let phase = b * s;
    parallel + p * phase.cos() + cross_map(b_vec) * (phase.sin() / b)
}

/// Some unit vector orthogonal to `dir` (which must be nonzero).
pub(crate) fn orthogonal_unit(dir: &Vec3) -> Vec3 {
    let trial = if dir.x.abs() <= dir.y.abs() && dir.x.abs() <= dir.z.abs() {
        Vec3::x()
    } else if dir.y.abs() <= dir.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    dir.cross(&trial).normalize()
}

/// `|a − b| ≤ tol · max(|a|, |b|)`; two exact zeros compare equal.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let diff = (a - b).abs();
    diff <= tol * a.abs().max(b.abs())
}

pub fn is_finite_vec(v: &Vec3) -> bool {
    v.iter().all(|c| c.is_finite())
}
