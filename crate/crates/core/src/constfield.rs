//! Constant electric and magnetic field.
//!
//! With `f(v) = ê + B̂ v` the exact self-force is affine in the velocity,
//! `s(v) = −(β B̂ + α P) v − β P ê + (α/b²) B̂ ê`, where `P` projects onto
//! the plane orthogonal to the magnetic field. Its two coefficients follow
//! from
//!
//! ```text
//! β = 2 η α (1 − β),    η α = (η b)² (1 − β)² − (η α)²,
//! ```
//!
//! whose branch vanishing with the field is
//! `φ = (1 − β)² = 2 / (1 + √(1 + 16 (η b)²))`, `η α = β / (2 √φ)`.
//!
//! The same coefficients come out of the radiation-term iteration
//! `Kₙ = η (B̂ + Kₙ₋₁)²`, out of the solution iteration with polynomial
//! envelopes `pₙ, qₙ`, and out of the characteristic root of the envelope
//! equation; each route is implemented separately below.

use num_complex::Complex64;

use crate::algebra::{cross_map_exp, orthogonal_unit, LinearMap3, Vec3};
use crate::error::Result;
use crate::iteration::{drive, IterationEntry, IterationTrace};
use crate::params::FieldParams;
use crate::poly::{Coefficient, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstFieldCoefficients {
    /// `φ = (1 − β)²`.
    pub phi: f64,
    pub beta: f64,
    pub alpha: f64,
    /// Coefficient of `I − P` in the linear part; always zero on the
    /// physical branch.
    pub lambda_kernel: f64,
    /// `η b`.
    pub coupling: f64,
    /// Spectral radius of the radiation-term map's Jacobian at this fixed
    /// point. Below one the iteration converges locally.
    pub contraction: f64,
}

impl ConstFieldCoefficients {
    /// Residual of `4 (ηb)² φ² + φ − 1 = 0`.
    pub fn quartic_residual(&self) -> f64 {
        let k2 = self.coupling * self.coupling;
        4.0 * k2 * self.phi * self.phi + self.phi - 1.0
    }

    /// Residuals of the two fixed-point relations, in dimensionless form.
    pub fn relation_residuals(&self, eta: f64) -> [f64; 2] {
        let (b, y) = (self.beta, eta * self.alpha);
        let k2 = self.coupling * self.coupling;
        [
            b - 2.0 * y * (1.0 - b),
            y - (k2 * (1.0 - b) * (1.0 - b) - y * y),
        ]
    }

    pub fn within_iteration_regime(&self) -> bool {
        self.contraction < 1.0
    }
}

/// Closed-form `(φ, β, α)` on the branch that vanishes with the field.
pub fn closed_form_coefficients(params: &FieldParams) -> ConstFieldCoefficients {
    let k = params.coupling();
    let k2 = k * k;
    let s = (1.0 + 16.0 * k2).sqrt();
    let phi = 2.0 / (1.0 + s);
    let root_phi = phi.sqrt();
    // 1 − √φ = (1 − φ)/(1 + √φ) and 1 − φ = 16k²/(1 + s)²; no cancellation.
    let beta = 16.0 * k2 / ((1.0 + s) * (1.0 + s) * (1.0 + root_phi));
    let eta_alpha = beta / (2.0 * root_phi);
    let contraction = 2.0 * (eta_alpha * eta_alpha + phi * k2).sqrt();
    ConstFieldCoefficients {
        phi,
        beta,
        alpha: eta_alpha / params.eta,
        lambda_kernel: 0.0,
        coupling: k,
        contraction,
    }
}

/// Affine self-force `s(v) = linear · v + constant`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfForceAffine {
    pub linear: LinearMap3,
    pub constant: Vec3,
}

impl SelfForceAffine {
    pub fn zero() -> Self {
        SelfForceAffine {
            linear: LinearMap3::zeros(),
            constant: Vec3::zeros(),
        }
    }

    /// `−β B̂ − α P` with the matching constant term for `ê`.
    pub fn from_coefficients(params: &FieldParams, beta: f64, alpha: f64) -> Self {
        let Some(p) = params.projector() else {
            return Self::zero();
        };
        let bh = params.cross_map();
        let b2 = params.b_vec.norm_squared();
        let linear = -bh * beta - p * alpha;
        // −K B̂ê / b² = −β P ê + (α/b²) B̂ ê
        let constant = -(linear * (bh * params.e_vec)) / b2;
        SelfForceAffine { linear, constant }
    }

    pub fn eval(&self, v: &Vec3) -> Vec3 {
        self.linear * v + self.constant
    }

    /// Recovers `(β, α)` from the linear part, assuming it lies in the span
    /// of `B̂` and `P`.
    pub fn coefficients(&self, params: &FieldParams) -> (f64, f64) {
        let b2 = params.b_vec.norm_squared();
        if b2 == 0.0 {
            return (0.0, 0.0);
        }
        let w = orthogonal_unit(&params.b_vec);
        let mw = self.linear * w;
        let alpha = -w.dot(&mw);
        let beta = -(params.cross_map() * w).dot(&mw) / b2;
        (beta, alpha)
    }
}

/// Exact self-force. Defined as zero when `b = 0` (a uniform force has no
/// jerk).
pub fn self_force(params: &FieldParams) -> SelfForceAffine {
    if params.b() == 0.0 {
        return SelfForceAffine::zero();
    }
    let c = closed_form_coefficients(params);
    SelfForceAffine::from_coefficients(params, c.beta, c.alpha)
}

/// `s(v) − η (B̂ + M)(ê + B̂ v + s(v))` for a candidate `s(v) = M v + d`.
pub fn pde_residual(s: &SelfForceAffine, params: &FieldParams, v: &Vec3) -> Vec3 {
    let bh = params.cross_map();
    let total_accel = params.e_vec + bh * v + s.eval(v);
    s.eval(v) - (bh + s.linear) * total_accel * params.eta
}

/// One radiation-term step: the jerk of `v̇ = ê + B̂v + s(v)`, with `v̇`
/// substituted back, times `η`.
pub fn radiation_term_step(s: &SelfForceAffine, params: &FieldParams) -> SelfForceAffine {
    let total = params.cross_map() + s.linear;
    SelfForceAffine {
        linear: total * total * params.eta,
        constant: total * (params.e_vec + s.constant) * params.eta,
    }
}

/// Fixed-point iteration of the radiation term, starting from the Landau
/// approximation `K₁ = −η b² P`.
pub fn iterate_radiation_term(
    params: &FieldParams,
    max_steps: usize,
    tol: f64,
) -> Result<IterationTrace> {
    let to_entry = |s: &SelfForceAffine, step: usize| {
        let (beta, alpha) = s.coefficients(params);
        IterationEntry {
            step,
            beta,
            alpha,
            constant: s.constant,
        }
    };
    let first = radiation_term_step(&SelfForceAffine::zero(), params);
    drive(to_entry(&first, 1), params.eta, max_steps, tol, |e| {
        let mut s = SelfForceAffine::from_coefficients(params, e.beta, e.alpha);
        s.constant = e.constant;
        to_entry(&radiation_term_step(&s, params), e.step + 1)
    })
}

/// Envelope polynomials of the n-th solution iterate,
/// `wₙ(t) = [pₙ(t) + qₙ(t) B̂] e^{B̂t} u₀` on the plane orthogonal to the field.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopePair<T: Coefficient> {
    pub p: Polynomial<T>,
    pub q: Polynomial<T>,
}

impl<T: Coefficient> EnvelopePair<T> {
    /// Scalar and `B̂` parts of `(d/dt + B̂)² [p + q B̂]`, using `B̂² = −b²`.
    pub fn second_derivative_parts(&self, b_squared: &T) -> (Polynomial<T>, Polynomial<T>) {
        let (dp, dq) = (self.p.derivative(), self.q.derivative());
        let two = T::from_int(2);
        let scalar = &(&dp.derivative() - &dq.scale(&(two.clone() * b_squared.clone())))
            - &self.p.scale(b_squared);
        let rotating = &(&dq.derivative() + &dp.scale(&two)) - &self.q.scale(b_squared);
        (scalar, rotating)
    }
}

/// Solution-iteration envelope recursion
///
/// ```text
/// ṗₙ = η (p̈ₙ₋₁ − 2b² q̇ₙ₋₁ − b² pₙ₋₁),   pₙ(0) = 1,
/// q̇ₙ = η (q̈ₙ₋₁ + 2 ṗₙ₋₁ − b² qₙ₋₁),     qₙ(0) = 0,
/// ```
///
/// from `p₀ = 1, q₀ = 0`. Returns `n + 1` pairs. Exact over rationals.
pub fn envelope_iterates<T: Coefficient>(eta: &T, b_squared: &T, n: usize) -> Vec<EnvelopePair<T>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(EnvelopePair {
        p: Polynomial::constant(T::one()),
        q: Polynomial::zero(),
    });
    for _ in 0..n {
        let (scalar, rotating) = out.last().unwrap().second_derivative_parts(b_squared);
        out.push(EnvelopePair {
            p: scalar.scale(eta).antiderivative(T::one()),
            q: rotating.scale(eta).antiderivative(T::zero()),
        });
    }
    out
}

/// Envelope iterates `(pₙ, qₙ)` for `n = 0..=n` in floating point. They
/// depend on `η` and `b` only; the electric field enters through the shift
/// in [`SolutionIterate`].
pub fn iterate_solution_envelopes(params: &FieldParams, n: usize) -> Vec<EnvelopePair<f64>> {
    let b2 = params.b_vec.norm_squared();
    envelope_iterates(&params.eta, &b2, n)
}

/// Limits `(f(t), g(t)) = (e^{−αt} cos(βbt), −e^{−αt} sin(βbt)/b)` of the
/// envelope iterates; `(1, 0)` without a magnetic field.
pub fn envelope_limit(params: &FieldParams, t: f64) -> (f64, f64) {
    let b = params.b();
    if b == 0.0 {
        return (1.0, 0.0);
    }
    let c = closed_form_coefficients(params);
    let decay = (-c.alpha * t).exp();
    let phase = c.beta * b * t;
    (decay * phase.cos(), -decay * phase.sin() / b)
}

/// The n-th solution iterate for arbitrary `ê`, assembled from the
/// parallel channel (exact, uniform acceleration) and the shifted
/// orthogonal variable `u = P v − B̂ ê / b²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionIterate {
    pub params: FieldParams,
    pub c0: Vec3,
    pub envelopes: EnvelopePair<f64>,
}

impl SolutionIterate {
    fn split(&self) -> Option<(Vec3, Vec3, Vec3)> {
        let p = self.params.projector()?;
        let bh = self.params.cross_map();
        let shift = bh * self.params.e_vec / self.params.b_vec.norm_squared();
        let parallel_c = self.c0 - p * self.c0;
        let parallel_e = self.params.e_vec - p * self.params.e_vec;
        Some((parallel_c + shift, parallel_e, p * self.c0 - shift))
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        let Some((offset, parallel_e, u0)) = self.split() else {
            return self.c0 + self.params.e_vec * t;
        };
        let bh = self.params.cross_map();
        let envelope = LinearMap3::identity() * self.envelopes.p.eval(&t)
            + bh * self.envelopes.q.eval(&t);
        offset + parallel_e * t + envelope * (cross_map_exp(&self.params.b_vec, t) * u0)
    }

    /// Self-force read off the iterate at `t = 0`: `η ẅ(0)`.
    pub fn read_off_self_force(&self) -> Vec3 {
        let Some((_, _, u0)) = self.split() else {
            return Vec3::zeros();
        };
        let b2 = self.params.b_vec.norm_squared();
        let (scalar, rotating) = self.envelopes.second_derivative_parts(&b2);
        let bh = self.params.cross_map();
        (u0 * scalar.eval(&0.0) + bh * u0 * rotating.eval(&0.0)) * self.params.eta
    }
}

/// Solution iterates `w₀ … wₙ` for initial velocity `c0`.
pub fn iterate_solution_general(params: &FieldParams, c0: &Vec3, n: usize) -> Vec<SolutionIterate> {
    iterate_solution_envelopes(params, n)
        .into_iter()
        .map(|envelopes| SolutionIterate {
            params: *params,
            c0: *c0,
            envelopes,
        })
        .collect()
}

/// Velocity on the exact second-order equation `v̇ = ê + B̂v + s(v)`.
pub fn closed_form_trajectory(params: &FieldParams, c0: &Vec3, t: f64) -> Vec3 {
    let Some(p) = params.projector() else {
        return c0 + params.e_vec * t;
    };
    let c = closed_form_coefficients(params);
    let bh = params.cross_map();
    let id = LinearMap3::identity();
    let shift = bh * params.e_vec / params.b_vec.norm_squared();
    let rotation = cross_map_exp(&params.b_vec, (1.0 - c.beta) * t);
    (id - p) * params.e_vec * t
        + (id - p) * c0
        + shift
        + rotation * (p * c0 - shift) * (-c.alpha * t).exp()
}

/// Root of `η λ² − (1 − 2iηb) λ − η b² = 0` that vanishes with `b`.
///
/// With `μ = λ + ib` the root is `λ = η μ²`, `μ = 2ib / (1 + √(1 − 4iηb))`;
/// the radicand stays in the right half-plane, so the principal square root
/// is continuous along the whole branch.
pub fn characteristic_root(params: &FieldParams) -> Complex64 {
    let b = params.b();
    let i = Complex64::i();
    let root = (Complex64::new(1.0, 0.0) - i * (4.0 * params.eta * b)).sqrt();
    let mu = i * (2.0 * b) / (root + 1.0);
    mu * mu * params.eta
}

/// `(β, α)` read from the characteristic root: `λ = −α − i β b`.
pub fn coefficients_from_characteristic_root(params: &FieldParams) -> (f64, f64) {
    let lambda = characteristic_root(params);
    let b = params.b();
    let beta = if b == 0.0 { 0.0 } else { -lambda.im / b };
    (beta, -lambda.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iteration::IterationStatus;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn magnetic(b: f64, eta: f64) -> FieldParams {
        FieldParams::magnetic(Vec3::new(0.0, 0.0, b), eta).unwrap()
    }

    /// Bisection on 4k²φ² + φ − 1 over [0, 1].
    fn phi_by_bisection(k: f64) -> f64 {
        let f = |phi: f64| 4.0 * k * k * phi * phi + phi - 1.0;
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid
            } else {
                lo = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn no_field_no_self_force() {
        let c = closed_form_coefficients(&magnetic(0.0, 1.0));
        assert_eq!((c.phi, c.beta, c.alpha), (1.0, 0.0, 0.0));
    }

    #[test]
    fn coefficients_at_half_coupling_match_bisection_oracle() {
        let c = closed_form_coefficients(&magnetic(0.5, 1.0));
        let phi = phi_by_bisection(0.5);
        let beta = 1.0 - phi.sqrt();
        let alpha = beta / (2.0 * (1.0 - beta));
        assert!((c.phi - phi).abs() < 1e-14);
        assert!((c.phi - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        assert!((c.beta - beta).abs() < 1e-14);
        assert!((c.alpha - alpha).abs() < 1e-14);
        assert!((c.beta - 0.2138486).abs() < 1e-7);
        assert!((c.alpha - 0.1360098).abs() < 1e-7);
    }

    #[test]
    fn unit_coupling_still_solves_the_relations() {
        let params = magnetic(1.0, 1.0);
        let c = closed_form_coefficients(&params);
        assert!(c.relation_residuals(1.0).iter().all(|r| r.abs() < 1e-10));
        assert!(c.quartic_residual().abs() < 1e-12);
        assert!(!c.within_iteration_regime());
    }

    #[test]
    fn physical_branch_is_never_the_rejected_one() {
        for &k in &[1e-8, 1e-3, 0.1, 0.5, 1.0, 3.0, 50.0] {
            let c = closed_form_coefficients(&magnetic(k, 1.0));
            assert!((c.beta - (1.0 - c.phi.sqrt())).abs() < 1e-14);
            assert!(c.beta < 1.0 && c.beta >= 0.0 && c.alpha >= 0.0);
            assert_eq!(c.lambda_kernel, 0.0);
        }
        let tiny = closed_form_coefficients(&magnetic(1e-9, 1.0));
        assert!(tiny.beta < 1e-17 && tiny.alpha < 1e-17);
    }

    #[test]
    fn self_force_shapes() {
        let params = magnetic(0.5, 1.0);
        let c = closed_form_coefficients(&params);
        let s = self_force(&params);
        let expected = -params.cross_map() * c.beta - params.projector().unwrap() * c.alpha;
        assert!((s.linear - expected).norm() < 1e-15);
        assert_eq!(s.constant, Vec3::zeros());

        let uniform = FieldParams::new(Vec3::new(1.0, 2.0, 3.0), Vec3::zeros(), 1.0).unwrap();
        assert_eq!(self_force(&uniform), SelfForceAffine::zero());
    }

    #[test]
    fn electric_constant_term_solves_pde() {
        let params =
            FieldParams::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 0.5), 1.0).unwrap();
        let c = closed_form_coefficients(&params);
        let s = self_force(&params);
        let p = params.projector().unwrap();
        let bh = params.cross_map();
        let expected = -(p * params.e_vec) * c.beta + bh * params.e_vec * (c.alpha / 0.25);
        assert!((s.constant - expected).norm() < 1e-15);
        for v in [Vec3::zeros(), Vec3::new(0.3, -1.0, 2.0)] {
            assert!(pde_residual(&s, &params, &v).norm() < 1e-14);
        }
    }

    #[test]
    fn space_inversion_symmetry() {
        let params = FieldParams::magnetic(Vec3::new(0.2, 0.4, -0.1), 0.7).unwrap();
        let s = self_force(&params);
        let v = Vec3::new(1.0, -0.5, 0.25);
        assert!((s.eval(&v) + s.eval(&-v)).norm() < 1e-15);
    }

    #[test]
    fn landau_candidate_is_not_exact() {
        let params = magnetic(0.5, 1.0);
        let landau = radiation_term_step(&SelfForceAffine::zero(), &params);
        assert!((landau.linear + params.projector().unwrap() * 0.25).norm() < 1e-15);
        let r = pde_residual(&landau, &params, &Vec3::new(1.0, 0.0, 0.0));
        assert!(r.norm() > 1e-2);
        let free = FieldParams::magnetic(Vec3::zeros(), 1.0).unwrap();
        assert_eq!(
            pde_residual(&SelfForceAffine::zero(), &free, &Vec3::new(1.0, 2.0, 3.0)),
            Vec3::zeros()
        );
    }

    #[test]
    fn radiation_term_iteration_converges_to_closed_form() {
        let params = magnetic(0.5, 1.0);
        let trace = iterate_radiation_term(&params, 500, 1e-13).unwrap();
        let (beta, alpha) = trace.limit().expect("converges at ηb = 0.5");
        let c = closed_form_coefficients(&params);
        assert!((beta - c.beta).abs() < 1e-11);
        assert!((alpha - c.alpha).abs() < 1e-11);
    }

    #[test]
    fn radiation_term_entries_follow_scalar_recursion() {
        let params = FieldParams::magnetic(Vec3::new(0.1, -0.2, 0.3), 1.3).unwrap();
        let k2 = params.coupling().powi(2);
        let eta = params.eta;
        let trace = iterate_radiation_term(&params, 50, 1e-14).unwrap();
        let first = trace.entries[0];
        assert!(first.beta.abs() < 1e-15);
        assert!((first.alpha - eta * params.b().powi(2)).abs() < 1e-15);
        for w in trace.entries.windows(2) {
            let (b, y) = (w[0].beta, eta * w[0].alpha);
            assert!((w[1].beta - 2.0 * y * (1.0 - b)).abs() < 1e-14);
            assert!((eta * w[1].alpha - (k2 * (1.0 - b).powi(2) - y * y)).abs() < 1e-14);
        }
    }

    #[test]
    fn radiation_term_at_unit_coupling_is_a_two_cycle() {
        let trace = iterate_radiation_term(&magnetic(1.0, 1.0), 100, 1e-10).unwrap();
        assert_eq!(trace.status, IterationStatus::Oscillating { period: 2 });
        let e = &trace.entries;
        assert_eq!((e[0].beta, e[0].alpha), (0.0, 1.0));
        assert_eq!((e[1].beta, e[1].alpha), (2.0, 0.0));
        assert_eq!((e[2].beta, e[2].alpha), (e[0].beta, e[0].alpha));
    }

    #[test]
    fn radiation_term_without_field_is_trivial() {
        let trace = iterate_radiation_term(&magnetic(0.0, 1.0), 10, 1e-10).unwrap();
        assert_eq!(trace.entries.len(), 1);
        assert_eq!(trace.limit(), Some((0.0, 0.0)));
        assert!(iterate_radiation_term(&magnetic(0.5, 1.0), 0, 1e-10).is_err());
    }

    #[test]
    fn radiation_term_diverges_where_fixed_point_repels() {
        let params = magnetic(0.9, 1.0);
        assert!(closed_form_coefficients(&params).contraction > 1.0);
        let trace = iterate_radiation_term(&params, 10_000, 1e-10).unwrap();
        assert!(!trace.status.is_converged());
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn first_envelopes_are_exact() {
        // η = 3/2, b = 1/2: p₁ = 1 − ηb²t, q₁ = 0,
        // p₂ = 1 − ηb²t + ½η²b⁴t², q₂ = −2η²b²t.
        let (eta, b2) = (rat(3, 2), rat(1, 4));
        let it = envelope_iterates(&eta, &b2, 2);
        let one = BigRational::from_int(1);
        assert_eq!(it[1].p, Polynomial::new(vec![one.clone(), -(&eta * &b2)]));
        assert!(it[1].q.is_zero());
        let eb2 = &eta * &b2;
        assert_eq!(
            it[2].p,
            Polynomial::new(vec![one, -eb2.clone(), &eb2 * &eb2 / BigRational::from_int(2)])
        );
        assert_eq!(
            it[2].q,
            Polynomial::new(vec![BigRational::from_int(0), -(rat(2, 1) * &eta * &eta * &b2)])
        );
    }

    #[test]
    fn float_envelopes_match_exact_rationals() {
        let exact = envelope_iterates(&rat(1, 1), &rat(1, 100), 12);
        let params = magnetic(0.1, 1.0);
        let float = iterate_solution_envelopes(&params, 12);
        for (e, f) in exact.iter().zip(&float) {
            for (pe, pf) in [(&e.p, &f.p), (&e.q, &f.q)] {
                let pe = pe.map(|c| num_traits::ToPrimitive::to_f64(c).unwrap());
                for (a, b) in pe.coeffs().iter().zip(pf.coeffs()) {
                    assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-300));
                }
            }
        }
    }

    #[test]
    fn envelope_initial_conditions() {
        for pair in iterate_solution_envelopes(&magnetic(0.3, 1.0), 10) {
            assert_eq!(pair.p.eval(&0.0), 1.0);
            assert_eq!(pair.q.eval(&0.0), 0.0);
        }
    }

    #[test]
    fn envelopes_converge_at_small_coupling() {
        let params = magnetic(0.1, 1.0);
        let last = iterate_solution_envelopes(&params, 40).pop().unwrap();
        for k in 0..=50 {
            let t = 0.1 * k as f64;
            let (f, g) = envelope_limit(&params, t);
            assert!((last.p.eval(&t) - f).abs() < 1e-12);
            assert!((last.q.eval(&t) - g).abs() < 1e-12);
        }
    }

    #[test]
    fn solution_iterate_reproduces_closed_form_and_self_force() {
        let params =
            FieldParams::new(Vec3::new(0.4, -0.2, 0.3), Vec3::new(0.05, 0.0, 0.1), 0.8).unwrap();
        let c0 = Vec3::new(1.0, 0.5, -0.25);
        let last = iterate_solution_general(&params, &c0, 40).pop().unwrap();
        for k in 0..=20 {
            let t = 0.25 * k as f64;
            let d = last.velocity(t) - closed_form_trajectory(&params, &c0, t);
            assert!(d.norm() < 1e-12, "t = {t}: {d:?}");
        }
        let read_off = last.read_off_self_force();
        let exact = self_force(&params).eval(&c0);
        assert!((read_off - exact).norm() < 1e-13);
    }

    #[test]
    fn zeroth_solution_iterate_is_unperturbed_motion() {
        let params =
            FieldParams::new(Vec3::new(0.4, 0.0, 0.3), Vec3::new(0.0, 0.0, 0.7), 0.5).unwrap();
        let c0 = Vec3::new(1.0, 0.0, 0.2);
        let w0 = &iterate_solution_general(&params, &c0, 0)[0];
        // v̇ = ê + B̂v by central differences
        let h = 1e-4;
        for &t in &[0.0, 0.7, 2.0] {
            let dv = (w0.velocity(t + h) - w0.velocity(t - h)) / (2.0 * h);
            assert!((dv - params.force(&w0.velocity(t))).norm() < 1e-7);
        }
        assert!((w0.velocity(0.0) - c0).norm() < 1e-15);
    }

    #[test]
    fn closed_form_trajectory_limits() {
        let params = FieldParams::magnetic(Vec3::new(0.0, 0.6, 0.8), 1.0).unwrap();
        let c0 = Vec3::new(1.0, 2.0, -1.0);
        assert!((closed_form_trajectory(&params, &c0, 0.0) - c0).norm() < 1e-15);
        let late = closed_form_trajectory(&params, &c0, 400.0);
        let (parallel, _) = crate::algebra::project_parallel_perp(&c0, &params.b_vec).unwrap();
        assert!((late - parallel).norm() < 1e-12);
        let uniform = FieldParams::new(Vec3::new(1.0, 0.0, 0.0), Vec3::zeros(), 1.0).unwrap();
        assert_eq!(closed_form_trajectory(&uniform, &c0, 2.0), c0 + Vec3::new(2.0, 0.0, 0.0));
    }

    #[test]
    fn characteristic_root_agrees_with_closed_form() {
        for &k in &[0.0, 1e-3, 0.1, 0.3, 0.5, 0.9, 1.0, 4.0] {
            let params = magnetic(k, 1.0);
            let (beta, alpha) = coefficients_from_characteristic_root(&params);
            let c = closed_form_coefficients(&params);
            assert!((beta - c.beta).abs() <= 1e-12 * c.beta.max(1e-300) + 1e-15, "k = {k}");
            assert!((alpha - c.alpha).abs() <= 1e-12 * c.alpha.max(1e-300) + 1e-15, "k = {k}");
            // It is a root of η λ² − (1 − 2iηb) λ − η b² = 0.
            let lambda = characteristic_root(&params);
            let i = Complex64::i();
            let r = lambda * lambda - (Complex64::new(1.0, 0.0) - i * (2.0 * k)) * lambda - k * k;
            assert!(r.norm() < 1e-14);
        }
    }
}
