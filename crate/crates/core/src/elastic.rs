//! One-dimensional harmonic force `f(x) = −ω² x`.
//!
//! The self-force PDE
//!
//! ```text
//! s = η [−ω² v + ∂ₓs · v + ∂ᵥs · (−ω² x + s)]
//! ```
//!
//! is quasi-linear; along its characteristics `(x, v, s)` obeys a linear
//! system whose eigenvalues solve `η λ³ − λ² − ω² = 0`. Discarding the
//! runaway eigenvalue `λ₃` (the only one not vanishing with `ω`) leaves the
//! linear self-force `s(x, v) = β ω² x − α v` with
//! `η α (1 + η α)² = (η ω)²` and `β = η α / (1 + η α)`.

use num_complex::Complex64;

use crate::algebra::{LinearMap3, Vec3};
use crate::error::{Error, Result};
use crate::iteration::{drive, IterationEntry, IterationTrace};
use crate::params::ElasticParams;
use crate::poly::Polynomial;
use crate::roots::{polish_real_root, polynomial_roots};

/// Roots of `η λ³ − λ² − ω² = 0` via Cardano, with the intermediates
/// `ρ± = ∛((ηω)²/2 + 1/27 ± √((ηω)⁴/4 + (ηω)²/27))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub lambda3: f64,
}

impl CubicRoots {
    pub fn all(&self) -> [Complex64; 3] {
        [self.lambda1, self.lambda2, Complex64::new(self.lambda3, 0.0)]
    }
}

pub fn cardano_roots(params: &ElasticParams) -> CubicRoots {
    let eta = params.eta;
    let k2 = params.coupling().powi(2);
    let sqrt_disc = (k2 * (k2 / 4.0 + 1.0 / 27.0)).sqrt();
    let rho_plus = (1.0 / 27.0 + k2 / 2.0 + sqrt_disc).cbrt();
    // ρ₊ρ₋ = ∛(1/27² ) = 1/9 exactly, which avoids the near-cancelling
    // difference under the second cube root.
    let rho_minus = 1.0 / (9.0 * rho_plus);
    let sum = rho_plus + rho_minus;
    let diff = 2.0 * sqrt_disc / (rho_plus * rho_plus + rho_plus * rho_minus + rho_minus * rho_minus);
    let real_root = 1.0 / 3.0 + sum;
    // 1/3 − (ρ₊ + ρ₋)/2 = −(η λ₃ − 1)/2 and η λ₃ − 1 = (ηω)² / (η λ₃)².
    let half_damping = -0.5 * k2 / (real_root * real_root);
    let im = 0.5 * 3f64.sqrt() * diff;
    CubicRoots {
        rho_plus,
        rho_minus,
        lambda1: Complex64::new(half_damping, im) / eta,
        lambda2: Complex64::new(half_damping, -im) / eta,
        lambda3: real_root / eta,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticCoefficients {
    pub beta: f64,
    pub alpha: f64,
    /// `η ω`.
    pub coupling: f64,
    /// Spectral radius of the radiation-term map's Jacobian at this fixed
    /// point.
    pub contraction: f64,
}

impl ElasticCoefficients {
    /// Residuals of `β = ηα/(1 + ηα)` and `ηα (1 + ηα)² = (ηω)²`.
    pub fn relation_residuals(&self, eta: f64) -> [f64; 2] {
        let y = eta * self.alpha;
        [
            self.beta - y / (1.0 + y),
            y * (1.0 + y) * (1.0 + y) - self.coupling * self.coupling,
        ]
    }

    pub fn within_iteration_regime(&self) -> bool {
        self.contraction < 1.0
    }

    pub fn self_force(&self, params: &ElasticParams) -> ElasticSelfForce {
        ElasticSelfForce {
            beta: self.beta,
            alpha: self.alpha,
            omega: params.omega,
        }
    }
}

/// `η α = −2/3 + ρ₊ + ρ₋`, evaluated as `(ηω)² / (η λ₃)²`.
pub fn elastic_coefficients(params: &ElasticParams) -> ElasticCoefficients {
    let k = params.coupling();
    if params.omega == 0.0 {
        return ElasticCoefficients {
            beta: 0.0,
            alpha: 0.0,
            coupling: 0.0,
            contraction: 0.0,
        };
    }
    let eta_lambda3 = cardano_roots(params).lambda3 * params.eta;
    let y = k * k / (eta_lambda3 * eta_lambda3);
    let beta = y / (1.0 + y);
    // Jacobian of (β, ηα) ↦ (ηα(1 − β), (ηω)²(1 − β) − (ηα)²).
    let trace = -3.0 * y;
    let det = 2.0 * y * y + k * k * (1.0 - beta);
    let disc = Complex64::new(trace * trace - 4.0 * det, 0.0).sqrt();
    let contraction = ((disc + trace) * 0.5).norm().max(((-disc + trace) * 0.5).norm());
    ElasticCoefficients {
        beta,
        alpha: y / params.eta,
        coupling: k,
        contraction,
    }
}

/// `s(x, v) = β ω² x − α v`, applied componentwise in three dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticSelfForce {
    pub beta: f64,
    pub alpha: f64,
    pub omega: f64,
}

impl ElasticSelfForce {
    /// Landau first approximation `−η ω² v`.
    pub fn landau(params: &ElasticParams) -> Self {
        ElasticSelfForce {
            beta: 0.0,
            alpha: params.eta * params.omega * params.omega,
            omega: params.omega,
        }
    }

    pub fn eval(&self, x: f64, v: f64) -> f64 {
        self.beta * self.omega * self.omega * x - self.alpha * v
    }
}

/// Residual of the self-force PDE for the linear ansatz `s = βω²x − αv`.
pub fn pde_residual_elastic(beta: f64, alpha: f64, params: &ElasticParams, x: f64, v: f64) -> f64 {
    let w2 = params.omega * params.omega;
    let s = beta * w2 * x - alpha * v;
    s - params.eta * (-w2 * v + beta * w2 * v - alpha * (-w2 * x + s))
}

/// A point `(x, v, s)` of the characteristic system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharState {
    pub x: f64,
    pub v: f64,
    pub s: f64,
}

/// Exact solution of the characteristic system
/// `x' = v, v' = −ω² x + s, s' = s/η + ω² v`.
#[derive(Debug, Clone, Copy)]
pub struct CharacteristicFlow {
    params: ElasticParams,
    roots: CubicRoots,
    start: CharState,
    /// Mode amplitudes when the eigenvalues are distinct (`ω > 0`).
    amplitudes: Option<[Complex64; 3]>,
}

impl CharacteristicFlow {
    pub fn new(params: &ElasticParams, start: CharState) -> Self {
        let roots = cardano_roots(params);
        let amplitudes = (params.omega > 0.0).then(|| {
            let l = roots.all();
            let w2 = params.omega * params.omega;
            // Vandermonde system Σaᵢ = x, Σλᵢaᵢ = v, Σλᵢ²aᵢ = s − ω²x.
            let rhs = [start.x, start.v, start.s - w2 * start.x];
            let mut a = [Complex64::new(0.0, 0.0); 3];
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                a[i] = (rhs[2] - (l[j] + l[k]) * rhs[1] + l[j] * l[k] * rhs[0])
                    / ((l[i] - l[j]) * (l[i] - l[k]));
            }
            a
        });
        CharacteristicFlow {
            params: *params,
            roots,
            start,
            amplitudes,
        }
    }

    pub fn roots(&self) -> &CubicRoots {
        &self.roots
    }

    /// The linear generator of the flow.
    pub fn generator(&self) -> LinearMap3 {
        let w2 = self.params.omega * self.params.omega;
        LinearMap3::new(
            0.0, 1.0, 0.0, //
            -w2, 0.0, 1.0, //
            0.0, w2, 1.0 / self.params.eta,
        )
    }

    pub fn state_at(&self, xi: f64) -> CharState {
        match self.amplitudes {
            Some(a) => {
                let l = self.roots.all();
                let w2 = self.params.omega * self.params.omega;
                let (mut x, mut v, mut s) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for i in 0..3 {
                    let mode = a[i] * (l[i] * xi).exp();
                    x += mode;
                    v += l[i] * mode;
                    s += l[i] * l[i] * mode;
                }
                CharState {
                    x: x.re,
                    v: v.re,
                    s: s.re + w2 * x.re,
                }
            }
            None => self.state_at_by_exponential(xi),
        }
    }

    /// Same flow through the general matrix exponential of the generator.
    pub fn state_at_by_exponential(&self, xi: f64) -> CharState {
        let y = (self.generator() * xi).exp() * Vec3::new(self.start.x, self.start.v, self.start.s);
        CharState {
            x: y.x,
            v: y.y,
            s: y.z,
        }
    }
}

/// Samples the characteristic flow at `samples` evenly spaced points of
/// `[0, xi_span]`.
pub fn characteristic_flow(
    params: &ElasticParams,
    start: CharState,
    xi_span: f64,
    samples: usize,
) -> Vec<(f64, CharState)> {
    let flow = CharacteristicFlow::new(params, start);
    let n = samples.max(2);
    (0..n)
        .map(|i| {
            let xi = xi_span * i as f64 / (n - 1) as f64;
            (xi, flow.state_at(xi))
        })
        .collect()
}

/// Radiation-term step for the linear force `F = a x + c v`: the jerk
/// `a ẋ + c ẍ` with `ẍ → F`, times `η`, as a new `(x, v)` coefficient pair.
fn jerk_step(eta: f64, a: f64, c: f64) -> (f64, f64) {
    (eta * c * a, eta * (a + c * c))
}

pub fn iterate_radiation_term_elastic(
    params: &ElasticParams,
    max_steps: usize,
    tol: f64,
) -> Result<IterationTrace> {
    let w2 = params.omega * params.omega;
    let to_entry = |(x_coef, v_coef): (f64, f64), step: usize| IterationEntry {
        step,
        beta: if w2 == 0.0 { 0.0 } else { x_coef / w2 },
        alpha: -v_coef,
        constant: Vec3::zeros(),
    };
    let first = jerk_step(params.eta, -w2, 0.0);
    drive(to_entry(first, 1), params.eta, max_steps, tol, |e| {
        let a = -w2 + e.beta * w2;
        to_entry(jerk_step(params.eta, a, -e.alpha), e.step + 1)
    })
}

/// `zₙ(t) = pₙ(t) e^{iωt} + c.c.` for a complex envelope polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexEnvelope {
    pub p: Polynomial<Complex64>,
    pub omega: f64,
}

impl ComplexEnvelope {
    /// Envelope of the k-th time derivative: `(d/dt + iω)ᵏ p`.
    pub fn derivative_envelope(&self, order: usize) -> Polynomial<Complex64> {
        let iw = Complex64::new(0.0, self.omega);
        (0..order).fold(self.p.clone(), |p, _| &p.derivative() + &p.scale(&iw))
    }

    fn realize(&self, envelope: &Polynomial<Complex64>, t: f64) -> f64 {
        let phase = Complex64::from_polar(1.0, self.omega * t);
        2.0 * (envelope.eval(&Complex64::new(t, 0.0)) * phase).re
    }

    pub fn position(&self, t: f64) -> f64 {
        self.realize(&self.p, t)
    }

    pub fn velocity(&self, t: f64) -> f64 {
        self.realize(&self.derivative_envelope(1), t)
    }

    /// The k-th time derivative of `zₙ`.
    pub fn derivative(&self, order: usize, t: f64) -> f64 {
        self.realize(&self.derivative_envelope(order), t)
    }
}

/// Solution iterates `z₀ … zₙ` with initial position `a0` and velocity `h0`.
///
/// `pₙ₊₁` is the polynomial particular solution of
/// `p̈ + 2iω ṗ = η (d/dt + iω)³ pₙ` plus the complex constant fixed by
/// `zₙ₊₁(0) = a0`, `żₙ₊₁(0) = h0`.
pub fn iterate_solution_elastic(
    params: &ElasticParams,
    a0: f64,
    h0: f64,
    n: usize,
) -> Result<Vec<ComplexEnvelope>> {
    if params.omega == 0.0 {
        return Err(Error::FreeParticle);
    }
    let omega = params.omega;
    let two_iw = Complex64::new(0.0, 2.0 * omega);
    let eta = Complex64::new(params.eta, 0.0);
    let mut out = vec![ComplexEnvelope {
        p: Polynomial::constant(Complex64::new(0.5 * a0, -0.5 * h0 / omega)),
        omega,
    }];
    for _ in 0..n {
        let source = out.last().unwrap().derivative_envelope(3).scale(&eta);
        // u̇ + 2iω u = r  ⇒  u = Σₖ (−1)ᵏ r⁽ᵏ⁾ / (2iω)^{k+1}
        let mut u = Polynomial::zero();
        let mut term = source;
        let mut factor = two_iw.inv();
        while !term.is_zero() {
            u = &u + &term.scale(&factor);
            term = term.derivative();
            factor = -factor / two_iw;
        }
        let u0 = u.eval(&Complex64::new(0.0, 0.0));
        let constant = Complex64::new(0.5 * a0, (2.0 * u0.re - h0) / (2.0 * omega));
        out.push(ComplexEnvelope {
            p: u.antiderivative(constant),
            omega,
        });
    }
    Ok(out)
}

/// Solution of the envelope equation's exponent `λ + iω = μ + iν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharRootConditions {
    pub mu: f64,
    pub nu: f64,
}

impl CharRootConditions {
    /// Amplitude decay rate `−2μ`; equals the damping coefficient `α`.
    pub fn damping(&self) -> f64 {
        -2.0 * self.mu
    }

    /// `β` from `ν² = (1 − β) ω² − α²/4`.
    pub fn beta(&self, omega: f64) -> f64 {
        1.0 - (self.nu * self.nu + self.mu * self.mu) / (omega * omega)
    }
}

/// Real root conditions of `(λ + iω)² + ω² = η (λ + iω)³`.
///
/// Separating real and imaginary parts of `μ + iν` gives
/// `ν² = 3μ² − 2μ/η` and `8(ημ)³ − 8(ημ)² + 2(ημ) + (ηω)² = 0`; the cubic is
/// solved by a general root finder and the root continuing from `μ = 0` at
/// `ω = 0` is kept.
pub fn char_root_conditions(params: &ElasticParams) -> Result<CharRootConditions> {
    if params.omega == 0.0 {
        return Err(Error::FreeParticle);
    }
    let k2 = params.coupling().powi(2);
    let coeffs = [k2, 2.0, -8.0, 8.0];
    let complex: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let root = polynomial_roots(&complex)
        .into_iter()
        .min_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .expect("cubic has three roots");
    let eta_mu = polish_real_root(&coeffs, root.re);
    let mu = eta_mu / params.eta;
    let nu = (3.0 * mu * mu - 2.0 * mu / params.eta).max(0.0).sqrt();
    Ok(CharRootConditions { mu, nu })
}

/// Analytic solution of `ẍ = −(1 − β) ω² x − α ẋ`: `(x(t), ẋ(t))`.
pub fn reduced_solution(params: &ElasticParams, x0: f64, v0: f64, t: f64) -> (f64, f64) {
    let c = elastic_coefficients(params);
    let stiffness = (1.0 - c.beta) * params.omega * params.omega;
    let gamma = 0.5 * c.alpha;
    let nu2 = stiffness - gamma * gamma;
    if stiffness == 0.0 {
        return (x0 + v0 * t, v0);
    }
    // Always underdamped for ω > 0, since ν² = α² + α/η > 0 ... kept general.
    let decay = (-gamma * t).exp();
    if nu2 > 0.0 {
        let nu = nu2.sqrt();
        let (sn, cs) = (nu * t).sin_cos();
        let b = (v0 + gamma * x0) / nu;
        let x = decay * (x0 * cs + b * sn);
        let v = decay * ((b * nu - gamma * x0) * cs - (x0 * nu + gamma * b) * sn);
        (x, v)
    } else {
        let kappa = (-nu2).sqrt();
        let (sh, ch) = ((kappa * t).sinh(), (kappa * t).cosh());
        let b = (v0 + gamma * x0) / kappa;
        let x = decay * (x0 * ch + b * sh);
        let v = decay * ((b * kappa - gamma * x0) * ch + (x0 * kappa - gamma * b) * sh);
        (x, v)
    }
}
