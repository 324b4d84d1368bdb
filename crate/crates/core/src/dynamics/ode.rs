//! Two one-step integrators behind a common driver: the explicit embedded
//! Dormand–Prince 5(4) pair and the implicit two-stage Gauss–Legendre method
//! (order 4, A-stable) with step-doubling error control.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    DormandPrince45,
    GaussLegendre4,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::DormandPrince45 => "dp45",
            SolverKind::GaussLegendre4 => "gl4",
        }
    }

    /// Nominal order of the propagated solution.
    pub fn order(&self) -> i32 {
        match self {
            SolverKind::DormandPrince45 => 5,
            SolverKind::GaussLegendre4 => 4,
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dp45" | "dormand-prince" => Ok(SolverKind::DormandPrince45),
            "gl4" | "gauss-legendre" => Ok(SolverKind::GaussLegendre4),
            other => Err(Error::UnknownSolver(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub kind: SolverKind,
    /// Mixed absolute/relative local error tolerance.
    pub tol: f64,
    /// Disables error control when set.
    pub fixed_step: Option<f64>,
    /// Spacing of the recorded samples.
    pub output_step: f64,
    pub max_steps: usize,
}

impl SolverSettings {
    pub fn new(kind: SolverKind, tol: f64) -> Self {
        SolverSettings {
            kind,
            tol,
            fixed_step: None,
            output_step: 1e-2,
            max_steps: 10_000_000,
        }
    }

    pub fn with_output_step(mut self, dt: f64) -> Self {
        self.output_step = dt;
        self
    }

    pub fn with_fixed_step(mut self, h: f64) -> Self {
        self.fixed_step = Some(h);
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid("tol", format!("must be positive, got {}", self.tol)));
        }
        if !(self.output_step > 0.0 && self.output_step.is_finite()) {
            return Err(Error::invalid("output_step", "must be positive"));
        }
        if let Some(h) = self.fixed_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::invalid("fixed_step", "must be positive"));
            }
        }
        Ok(())
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    /// Acceleration exceeded the runaway threshold at time `t`.
    Runaway { t: f64 },
    /// A non-finite state appeared at time `t`.
    BlownUp { t: f64 },
    MaxSteps { t: f64 },
    StepUnderflow { t: f64 },
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::Runaway { .. } => "runaway",
            Termination::BlownUp { .. } => "blown-up",
            Termination::MaxSteps { .. } => "max-steps",
            Termination::StepUnderflow { .. } => "step-underflow",
        }
    }
}

type State<const N: usize> = SVector<f64, N>;

fn error_norm<const N: usize>(err: &State<N>, y0: &State<N>, y1: &State<N>, tol: f64) -> f64 {
    (0..N)
        .map(|i| err[i].abs() / (tol * (1.0 + y0[i].abs().max(y1[i].abs()))))
        .fold(0.0, f64::max)
}

// Dormand–Prince tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dp45_step<const N: usize>(
    rhs: &impl Fn(f64, &State<N>) -> State<N>,
    t: f64,
    y: &State<N>,
    h: f64,
) -> (State<N>, State<N>) {
    let mut k = [State::<N>::zeros(); 7];
    for s in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            ys += kj * (h * A[s][j]);
        }
        k[s] = rhs(t + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = State::<N>::zeros();
    for s in 0..7 {
        y5 += k[s] * (h * B5[s]);
        err += k[s] * (h * (B5[s] - B4[s]));
    }
    (y5, err)
}

fn jacobian<const N: usize>(rhs: &impl Fn(f64, &State<N>) -> State<N>, t: f64, y: &State<N>) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(N, N);
    for k in 0..N {
        let h = 1e-7 * y[k].abs().max(1.0);
        let mut yp = *y;
        let mut ym = *y;
        yp[k] += h;
        ym[k] -= h;
        let col = (rhs(t, &yp) - rhs(t, &ym)) / (2.0 * h);
        for i in 0..N {
            j[(i, k)] = col[i];
        }
    }
    j
}

/// One Gauss–Legendre step solved by simplified Newton iteration with a
/// frozen Jacobian; `None` if the Newton iteration does not converge.
fn gl4_step<const N: usize>(
    rhs: &impl Fn(f64, &State<N>) -> State<N>,
    jac: &DMatrix<f64>,
    t: f64,
    y: &State<N>,
    h: f64,
) -> Option<State<N>> {
    let r = 3f64.sqrt() / 6.0;
    let c = [0.5 - r, 0.5 + r];
    let a = [[0.25, 0.25 - r], [0.25 + r, 0.25]];

    let mut m = DMatrix::<f64>::identity(2 * N, 2 * N);
    for (bi, row) in a.iter().enumerate() {
        for (bj, aij) in row.iter().enumerate() {
            let mut block = m.view_mut((bi * N, bj * N), (N, N));
            block -= jac * (h * aij);
        }
    }
    let lu = m.lu();

    let mut z = [State::<N>::zeros(); 2];
    let mut f = [State::<N>::zeros(); 2];
    let scale = 1.0 + y.amax();
    for _ in 0..12 {
        for i in 0..2 {
            f[i] = rhs(t + c[i] * h, &(y + z[i]));
        }
        let mut residual = DVector::zeros(2 * N);
        for i in 0..2 {
            let g = z[i] - (f[0] * a[i][0] + f[1] * a[i][1]) * h;
            residual.rows_mut(i * N, N).copy_from(&(-g));
        }
        let delta = lu.solve(&residual)?;
        for i in 0..2 {
            z[i] += State::<N>::from_iterator(delta.rows(i * N, N).iter().copied());
        }
        let size = delta.amax();
        if !size.is_finite() {
            return None;
        }
        if size <= 1e-14 * scale {
            for i in 0..2 {
                f[i] = rhs(t + c[i] * h, &(y + z[i]));
            }
            return Some(y + (f[0] + f[1]) * (0.5 * h));
        }
    }
    None
}

/// Samples `(t, y)` on the output grid, plus the state at an early stop.
pub(crate) struct RawSolution<const N: usize> {
    pub samples: Vec<(f64, State<N>)>,
    pub termination: Termination,
}

/// Integrates `y' = rhs(t, y)` on `[0, t_end]`. Steps are clipped so that
/// every output time is hit exactly. `stop` is consulted after each accepted
/// step and may end the run early.
pub(crate) fn integrate<const N: usize>(
    rhs: impl Fn(f64, &State<N>) -> State<N>,
    y0: State<N>,
    t_end: f64,
    settings: &SolverSettings,
    mut stop: impl FnMut(f64, &State<N>) -> Option<Termination>,
) -> Result<RawSolution<N>> {
    settings.validate()?;
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::invalid("t_end", "must be finite and non-negative"));
    }
    if y0.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("initial state"));
    }
    let n_out = (t_end / settings.output_step).ceil().max(0.0) as usize;
    let out_time = |k: usize| (k as f64 * settings.output_step).min(t_end);

    let mut samples = vec![(0.0, y0)];
    let mut t = 0.0;
    let mut y = y0;
    let mut next = 1;
    let order = settings.kind.order() as f64;
    let mut h = settings
        .fixed_step
        .unwrap_or_else(|| settings.tol.powf(1.0 / order).min(settings.output_step));
    let mut steps = 0usize;

    while next <= n_out {
        let target = out_time(next);
        // A step landing within rounding of the target is clipped to it.
        let clipped = h * (1.0 + 1e-9) >= target - t;
        let dt = if clipped { target - t } else { h };
        if dt <= 1e-14 * t.abs().max(1.0) {
            return Ok(RawSolution {
                samples,
                termination: Termination::StepUnderflow { t },
            });
        }
        steps += 1;
        if steps > settings.max_steps {
            return Ok(RawSolution {
                samples,
                termination: Termination::MaxSteps { t },
            });
        }

        let (candidate, err) = match settings.kind {
            SolverKind::DormandPrince45 => {
                let (y1, e) = dp45_step(&rhs, t, &y, dt);
                (Some(y1), error_norm(&e, &y, &y1, settings.tol))
            }
            SolverKind::GaussLegendre4 => {
                let jac = jacobian(&rhs, t, &y);
                if settings.fixed_step.is_some() {
                    (gl4_step(&rhs, &jac, t, &y, dt), 0.0)
                } else {
                    let full = gl4_step(&rhs, &jac, t, &y, dt);
                    let half = gl4_step(&rhs, &jac, t, &y, 0.5 * dt)
                        .and_then(|ym| gl4_step(&rhs, &jac, t + 0.5 * dt, &ym, 0.5 * dt));
                    match (full, half) {
                        (Some(y1), Some(y2)) => {
                            let e = (y2 - y1) / 15.0;
                            (Some(y2), error_norm(&e, &y, &y2, settings.tol))
                        }
                        _ => (None, f64::INFINITY),
                    }
                }
            }
        };

        let accepted = match candidate {
            Some(y1) if settings.fixed_step.is_some() || err <= 1.0 => Some(y1),
            Some(_) => None,
            None if settings.fixed_step.is_some() => {
                return Ok(RawSolution {
                    samples,
                    termination: Termination::BlownUp { t },
                })
            }
            None => None,
        };
        if settings.fixed_step.is_none() {
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-1.0 / order)).clamp(0.2, 5.0)
            };
            let proposal = if err.is_finite() { dt * factor } else { 0.5 * dt };
            h = if accepted.is_some() && clipped { h.max(proposal) } else { proposal };
        }
        let Some(y1) = accepted else { continue };

        t = if clipped { target } else { t + dt };
        y = y1;
        if y.iter().any(|c| !c.is_finite()) {
            return Ok(RawSolution {
                samples,
                termination: Termination::BlownUp { t },
            });
        }
        if let Some(reason) = stop(t, &y) {
            samples.push((t, y));
            return Ok(RawSolution {
                samples,
                termination: reason,
            });
        }
        if clipped {
            samples.push((t, y));
            next += 1;
        }
    }
    Ok(RawSolution {
        samples,
        termination: Termination::Completed,
    })
}
