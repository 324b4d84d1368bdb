//! Fixed-point driver and trace records shared by both radiation-term
//! iterations.

use crate::algebra::Vec3;
use crate::error::{Error, Result};

/// Relative tolerance for recognising a repeated entry in a cycle.
pub const OSCILLATION_TOL: f64 = 1e-9;
/// Consecutive entries that must repeat before a cycle is declared.
pub const OSCILLATION_CONFIRMATIONS: usize = 3;
/// Longest cycle looked for.
pub const MAX_PERIOD: usize = 4;
/// Dimensionless coefficient magnitude treated as divergence.
pub const DIVERGENCE_BOUND: f64 = 1e8;

/// Coefficients of the n-th approximation `sₙ`.
///
/// For the constant field `sₙ(v) = −βₙ B̂ v − αₙ P v + constant`, for the
/// elastic force `sₙ(x, v) = βₙ ω² x − αₙ v` (constant is zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationEntry {
    pub step: usize,
    pub beta: f64,
    pub alpha: f64,
    pub constant: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IterationStatus {
    Converged {
        beta: f64,
        alpha: f64,
        constant: Vec3,
    },
    Oscillating {
        period: usize,
    },
    Diverged,
    MaxSteps,
}

impl IterationStatus {
    pub fn is_converged(&self) -> bool {
        matches!(self, IterationStatus::Converged { .. })
    }

    pub fn label(&self) -> String {
        match self {
            IterationStatus::Converged { .. } => "converged".into(),
            IterationStatus::Oscillating { period } => format!("oscillating period={period}"),
            IterationStatus::Diverged => "diverged".into(),
            IterationStatus::MaxSteps => "max-steps".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub entries: Vec<IterationEntry>,
    pub status: IterationStatus,
}

impl IterationTrace {
    pub fn last(&self) -> &IterationEntry {
        self.entries.last().expect("trace always holds the first entry")
    }

    /// `(β, α)` of the limit, if the iteration converged.
    pub fn limit(&self) -> Option<(f64, f64)> {
        match self.status {
            IterationStatus::Converged { beta, alpha, .. } => Some((beta, alpha)),
            _ => None,
        }
    }
}

/// Runs `step` from `first` until convergence, a detected cycle, divergence
/// or `max_steps` recorded entries. `eta` is used to compare `α` through the
/// dimensionless `η α`.
pub(crate) fn drive(
    first: IterationEntry,
    eta: f64,
    max_steps: usize,
    tol: f64,
    mut step: impl FnMut(&IterationEntry) -> IterationEntry,
) -> Result<IterationTrace> {
    if max_steps == 0 {
        return Err(Error::ZeroSteps);
    }
    let key = |e: &IterationEntry| [e.beta, eta * e.alpha, e.constant.x, e.constant.y, e.constant.z];
    // Components are compared relative to the largest one, so a coefficient
    // tending to zero does not stall convergence.
    let close = |a: &IterationEntry, b: &IterationEntry, tol: f64| {
        let (ka, kb) = (key(a), key(b));
        let scale = ka.iter().chain(kb.iter()).fold(0.0, |m: f64, c| m.max(c.abs()));
        ka.iter().zip(kb.iter()).all(|(x, y)| (x - y).abs() <= tol * scale)
    };
    let blown = |e: &IterationEntry| key(e).iter().any(|c| !c.is_finite() || c.abs() > DIVERGENCE_BOUND);

    let mut entries = vec![first];
    if blown(&first) {
        return Ok(IterationTrace {
            entries,
            status: IterationStatus::Diverged,
        });
    }
    let status = loop {
        let last = *entries.last().unwrap();
        let mut next = step(&last);
        next.step = last.step + 1;
        if blown(&next) {
            break IterationStatus::Diverged;
        }
        if close(&next, &last, tol) {
            break IterationStatus::Converged {
                beta: next.beta,
                alpha: next.alpha,
                constant: next.constant,
            };
        }
        if entries.len() >= max_steps {
            break IterationStatus::MaxSteps;
        }
        entries.push(next);
        if let Some(period) = detect_cycle(&entries, &close) {
            break IterationStatus::Oscillating { period };
        }
    };
    Ok(IterationTrace { entries, status })
}

fn detect_cycle(
    entries: &[IterationEntry],
    close: &impl Fn(&IterationEntry, &IterationEntry, f64) -> bool,
) -> Option<usize> {
    let n = entries.len();
    // A slowly converging sequence also repeats itself to 1e-9; a genuine
    // cycle must move by much more than that between neighbours.
    if close(&entries[n - 1], &entries[n - 2], OSCILLATION_TOL * 1e3) {
        return None;
    }
    (2..=MAX_PERIOD).find(|&period| {
        n >= period + OSCILLATION_CONFIRMATIONS
            && (0..OSCILLATION_CONFIRMATIONS).all(|back| {
                let j = n - 1 - back;
                close(&entries[j], &entries[j - period], OSCILLATION_TOL)
            })
    })
}
