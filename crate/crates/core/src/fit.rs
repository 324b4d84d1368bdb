//! Least-squares rate fits used to compare trajectories with predicted
//! decay, rotation and runaway rates.

use num_complex::Complex64;

/// Decay rate and angular frequency of `A e^{−γt} cos(νt + φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedFit {
    pub decay: f64,
    pub frequency: f64,
}

/// Fits a single damped oscillation to uniformly spaced samples.
///
/// A damped sinusoid obeys the exact two-term recurrence
/// `x_{k+1} = c₁ x_k + c₂ x_{k−1}` with `c₁ = 2e^{−γh}cos(νh)` and
/// `c₂ = −e^{−2γh}`; `(c₁, c₂)` are found by linear least squares.
pub fn fit_damped_oscillation(samples: &[f64], dt: f64) -> Option<DampedFit> {
    if samples.len() < 4 || dt <= 0.0 {
        return None;
    }
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for w in samples.windows(3) {
        let (prev, cur, next) = (w[0], w[1], w[2]);
        s11 += cur * cur;
        s12 += cur * prev;
        s22 += prev * prev;
        r1 += next * cur;
        r2 += next * prev;
    }
    let det = s11 * s22 - s12 * s12;
    if det == 0.0 {
        return None;
    }
    let c1 = (r1 * s22 - r2 * s12) / det;
    let c2 = (s11 * r2 - s12 * r1) / det;
    if c2 >= 0.0 {
        return None;
    }
    let damping = (-c2).sqrt();
    let cos = (c1 / (2.0 * damping)).clamp(-1.0, 1.0);
    Some(DampedFit {
        decay: -damping.ln() / dt,
        frequency: cos.acos() / dt,
    })
}

/// Slope of `ln |y|` against `t` (ordinary least squares).
pub fn fit_exponential_rate(ts: &[f64], ys: &[f64]) -> Option<f64> {
    let logs: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    linear_slope(ts, &logs)
}

/// Fits `z(t) ≈ z₀ e^{λt}` and returns `λ`; the phase is unwrapped along
/// the samples.
pub fn fit_complex_exponent(ts: &[f64], zs: &[Complex64]) -> Option<Complex64> {
    let logs: Vec<f64> = zs.iter().map(|z| z.norm().ln()).collect();
    let mut phases = Vec::with_capacity(zs.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for z in zs {
        let mut arg = z.arg() + offset;
        if let Some(p) = prev {
            while arg - p > std::f64::consts::PI {
                arg -= 2.0 * std::f64::consts::PI;
                offset -= 2.0 * std::f64::consts::PI;
            }
            while arg - p < -std::f64::consts::PI {
                arg += 2.0 * std::f64::consts::PI;
                offset += 2.0 * std::f64::consts::PI;
            }
        }
        prev = Some(arg);
        phases.push(arg);
    }
    Some(Complex64::new(
        linear_slope(ts, &logs)?,
        linear_slope(ts, &phases)?,
    ))
}

fn linear_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs[..n].iter().zip(&ys[..n]) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    (sxx > 0.0 && sxy.is_finite()).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_damped_sinusoid() {
        let dt = 0.05;
        let xs: Vec<f64> = (0..200)
            .map(|k| {
                let t = k as f64 * dt;
                1.3 * (-0.2 * t).exp() * (0.7 * t + 0.4).cos()
            })
            .collect();
        let fit = fit_damped_oscillation(&xs, dt).unwrap();
        assert!((fit.decay - 0.2).abs() < 1e-10);
        assert!((fit.frequency - 0.7).abs() < 1e-10);
    }

    #[test]
    fn recovers_growth_rate() {
        let ts: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
        let ys: Vec<f64> = ts.iter().map(|t| -3.0 * (1.7 * t).exp()).collect();
        assert!((fit_exponential_rate(&ts, &ys).unwrap() - 1.7).abs() < 1e-12);
    }

    #[test]
    fn recovers_complex_exponent_across_branch_cut() {
        let lambda = Complex64::new(-0.3, -2.5);
        let ts: Vec<f64> = (0..100).map(|k| k as f64 * 0.1).collect();
        let zs: Vec<Complex64> = ts.iter().map(|t| (lambda * t).exp() * 2.0).collect();
        let fit = fit_complex_exponent(&ts, &zs).unwrap();
        assert!((fit - lambda).norm() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_damped_oscillation(&[1.0, 2.0], 0.1).is_none());
        assert!(fit_exponential_rate(&[1.0], &[1.0]).is_none());
    }
}
