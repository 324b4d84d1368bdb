use super::field::SelfForce;
use super::Trajectory;
use crate::error::{Error, Result};

/// `max |η v̈(t) − s(x(t), v(t))|` over the interior samples, with `v̈`
/// (the jerk) from the five-point second-difference stencil on the
/// uniformly spaced velocity samples.
pub fn third_derivative_residual<S: SelfForce + ?Sized>(traj: &Trajectory, self_force: &S, eta: f64) -> Result<f64> {
    // An early stop appends one off-grid sample; only the uniform part is
    // usable by the stencil.
    let h = traj.output_step();
    let uniform: Vec<_> = traj
        .samples
        .iter()
        .enumerate()
        .take_while(|(i, s)| (s.t - traj.samples[0].t - *i as f64 * h).abs() <= 1e-9 * h.max(s.t.abs()))
        .map(|(_, s)| s)
        .collect();
    if uniform.len() < 5 {
        return Err(Error::TooFewSamples {
            needed: 5,
            got: uniform.len(),
        });
    }
    let mut worst: f64 = 0.0;
    for w in uniform.windows(5) {
        let jerk = (-w[0].v + w[1].v * 16.0 - w[2].v * 30.0 + w[3].v * 16.0 - w[4].v) / (12.0 * h * h);
        let mid = w[2];
        worst = worst.max((jerk * eta - self_force.eval(&mid.x, &mid.v)).norm());
    }
    Ok(worst)
}
