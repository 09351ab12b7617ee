//! Lower bound for solutions of `X' <= c X^{1 + gamma}` that diverge at `T`:
//! `X(t) >= (gamma c (T - t))^{-1/gamma}`.

use crate::error::{Error, Result};

pub fn ode_lower_bound(gamma: f64, c: f64, t_blowup: f64, t: f64) -> Result<f64> {
    if !(gamma > 0.0 && c > 0.0) {
        return Err(Error::param(format!("gamma and c must be positive, got {gamma}, {c}")));
    }
    if !(t < t_blowup) {
        return Err(Error::param(format!("t = {t} is not before T = {t_blowup}")));
    }
    Ok((gamma * c * (t_blowup - t)).powf(-1.0 / gamma))
}

/// Closed-form solution of `X' = c X^{1 + gamma}` diverging at `T`.
pub fn equality_solution(gamma: f64, c: f64, t_blowup: f64, t: f64) -> f64 {
    (gamma * c * (t_blowup - t)).powf(-1.0 / gamma)
}

/// Forward-Euler iterates of `X' = c X^{1 + gamma}` from `(t0, x0)` until
/// `X` exceeds `cap`.
pub fn euler_trajectory(gamma: f64, c: f64, t0: f64, x0: f64, dt: f64, cap: f64) -> Vec<(f64, f64)> {
    let mut out = vec![(t0, x0)];
    let (mut t, mut x) = (t0, x0);
    while x < cap && x.is_finite() {
        x += dt * c * x.powf(1.0 + gamma);
        t += dt;
        out.push((t, x));
    }
    out
}

/// Divergence time read off the last two samples: `X^{-gamma}` is affine in
/// `t` for the equality solution, so its secant is extended to zero.
pub fn extrapolated_blowup_time(traj: &[(f64, f64)], gamma: f64) -> Option<f64> {
    let [.., (t0, x0), (t1, x1)] = traj else {
        return None;
    };
    let (y0, y1) = (x0.powf(-gamma), x1.powf(-gamma));
    if !(y0 > y1) {
        return None;
    }
    Some(t1 + y1 * (t1 - t0) / (y0 - y1))
}

#[derive(Clone, Debug, PartialEq)]
pub enum OdeVerdict {
    /// Smallest `X / bound` over the samples.
    Holds { min_ratio: f64 },
    Violated { t: f64, x: f64, bound: f64 },
    /// The trajectory does not satisfy the lemma's hypotheses.
    PreconditionUnmet(String),
}

impl OdeVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, OdeVerdict::Holds { .. })
    }
}

/// Checks a sampled trajectory against the lower bound.
///
/// The hypotheses are tested first: every secant slope must satisfy the
/// differential inequality with `X` at the right end point, and the
/// extrapolated divergence time must agree with `T` to within `time_tol`.
/// The bound is then required at every sample up to relative tolerance `rel_tol`.
pub fn verify_ode_lemma(
    traj: &[(f64, f64)],
    gamma: f64,
    c: f64,
    t_blowup: f64,
    time_tol: f64,
    rel_tol: f64,
) -> Result<OdeVerdict> {
    if traj.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            found: traj.len(),
        });
    }
    for w in traj.windows(2) {
        let ((t0, x0), (t1, x1)) = (w[0], w[1]);
        if !(t1 > t0) || !(x0 > 0.0) {
            return Ok(OdeVerdict::PreconditionUnmet(format!("samples must have increasing t and positive X (t = {t0})")));
        }
        let slope = (x1 - x0) / (t1 - t0);
        if slope > c * x1.max(x0).powf(1.0 + gamma) * (1.0 + rel_tol) {
            return Ok(OdeVerdict::PreconditionUnmet(format!("differential inequality fails on [{t0}, {t1}]")));
        }
    }
    let t_est = extrapolated_blowup_time(traj, gamma)
        .ok_or_else(|| Error::param("trajectory does not grow at its end"))?;
    if (t_est - t_blowup).abs() > time_tol {
        return Ok(OdeVerdict::PreconditionUnmet(format!(
            "trajectory diverges near t = {t_est}, not at T = {t_blowup}"
        )));
    }
    let mut min_ratio = f64::INFINITY;
    for &(t, x) in traj {
        if t >= t_blowup {
            break;
        }
        let bound = ode_lower_bound(gamma, c, t_blowup, t)?;
        let ratio = x / bound;
        if ratio < 1.0 - rel_tol {
            return Ok(OdeVerdict::Violated { t, x, bound });
        }
        min_ratio = min_ratio.min(ratio);
    }
    Ok(OdeVerdict::Holds { min_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_substitution() {
        assert_eq!(ode_lower_bound(1.0, 1.0, 2.0, 1.0).unwrap(), 1.0);
        assert!(ode_lower_bound(1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn equality_solution_saturates() {
        let (g, c, t_end) = (0.5, 2.0, 1.0);
        let traj: Vec<(f64, f64)> = (0..100).map(|k| {
            let t = k as f64 / 100.0;
            (t, equality_solution(g, c, t_end, t))
        }).collect();
        match verify_ode_lemma(&traj, g, c, t_end, 1e-9, 1e-9).unwrap() {
            OdeVerdict::Holds { min_ratio } => assert!((min_ratio - 1.0).abs() < 1e-9),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn slower_growth_misses_the_blowup_time() {
        // X' = (c/2) X^{1+gamma} from the bound at t = 0 diverges at 2T
        let (g, c, t_end) = (1.0, 1.0, 1.0);
        let traj: Vec<(f64, f64)> = (0..50).map(|k| {
            let t = k as f64 / 50.0;
            (t, equality_solution(g, 0.5 * c, 2.0 * t_end, t))
        }).collect();
        let v = verify_ode_lemma(&traj, g, c, t_end, 1e-3, 1e-9).unwrap();
        assert!(matches!(v, OdeVerdict::PreconditionUnmet(_)), "{v:?}");
    }

    #[test]
    fn euler_iterates_respect_the_bound() {
        let (g, c, dt) = (0.7, 1.5, 1e-4);
        let traj = euler_trajectory(g, c, 0.0, 2.0, dt, 1e8);
        let t_end = extrapolated_blowup_time(&traj, g).unwrap();
        assert!(verify_ode_lemma(&traj, g, c, t_end, dt, 1e-12).unwrap().holds());
    }
}
