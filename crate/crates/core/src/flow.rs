//! Kempf–Ness gradient flow `dT/dt = −μ(T) ⋆ T` integrated projectively,
//! and the Ness minimality test.

use crate::error::{Error, Result};
use crate::moment::{infinitesimal_action, moment_map, HermTriple};
use crate::tensor::{Tensor3, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    /// Initial and maximal RK4 step.
    pub step: f64,
    pub residual_tol: f64,
    pub max_steps: usize,
    /// Keep a copy of the iterate every this many accepted steps.
    pub snapshot_every: Option<usize>,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            step: 0.05,
            residual_tol: 1e-8,
            max_steps: 200_000,
            snapshot_every: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowResult {
    /// Unit norm.
    pub limit: Tensor3,
    pub steps: usize,
    pub converged: bool,
    pub lambda: f64,
    pub final_residual: f64,
    /// `‖μ‖` at the start and after every accepted step.
    pub mu_norm_trajectory: Vec<f64>,
    pub snapshots: Vec<(usize, Tensor3)>,
    pub final_step: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NessCertificate {
    pub lambda: f64,
    pub residual: f64,
    pub mu: HermTriple,
    pub tol: f64,
    pub valid: bool,
}

// smallest step at which a ‖μ‖ increase is still rejected
const MIN_STEP: f64 = 1e-10;
// ‖μ‖ increases below this are rounding, not overshoot
const INCREASE_SLACK: f64 = 1e-14;
const TINY_STEP_SLACK: f64 = 1e-12;
const GROW_AFTER: usize = 10;

/// `(μ(T) ⋆ T, μ(T))`.
fn drift(t: &Tensor3) -> Result<(Tensor3, HermTriple)> {
    let mu = moment_map(t)?;
    Ok((infinitesimal_action(&mu, t)?, mu))
}

/// `λ = Re⟨T, X⟩/‖T‖²` and `‖X − λT‖/‖T‖` for `X = μ(T) ⋆ T`.
fn lambda_residual(t: &Tensor3, x: &Tensor3) -> Result<(f64, f64)> {
    let ns = t.norm_sq();
    let lambda = t.inner(x)?.re / ns;
    let mut r = x.clone();
    r.axpy(C64::new(-lambda, 0.0), t)?;
    Ok((lambda, r.norm() / ns.sqrt()))
}

fn rk4_step(t: &Tensor3, k1: &Tensor3, h: f64) -> Result<Tensor3> {
    // f(T) = −μ(T) ⋆ T
    let stage = |base: &Tensor3, k: &Tensor3, c: f64| -> Result<Tensor3> {
        let mut y = base.clone();
        y.axpy(C64::new(-c, 0.0), k)?;
        Ok(drift(&y)?.0)
    };
    let k2 = stage(t, k1, h / 2.0)?;
    let k3 = stage(t, &k2, h / 2.0)?;
    let k4 = stage(t, &k3, h)?;
    let mut y = t.clone();
    for (k, w) in [(k1, 1.0), (&k2, 2.0), (&k3, 2.0), (&k4, 1.0)] {
        y.axpy(C64::new(-h * w / 6.0, 0.0), k)?;
    }
    y.normalized()
}

pub fn flow(t: &Tensor3, config: &FlowConfig) -> Result<FlowResult> {
    if !(config.step > 0.0 && config.residual_tol > 0.0) {
        return Err(Error::Format("step and residual_tol must be positive".into()));
    }
    let mut cur = t.normalized()?;
    let (mut x, mu) = drift(&cur)?;
    let mut mu_norm = mu.norm();
    let mut trajectory = vec![mu_norm];
    let mut snapshots = Vec::new();
    let mut h = config.step;
    let mut streak = 0usize;
    let mut steps = 0usize;
    let (mut lambda, mut residual) = lambda_residual(&cur, &x)?;

    while residual > config.residual_tol && steps < config.max_steps {
        let next = rk4_step(&cur, &x, h)?;
        let (nx, nmu) = drift(&next)?;
        let n_norm = nmu.norm();
        let increase = n_norm - mu_norm;
        if increase > INCREASE_SLACK && (h > MIN_STEP || increase > TINY_STEP_SLACK) {
            h /= 2.0;
            streak = 0;
            if h < f64::EPSILON {
                break;
            }
            continue;
        }
        cur = next;
        x = nx;
        mu_norm = n_norm;
        steps += 1;
        trajectory.push(mu_norm);
        if let Some(every) = config.snapshot_every {
            if every > 0 && steps.is_multiple_of(every) {
                snapshots.push((steps, cur.clone()));
            }
        }
        streak += 1;
        if streak >= GROW_AFTER && h < config.step {
            h = (2.0 * h).min(config.step);
            streak = 0;
        }
        (lambda, residual) = lambda_residual(&cur, &x)?;
    }
    Ok(FlowResult {
        limit: cur,
        steps,
        converged: residual <= config.residual_tol,
        lambda,
        final_residual: residual,
        mu_norm_trajectory: trajectory,
        snapshots,
        final_step: h,
    })
}

/// `λ = ⟨T, μ(T)⋆T⟩/‖T‖²` and the residual `‖μ(T)⋆T − λT‖/‖T‖`; a residual
/// within `tol` certifies that `‖μ(T)‖` is minimal over the moment polytope.
pub fn ness_minimality(t: &Tensor3, tol: f64) -> Result<NessCertificate> {
    let (x, mu) = drift(t)?;
    let (lambda, residual) = lambda_residual(t, &x)?;
    Ok(NessCertificate {
        lambda,
        residual,
        mu,
        tol,
        valid: residual <= tol,
    })
}

/// Largest increase between consecutive entries.
pub fn max_increase(trajectory: &[f64]) -> f64 {
    trajectory
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max)
}

/// Evenly spaced indices, first and last included, at most `max` of them.
pub fn decimate<T: Clone>(v: &[T], max: usize) -> Vec<T> {
    if v.len() <= max {
        return v.to_vec();
    }
    if max < 2 {
        return v.iter().take(max).cloned().collect();
    }
    let last = v.len() - 1;
    (0..max).map(|s| v[s * last / (max - 1)].clone()).collect()
}
