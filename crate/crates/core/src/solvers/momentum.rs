use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::metrics::rayleigh_quotient;
use crate::report::{EigenEstimate, SolveReport, StopKind, StopRule};
use crate::vector::UnitVector;

use super::MomentumState;

/// Momentum coefficient for the two-term power recurrence.
///
/// Acceleration is guaranteed for `2√β ≤ λ₁`; larger values are accepted
/// anyway so divergence behaviour can be measured. Such runs typically
/// exhaust the iteration cap and come back with `converged = false`.
#[derive(Debug, Clone, Copy)]
pub struct MomentumConfig {
    pub beta: f64,
}

impl MomentumConfig {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta >= 0.0) {
            return Err(Error::InvalidArgument("beta must be nonnegative".into()));
        }
        Ok(Self { beta })
    }
}

/// Power iteration with momentum:
/// `q_k = (Aq_{k−1} − βq_{k−2}) / ‖Aq_{k−1} − βq_{k−2}‖`, with `q_{−1} = 0`
/// so the first step equals a vanilla power step. With `β = 0` the iterate
/// sequence is identical to [`super::power_method`].
pub fn power_momentum(
    a: &SymmetricMatrix,
    q0: &UnitVector,
    cfg: &MomentumConfig,
    stop: &StopRule,
) -> Result<SolveReport> {
    stop.validate()?;
    if let StopKind::SineSquaredVsReference(r) = &stop.kind {
        crate::metrics::sin2_error(q0, r)?;
    }
    let mut state = MomentumState::start(q0.clone());
    let mut nu = rayleigh_quotient(a, q0)?;
    let mut trajectory = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    for k in 1..=stop.max_iter {
        let q_prev = state.q.clone();
        let nu_next = state.step(a, cfg.beta)?;
        let stat = stop.statistic(&q_prev, &state.q, nu, nu_next);
        trajectory.push((k, stat));
        nu = nu_next;
        iterations = k;
        if stop.fires(stat) {
            converged = true;
            break;
        }
    }
    if matches!(stop.kind, StopKind::MaxIterations) {
        converged = true;
    }

    let mut report = SolveReport::single_phase(
        iterations,
        EigenEstimate {
            vector: state.q,
            value: nu,
        },
        Some(trajectory),
        converged,
    );
    report.beta_used = Some(cfg.beta);
    Ok(report)
}

/// Worst-case sin²θ(q_k, v₁) guarantee for the momentum iteration.
///
/// For `λ₂ ≤ 2√β ≤ λ₁` this is the accelerated bound
/// `(4/overlap²)·(2√β/(λ₁+√(λ₁²−4β)))^{2k}`; for `2√β < λ₂` the
/// generalized two-root form applies. Requesting `2√β > λ₁` is an error:
/// no guarantee exists there.
pub fn powerm_bound(k: usize, lambda1: f64, lambda2: f64, beta: f64, overlap: f64) -> Result<f64> {
    if !(lambda1 > 0.0 && lambda2 > 0.0 && lambda2 < lambda1 && lambda1 <= 1.0 + 1e-12) {
        return Err(Error::InvalidArgument(
            "need 0 < λ₂ < λ₁ ≤ 1 for the momentum bound".into(),
        ));
    }
    if !(overlap > 0.0) {
        return Err(Error::InvalidArgument(
            "overlap |q₀ᵀv₁| must be positive".into(),
        ));
    }
    if !(beta >= 0.0) {
        return Err(Error::InvalidArgument("beta must be nonnegative".into()));
    }
    if 4.0 * beta > lambda1 * lambda1 {
        return Err(Error::InvalidArgument(
            "outside guarantee region: 2√β exceeds λ₁".into(),
        ));
    }
    let denom = lambda1 + (lambda1 * lambda1 - 4.0 * beta).max(0.0).sqrt();
    let ratio = if lambda2 * lambda2 <= 4.0 * beta {
        2.0 * beta.sqrt() / denom
    } else {
        (lambda2 + (lambda2 * lambda2 - 4.0 * beta).sqrt()) / denom
    };
    let constant = if lambda2 * lambda2 <= 4.0 * beta {
        4.0
    } else {
        1.0
    };
    Ok(constant / (overlap * overlap) * ratio.powi(2 * k as i32))
}
