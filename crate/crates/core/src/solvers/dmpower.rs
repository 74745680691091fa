use crate::error::{Error, Result};
use crate::matgen::Spectrum;
use crate::matrix::SymmetricMatrix;
use crate::metrics::rayleigh_quotient;
use crate::report::{EigenEstimate, SolveReport, DEFAULT_MAX_ITER};
use crate::vector::UnitVector;

use super::{deflation_update, power_update, MomentumState};

/// Exit rule for the pre-momentum phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoMode {
    /// Leave once successive second-eigenvalue estimates are ρ-close:
    /// `|μ_j − μ_{j−1}| ≤ ρ`. The default.
    MuDiff,
    /// Leave once the deflation iterate settles: `‖w_j − w_{j−1}‖ ≤ ρ`.
    WDiff,
    /// Run exactly J rounds.
    FixedJ,
}

/// Configuration for [`dmpower`].
#[derive(Debug, Clone)]
pub struct DmPowerConfig {
    /// Pre-momentum precision; must lie in (0, 1) for the diff modes.
    pub rho: f64,
    pub rho_mode: RhoMode,
    /// Round budget for [`RhoMode::FixedJ`]; also caps the diff modes when set.
    pub j: Option<usize>,
    /// Momentum-phase threshold on the squared iterate distance.
    pub eps: f64,
    pub max_iter_per_phase: usize,
}

impl DmPowerConfig {
    pub fn new(rho: f64, eps: f64) -> Self {
        Self {
            rho,
            rho_mode: RhoMode::MuDiff,
            j: None,
            eps,
            max_iter_per_phase: DEFAULT_MAX_ITER,
        }
    }

    pub fn with_mode(mut self, mode: RhoMode, j: Option<usize>) -> Self {
        self.rho_mode = mode;
        self.j = j;
        self
    }

    fn validate(&self) -> Result<()> {
        match self.rho_mode {
            RhoMode::FixedJ => {
                if self.j.is_none() {
                    return Err(Error::InvalidArgument(
                        "fixed-J mode needs a J budget".into(),
                    ));
                }
            }
            _ => {
                if !(self.rho > 0.0 && self.rho < 1.0) {
                    return Err(Error::InvalidArgument("rho must lie in (0, 1)".into()));
                }
            }
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidArgument("eps must be positive".into()));
        }
        if self.max_iter_per_phase == 0 {
            return Err(Error::InvalidArgument("phase cap must be >= 1".into()));
        }
        Ok(())
    }
}

/// Delayed momentum power method.
///
/// Phase 1 runs a vanilla power iteration on `q` while an inexact
/// Hotelling deflation `(A − ν_j q_j q_jᵀ)` drives a second iterate `w`
/// toward the second eigenvector; the Rayleigh quotients `μ_j = w_jᵀAw_j`
/// estimate λ₂. Once the phase exits (per [`RhoMode`]), the momentum
/// coefficient is fixed at `β = μ_J²/4` and phase 2 continues from `q_J`
/// with the two-term momentum recurrence until the squared iterate
/// distance reaches `eps`.
///
/// The report separates the phase counts, carries `μ_J` in
/// `lambda2_estimate`, and sets `converged` only when both phases exited
/// by their rules within their caps.
pub fn dmpower(
    a: &SymmetricMatrix,
    q0: &UnitVector,
    w0: &UnitVector,
    cfg: &DmPowerConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    let mut q = q0.clone();
    let mut w = w0.clone();
    let mut mu_prev: Option<f64> = None;
    let mut mu = rayleigh_quotient(a, &w)?;
    let phase1_cap = match cfg.rho_mode {
        RhoMode::FixedJ => cfg.j.unwrap(),
        _ => cfg.j.unwrap_or(cfg.max_iter_per_phase),
    };

    let mut j_used = 0;
    let mut phase1_exited = false;
    for j in 1..=phase1_cap {
        let (q_next, nu) = power_update(a, &q)?;
        q = q_next;
        let (w_next, mu_next) = deflation_update(a, nu, &q, &w)?;
        j_used = j;
        let exit = match cfg.rho_mode {
            RhoMode::MuDiff => mu_prev.is_some_and(|mp| (mu_next - mp).abs() <= cfg.rho),
            RhoMode::WDiff => w_next.distance(&w) <= cfg.rho,
            RhoMode::FixedJ => j == phase1_cap,
        };
        mu_prev = Some(mu_next);
        mu = mu_next;
        w = w_next;
        if exit {
            phase1_exited = true;
            break;
        }
    }

    let beta = mu * mu / 4.0;
    let mut state = MomentumState::start(q);
    let mut nu = rayleigh_quotient(a, &state.q)?;
    let mut k_used = 0;
    let mut phase2_converged = false;
    for k in 1..=cfg.max_iter_per_phase {
        let q_prev = state.q.clone();
        nu = state.step(a, beta)?;
        k_used = k;
        let d = state.q.distance(&q_prev);
        if d * d <= cfg.eps {
            phase2_converged = true;
            break;
        }
    }

    Ok(SolveReport {
        iterations_total: j_used + k_used,
        iterations_pre_momentum: j_used,
        iterations_momentum: k_used,
        estimate: EigenEstimate {
            vector: state.q,
            value: nu,
        },
        lambda2_estimate: Some(mu),
        beta_used: Some(beta),
        trajectory: None,
        converged: phase1_exited && phase2_converged,
        samples_consumed: None,
    })
}

/// Momentum-phase safety window: the phase converges exactly when the
/// λ₂ estimate is within the first eigengap of the truth,
/// `|λ₂ − λ̂₂| ≤ λ₁ − λ₂`.
pub fn check_rho_precision(lambda2_est: f64, spectrum: &Spectrum) -> bool {
    let l1 = spectrum.lambda(0);
    let l2 = spectrum.lambda(1);
    (l2 - lambda2_est).abs() <= l1 - l2
}

/// Order-level pre-momentum budget from eigengap lower bounds
/// `α₁ ≤ λ₁−λ₂`, `α₂ ≤ λ₂−λ₃`:
///
/// `J = ⌈(1/α₁)·ln(tan²θ₀/(δα₂)) + (1/α₂)·ln(dτ/ρ)⌉`, `δ = min{ρ, 1/(τ√d)}`.
pub fn practical_j_bound(
    alpha1: f64,
    alpha2: f64,
    rho: f64,
    tau: f64,
    d: usize,
    theta0: f64,
) -> Result<usize> {
    if !(alpha1 > 0.0 && alpha2 > 0.0) {
        return Err(Error::InvalidArgument(
            "gap lower bounds must be positive".into(),
        ));
    }
    if !(tau > 1.0) || d == 0 {
        return Err(Error::InvalidArgument("need tau > 1 and d >= 1".into()));
    }
    if !(rho > 0.0) || rho >= alpha1.sqrt() || rho >= 0.5 {
        return Err(Error::InvalidArgument(
            "precondition violated: need rho < min(1/2, sqrt(alpha1))".into(),
        ));
    }
    let delta = rho.min(1.0 / (tau * (d as f64).sqrt()));
    let tan2 = theta0.tan().powi(2);
    let arg1 = tan2 / (delta * alpha2);
    let arg2 = d as f64 * tau / rho;
    if !(arg1 > 0.0 && arg2 > 0.0) {
        return Err(Error::InvalidArgument(
            "degenerate logarithm argument".into(),
        ));
    }
    let j = arg1.ln() / alpha1 + arg2.ln() / alpha2;
    Ok(j.ceil().max(0.0) as usize)
}
