//! Error metrics and analytic checks shared by solvers and tests.

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::vector::UnitVector;

/// Rayleigh quotient `qᵀAq` of a unit vector.
pub fn rayleigh_quotient(a: &SymmetricMatrix, q: &UnitVector) -> Result<f64> {
    let aq = a.mul_unit(q)?;
    Ok(q.as_array().dot(&aq))
}

/// Squared sine of the angle between unit vectors: `1 − (qᵀv)²`.
///
/// Symmetric in its arguments and invariant under sign flips of either.
pub fn sin2_error(q: &UnitVector, v: &UnitVector) -> Result<f64> {
    if q.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            got: v.dim(),
        });
    }
    let c = q.dot(v);
    Ok((1.0 - c * c).max(0.0))
}

/// Spectral norm of the inexact-deflation perturbation
/// `‖λ₁v₁v₁ᵀ − ν qqᵀ‖₂`.
///
/// The difference has rank at most two, so the norm is computed from its
/// restriction to span{v₁, q} instead of a dense decomposition: with
/// `c = v₁ᵀq`, `s² = 1 − c²`, the 2×2 restriction has trace `t = λ₁ − ν`
/// and determinant `−λ₁ν s²`, giving norm `|t|/2 + sqrt(t²/4 + λ₁ν s²)`.
pub fn perturbation_norm(a_lambda1: f64, v1: &UnitVector, nu: f64, q: &UnitVector) -> Result<f64> {
    if v1.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: v1.dim(),
            got: q.dim(),
        });
    }
    let c = v1.dot(q);
    let s2 = (1.0 - c * c).max(0.0);
    let t = a_lambda1 - nu;
    let disc = (t * t / 4.0 + a_lambda1 * nu * s2).max(0.0).sqrt();
    Ok(t.abs() / 2.0 + disc)
}

/// Per-round noise-magnitude conditions under which a noisy power method
/// still converges: `5‖G‖ ≤ ε·gap` and `5‖UᵀG‖ ≤ gap/(τ√d)`.
pub fn hardt_price_check(
    g_norm: f64,
    g_proj_norm: f64,
    gap: f64,
    eps: f64,
    tau: f64,
    d: usize,
) -> Result<bool> {
    if !(gap > 0.0) {
        return Err(Error::InvalidArgument("gap must be positive".into()));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidArgument("eps must lie in (0, 1/2)".into()));
    }
    if !(tau > 1.0) {
        return Err(Error::InvalidArgument("tau must exceed 1".into()));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("d must be >= 1".into()));
    }
    Ok(5.0 * g_norm <= eps * gap && 5.0 * g_proj_norm <= gap / (tau * (d as f64).sqrt()))
}
