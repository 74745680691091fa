//! Deterministic eigensolvers and the evaluators for their convergence
//! guarantees.

mod dmpower;
mod lanczos;
mod momentum;
mod power;
mod simultaneous;

pub use dmpower::{check_rho_precision, dmpower, practical_j_bound, DmPowerConfig, RhoMode};
pub use lanczos::{lanczos, LanczosResult};
pub use momentum::{power_momentum, powerm_bound, MomentumConfig};
pub use power::power_method;
pub use simultaneous::{simultaneous_iteration, BlockResult};

use ndarray::Array1;

use crate::error::Result;
use crate::matrix::SymmetricMatrix;
use crate::metrics::rayleigh_quotient;
use crate::vector::UnitVector;

/// One vanilla power update: `q⁺ = Aq/‖Aq‖`, plus its Rayleigh quotient.
///
/// Shared by the deterministic and streaming solvers so that a streaming
/// run over a zero-variance source reproduces the deterministic iterate
/// sequence bit for bit.
pub fn power_update(a: &SymmetricMatrix, q: &UnitVector) -> Result<(UnitVector, f64)> {
    let y = a.mul_unit(q)?;
    let q_next = UnitVector::normalize(y)?;
    let nu = rayleigh_quotient(a, &q_next)?;
    Ok((q_next, nu))
}

/// One inexact-deflation update: `w⁺ = (A − ν qqᵀ)w / ‖·‖`, plus the
/// Rayleigh quotient `w⁺ᵀAw⁺` that estimates the second eigenvalue.
pub fn deflation_update(
    a: &SymmetricMatrix,
    nu: f64,
    q: &UnitVector,
    w: &UnitVector,
) -> Result<(UnitVector, f64)> {
    let mut z = a.mul_unit(w)?;
    let qw = q.as_array().dot(w.as_array());
    z.scaled_add(-nu * qw, q.as_array());
    let w_next = UnitVector::normalize(z)?;
    let mu = rayleigh_quotient(a, &w_next)?;
    Ok((w_next, mu))
}

/// Two-term momentum state. The recurrence is kept projectively linear:
/// after forming `y = Aq − β·prev`, both the new iterate and the old one
/// are divided by the same `‖y‖`, so the pair spans the exact Krylov
/// trajectory of the unnormalized recurrence.
#[derive(Debug, Clone)]
pub struct MomentumState {
    /// Current iterate, unit norm.
    pub q: UnitVector,
    /// Previous iterate divided by the last normalization factor.
    prev: Array1<f64>,
}

impl MomentumState {
    /// Starts the recurrence with `q_{-1} = 0`, so the first step is a
    /// plain power update.
    pub fn start(q0: UnitVector) -> Self {
        let prev = Array1::zeros(q0.dim());
        Self { q: q0, prev }
    }

    /// Advances one step; returns the Rayleigh quotient of the new iterate.
    pub fn step(&mut self, a: &SymmetricMatrix, beta: f64) -> Result<f64> {
        let mut y = a.mul_unit(&self.q)?;
        y.scaled_add(-beta, &self.prev);
        let s = crate::vector::norm2(&y);
        let q_next = UnitVector::normalize(y)?;
        self.prev = self.q.as_array() / s;
        self.q = q_next;
        rayleigh_quotient(a, &self.q)
    }
}
