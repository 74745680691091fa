//! Streaming estimators: every update consumes a fresh mini-batch
//! covariance estimate instead of the true matrix.

mod solvers;
mod stream;

pub use solvers::{dmstream, minibatch_power_momentum, oja, stochastic_power, DmStreamConfig};
pub use stream::{batch_estimate, empirical_variance_norm, SampleStream, StreamSource};

use crate::error::{Error, Result};
use crate::vector::{norm2, UnitVector};
use ndarray::Array2;

/// Step-size schedule for Oja's rule. The index handed to the schedule is
/// the 1-based position of the first sample of the round in the overall
/// stream, matching the classical per-sample `η_t = c/t` family when
/// updates arrive in batches.
#[derive(Debug, Clone, Copy)]
pub enum EtaSchedule {
    /// `η = c / t` with t the cumulative sample index.
    InverseSampleCount { c: f64 },
    /// Constant step size.
    Fixed(f64),
}

impl Default for EtaSchedule {
    fn default() -> Self {
        EtaSchedule::InverseSampleCount { c: 27.0 }
    }
}

impl EtaSchedule {
    pub fn eta(&self, first_sample_index: u64) -> f64 {
        match self {
            EtaSchedule::InverseSampleCount { c } => c / first_sample_index as f64,
            EtaSchedule::Fixed(v) => *v,
        }
    }
}

/// Shared knobs for the streaming solvers. Each solver reads the subset it
/// needs; see the individual functions.
#[derive(Debug, Clone)]
pub struct StreamConfig {
    pub batch_size: usize,
    /// Round budget for single-phase solvers.
    pub rounds: usize,
    /// Pre-momentum round cap (dmstream).
    pub j_budget: usize,
    /// Momentum round budget (dmstream).
    pub k_budget: usize,
    /// Pre-momentum exit threshold on |μ_j − μ_{j−1}| (dmstream).
    pub rho: f64,
    /// Momentum coefficient (mini-batch momentum).
    pub beta: Option<f64>,
    /// Optional early exit on the squared iterate distance (dmstream phase 2).
    pub eps: Option<f64>,
    pub eta: EtaSchedule,
}

impl StreamConfig {
    pub fn new(batch_size: usize, rounds: usize) -> Self {
        Self {
            batch_size,
            rounds,
            j_budget: 10,
            k_budget: rounds.saturating_sub(10).max(1),
            rho: 0.1,
            beta: None,
            eps: None,
            eta: EtaSchedule::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch size must be >= 1".into()));
        }
        if self.rounds == 0 || self.j_budget == 0 || self.k_budget == 0 {
            return Err(Error::InvalidArgument("round budgets must be >= 1".into()));
        }
        Ok(())
    }
}

/// `log₁₀(1 − ‖Xq‖/‖Xv₁‖)` for an n×d data matrix with rows as samples.
/// Clamps the argument at 1e-300, so a perfectly aligned `q` reports −300.
pub fn log_error_metric(x: &Array2<f64>, q: &UnitVector, v1: &UnitVector) -> Result<f64> {
    let d = x.ncols();
    if q.dim() != d || v1.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: q.dim().max(v1.dim()),
        });
    }
    let den = norm2(&x.dot(v1.as_array()));
    if den == 0.0 {
        return Err(Error::InvalidArgument("degenerate data: ‖Xv₁‖ = 0".into()));
    }
    let num = norm2(&x.dot(q.as_array()));
    let arg = (1.0 - num / den).max(1e-300);
    Ok(arg.log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn log_error_floor_at_alignment() {
        let x = array![[1.0, 0.0], [0.0, 0.5], [2.0, 0.0]];
        let v1 = UnitVector::basis(2, 0);
        assert_eq!(log_error_metric(&x, &v1, &v1).unwrap(), -300.0);
    }

    #[test]
    fn log_error_on_diagonal_data() {
        // rows scaled basis vectors: ‖Xq‖ for q = e₂ is σ_low, for v₁ = e₁ is σ₁
        let x = array![[2.0, 0.0], [0.0, 1.0]];
        let v1 = UnitVector::basis(2, 0);
        let q = UnitVector::basis(2, 1);
        let got = log_error_metric(&x, &q, &v1).unwrap();
        assert!((got - (1.0f64 - 0.5).log10()).abs() <= 1e-12);
    }

    #[test]
    fn log_error_degenerate_data_is_error() {
        let x = array![[0.0, 1.0]];
        let v1 = UnitVector::basis(2, 0);
        let q = UnitVector::basis(2, 1);
        assert!(log_error_metric(&x, &q, &v1).is_err());
    }
}
