use crate::error::Result;
use crate::matrix::SymmetricMatrix;
use crate::metrics::rayleigh_quotient;
use crate::report::{EigenEstimate, SolveReport, StopKind, StopRule};
use crate::vector::UnitVector;

use super::power_update;

/// Vanilla power iteration `q_k = Aq_{k−1}/‖Aq_{k−1}‖`.
///
/// Converges to the dominant eigenvector whenever the start is not
/// orthogonal to it; a degenerate start surfaces as `converged = false`
/// at the iteration cap (or as an annihilation error if the iterate
/// collapses outright). The report records the stop statistic for every
/// round in `trajectory`.
pub fn power_method(a: &SymmetricMatrix, q0: &UnitVector, stop: &StopRule) -> Result<SolveReport> {
    stop.validate()?;
    if let StopKind::SineSquaredVsReference(r) = &stop.kind {
        crate::metrics::sin2_error(q0, r)?;
    }
    let mut q = q0.clone();
    let mut nu = rayleigh_quotient(a, &q)?;
    let mut trajectory = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    for k in 1..=stop.max_iter {
        let (q_next, nu_next) = power_update(a, &q)?;
        let stat = stop.statistic(&q, &q_next, nu, nu_next);
        trajectory.push((k, stat));
        q = q_next;
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

    Ok(SolveReport::single_phase(
        iterations,
        EigenEstimate {
            vector: q,
            value: nu,
        },
        Some(trajectory),
        converged,
    ))
}
