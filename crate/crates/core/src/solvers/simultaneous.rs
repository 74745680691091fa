use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::report::{EigenEstimate, StopKind, StopRule};
use crate::vector::UnitVector;

/// Result of a block (simultaneous) iteration.
#[derive(Debug, Clone)]
pub struct BlockResult {
    /// Rayleigh estimates for the top-k eigenpairs, leading first.
    pub estimates: Vec<EigenEstimate>,
    pub iterations: usize,
    pub converged: bool,
}

/// Classical simultaneous power iteration on a k-column block: multiply by
/// A, re-orthonormalize by Gram–Schmidt every step. The stop rule watches
/// the leading column, which is also the column that converges first; the
/// trailing Rayleigh estimates are whatever the block holds at exit.
///
/// With `k = 1` the trajectory coincides with [`super::power_method`].
pub fn simultaneous_iteration(
    a: &SymmetricMatrix,
    k: usize,
    stop: &StopRule,
    seed: u64,
) -> Result<BlockResult> {
    stop.validate()?;
    let d = a.dim();
    if k == 0 || k > d {
        return Err(Error::InvalidArgument(format!(
            "block size {k} out of range for d={d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Array2::from_shape_fn((d, k), |_| rng.sample::<f64, _>(StandardNormal));
    let mut block = crate::matgen::haar_from_gaussian(g).map_err(|_| Error::RankCollapse)?;

    let mut iterations = 0;
    let mut converged = false;
    let mut nu_lead = lead_rayleigh(a, &block);
    for it in 1..=stop.max_iter {
        let z = a.as_array().dot(&block);
        let mut next = crate::matgen::haar_from_gaussian(z).map_err(|_| Error::RankCollapse)?;
        // keep column signs aligned with the previous block so iterate
        // distances measure rotation, not sign churn
        for c in 0..k {
            if next.column(c).dot(&block.column(c)) < 0.0 {
                next.column_mut(c).mapv_inplace(|x| -x);
            }
        }
        let lead_prev = UnitVector::normalize(block.column(0).to_owned())?;
        let lead_next = UnitVector::normalize(next.column(0).to_owned())?;
        let nu_next = lead_rayleigh(a, &next);
        let stat = stop.statistic(&lead_prev, &lead_next, nu_lead, nu_next);
        block = next;
        nu_lead = nu_next;
        iterations = it;
        if stop.fires(stat) {
            converged = true;
            break;
        }
    }
    if matches!(stop.kind, StopKind::MaxIterations) {
        converged = true;
    }

    let estimates = (0..k)
        .map(|c| {
            let v = UnitVector::normalize(block.column(c).to_owned())?;
            let value = crate::metrics::rayleigh_quotient(a, &v)?;
            Ok(EigenEstimate { vector: v, value })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockResult {
        estimates,
        iterations,
        converged,
    })
}

fn lead_rayleigh(a: &SymmetricMatrix, block: &Array2<f64>) -> f64 {
    let v = block.column(0);
    v.dot(&a.as_array().dot(&v))
}
