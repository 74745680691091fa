//! Deflation-based power iteration clustering (DPIC).
//!
//! Pipeline: pairwise affinity → degree normalization → top-two
//! eigenvectors of the normalized affinity, extracted by a power-method
//! variant with a Schur-complement deflation in between → k-means on the
//! two-column embedding.

mod affinity;
mod datasets;
mod kmeans;

pub use affinity::{
    affinity, normalize_affinity, schur_deflate, symmetric_normalized, SigmaRule, Similarity,
};
pub use datasets::{load_points, make_circles, make_moons, store_labels, store_points, PointSet};
pub use kmeans::kmeans;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::report::StopRule;
use crate::solvers::{dmpower, power_method, power_momentum, DmPowerConfig, MomentumConfig};
use crate::vector::UnitVector;

/// Which eigensolver drives the two extractions.
#[derive(Debug, Clone, Copy)]
pub enum DpicSolver {
    Power,
    PowerMomentum { beta: f64 },
    DmPower { rho: f64 },
}

/// Label assignment with permutation-invariant accuracy.
#[derive(Debug, Clone)]
pub struct ClusterResult {
    pub labels: Vec<usize>,
    /// Best agreement with ground truth over label relabelings; present
    /// only when the point set carries truth labels.
    pub accuracy: Option<f64>,
    /// Eigensolver rounds summed over both extractions.
    pub solver_iterations: usize,
    /// False when an extraction hit its iteration cap; clustering is still
    /// attempted on the last iterates.
    pub converged: bool,
}

/// Two-cluster accuracy: fraction of matching labels, maximized over the
/// two relabelings.
pub fn clustering_accuracy(labels: &[usize], truth: &[usize]) -> f64 {
    let n = labels.len().min(truth.len());
    let hits = labels.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / n as f64;
    hits.max(1.0 - hits)
}

/// Runs the full DPIC pipeline for k = 2.
///
/// The eigensolvers operate on the symmetric form D^{-1/2}AD^{-1/2} (same
/// spectrum as the row-stochastic W = D⁻¹A); eigenvectors of W are
/// recovered afterwards through the D^{-1/2} back-transform. Each
/// extraction stops on the squared iterate distance at `eps`.
pub fn dpic(
    points: &PointSet,
    solver: DpicSolver,
    eps: f64,
    seed: u64,
    similarity: &Similarity,
) -> Result<ClusterResult> {
    dpic_with_cap(points, solver, eps, seed, similarity, crate::report::DEFAULT_MAX_ITER)
}

/// [`dpic`] with an explicit per-extraction iteration cap. A fixed-β
/// momentum solver can sit arbitrarily close to its critical coefficient
/// on the deflated matrix, so grid runs bound the damage with a cap; a
/// capped extraction flags the result and clustering proceeds on the last
/// iterate.
pub fn dpic_with_cap(
    points: &PointSet,
    solver: DpicSolver,
    eps: f64,
    seed: u64,
    similarity: &Similarity,
    max_iter: usize,
) -> Result<ClusterResult> {
    let n = points.len();
    let a = affinity(points, similarity)?;
    let (wt, dinv_sqrt) = symmetric_normalized(&a)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut iterations = 0;
    let mut converged = true;
    let mut embedding = Array2::<f64>::zeros((n, 2));
    let mut current = wt;
    for component in 0..2 {
        let q0 = UnitVector::random(n, &mut rng);
        let w0 = UnitVector::random(n, &mut rng);
        let stop = StopRule::iterate_distance(eps).with_max_iter(max_iter);
        let (vector, iters, ok) = match solver {
            DpicSolver::Power => {
                let r = power_method(&current, &q0, &stop)?;
                (r.estimate.vector, r.iterations_total, r.converged)
            }
            DpicSolver::PowerMomentum { beta } => {
                let r = power_momentum(&current, &q0, &MomentumConfig::new(beta)?, &stop)?;
                (r.estimate.vector, r.iterations_total, r.converged)
            }
            DpicSolver::DmPower { rho } => {
                let mut cfg = DmPowerConfig::new(rho, eps);
                cfg.max_iter_per_phase = max_iter;
                let r = dmpower(&current, &q0, &w0, &cfg)?;
                (r.estimate.vector, r.iterations_total, r.converged)
            }
        };
        iterations += iters;
        converged &= ok;

        // back-transform to an eigenvector of W = D⁻¹A
        let mut col = vector.as_array() * &dinv_sqrt;
        let norm = col.dot(&col).sqrt();
        col.mapv_inplace(|x| x / norm);
        embedding.column_mut(component).assign(&col);

        if component == 0 {
            current = schur_deflate(&current, &vector)?;
        }
    }

    let labels = kmeans(&embedding, 2, seed)?;
    let accuracy = points
        .labels
        .as_ref()
        .map(|t| clustering_accuracy(&labels, t));
    Ok(ClusterResult {
        labels,
        accuracy,
        solver_iterations: iterations,
        converged,
    })
}
