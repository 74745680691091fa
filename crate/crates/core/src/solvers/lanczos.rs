use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::report::EigenEstimate;
use crate::vector::UnitVector;

/// Breakdown threshold for the off-diagonal recurrence coefficient.
const BREAKDOWN_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct LanczosResult {
    pub estimate: EigenEstimate,
    /// Tridiagonalization steps actually taken.
    pub iterations: usize,
    /// Ritz residual bound `|β_m · s_m|` for the returned pair.
    pub residual: f64,
    pub converged: bool,
    /// True when the basis closed early on an invariant subspace.
    pub breakdown: bool,
}

/// m-step Lanczos tridiagonalization with optional full
/// reorthogonalization, followed by a dense Jacobi solve of the small
/// tridiagonal matrix. Returns the top Ritz pair lifted back to R^d.
///
/// Without reorthogonalization the basis loses orthogonality in floating
/// point and ghost eigenvalues appear; the flag exists to demonstrate
/// precisely that, so production callers should leave it on.
pub fn lanczos(
    a: &SymmetricMatrix,
    q0: &UnitVector,
    m: usize,
    full_reorth: bool,
) -> Result<LanczosResult> {
    let d = a.dim();
    if m == 0 || m > d {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ m ≤ d, got m={m}, d={d}"
        )));
    }
    if q0.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: q0.dim(),
        });
    }

    let mut basis: Vec<Array1<f64>> = Vec::with_capacity(m);
    let mut alphas: Vec<f64> = Vec::with_capacity(m);
    let mut betas: Vec<f64> = Vec::with_capacity(m);
    basis.push(q0.as_array().clone());
    let mut breakdown = false;
    let mut final_beta = 0.0;

    for j in 0..m {
        let v = &basis[j];
        let mut w = a.mul(v);
        if j > 0 {
            w.scaled_add(-betas[j - 1], &basis[j - 1]);
        }
        let alpha = v.dot(&w);
        alphas.push(alpha);
        w.scaled_add(-alpha, v);
        if full_reorth {
            for _pass in 0..2 {
                for b in &basis {
                    let c = b.dot(&w);
                    w.scaled_add(-c, b);
                }
            }
        }
        let beta = w.dot(&w).sqrt();
        if beta <= BREAKDOWN_TOL {
            breakdown = j + 1 < m;
            final_beta = 0.0;
            break;
        }
        if j + 1 == m {
            final_beta = beta;
            break;
        }
        betas.push(beta);
        basis.push(w / beta);
    }

    let steps = alphas.len();
    let mut t = Array2::<f64>::zeros((steps, steps));
    for i in 0..steps {
        t[[i, i]] = alphas[i];
        if i + 1 < steps {
            t[[i, i + 1]] = betas[i];
            t[[i + 1, i]] = betas[i];
        }
    }
    let t = SymmetricMatrix::new(t)?;
    let (ritz_values, ritz_vectors) = crate::oracle::oracle_eigh(&t)?;

    let s = ritz_vectors[0].as_array();
    let mut lifted = Array1::<f64>::zeros(d);
    for (coeff, b) in s.iter().zip(&basis) {
        lifted.scaled_add(*coeff, b);
    }
    let vector = UnitVector::normalize(lifted)?;
    let value = ritz_values.lambda(0);

    // Ritz residual bound |β_m · s_m|; exact zero when the subspace closed
    let residual = (final_beta * s[steps - 1]).abs();
    let converged = residual <= 1e-10 * value.abs().max(1.0);

    Ok(LanczosResult {
        estimate: EigenEstimate { vector, value },
        iterations: steps,
        residual,
        converged,
        breakdown,
    })
}
