//! Brute-force dense eigendecomposition used as ground truth.
//!
//! Cyclic Jacobi rotations: provably convergent for every real symmetric
//! matrix and entirely independent of the iterative solvers under test,
//! which is the point of an oracle. Costs O(d³) per sweep; fine at the
//! dimensions the experiments use.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::matgen::Spectrum;
use crate::matrix::SymmetricMatrix;
use crate::vector::UnitVector;

/// Off-diagonal Frobenius target, relative to max(1, ‖A‖_F).
const OFF_DIAG_TARGET: f64 = 1e-13;
const MAX_SWEEPS: usize = 60;

/// Full eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues in descending order with matching orthonormal
/// eigenvectors: pairwise `|vᵢᵀvⱼ| ≤ 1e-10` and reconstruction
/// `‖A − VΛVᵀ‖_F ≤ 1e-9·‖A‖_F`.
pub fn oracle_eigh(a: &SymmetricMatrix) -> Result<(Spectrum, Vec<UnitVector>)> {
    let n = a.dim();
    let mut m = a.as_array().clone();
    let mut v: Array2<f64> = Array2::eye(n);
    let target = OFF_DIAG_TARGET * a.frobenius_norm().max(1.0);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > target {
        return Err(Error::JacobiNoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[j, j]].partial_cmp(&m[[i, i]]).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| m[[i, i]]).collect();
    let vectors = order
        .iter()
        .map(|&i| UnitVector::normalize(v.column(i).to_owned()))
        .collect::<Result<Vec<_>>>()?;
    Ok((Spectrum::unchecked(values), vectors))
}

/// Dominant eigenpair straight from the oracle.
pub fn oracle_top(a: &SymmetricMatrix) -> Result<(f64, UnitVector)> {
    let (spectrum, vectors) = oracle_eigh(a)?;
    Ok((spectrum.values()[0], vectors.into_iter().next().unwrap()))
}

fn off_diagonal_norm(m: &Array2<f64>) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += 2.0 * m[[i, j]] * m[[i, j]];
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating m[p,q], accumulated into v.
fn rotate(m: &mut Array2<f64>, v: &mut Array2<f64>, p: usize, q: usize) {
    let apq = m[[p, q]];
    if apq == 0.0 {
        return;
    }
    let theta = 0.5 * (m[[q, q]] - m[[p, p]]) / apq;
    let t = if theta.abs() > 1e200 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = m.nrows();

    let app = m[[p, p]];
    let aqq = m[[q, q]];
    m[[p, p]] = app - t * apq;
    m[[q, q]] = aqq + t * apq;
    m[[p, q]] = 0.0;
    m[[q, p]] = 0.0;
    for k in 0..n {
        if k != p && k != q {
            let akp = m[[k, p]];
            let akq = m[[k, q]];
            m[[k, p]] = c * akp - s * akq;
            m[[p, k]] = m[[k, p]];
            m[[k, q]] = s * akp + c * akq;
            m[[q, k]] = m[[k, q]];
        }
    }
    for k in 0..n {
        let vkp = v[[k, p]];
        let vkq = v[[k, q]];
        v[[k, p]] = c * vkp - s * vkq;
        v[[k, q]] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn diagonal_matrix_recovers_basis() {
        let a = SymmetricMatrix::diagonal(&[3.0, 2.0, 1.0]);
        let (spectrum, vectors) = oracle_eigh(&a).unwrap();
        assert_eq!(spectrum.values(), &[3.0, 2.0, 1.0]);
        for (i, v) in vectors.iter().enumerate() {
            let e = UnitVector::basis(3, i);
            assert!(crate::metrics::sin2_error(v, &e).unwrap() <= 1e-20);
        }
    }

    #[test]
    fn rank_one_matrix() {
        let v = UnitVector::normalize(array![1.0, 2.0, -2.0]).unwrap();
        let n = v.dim();
        let mut data = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                data[[i, j]] = v.as_array()[i] * v.as_array()[j];
            }
        }
        let a = SymmetricMatrix::new(data).unwrap();
        let (spectrum, vectors) = oracle_eigh(&a).unwrap();
        assert!((spectrum.values()[0] - 1.0).abs() <= 1e-10);
        for &l in &spectrum.values()[1..] {
            assert!(l.abs() <= 1e-10);
        }
        assert!(crate::metrics::sin2_error(&vectors[0], &v).unwrap() <= 1e-18);
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let a = SymmetricMatrix::new(array![[1.0, 2.0, 3.0], [2.0, 3.0, 2.0], [3.0, 2.0, 2.0],])
            .unwrap();
        let (spectrum, vectors) = oracle_eigh(&a).unwrap();
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert!(vectors[i].dot(&vectors[j]).abs() <= 1e-10);
            }
        }
        let mut recon = Array2::<f64>::zeros((3, 3));
        for (l, v) in spectrum.values().iter().zip(&vectors) {
            let arr = v.as_array();
            for i in 0..3 {
                for j in 0..3 {
                    recon[[i, j]] += l * arr[i] * arr[j];
                }
            }
        }
        let err = (&recon - a.as_array())
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-9 * a.frobenius_norm());
    }

    #[test]
    fn redecomposition_is_stable() {
        let a = SymmetricMatrix::new(array![
            [0.8, 0.1, 0.0, 0.2],
            [0.1, 0.5, 0.3, 0.0],
            [0.0, 0.3, 0.9, 0.1],
            [0.2, 0.0, 0.1, 0.4],
        ])
        .unwrap();
        let (s1, v1) = oracle_eigh(&a).unwrap();
        let mut recon = Array2::<f64>::zeros((4, 4));
        for (l, v) in s1.values().iter().zip(&v1) {
            let arr = v.as_array();
            for i in 0..4 {
                for j in 0..4 {
                    recon[[i, j]] += l * arr[i] * arr[j];
                }
            }
        }
        let b = SymmetricMatrix::from_symmetrized(recon).unwrap();
        let (s2, _) = oracle_eigh(&b).unwrap();
        for (x, y) in s1.values().iter().zip(s2.values()) {
            assert!((x - y).abs() <= 1e-8);
        }
    }

    #[test]
    fn asymmetric_input_rejected_upstream() {
        assert!(SymmetricMatrix::new(array![[0.0, 1.0], [0.5, 0.0]]).is_err());
    }
}
