use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::vector::UnitVector;

use super::datasets::PointSet;

/// Bandwidth rule for the Gaussian kernel.
#[derive(Debug, Clone, Copy)]
pub enum SigmaRule {
    /// σ = median pairwise distance.
    MedianPairwise,
    /// σ = factor × median pairwise distance. The toy datasets here only
    /// separate for factors well below 1; around 0.13 both benchmark
    /// datasets cluster perfectly while the affinity graph stays connected
    /// enough for the solvers to converge quickly.
    ScaledMedianPairwise(f64),
    Fixed(f64),
}

/// Pairwise similarity kind.
#[derive(Debug, Clone, Copy)]
pub enum Similarity {
    /// `exp(−‖xᵢ−xⱼ‖²/(2σ²))`, unit diagonal.
    Gaussian(SigmaRule),
    /// Raw pairwise distance `‖xᵢ−xⱼ‖` (a dissimilarity), zero diagonal.
    L2Distance,
}

impl Default for Similarity {
    fn default() -> Self {
        Similarity::Gaussian(SigmaRule::ScaledMedianPairwise(0.13))
    }
}

/// Dense symmetric affinity matrix for a point set.
pub fn affinity(points: &PointSet, similarity: &Similarity) -> Result<SymmetricMatrix> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two points".into()));
    }
    let p = &points.points;
    let mut dist = Array2::<f64>::zeros((n, n));
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = p[[i, 0]] - p[[j, 0]];
            let dy = p[[i, 1]] - p[[j, 1]];
            let d = (dx * dx + dy * dy).sqrt();
            dist[[i, j]] = d;
            dist[[j, i]] = d;
            upper.push(d);
        }
    }
    let data = match similarity {
        Similarity::L2Distance => dist,
        Similarity::Gaussian(rule) => {
            let sigma = match rule {
                SigmaRule::Fixed(s) => *s,
                SigmaRule::MedianPairwise => median(&mut upper),
                SigmaRule::ScaledMedianPairwise(f) => f * median(&mut upper),
            };
            if !(sigma > 0.0) {
                return Err(Error::InvalidArgument(
                    "kernel bandwidth must be positive".into(),
                ));
            }
            let inv = 1.0 / (2.0 * sigma * sigma);
            dist.mapv(|d| (-d * d * inv).exp())
        }
    };
    SymmetricMatrix::new(data)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Row-stochastic normalization `W = D⁻¹A`. Every row of the result sums
/// to one. W is not symmetric; solvers should use
/// [`symmetric_normalized`], which has the same spectrum.
pub fn normalize_affinity(a: &SymmetricMatrix) -> Result<Array2<f64>> {
    let (dsum, _) = degrees(a)?;
    let n = a.dim();
    let mut w = a.as_array().clone();
    for i in 0..n {
        let inv = 1.0 / dsum[i];
        w.row_mut(i).mapv_inplace(|x| x * inv);
    }
    Ok(w)
}

/// Symmetrized normalization `D^{-1/2} A D^{-1/2}` plus the `D^{-1/2}`
/// diagonal used to map its eigenvectors back to eigenvectors of D⁻¹A.
pub fn symmetric_normalized(a: &SymmetricMatrix) -> Result<(SymmetricMatrix, Array1<f64>)> {
    let (_, dinv_sqrt) = degrees(a)?;
    let n = a.dim();
    let mut m = a.as_array().clone();
    for i in 0..n {
        for j in 0..n {
            m[[i, j]] *= dinv_sqrt[i] * dinv_sqrt[j];
        }
    }
    Ok((SymmetricMatrix::from_symmetrized(m)?, dinv_sqrt))
}

fn degrees(a: &SymmetricMatrix) -> Result<(Array1<f64>, Array1<f64>)> {
    let n = a.dim();
    let mut dsum = Array1::<f64>::zeros(n);
    for i in 0..n {
        let s = a.as_array().row(i).sum();
        if !(s > 0.0) {
            return Err(Error::IsolatedPoint(i));
        }
        dsum[i] = s;
    }
    let dinv_sqrt = dsum.mapv(|s| 1.0 / s.sqrt());
    Ok((dsum, dinv_sqrt))
}

/// Schur-complement deflation `W − (Wv)(Wv)ᵀ/(vᵀWv)`.
///
/// For an exact eigenpair (λ, v) this reduces to Hotelling deflation
/// `W − λvvᵀ` and annihilates v.
pub fn schur_deflate(w: &SymmetricMatrix, v: &UnitVector) -> Result<SymmetricMatrix> {
    if v.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            got: v.dim(),
        });
    }
    let wv = w.mul(v.as_array());
    let vwv = v.as_array().dot(&wv);
    if vwv.abs() < 1e-14 {
        return Err(Error::InvalidArgument(
            "schur deflation undefined: vᵀWv vanishes".into(),
        ));
    }
    let n = w.dim();
    let mut out = w.as_array().clone();
    let inv = 1.0 / vwv;
    for i in 0..n {
        let wi = wv[i] * inv;
        for j in 0..n {
            out[[i, j]] -= wi * wv[j];
        }
    }
    SymmetricMatrix::from_symmetrized(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_eigh;
    use ndarray::array;

    fn pts(raw: Array2<f64>) -> PointSet {
        PointSet {
            points: raw,
            labels: None,
        }
    }

    #[test]
    fn identical_points_have_unit_gaussian_affinity() {
        let p = pts(array![[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]);
        let a = affinity(&p, &Similarity::Gaussian(SigmaRule::Fixed(1.0))).unwrap();
        assert!((a.as_array()[[0, 1]] - 1.0).abs() <= 1e-15);
        assert_eq!(a.as_array()[[0, 0]], 1.0);
    }

    #[test]
    fn l2_affinity_is_plain_distance() {
        let p = pts(array![[0.0, 0.0], [2.0, 0.0]]);
        let a = affinity(&p, &Similarity::L2Distance).unwrap();
        assert_eq!(a.as_array()[[0, 1]], 2.0);
        assert_eq!(a.as_array()[[0, 0]], 0.0);
    }

    #[test]
    fn collinear_gaussian_values() {
        // equidistant collinear points at spacing 1, σ = 1:
        // neighbor affinity e^{-1/2}, far pair e^{-4/2}
        let p = pts(array![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        let a = affinity(&p, &Similarity::Gaussian(SigmaRule::Fixed(1.0))).unwrap();
        assert!((a.as_array()[[0, 1]] - (-0.5f64).exp()).abs() <= 1e-15);
        assert!((a.as_array()[[0, 2]] - (-2.0f64).exp()).abs() <= 1e-15);
    }

    #[test]
    fn rows_of_normalized_affinity_sum_to_one() {
        let a = SymmetricMatrix::new(array![[1.0, 0.5, 0.2], [0.5, 1.0, 0.7], [0.2, 0.7, 1.0]])
            .unwrap();
        let w = normalize_affinity(&a).unwrap();
        for i in 0..3 {
            assert!((w.row(i).sum() - 1.0).abs() <= 1e-12);
        }
        let ones = SymmetricMatrix::new(Array2::ones((3, 3))).unwrap();
        let w1 = normalize_affinity(&ones).unwrap();
        for v in w1.iter() {
            assert!((v - 1.0 / 3.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn symmetric_form_shares_the_spectrum_of_w() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let p = pts(Array2::from_shape_fn((6, 2), |_| {
                rand::Rng::random_range(&mut rng, -1.0..1.0)
            }));
            let a = affinity(&p, &Similarity::Gaussian(SigmaRule::Fixed(0.8))).unwrap();
            let (wt, _) = symmetric_normalized(&a).unwrap();
            let (vals, _) = oracle_eigh(&wt).unwrap();
            // W = D⁻¹A applied to the oracle eigenvectors of the symmetric
            // form, mapped back, reproduces the same eigenvalues
            let w = normalize_affinity(&a).unwrap();
            for (i, lam) in vals.values().iter().enumerate().take(3) {
                let (_, vecs) = oracle_eigh(&wt).unwrap();
                let back = vecs[i].as_array() * &degrees(&a).unwrap().1;
                let wx = w.dot(&back);
                let ratio = wx.dot(&back) / back.dot(&back);
                assert!(
                    (ratio - lam).abs() <= 1e-8,
                    "eigenvalue drift {ratio} vs {lam}"
                );
            }
        }
    }

    #[test]
    fn isolated_point_is_reported_by_index() {
        let a = SymmetricMatrix::new(array![[0.0, 0.0, 0.0], [0.0, 1.0, 0.5], [0.0, 0.5, 1.0]])
            .unwrap();
        match normalize_affinity(&a) {
            Err(Error::IsolatedPoint(0)) => {}
            other => panic!("expected isolated point 0, got {other:?}"),
        }
    }

    #[test]
    fn schur_deflation_on_exact_eigenvector_is_hotelling() {
        let w = SymmetricMatrix::diagonal(&[2.0, 1.0]);
        let v = UnitVector::basis(2, 0);
        let d = schur_deflate(&w, &v).unwrap();
        assert_eq!(d.as_array()[[0, 0]], 0.0);
        assert_eq!(d.as_array()[[1, 1]], 1.0);
    }

    #[test]
    fn schur_deflation_promotes_second_eigenpair() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let raw =
                Array2::from_shape_fn((8, 8), |_| rand::Rng::random_range(&mut rng, -0.5..0.5));
            let sym = SymmetricMatrix::from_symmetrized(&raw + &raw.t()).unwrap();
            let (vals, vecs) = oracle_eigh(&sym).unwrap();
            // deflation needs vᵀWv away from zero; skip unlucky draws
            let lam1 = vals.values()[0];
            if lam1.abs() < 1e-10 {
                continue;
            }
            let d = schur_deflate(&sym, &vecs[0]).unwrap();
            let (dvals, _) = oracle_eigh(&d).unwrap();
            // original spectrum with λ₁ replaced by 0
            let mut expect: Vec<f64> = vals.values()[1..].to_vec();
            expect.push(0.0);
            expect.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for (got, want) in dvals.values().iter().zip(&expect) {
                assert!((got - want).abs() <= 1e-8, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn schur_rejects_vanishing_quadratic_form() {
        let w = SymmetricMatrix::diagonal(&[1.0, 0.0]);
        let v = UnitVector::basis(2, 1);
        assert!(schur_deflate(&w, &v).is_err());
    }

    #[test]
    fn schur_with_approximate_eigenvector_stays_near_lambda2() {
        // perturb the top eigenvector to sin² = 1e-6; the deflated matrix's
        // top eigenvalue should stay within 1e-3 of λ₂
        let spectrum = crate::matgen::Spectrum::with_tail(&[1.0, 0.9], 0.5, 8).unwrap();
        for seed in 0..5 {
            let inst = crate::matgen::synth_covariance(&spectrum, 40, seed).unwrap();
            let (_, vecs) = oracle_eigh(&inst.covariance).unwrap();
            let v1 = &vecs[0];
            let v2 = &vecs[1];
            let s = 1e-3f64; // sin θ
            let mut approx = v1.as_array() * (1.0 - s * s).sqrt();
            approx.scaled_add(s, v2.as_array());
            let approx = UnitVector::normalize(approx).unwrap();
            let deflated = schur_deflate(&inst.covariance, &approx).unwrap();
            let (dvals, _) = oracle_eigh(&deflated).unwrap();
            assert!(
                (dvals.values()[0] - 0.9).abs() <= 1e-3,
                "seed {seed}: top of deflated = {}",
                dvals.values()[0]
            );
        }
    }
}
