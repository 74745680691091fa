//! Property tests for the metric and generator invariants.

use ndarray::Array1;
use proptest::prelude::*;

use powerlab_core::matgen::{synth_covariance, Spectrum};
use powerlab_core::metrics::{rayleigh_quotient, sin2_error};
use powerlab_core::oracle::oracle_eigh;
use powerlab_core::{SymmetricMatrix, UnitVector};

fn unit_vector_strategy(dim: usize) -> impl Strategy<Value = UnitVector> {
    proptest::collection::vec(-1.0f64..1.0, dim).prop_filter_map("norm too small", |v| {
        UnitVector::normalize(Array1::from(v)).ok()
    })
}

fn spectrum_strategy(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0f64..1.0, dim).prop_map(|mut v| {
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rayleigh_quotient_lies_in_the_spectral_range(
        vals in spectrum_strategy(6),
        q in unit_vector_strategy(6),
        seed in 0u64..1000,
    ) {
        let spectrum = Spectrum::new(vals).unwrap();
        let inst = synth_covariance(&spectrum, 12, seed).unwrap();
        let (eigs, _) = oracle_eigh(&inst.covariance).unwrap();
        let r = rayleigh_quotient(&inst.covariance, &q).unwrap();
        let max = eigs.values()[0];
        let min = *eigs.values().last().unwrap();
        prop_assert!(r <= max + 1e-10, "rayleigh {r} above λ_max {max}");
        prop_assert!(r >= min - 1e-10, "rayleigh {r} below λ_min {min}");
    }

    #[test]
    fn rayleigh_is_quadratically_accurate_on_diagonal_matrices(
        vals in spectrum_strategy(5),
        w in unit_vector_strategy(5),
    ) {
        let a = SymmetricMatrix::diagonal(&vals);
        let r = rayleigh_quotient(&a, &w).unwrap();
        for j in 0..5 {
            let vj = UnitVector::basis(5, j);
            let s = sin2_error(&w, &vj).unwrap();
            let spread = vals
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .map(|(_, l)| (l - vals[j]).abs())
                .fold(0.0f64, f64::max);
            prop_assert!(
                (r - vals[j]).abs() <= spread * s + 1e-10,
                "j={j}: |{r} − {}| > {spread}·{s}", vals[j]
            );
        }
    }

    #[test]
    fn sin2_is_symmetric_and_sign_invariant(
        q in unit_vector_strategy(7),
        v in unit_vector_strategy(7),
    ) {
        let neg_q = q.flipped();
        prop_assert_eq!(sin2_error(&q, &v).unwrap(), sin2_error(&v, &q).unwrap());
        prop_assert_eq!(sin2_error(&q, &v).unwrap(), sin2_error(&neg_q, &v).unwrap());
        let s = sin2_error(&q, &v).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
    }

    #[test]
    fn perturbation_norm_matches_dense_oracle(
        vals in spectrum_strategy(5),
        q in unit_vector_strategy(5),
        nu in 0.0f64..1.0,
        seed in 0u64..1000,
    ) {
        let spectrum = Spectrum::new(vals).unwrap();
        let inst = synth_covariance(&spectrum, 10, seed).unwrap();
        let (eigs, vecs) = oracle_eigh(&inst.covariance).unwrap();
        let l1 = eigs.values()[0];
        let v1 = &vecs[0];
        let closed =
            powerlab_core::metrics::perturbation_norm(l1, v1, nu, &q).unwrap();
        // dense route: assemble the rank-≤2 difference and decompose it
        let d = 5;
        let mut m = ndarray::Array2::<f64>::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] = l1 * v1.as_array()[i] * v1.as_array()[j]
                    - nu * q.as_array()[i] * q.as_array()[j];
            }
        }
        let sym = SymmetricMatrix::from_symmetrized(m).unwrap();
        let (evals, _) = oracle_eigh(&sym).unwrap();
        let dense = evals
            .values()
            .iter()
            .fold(0.0f64, |acc, &l| acc.max(l.abs()));
        prop_assert!((closed - dense).abs() <= 1e-10, "{closed} vs {dense}");
    }
}

#[test]
fn matgen_spectrum_fidelity_over_many_seeds() {
    let spectrum = Spectrum::with_tail(&[1.0, 0.9], 0.8, 8).unwrap();
    for seed in 0..120 {
        let inst = synth_covariance(&spectrum, 30, seed).unwrap();
        let (eigs, _) = oracle_eigh(&inst.covariance).unwrap();
        for (got, want) in eigs.values().iter().zip(spectrum.values()) {
            assert!((got - want).abs() <= 1e-8, "seed {seed}: {got} vs {want}");
        }
    }
}

#[test]
fn oracle_involution_on_random_instances() {
    for seed in 0..20 {
        let spectrum = Spectrum::with_tail(&[1.0, 0.7], 0.4, 6).unwrap();
        let inst = synth_covariance(&spectrum, 20, seed).unwrap();
        let (s1, v1) = oracle_eigh(&inst.covariance).unwrap();
        let d = 6;
        let mut recon = ndarray::Array2::<f64>::zeros((d, d));
        for (l, v) in s1.values().iter().zip(&v1) {
            for i in 0..d {
                for j in 0..d {
                    recon[[i, j]] += l * v.as_array()[i] * v.as_array()[j];
                }
            }
        }
        let again = SymmetricMatrix::from_symmetrized(recon).unwrap();
        let (s2, _) = oracle_eigh(&again).unwrap();
        for (a, b) in s1.values().iter().zip(s2.values()) {
            assert!((a - b).abs() <= 1e-8);
        }
    }
}
