//! Shared fixtures for the criterion benches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use powerlab_core::matgen::{synth_covariance, Spectrum};
use powerlab_core::{SymmetricMatrix, UnitVector};

/// A reproducible solve setup: matrix with the given tight-gap spectrum,
/// plus start vectors.
pub struct Fixture {
    pub a: SymmetricMatrix,
    pub q0: UnitVector,
    pub w0: UnitVector,
}

pub fn fixture(d: usize, lambda2: f64, tail: f64, seed: u64) -> Fixture {
    let spectrum = Spectrum::with_tail(&[1.0, lambda2], tail, d).expect("valid spectrum");
    let inst = synth_covariance(&spectrum, 2 * d, seed).expect("generation succeeds");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
    let q0 = UnitVector::random(d, &mut rng);
    let w0 = UnitVector::random(d, &mut rng);
    Fixture {
        a: inst.covariance,
        q0,
        w0,
    }
}
