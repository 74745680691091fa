use ndarray::Array1;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Norm below which a vector counts as annihilated. A starting vector that
/// is numerically orthogonal to the dominant eigenspace can be driven here
/// by repeated multiplication.
const ANNIHILATION_FLOOR: f64 = 1e-300;

/// A unit 2-norm vector in R^d.
///
/// Construction always goes through normalization, so `|‖v‖ − 1| ≤ 1e-12`
/// holds for every value of this type.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    data: Array1<f64>,
}

impl UnitVector {
    /// Normalizes `v`. Fails with [`Error::VectorAnnihilated`] when the norm
    /// underflows.
    pub fn normalize(v: Array1<f64>) -> Result<Self> {
        let norm = norm2(&v);
        if !norm.is_finite() || norm < ANNIHILATION_FLOOR {
            return Err(Error::VectorAnnihilated);
        }
        Ok(Self { data: v / norm })
    }

    /// Uniformly random direction on the sphere.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        loop {
            let v = Array1::from_shape_fn(dim, |_| rng.sample::<f64, _>(StandardNormal));
            if let Ok(u) = Self::normalize(v) {
                return u;
            }
        }
    }

    /// The i-th standard basis vector.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Array1::zeros(dim);
        v[i] = 1.0;
        Self { data: v }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_array(&self) -> &Array1<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array1<f64> {
        self.data
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        self.data.dot(&other.data)
    }

    /// Exact sign flip; negation preserves the unit norm, so no
    /// renormalization happens.
    pub fn flipped(&self) -> Self {
        Self {
            data: self.data.mapv(|x| -x),
        }
    }

    /// Euclidean distance to another unit vector.
    pub fn distance(&self, other: &UnitVector) -> f64 {
        norm2(&(&self.data - &other.data))
    }
}

pub(crate) fn norm2(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}
