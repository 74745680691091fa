use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::oracle::oracle_eigh;

/// Where a stream's samples come from.
#[derive(Debug, Clone)]
pub enum StreamSource {
    /// Rows of a finite data matrix, delivered in uniformly random order:
    /// one shuffle per epoch, draws without replacement within an epoch.
    Matrix {
        x: Array2<f64>,
        shuffle_seed: u64,
        one_pass: bool,
    },
    /// Synthetic Gaussian sampler x ~ N(0, A).
    Gaussian {
        covariance: SymmetricMatrix,
        seed: u64,
    },
    /// Replays the covariance itself as every batch estimate. Zero-variance
    /// reference source: streaming solvers on it reproduce their
    /// deterministic counterparts exactly.
    Constant { covariance: SymmetricMatrix },
}

/// Single-consumer sample stream with batch extraction.
#[derive(Debug, Clone)]
pub struct SampleStream {
    source: Source,
    cursor: u64,
}

#[derive(Debug, Clone)]
enum Source {
    Matrix {
        x: Array2<f64>,
        order: Vec<usize>,
        pos: usize,
        epoch: u64,
        shuffle_seed: u64,
        one_pass: bool,
    },
    Gaussian {
        half: Array2<f64>,
        covariance: SymmetricMatrix,
        rng: ChaCha8Rng,
    },
    Constant {
        covariance: SymmetricMatrix,
    },
}

impl SampleStream {
    pub fn new(source: StreamSource) -> Result<Self> {
        let source = match source {
            StreamSource::Matrix {
                x,
                shuffle_seed,
                one_pass,
            } => {
                if x.nrows() == 0 {
                    return Err(Error::InvalidArgument("empty sample matrix".into()));
                }
                let mut s = Source::Matrix {
                    x,
                    order: Vec::new(),
                    pos: 0,
                    epoch: 0,
                    shuffle_seed,
                    one_pass,
                };
                if let Source::Matrix {
                    x,
                    order,
                    epoch,
                    shuffle_seed,
                    ..
                } = &mut s
                {
                    *order = shuffled(x.nrows(), *shuffle_seed, *epoch);
                }
                s
            }
            StreamSource::Gaussian { covariance, seed } => {
                let half = matrix_sqrt(&covariance)?;
                Source::Gaussian {
                    half,
                    covariance,
                    rng: ChaCha8Rng::seed_from_u64(seed),
                }
            }
            StreamSource::Constant { covariance } => Source::Constant { covariance },
        };
        Ok(Self { source, cursor: 0 })
    }

    pub fn matrix(x: Array2<f64>, shuffle_seed: u64) -> Result<Self> {
        Self::new(StreamSource::Matrix {
            x,
            shuffle_seed,
            one_pass: false,
        })
    }

    pub fn gaussian(covariance: SymmetricMatrix, seed: u64) -> Result<Self> {
        Self::new(StreamSource::Gaussian { covariance, seed })
    }

    pub fn constant(covariance: SymmetricMatrix) -> Self {
        Self {
            source: Source::Constant { covariance },
            cursor: 0,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.source {
            Source::Matrix { x, .. } => x.ncols(),
            Source::Gaussian { covariance, .. } | Source::Constant { covariance } => {
                covariance.dim()
            }
        }
    }

    /// Samples consumed so far.
    pub fn consumed(&self) -> u64 {
        self.cursor
    }

    /// The covariance the stream is an unbiased estimator of: the sampler's
    /// parameter for synthetic sources, the full-epoch covariance for
    /// matrix sources.
    pub fn population_covariance(&self) -> Result<SymmetricMatrix> {
        match &self.source {
            Source::Matrix { x, .. } => {
                let n = x.nrows() as f64;
                SymmetricMatrix::from_symmetrized(x.t().dot(x) / n)
            }
            Source::Gaussian { covariance, .. } | Source::Constant { covariance } => {
                Ok(covariance.clone())
            }
        }
    }

    fn next_batch_covariance(&mut self, n: usize) -> Result<SymmetricMatrix> {
        if n == 0 {
            return Err(Error::InvalidArgument("batch size must be >= 1".into()));
        }
        let d = self.dim();
        let cov = match &mut self.source {
            Source::Constant { covariance } => covariance.clone(),
            Source::Gaussian { half, rng, .. } => {
                let mut acc = Array2::<f64>::zeros((d, d));
                let mut z = Array1::<f64>::zeros(d);
                for _ in 0..n {
                    for zi in z.iter_mut() {
                        *zi = rng.sample(StandardNormal);
                    }
                    let x = half.dot(&z);
                    rank_one_update(&mut acc, &x);
                }
                acc /= n as f64;
                SymmetricMatrix::from_symmetrized(acc)?
            }
            Source::Matrix {
                x,
                order,
                pos,
                epoch,
                shuffle_seed,
                one_pass,
            } => {
                let mut acc = Array2::<f64>::zeros((d, d));
                for _ in 0..n {
                    if *pos >= order.len() {
                        if *one_pass {
                            return Err(Error::StreamExhausted);
                        }
                        *epoch += 1;
                        *order = shuffled(x.nrows(), *shuffle_seed, *epoch);
                        *pos = 0;
                    }
                    let row = x.row(order[*pos]).to_owned();
                    rank_one_update(&mut acc, &row);
                    *pos += 1;
                }
                acc /= n as f64;
                SymmetricMatrix::from_symmetrized(acc)?
            }
        };
        self.cursor += n as u64;
        Ok(cov)
    }
}

fn rank_one_update(acc: &mut Array2<f64>, x: &Array1<f64>) {
    let d = x.len();
    for i in 0..d {
        let xi = x[i];
        for j in 0..d {
            acc[[i, j]] += xi * x[j];
        }
    }
}

fn shuffled(n: usize, seed: u64, epoch: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ epoch.wrapping_mul(0x9e3779b97f4a7c15));
    let mut order: Vec<usize> = (0..n).collect();
    // Fisher-Yates
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    order
}

fn matrix_sqrt(a: &SymmetricMatrix) -> Result<Array2<f64>> {
    let d = a.dim();
    let (vals, vecs) = oracle_eigh(a)?;
    let mut half = Array2::<f64>::zeros((d, d));
    for (l, v) in vals.values().iter().zip(&vecs) {
        let s = l.max(0.0).sqrt();
        let arr = v.as_array();
        for i in 0..d {
            let vi = arr[i] * s;
            for j in 0..d {
                half[[i, j]] += vi * arr[j];
            }
        }
    }
    Ok(half)
}

/// Unbiased batch covariance `Â = (1/n) Σ xxᵀ` over the next n samples.
pub fn batch_estimate(stream: &mut SampleStream, n: usize) -> Result<SymmetricMatrix> {
    stream.next_batch_covariance(n)
}

/// Monte-Carlo estimate of `‖E[(Â−A) ⊗ (Â−A)]‖₂` over independent batches,
/// by power iteration on the averaged d²×d² operator. Only tractable for
/// small d; larger problems should reduce variance by raising the batch
/// size instead (‖Σ‖ scales like 1/n).
pub fn empirical_variance_norm(stream: &mut SampleStream, n: usize, trials: usize) -> Result<f64> {
    let d = stream.dim();
    if d > 30 {
        return Err(Error::InvalidArgument(format!(
            "d = {d} too large for the d²×d² Kronecker estimate; increase the batch size to shrink ‖Σ‖ instead"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let a = stream.population_covariance()?;
    let dd = d * d;
    let mut m = Array2::<f64>::zeros((dd, dd));
    for _ in 0..trials {
        let ahat = batch_estimate(stream, n)?;
        let b = ahat.as_array() - a.as_array();
        // accumulate B ⊗ B
        for i in 0..d {
            for j in 0..d {
                let bij = b[[i, j]];
                if bij == 0.0 {
                    continue;
                }
                for k in 0..d {
                    let row = i * d + k;
                    for l in 0..d {
                        m[[row, j * d + l]] += bij * b[[k, l]];
                    }
                }
            }
        }
    }
    m /= trials as f64;

    // spectral norm of the symmetric operator via power iteration
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v = Array1::from_shape_fn(dd, |_| rng.sample::<f64, _>(StandardNormal));
    for _ in 0..200 {
        let w = m.dot(&v);
        let wn = w.dot(&w).sqrt();
        if wn < 1e-280 {
            return Ok(0.0);
        }
        v = w / wn;
    }
    Ok(v.dot(&m.dot(&v)).abs())
}
