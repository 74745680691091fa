use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const CENTROID_TOL: f64 = 1e-8;
const MAX_ROUNDS: usize = 300;

/// Lloyd's algorithm with k-means++ seeding. Deterministic given the seed.
///
/// An emptied cluster is re-seeded at the point farthest from its current
/// centroid (ties broken by lowest index).
pub fn kmeans(embedding: &Array2<f64>, k: usize, seed: u64) -> Result<Vec<usize>> {
    let (n, dim) = embedding.dim();
    if k == 0 || n < k {
        return Err(Error::InvalidArgument(format!(
            "need n ≥ k ≥ 1, got n={n}, k={k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding
    let mut centroids = Array2::<f64>::zeros((k, dim));
    let first = rng.random_range(0..n);
    centroids.row_mut(0).assign(&embedding.row(first));
    let mut d2 = vec![0.0f64; n];
    for c in 1..k {
        let mut total = 0.0;
        for i in 0..n {
            let mut best = f64::INFINITY;
            for cc in 0..c {
                best = best.min(sqdist(embedding, i, &centroids, cc));
            }
            d2[i] = best;
            total += best;
        }
        let idx = if total <= 0.0 {
            rng.random_range(0..n)
        } else {
            let mut target = rng.random_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        };
        centroids.row_mut(c).assign(&embedding.row(idx));
    }

    let mut labels = vec![0usize; n];
    for _round in 0..MAX_ROUNDS {
        // assignment
        for i in 0..n {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for c in 0..k {
                let d = sqdist(embedding, i, &centroids, c);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            labels[i] = best;
        }
        // update
        let mut counts = vec![0usize; k];
        let mut sums = Array2::<f64>::zeros((k, dim));
        for i in 0..n {
            counts[labels[i]] += 1;
            let mut row = sums.row_mut(labels[i]);
            row += &embedding.row(i);
        }
        let mut next = centroids.clone();
        for c in 0..k {
            if counts[c] == 0 {
                let far = farthest_point(embedding, &centroids, c);
                next.row_mut(c).assign(&embedding.row(far));
            } else {
                let inv = 1.0 / counts[c] as f64;
                let scaled: Array1<f64> = sums.row(c).mapv(|x| x * inv);
                next.row_mut(c).assign(&scaled);
            }
        }
        let movement = (&next - &centroids)
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt();
        centroids = next;
        if movement <= CENTROID_TOL {
            break;
        }
    }

    // final assignment against the settled centroids
    for i in 0..n {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..k {
            let d = sqdist(embedding, i, &centroids, c);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        labels[i] = best;
    }
    Ok(labels)
}

fn sqdist(points: &Array2<f64>, i: usize, centroids: &Array2<f64>, c: usize) -> f64 {
    let mut s = 0.0;
    for j in 0..points.ncols() {
        let d = points[[i, j]] - centroids[[c, j]];
        s += d * d;
    }
    s
}

fn farthest_point(points: &Array2<f64>, centroids: &Array2<f64>, c: usize) -> usize {
    let mut best = 0;
    let mut best_d = -1.0;
    for i in 0..points.nrows() {
        let d = sqdist(points, i, centroids, c);
        if d > best_d {
            best_d = d;
            best = i;
        }
    }
    best
}
