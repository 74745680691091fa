use std::fs;
use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Two-dimensional points with optional ground-truth labels.
#[derive(Debug, Clone)]
pub struct PointSet {
    /// n×2 coordinates.
    pub points: Array2<f64>,
    pub labels: Option<Vec<usize>>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }
}

/// Concentric circles: class 0 on the unit circle, class 1 on a circle of
/// radius `factor ∈ (0,1)`, angles uniformly random, isotropic Gaussian
/// noise of scale `noise_sd` added to both.
pub fn make_circles(n: usize, factor: f64, noise_sd: f64, seed: u64) -> Result<PointSet> {
    if !(factor > 0.0 && factor < 1.0) {
        return Err(Error::InvalidArgument("factor must lie in (0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = n / 2;
    let mut points = Array2::zeros((n, 2));
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let inner = i >= half;
        let r = if inner { factor } else { 1.0 };
        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        points[[i, 0]] = r * theta.cos() + noise_sd * rng.sample::<f64, _>(StandardNormal);
        points[[i, 1]] = r * theta.sin() + noise_sd * rng.sample::<f64, _>(StandardNormal);
        labels.push(usize::from(inner));
    }
    Ok(PointSet {
        points,
        labels: Some(labels),
    })
}

/// Two interleaved half-moons offset by (1, 0.5), with isotropic Gaussian
/// noise.
pub fn make_moons(n: usize, noise_sd: f64, seed: u64) -> Result<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = n / 2;
    let mut points = Array2::zeros((n, 2));
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let lower = i >= half;
        let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let (x, y) = if lower {
            (1.0 - theta.cos(), 1.0 - theta.sin() - 0.5)
        } else {
            (theta.cos(), theta.sin())
        };
        points[[i, 0]] = x + noise_sd * rng.sample::<f64, _>(StandardNormal);
        points[[i, 1]] = y + noise_sd * rng.sample::<f64, _>(StandardNormal);
        labels.push(usize::from(lower));
    }
    Ok(PointSet {
        points,
        labels: Some(labels),
    })
}

/// Points file: header "n 2", then rows of two coordinates with an
/// optional trailing integer label column.
pub fn load_points(path: &Path) -> Result<PointSet> {
    let text = fs::read_to_string(path)?;
    parse_points(&text).map_err(|msg| Error::Parse {
        path: path.display().to_string(),
        msg,
    })
}

pub fn parse_points(text: &str) -> std::result::Result<PointSet, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or("empty file")?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()?;
    if dims.len() != 2 || dims[1] != 2 {
        return Err("header must be \"n 2\"".into());
    }
    let n = dims[0];
    let mut points = Array2::zeros((n, 2));
    let mut labels: Vec<usize> = Vec::new();
    for i in 0..n {
        let line = lines.next().ok_or_else(|| format!("missing row {i}"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 && toks.len() != 3 {
            return Err(format!(
                "row {i}: expected 2 coordinates (+ optional label)"
            ));
        }
        points[[i, 0]] = toks[0]
            .parse::<f64>()
            .map_err(|e| format!("row {i}: {e}"))?;
        points[[i, 1]] = toks[1]
            .parse::<f64>()
            .map_err(|e| format!("row {i}: {e}"))?;
        if toks.len() == 3 {
            labels.push(
                toks[2]
                    .parse::<usize>()
                    .map_err(|e| format!("row {i}: {e}"))?,
            );
        }
    }
    if !labels.is_empty() && labels.len() != n {
        return Err("label column must be present on every row or none".into());
    }
    Ok(PointSet {
        points,
        labels: if labels.is_empty() {
            None
        } else {
            Some(labels)
        },
    })
}

pub fn store_points(set: &PointSet, path: &Path) -> Result<()> {
    use std::fmt::Write as _;
    let mut out = String::new();
    let n = set.len();
    let _ = writeln!(out, "{n} 2");
    for i in 0..n {
        let _ = write!(out, "{:?} {:?}", set.points[[i, 0]], set.points[[i, 1]]);
        if let Some(labels) = &set.labels {
            let _ = write!(out, " {}", labels[i]);
        }
        out.push('\n');
    }
    fs::File::create(path)?.write_all(out.as_bytes())?;
    Ok(())
}

/// Labels as CSV rows `index,label`.
pub fn store_labels(labels: &[usize], path: &Path) -> Result<()> {
    use std::fmt::Write as _;
    let mut out = String::from("index,label\n");
    for (i, l) in labels.iter().enumerate() {
        let _ = writeln!(out, "{i},{l}");
    }
    fs::File::create(path)?.write_all(out.as_bytes())?;
    Ok(())
}
