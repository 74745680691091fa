use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::vector::UnitVector;

/// Relative tolerance for the symmetry check on construction.
const SYMMETRY_TOL: f64 = 1e-12;

/// A dense d×d real symmetric matrix.
///
/// Immutable after construction; symmetry is validated once up front, so
/// all solvers may rely on it. Matrices produced by [`crate::matgen`] are
/// additionally positive semidefinite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    data: Array2<f64>,
}

impl SymmetricMatrix {
    /// Validates symmetry (`|a_ij − a_ji| ≤ 1e-12·max(1, |a_ij|)`) and wraps
    /// the array.
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let (r, c) = data.dim();
        if r != c {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: c,
            });
        }
        if r == 0 {
            return Err(Error::InvalidArgument(
                "matrix dimension must be positive".into(),
            ));
        }
        for i in 0..r {
            for j in (i + 1)..r {
                let (a, b) = (data[[i, j]], data[[j, i]]);
                if (a - b).abs() > SYMMETRY_TOL * a.abs().max(1.0) {
                    return Err(Error::NotSymmetric { i, j, a, b });
                }
            }
        }
        Ok(Self { data })
    }

    /// Symmetric matrix from the lower/upper average of `data`. Used where
    /// an algebraically symmetric product picks up round-off asymmetry.
    pub fn from_symmetrized(mut data: Array2<f64>) -> Result<Self> {
        let n = data.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                let m = 0.5 * (data[[i, j]] + data[[j, i]]);
                data[[i, j]] = m;
                data[[j, i]] = m;
            }
        }
        Self::new(data)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut data = Array2::zeros((n, n));
        for (i, &v) in values.iter().enumerate() {
            data[[i, i]] = v;
        }
        Self { data }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: Array2::eye(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.data
    }

    /// `A·v` for a unit vector, checking dimensions.
    pub fn mul_unit(&self, v: &UnitVector) -> Result<Array1<f64>> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.dim(),
            });
        }
        Ok(self.data.dot(v.as_array()))
    }

    pub fn mul(&self, v: &Array1<f64>) -> Array1<f64> {
        self.data.dot(v)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Reads the dense matrix format: a line holding `d`, then `d` lines of
    /// `d` whitespace-separated reals. Symmetry is validated on load.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text).map_err(|msg| Error::Parse {
            path: path.display().to_string(),
            msg,
        })
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let d: usize = lines
            .next()
            .ok_or("empty file")?
            .trim()
            .parse()
            .map_err(|e| format!("bad dimension line: {e}"))?;
        let mut data = Array2::zeros((d, d));
        for i in 0..d {
            let line = lines.next().ok_or_else(|| format!("missing row {i}"))?;
            let mut k = 0;
            for tok in line.split_whitespace() {
                if k >= d {
                    return Err(format!("row {i} has more than {d} entries"));
                }
                data[[i, k]] = tok.parse::<f64>().map_err(|e| format!("row {i}: {e}"))?;
                k += 1;
            }
            if k != d {
                return Err(format!("row {i} has {k} entries, expected {d}"));
            }
        }
        Self::new(data).map_err(|e| e.to_string())
    }

    /// Writes the same dense format accepted by [`SymmetricMatrix::load`].
    pub fn store(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        self.write_to(&mut out);
        let mut f = fs::File::create(path)?;
        f.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn write_to(&self, out: &mut String) {
        use std::fmt::Write as _;
        let d = self.dim();
        let _ = writeln!(out, "{d}");
        for i in 0..d {
            for j in 0..d {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{:?}", self.data[[i, j]]);
            }
            out.push('\n');
        }
    }
}
