//! Seeded experiment grids reproducing the solver comparisons as CSV.

mod config;
mod experiments;

pub use config::Config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use crate::error::{Error, Result};

/// Experiment families selectable from a preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentId {
    /// Momentum-coefficient sweep against the vanilla baseline.
    BetaSweep,
    /// Accuracy of second-eigenvalue recovery: inexact deflation vs the
    /// simultaneous iteration.
    Lambda2Accuracy,
    /// Iteration counts for vanilla / momentum / two-phase / Lanczos.
    IterationGrid,
    /// Same grid, wall-time focus.
    WalltimeGrid,
    /// Streaming log-error comparison.
    StreamLogErr,
    /// Clustering accuracy and solver-iteration grid.
    ClusterGrid,
}

impl ExperimentId {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "beta-sweep" => Self::BetaSweep,
            "lambda2-accuracy" => Self::Lambda2Accuracy,
            "iteration-grid" => Self::IterationGrid,
            "walltime-grid" => Self::WalltimeGrid,
            "stream-logerr" => Self::StreamLogErr,
            "cluster-grid" => Self::ClusterGrid,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown experiment id: {other}"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::BetaSweep => "beta-sweep",
            Self::Lambda2Accuracy => "lambda2-accuracy",
            Self::IterationGrid => "iteration-grid",
            Self::WalltimeGrid => "walltime-grid",
            Self::StreamLogErr => "stream-logerr",
            Self::ClusterGrid => "cluster-grid",
        }
    }
}

/// How the pre-momentum precision ρ is derived from ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoPolicy {
    Eps,
    Sqrt,
    Cbrt,
    Fourth,
    Fixed(f64),
}

impl RhoPolicy {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "eps" => Self::Eps,
            "sqrt" => Self::Sqrt,
            "cbrt" => Self::Cbrt,
            "fourth" => Self::Fourth,
            other => match other.strip_prefix("fixed:") {
                Some(v) => Self::Fixed(
                    v.parse()
                        .map_err(|e| Error::InvalidArgument(format!("bad fixed rho {v}: {e}")))?,
                ),
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown rho policy: {other}"
                    )))
                }
            },
        })
    }

    pub fn resolve(&self, eps: f64) -> f64 {
        match self {
            Self::Eps => eps,
            Self::Sqrt => eps.sqrt(),
            Self::Cbrt => eps.cbrt(),
            Self::Fourth => eps.powf(0.25),
            Self::Fixed(v) => *v,
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Self::Eps => "eps".into(),
            Self::Sqrt => "sqrt".into(),
            Self::Cbrt => "cbrt".into(),
            Self::Fourth => "fourth".into(),
            Self::Fixed(v) => format!("fixed:{v}"),
        }
    }
}

/// One trial outcome; one CSV line.
#[derive(Debug, Clone, Default)]
pub struct ResultRow {
    pub experiment: String,
    pub method: String,
    pub d: usize,
    pub spectrum_tag: String,
    pub epsilon: Option<f64>,
    pub rho: Option<String>,
    pub beta: Option<f64>,
    pub trial: usize,
    pub seed: u64,
    pub iterations_total: Option<usize>,
    pub iterations_pre: Option<usize>,
    pub iterations_mom: Option<usize>,
    pub walltime_ns: Option<u64>,
    pub lambda2_abs_err: Option<f64>,
    pub sin2_final: Option<f64>,
    pub accuracy: Option<f64>,
    pub log_err: Option<f64>,
}

pub const CSV_HEADER: &str = "experiment,method,d,spectrum_tag,epsilon,rho,beta,trial,seed,\
iterations_total,iterations_pre,iterations_mom,walltime_ns,lambda2_abs_err,sin2_final,accuracy,log_err";

impl ResultRow {
    pub fn csv_line(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{}",
            self.experiment, self.method, self.d, self.spectrum_tag
        );
        push_f64(&mut s, self.epsilon);
        push_str(&mut s, self.rho.as_deref());
        push_f64(&mut s, self.beta);
        let _ = write!(s, ",{},{}", self.trial, self.seed);
        push_usize(&mut s, self.iterations_total);
        push_usize(&mut s, self.iterations_pre);
        push_usize(&mut s, self.iterations_mom);
        match self.walltime_ns {
            Some(v) => {
                let _ = write!(s, ",{v}");
            }
            None => s.push(','),
        }
        push_f64(&mut s, self.lambda2_abs_err);
        push_f64(&mut s, self.sin2_final);
        push_f64(&mut s, self.accuracy);
        push_f64(&mut s, self.log_err);
        s
    }

    /// Cell identity: everything except trial-level data.
    fn cell_key(&self) -> String {
        format!(
            "{}|{}|{}|{}|{}|{}",
            self.method,
            self.d,
            self.spectrum_tag,
            self.epsilon.map(|e| format!("{e:?}")).unwrap_or_default(),
            self.rho.clone().unwrap_or_default(),
            self.beta.map(|b| format!("{b:?}")).unwrap_or_default(),
        )
    }
}

fn push_f64(s: &mut String, v: Option<f64>) {
    match v {
        Some(x) => {
            let _ = write!(s, ",{x:?}");
        }
        None => s.push(','),
    }
}

fn push_usize(s: &mut String, v: Option<usize>) {
    match v {
        Some(x) => {
            let _ = write!(s, ",{x}");
        }
        None => s.push(','),
    }
}

fn push_str(s: &mut String, v: Option<&str>) {
    match v {
        Some(x) => {
            let _ = write!(s, ",{x}");
        }
        None => s.push(','),
    }
}

/// Wall time of a single call on the monotonic clock, in nanoseconds.
pub fn timeit<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let start = Instant::now();
    let out = f();
    let ns = start.elapsed().as_nanos().min(u128::from(u64::MAX)) as u64;
    (out, ns)
}

/// Per-cell aggregate of the numeric columns (mean and median).
#[derive(Debug, Clone)]
pub struct CellSummary {
    pub cell: String,
    pub trials: usize,
    pub mean_iterations: Option<f64>,
    pub median_iterations: Option<f64>,
    pub mean_walltime_ns: Option<f64>,
    pub mean_lambda2_abs_err: Option<f64>,
    pub mean_sin2: Option<f64>,
    pub mean_accuracy: Option<f64>,
    pub median_accuracy: Option<f64>,
    pub mean_log_err: Option<f64>,
    pub median_log_err: Option<f64>,
}

/// Deterministic seed derivation for (cell, trial) pairs.
pub fn derive_seed(base: u64, cell: u64, trial: u64) -> u64 {
    let mut x =
        base ^ cell.wrapping_mul(0x9E3779B97F4A7C15) ^ trial.wrapping_mul(0xD1B54A32D192ED03);
    for _ in 0..2 {
        x = x.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = x;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        x = z ^ (z >> 31);
    }
    x
}

/// Runs the experiment named by the config and writes the CSV to `out`.
/// Returns the per-cell summary, which is also what the CLI prints.
pub fn run_experiment(cfg: &Config, out: &Path) -> Result<Vec<CellSummary>> {
    let id = ExperimentId::parse(cfg.str_or("experiment", ""))?;
    let rows = match id {
        ExperimentId::BetaSweep => experiments::beta_sweep(cfg)?,
        ExperimentId::Lambda2Accuracy => experiments::lambda2_accuracy(cfg)?,
        ExperimentId::IterationGrid => experiments::iteration_grid(cfg, false)?,
        ExperimentId::WalltimeGrid => experiments::iteration_grid(cfg, true)?,
        ExperimentId::StreamLogErr => experiments::stream_logerr(cfg)?,
        ExperimentId::ClusterGrid => experiments::cluster_grid(cfg)?,
    };

    let mut text = String::with_capacity(rows.len() * 96 + 128);
    text.push_str(CSV_HEADER);
    text.push('\n');
    for row in &rows {
        text.push_str(&row.csv_line());
        text.push('\n');
    }
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(out, text)?;

    Ok(summarize(&rows))
}

pub fn summarize(rows: &[ResultRow]) -> Vec<CellSummary> {
    let mut cells: BTreeMap<String, Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        cells.entry(row.cell_key()).or_default().push(row);
    }
    cells
        .into_iter()
        .map(|(cell, rows)| {
            let iters: Vec<f64> = rows
                .iter()
                .filter_map(|r| r.iterations_total)
                .map(|v| v as f64)
                .collect();
            let wall: Vec<f64> = rows
                .iter()
                .filter_map(|r| r.walltime_ns)
                .map(|v| v as f64)
                .collect();
            let l2: Vec<f64> = rows.iter().filter_map(|r| r.lambda2_abs_err).collect();
            let s2: Vec<f64> = rows.iter().filter_map(|r| r.sin2_final).collect();
            let acc: Vec<f64> = rows.iter().filter_map(|r| r.accuracy).collect();
            let le: Vec<f64> = rows.iter().filter_map(|r| r.log_err).collect();
            CellSummary {
                cell,
                trials: rows.len(),
                mean_iterations: mean(&iters),
                median_iterations: median(iters),
                mean_walltime_ns: mean(&wall),
                mean_lambda2_abs_err: mean(&l2),
                mean_sin2: mean(&s2),
                mean_accuracy: mean(&acc),
                median_accuracy: median(acc),
                mean_log_err: mean(&le),
                median_log_err: median(le),
            }
        })
        .collect()
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

fn median(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// Renders the summary as an aligned text table.
pub fn format_summary(summaries: &[CellSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<58} {:>6} {:>12} {:>12} {:>14} {:>12} {:>10} {:>10}",
        "cell (method|d|tag|eps|rho|beta)",
        "trials",
        "mean_iter",
        "med_iter",
        "mean_wall_ns",
        "mean_l2err",
        "mean_acc",
        "mean_loge"
    );
    for s in summaries {
        let _ = writeln!(
            out,
            "{:<58} {:>6} {:>12} {:>12} {:>14} {:>12} {:>10} {:>10}",
            s.cell,
            s.trials,
            fmt_opt(s.mean_iterations),
            fmt_opt(s.median_iterations),
            fmt_opt(s.mean_walltime_ns),
            fmt_opt(s.mean_lambda2_abs_err),
            fmt_opt(s.mean_accuracy),
            fmt_opt(s.mean_log_err),
        );
    }
    out
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.4}"),
        None => "-".into(),
    }
}
