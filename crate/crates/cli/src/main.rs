//! `powerlab`: generate test matrices, run eigensolvers, stream, cluster,
//! and drive the benchmark presets.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use powerlab_core::bench::{self, Config, RhoPolicy};
use powerlab_core::clustering::{
    self, dpic, load_points, make_circles, make_moons, DpicSolver, SigmaRule, Similarity,
};
use powerlab_core::matgen::{self, Spectrum};
use powerlab_core::solvers::{
    dmpower, lanczos, power_method, power_momentum, simultaneous_iteration, DmPowerConfig,
    MomentumConfig, RhoMode,
};
use powerlab_core::streaming::{
    dmstream, log_error_metric, minibatch_power_momentum, oja, stochastic_power, EtaSchedule,
    SampleStream, StreamConfig,
};
use powerlab_core::{SolveReport, StopRule, SymmetricMatrix, UnitVector};

#[derive(Parser)]
#[command(
    name = "powerlab",
    version,
    about = "Momentum-accelerated power methods workbench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic covariance matrix and samples file.
    Gen(GenArgs),
    /// Run a deterministic eigensolver on a dense matrix file.
    Solve(SolveArgs),
    /// Run a streaming solver over a samples file or a synthetic stream.
    Stream(StreamArgs),
    /// Cluster a two-dimensional dataset with deflation-based power
    /// iteration clustering.
    Cluster(ClusterArgs),
    /// Run a benchmark experiment described by a config preset.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Leading eigenvalues, comma separated (e.g. "1.0,0.9").
    #[arg(long, default_value = "1.0,0.9")]
    spectrum: String,
    /// Value repeated to fill the spectrum up to the dimension.
    #[arg(long, default_value_t = 0.8)]
    tail: f64,
    #[arg(long, default_value_t = 10)]
    dim: usize,
    /// Number of sample rows in the data matrix.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Dense matrix output path.
    #[arg(long)]
    out_matrix: Option<PathBuf>,
    /// Samples file output path.
    #[arg(long)]
    out_samples: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    Power,
    Powerm,
    Dmpower,
    Lanczos,
    Simultaneous,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum StopKindArg {
    Iterate,
    Rayleigh,
}

#[derive(Args)]
struct SolveArgs {
    /// Dense matrix file (first line d, then d rows).
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Threshold for the stop rule (squared iterate distance by default).
    #[arg(long, default_value_t = 1e-9)]
    eps: f64,
    #[arg(long, value_enum, default_value_t = StopKindArg::Iterate)]
    stop: StopKindArg,
    /// Momentum coefficient for `powerm`.
    #[arg(long)]
    beta: Option<f64>,
    /// Pre-momentum precision for `dmpower`.
    #[arg(long)]
    rho: Option<f64>,
    /// Derive rho from eps instead: eps|sqrt|cbrt|fourth|fixed:V.
    #[arg(long)]
    rho_policy: Option<String>,
    /// Pre-momentum exit statistic for `dmpower`.
    #[arg(long, default_value = "mu")]
    rho_mode: String,
    /// Tridiagonalization steps for `lanczos` (default: the dimension).
    #[arg(long)]
    lanczos_steps: Option<usize>,
    /// Block width for `simultaneous`.
    #[arg(long, default_value_t = 2)]
    block: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum StreamMethod {
    SgdPower,
    MinibatchM,
    Oja,
    Dmstream,
}

#[derive(Args)]
struct StreamArgs {
    /// Samples file (header "n d"); alternative to --synthetic.
    #[arg(long)]
    samples: Option<PathBuf>,
    /// Synthetic Gaussian stream from a spectrum, e.g. "1.0,0.9".
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long, default_value_t = 0.4)]
    tail: f64,
    #[arg(long, default_value_t = 20)]
    dim: usize,
    #[arg(long, value_enum)]
    method: StreamMethod,
    #[arg(long, default_value_t = 500)]
    batch: usize,
    #[arg(long, default_value_t = 50)]
    rounds: usize,
    /// Momentum coefficient for `minibatch-m`.
    #[arg(long)]
    beta: Option<f64>,
    /// Pre-momentum threshold for `dmstream`.
    #[arg(long, default_value_t = 0.1)]
    rho: f64,
    /// Pre-momentum round budget for `dmstream`.
    #[arg(long, default_value_t = 10)]
    j_budget: usize,
    /// Oja step-size constant (eta = c / sample index).
    #[arg(long, default_value_t = 27.0)]
    eta_c: f64,
    /// Center columns and rescale by the global std times sqrt(d).
    #[arg(long, default_value_t = false)]
    standardize: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DatasetArg {
    Circles,
    Moons,
    File,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ClusterSolverArg {
    Power,
    Powerm,
    Dmpower,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long, value_enum)]
    dataset: DatasetArg,
    /// Points file for --dataset file.
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 0.5)]
    factor: f64,
    #[arg(long, value_enum, default_value_t = ClusterSolverArg::Dmpower)]
    solver: ClusterSolverArg,
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    #[arg(long)]
    beta: Option<f64>,
    /// Rho policy for dmpower (eps|sqrt|cbrt|fourth|fixed:V).
    #[arg(long, default_value = "cbrt")]
    rho_policy: String,
    /// Gaussian kernel width as a fraction of the median pairwise distance.
    #[arg(long, default_value_t = 0.13)]
    sigma_scale: f64,
    /// Use the raw pairwise-distance affinity instead of the Gaussian one.
    #[arg(long, default_value_t = false)]
    l2_affinity: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the labels as CSV (index,label).
    #[arg(long)]
    out_labels: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment id; defaults to the config's `experiment` key.
    #[arg(long)]
    experiment: Option<String>,
    /// Flat key=value preset file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Solve(args) => run_solve(args),
        Command::Stream(args) => run_stream(args),
        Command::Cluster(args) => run_cluster(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

type AnyResult = Result<(), Box<dyn std::error::Error>>;

fn parse_spectrum(head: &str, tail: f64, dim: usize) -> Result<Spectrum, powerlab_core::Error> {
    let head: Vec<f64> = head
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| powerlab_core::Error::InvalidArgument(format!("bad spectrum: {e}")))?;
    Spectrum::with_tail(&head, tail, dim)
}

fn run_gen(args: GenArgs) -> AnyResult {
    let spectrum = parse_spectrum(&args.spectrum, args.tail, args.dim)?;
    let inst = matgen::synth_covariance(&spectrum, args.samples, args.seed)?;
    if let Some(path) = &args.out_matrix {
        inst.covariance.store(path)?;
        println!("matrix ({0}x{0}) -> {1}", args.dim, path.display());
    }
    if let Some(path) = &args.out_samples {
        matgen::store_samples(&inst.data_matrix, path)?;
        println!(
            "samples ({}x{}) -> {}",
            args.samples,
            args.dim,
            path.display()
        );
    }
    if args.out_matrix.is_none() && args.out_samples.is_none() {
        let mut text = String::new();
        inst.covariance.write_to(&mut text);
        print!("{text}");
    }
    Ok(())
}

fn print_report(report: &SolveReport) {
    println!("converged:        {}", report.converged);
    println!("iterations:       {}", report.iterations_total);
    if report.iterations_pre_momentum > 0 || report.beta_used.is_some() {
        println!("  pre-momentum:   {}", report.iterations_pre_momentum);
        println!("  momentum:       {}", report.iterations_momentum);
    }
    println!("eigenvalue:       {:.12}", report.estimate.value);
    if let Some(l2) = report.lambda2_estimate {
        println!("lambda2 estimate: {l2:.12}");
    }
    if let Some(beta) = report.beta_used {
        println!("beta used:        {beta:.12}");
    }
    if let Some(s) = report.samples_consumed {
        println!("samples consumed: {s}");
    }
}

fn run_solve(args: SolveArgs) -> AnyResult {
    let a = SymmetricMatrix::load(&args.matrix)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let q0 = UnitVector::random(a.dim(), &mut rng);
    let w0 = UnitVector::random(a.dim(), &mut rng);
    let stop = match args.stop {
        StopKindArg::Iterate => StopRule::iterate_distance(args.eps),
        StopKindArg::Rayleigh => StopRule::rayleigh_distance(args.eps),
    }
    .with_max_iter(args.max_iter);

    match args.method {
        Method::Power => print_report(&power_method(&a, &q0, &stop)?),
        Method::Powerm => {
            let beta = args.beta.ok_or("powerm needs --beta")?;
            print_report(&power_momentum(
                &a,
                &q0,
                &MomentumConfig::new(beta)?,
                &stop,
            )?);
        }
        Method::Dmpower => {
            let rho = match (&args.rho, &args.rho_policy) {
                (Some(r), _) => *r,
                (None, Some(p)) => RhoPolicy::parse(p)?.resolve(args.eps),
                (None, None) => args.eps.sqrt(),
            };
            let mode = match args.rho_mode.as_str() {
                "mu" => RhoMode::MuDiff,
                "w" => RhoMode::WDiff,
                other => return Err(format!("unknown rho mode {other}").into()),
            };
            let mut cfg = DmPowerConfig::new(rho, args.eps).with_mode(mode, None);
            cfg.max_iter_per_phase = args.max_iter;
            print_report(&dmpower(&a, &q0, &w0, &cfg)?);
        }
        Method::Lanczos => {
            let m = args.lanczos_steps.unwrap_or(a.dim());
            let r = lanczos(&a, &q0, m, true)?;
            println!("converged:        {}", r.converged);
            println!("iterations:       {}", r.iterations);
            println!("eigenvalue:       {:.12}", r.estimate.value);
            println!("ritz residual:    {:.3e}", r.residual);
        }
        Method::Simultaneous => {
            let r = simultaneous_iteration(&a, args.block, &stop, args.seed)?;
            println!("converged:        {}", r.converged);
            println!("iterations:       {}", r.iterations);
            for (i, est) in r.estimates.iter().enumerate() {
                println!("value[{i}]:         {:.12}", est.value);
            }
        }
    }
    Ok(())
}

fn standardized(mut x: ndarray::Array2<f64>) -> ndarray::Array2<f64> {
    let (n, d) = x.dim();
    for j in 0..d {
        let mean = x.column(j).sum() / n as f64;
        x.column_mut(j).mapv_inplace(|v| v - mean);
    }
    let total = x.iter().map(|v| v * v).sum::<f64>() / (n * d) as f64;
    let scale = total.sqrt() * (d as f64).sqrt();
    if scale > 0.0 {
        x.mapv_inplace(|v| v / scale);
    }
    x
}

fn run_stream(args: StreamArgs) -> AnyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (mut stream, eval): (SampleStream, Option<(ndarray::Array2<f64>, UnitVector)>) =
        match (&args.samples, &args.synthetic) {
            (Some(path), _) => {
                let mut x = matgen::load_samples(path)?;
                if args.standardize {
                    x = standardized(x);
                }
                let stream = SampleStream::matrix(x.clone(), args.seed)?;
                let cov = stream.population_covariance()?;
                let (_, v1) = powerlab_core::oracle::oracle_top(&cov)?;
                (stream, Some((x, v1)))
            }
            (None, Some(spec)) => {
                let spectrum = parse_spectrum(spec, args.tail, args.dim)?;
                let inst = matgen::synth_covariance(&spectrum, 2000, args.seed)?;
                let (_, v1) = powerlab_core::oracle::oracle_top(&inst.covariance)?;
                let stream = SampleStream::gaussian(inst.covariance, args.seed ^ 0xabcd)?;
                (stream, Some((inst.data_matrix, v1)))
            }
            (None, None) => return Err("need --samples or --synthetic".into()),
        };

    let d = stream.dim();
    let q0 = UnitVector::random(d, &mut rng);
    let w0 = UnitVector::random(d, &mut rng);
    let mut cfg = StreamConfig::new(args.batch, args.rounds);
    cfg.rho = args.rho;
    cfg.j_budget = args.j_budget;
    cfg.k_budget = args.rounds.saturating_sub(args.j_budget).max(1);
    cfg.beta = args.beta;
    cfg.eta = EtaSchedule::InverseSampleCount { c: args.eta_c };

    let report = match args.method {
        StreamMethod::SgdPower => stochastic_power(&mut stream, &cfg, &q0)?,
        StreamMethod::MinibatchM => {
            if cfg.beta.is_none() {
                return Err("minibatch-m needs --beta".into());
            }
            minibatch_power_momentum(&mut stream, &cfg, &q0)?
        }
        StreamMethod::Oja => oja(&mut stream, &cfg, &q0)?,
        StreamMethod::Dmstream => dmstream(&mut stream, &cfg, &q0, &w0)?,
    };
    print_report(&report);
    if let Some((x, v1)) = eval {
        let le = log_error_metric(&x, &report.estimate.vector, &v1)?;
        println!("log error:        {le:.4}");
    }
    Ok(())
}

fn run_cluster(args: ClusterArgs) -> AnyResult {
    let points = match args.dataset {
        DatasetArg::Circles => make_circles(args.n, args.factor, args.noise, args.seed)?,
        DatasetArg::Moons => make_moons(args.n, args.noise, args.seed)?,
        DatasetArg::File => {
            let path = args
                .points
                .as_ref()
                .ok_or("--dataset file needs --points")?;
            load_points(path)?
        }
    };
    let solver = match args.solver {
        ClusterSolverArg::Power => DpicSolver::Power,
        ClusterSolverArg::Powerm => {
            let beta = args.beta.ok_or("powerm needs --beta")?;
            DpicSolver::PowerMomentum { beta }
        }
        ClusterSolverArg::Dmpower => {
            let rho = RhoPolicy::parse(&args.rho_policy)?.resolve(args.eps);
            DpicSolver::DmPower { rho }
        }
    };
    let similarity = if args.l2_affinity {
        Similarity::L2Distance
    } else {
        Similarity::Gaussian(SigmaRule::ScaledMedianPairwise(args.sigma_scale))
    };
    let result = dpic(&points, solver, args.eps, args.seed, &similarity)?;
    println!("points:            {}", points.len());
    println!("solver iterations: {}", result.solver_iterations);
    println!("converged:         {}", result.converged);
    if let Some(acc) = result.accuracy {
        println!("accuracy:          {acc:.4}");
    }
    if let Some(path) = &args.out_labels {
        clustering::store_labels(&result.labels, path)?;
        println!("labels -> {}", path.display());
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> AnyResult {
    let mut cfg = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(e) = &args.experiment {
        cfg.set("experiment", e.clone());
    }
    if let Some(t) = args.trials {
        cfg.set("trials", t.to_string());
    }
    if let Some(s) = args.seed {
        cfg.set("seed", s.to_string());
    }
    let summary = bench::run_experiment(&cfg, &args.out)?;
    print!("{}", bench::format_summary(&summary));
    println!("rows -> {}", args.out.display());
    Ok(())
}
