use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::clustering::{
    dpic_with_cap, make_circles, make_moons, DpicSolver, PointSet, SigmaRule, Similarity,
};
use crate::error::{Error, Result};
use crate::matgen::{synth_covariance, GeneratedInstance, Spectrum};
use crate::metrics::sin2_error;
use crate::oracle::oracle_top;
use crate::report::StopRule;
use crate::solvers::{
    dmpower, lanczos, power_method, power_momentum, simultaneous_iteration, DmPowerConfig,
    MomentumConfig,
};
use crate::streaming::{
    dmstream, minibatch_power_momentum, oja, stochastic_power, EtaSchedule, SampleStream,
    StreamConfig,
};
use crate::vector::UnitVector;

use super::{derive_seed, timeit, Config, ResultRow, RhoPolicy};

/// Dimension cap for the per-row oracle comparison; above it the sin²
/// column is left blank (the dense decomposition would dominate runtime).
const ORACLE_SIN2_MAX_DIM: usize = 128;

struct GridCommon {
    experiment: String,
    d: usize,
    spectrum: Spectrum,
    tag: String,
    epsilons: Vec<f64>,
    rho_policies: Vec<RhoPolicy>,
    trials: usize,
    seed: u64,
    n_samples: usize,
    max_iter: usize,
}

fn grid_common(cfg: &Config, experiment: &str) -> Result<GridCommon> {
    let d = cfg.usize_or("d", 10)?;
    let head = cfg.f64_list_or("spectrum_head", &[1.0, 0.9])?;
    let tail = cfg.f64_or("spectrum_tail", 0.8)?;
    let spectrum = Spectrum::with_tail(&head, tail, d)?;
    let tag = cfg.str_or("spectrum_tag", "spec").to_string();
    let epsilons = cfg.f64_list_or("epsilons", &[1e-9])?;
    let rho_policies = cfg
        .str_list_or("rho_policies", &["eps"])
        .iter()
        .map(|s| RhoPolicy::parse(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(GridCommon {
        experiment: experiment.to_string(),
        d,
        spectrum,
        tag,
        epsilons,
        rho_policies,
        trials: cfg.usize_or("trials", 50)?,
        seed: cfg.u64_or("seed", 1)?,
        n_samples: cfg.usize_or("n_samples", 1000)?.max(d),
        max_iter: cfg.usize_or("max_iter", crate::report::DEFAULT_MAX_ITER)?,
    })
}

struct TrialSetup {
    instance: GeneratedInstance,
    q0: UnitVector,
    w0: UnitVector,
    v1: Option<UnitVector>,
    seed: u64,
}

fn trial_setup(
    common: &GridCommon,
    cell: u64,
    trial: usize,
    want_oracle: bool,
) -> Result<TrialSetup> {
    let seed = derive_seed(common.seed, cell, trial as u64);
    let instance = synth_covariance(&common.spectrum, common.n_samples, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x71, 0));
    let q0 = UnitVector::random(common.d, &mut rng);
    let w0 = UnitVector::random(common.d, &mut rng);
    let v1 = if want_oracle && common.d <= ORACLE_SIN2_MAX_DIM {
        Some(oracle_top(&instance.covariance)?.1)
    } else {
        None
    };
    Ok(TrialSetup {
        instance,
        q0,
        w0,
        v1,
        seed,
    })
}

fn base_row(common: &GridCommon, setup: &TrialSetup, method: &str, trial: usize) -> ResultRow {
    ResultRow {
        experiment: common.experiment.clone(),
        method: method.to_string(),
        d: common.d,
        spectrum_tag: common.tag.clone(),
        trial,
        seed: setup.seed,
        ..Default::default()
    }
}

fn final_sin2(setup: &TrialSetup, vector: &UnitVector) -> Option<f64> {
    setup
        .v1
        .as_ref()
        .map(|v1| sin2_error(vector, v1).expect("dims match"))
}

/// Vanilla baseline against a grid of momentum coefficients.
pub fn beta_sweep(cfg: &Config) -> Result<Vec<ResultRow>> {
    let common = grid_common(cfg, "beta-sweep")?;
    let betas = cfg.f64_list_or("betas", &[0.1025, 0.2025, 0.3025, 0.4025, 0.4225, 0.4525])?;
    let mut rows = Vec::new();
    for (ei, &eps) in common.epsilons.iter().enumerate() {
        for trial in 0..common.trials {
            let setup = trial_setup(&common, ei as u64, trial, true)?;
            let a = &setup.instance.covariance;
            let stop = StopRule::iterate_distance(eps).with_max_iter(common.max_iter);

            let (report, ns) = timeit(|| power_method(a, &setup.q0, &stop));
            let report = report?;
            let mut row = base_row(&common, &setup, "power", trial);
            row.epsilon = Some(eps);
            row.iterations_total = Some(report.iterations_total);
            row.iterations_pre = Some(0);
            row.iterations_mom = Some(report.iterations_momentum);
            row.walltime_ns = Some(ns);
            row.sin2_final = final_sin2(&setup, &report.estimate.vector);
            rows.push(row);

            for &beta in &betas {
                let cfg_m = MomentumConfig::new(beta)?;
                let (report, ns) = timeit(|| power_momentum(a, &setup.q0, &cfg_m, &stop));
                let report = report?;
                let mut row = base_row(&common, &setup, "powerm", trial);
                row.epsilon = Some(eps);
                row.beta = Some(beta);
                row.iterations_total = Some(report.iterations_total);
                row.iterations_pre = Some(0);
                row.iterations_mom = Some(report.iterations_momentum);
                row.walltime_ns = Some(ns);
                row.sin2_final = final_sin2(&setup, &report.estimate.vector);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// Second-eigenvalue accuracy: two-phase deflation vs simultaneous iteration.
pub fn lambda2_accuracy(cfg: &Config) -> Result<Vec<ResultRow>> {
    let common = grid_common(cfg, "lambda2-accuracy")?;
    common.spectrum.require_gaps()?;
    let lambda2 = common.spectrum.lambda(1);
    let mut rows = Vec::new();
    for (ei, &eps) in common.epsilons.iter().enumerate() {
        for trial in 0..common.trials {
            let setup = trial_setup(&common, ei as u64, trial, false)?;
            let a = &setup.instance.covariance;

            for policy in &common.rho_policies {
                let rho = policy.resolve(eps);
                let mut dcfg = DmPowerConfig::new(rho, eps);
                dcfg.max_iter_per_phase = common.max_iter;
                let (report, ns) = timeit(|| dmpower(a, &setup.q0, &setup.w0, &dcfg));
                let report = report?;
                let mut row = base_row(&common, &setup, "dmpower", trial);
                row.epsilon = Some(eps);
                row.rho = Some(policy.tag());
                row.iterations_total = Some(report.iterations_total);
                row.iterations_pre = Some(report.iterations_pre_momentum);
                row.iterations_mom = Some(report.iterations_momentum);
                row.walltime_ns = Some(ns);
                row.lambda2_abs_err = report.lambda2_estimate.map(|m| (m - lambda2).abs());
                rows.push(row);
            }

            let stop = StopRule::iterate_distance(eps).with_max_iter(common.max_iter);
            let sim_seed = derive_seed(setup.seed, 0x2b, 0);
            let (block, ns) = timeit(|| simultaneous_iteration(a, 2, &stop, sim_seed));
            let block = block?;
            let mut row = base_row(&common, &setup, "simultaneous", trial);
            row.epsilon = Some(eps);
            row.iterations_total = Some(block.iterations);
            row.walltime_ns = Some(ns);
            row.lambda2_abs_err = Some((block.estimates[1].value - lambda2).abs());
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Vanilla / optimal momentum / two-phase / Lanczos iteration (or
/// wall-time) grid.
pub fn iteration_grid(cfg: &Config, walltime_focus: bool) -> Result<Vec<ResultRow>> {
    let name = if walltime_focus {
        "walltime-grid"
    } else {
        "iteration-grid"
    };
    let common = grid_common(cfg, name)?;
    common.spectrum.require_gaps()?;
    let lambda2 = common.spectrum.lambda(1);
    let beta_opt = lambda2 * lambda2 / 4.0;
    let include_lanczos = cfg.bool_or("lanczos", true)?;
    let want_oracle = !walltime_focus;
    let mut rows = Vec::new();

    for (ei, &eps) in common.epsilons.iter().enumerate() {
        for trial in 0..common.trials {
            let setup = trial_setup(&common, ei as u64, trial, want_oracle)?;
            let a = &setup.instance.covariance;
            let stop = StopRule::iterate_distance(eps).with_max_iter(common.max_iter);

            let (report, ns) = timeit(|| power_method(a, &setup.q0, &stop));
            let report = report?;
            let mut row = base_row(&common, &setup, "power", trial);
            row.epsilon = Some(eps);
            row.iterations_total = Some(report.iterations_total);
            row.walltime_ns = Some(ns);
            row.sin2_final = final_sin2(&setup, &report.estimate.vector);
            rows.push(row);

            let mcfg = MomentumConfig::new(beta_opt)?;
            let (report, ns) = timeit(|| power_momentum(a, &setup.q0, &mcfg, &stop));
            let report = report?;
            let mut row = base_row(&common, &setup, "powerm", trial);
            row.epsilon = Some(eps);
            row.beta = Some(beta_opt);
            row.iterations_total = Some(report.iterations_total);
            row.walltime_ns = Some(ns);
            row.sin2_final = final_sin2(&setup, &report.estimate.vector);
            rows.push(row);

            for policy in &common.rho_policies {
                let rho = policy.resolve(eps);
                let mut dcfg = DmPowerConfig::new(rho, eps);
                dcfg.max_iter_per_phase = common.max_iter;
                let (report, ns) = timeit(|| dmpower(a, &setup.q0, &setup.w0, &dcfg));
                let report = report?;
                let mut row = base_row(&common, &setup, "dmpower", trial);
                row.epsilon = Some(eps);
                row.rho = Some(policy.tag());
                row.iterations_total = Some(report.iterations_total);
                row.iterations_pre = Some(report.iterations_pre_momentum);
                row.iterations_mom = Some(report.iterations_momentum);
                row.walltime_ns = Some(ns);
                row.lambda2_abs_err = report.lambda2_estimate.map(|m| (m - lambda2).abs());
                row.sin2_final = final_sin2(&setup, &report.estimate.vector);
                rows.push(row);
            }

            if include_lanczos {
                let (res, ns) = timeit(|| lanczos(a, &setup.q0, common.d, true));
                let res = res?;
                let mut row = base_row(&common, &setup, "lanczos", trial);
                row.epsilon = Some(eps);
                row.iterations_total = Some(res.iterations);
                row.walltime_ns = Some(ns);
                row.sin2_final = final_sin2(&setup, &res.estimate.vector);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// Streaming log-error table over batch sizes.
pub fn stream_logerr(cfg: &Config) -> Result<Vec<ResultRow>> {
    let common = grid_common(cfg, "stream-logerr")?;
    if common.d > 30 {
        return Err(Error::InvalidArgument(
            "stream-logerr presets keep d ≤ 30 so the oracle stays cheap".into(),
        ));
    }
    common.spectrum.require_gaps()?;
    let lambda2 = common.spectrum.lambda(1);
    let beta_opt = lambda2 * lambda2 / 4.0;
    let batch_sizes = cfg.usize_list_or("batch_sizes", &[500])?;
    let rounds = cfg.usize_or("rounds", 50)?;
    let j_budget = cfg.usize_or("j_budget", 10)?;
    let oja_cs = cfg.f64_list_or("oja_c", &[3.0, 9.0, 27.0, 81.0])?;
    let stream_rhos = cfg.f64_list_or("stream_rhos", &[0.1])?;
    let mut rows = Vec::new();

    for (bi, &batch) in batch_sizes.iter().enumerate() {
        let tag = format!("{}/b{batch}", common.tag);
        for trial in 0..common.trials {
            let setup = trial_setup(&common, bi as u64, trial, false)?;
            let a = &setup.instance.covariance;
            // evaluation data: the instance's own sample matrix, whose
            // covariance carries the prescribed spectrum exactly
            let eval_x = &setup.instance.data_matrix;
            let (_, v1) = oracle_top(a)?;
            let stream_seed = derive_seed(setup.seed, 0xe1, 0);
            let make_stream = || SampleStream::gaussian(a.clone(), stream_seed);
            let log_err = |q: &UnitVector| crate::streaming::log_error_metric(eval_x, q, &v1);

            let mut scfg = StreamConfig::new(batch, rounds);
            scfg.j_budget = j_budget;

            for &rho in &stream_rhos {
                let mut c = scfg.clone();
                c.rho = rho;
                c.k_budget = rounds.saturating_sub(j_budget).max(1);
                let mut stream = make_stream()?;
                let (report, ns) = timeit(|| dmstream(&mut stream, &c, &setup.q0, &setup.w0));
                let report = report?;
                let mut row = base_row(&common, &setup, "dmstream", trial);
                row.spectrum_tag = tag.clone();
                row.rho = Some(format!("fixed:{rho}"));
                row.iterations_total = Some(report.iterations_total);
                row.iterations_pre = Some(report.iterations_pre_momentum);
                row.iterations_mom = Some(report.iterations_momentum);
                row.walltime_ns = Some(ns);
                row.lambda2_abs_err = report.lambda2_estimate.map(|m| (m - lambda2).abs());
                row.log_err = Some(log_err(&report.estimate.vector)?);
                rows.push(row);
            }

            let mut stream = make_stream()?;
            let (report, ns) = timeit(|| stochastic_power(&mut stream, &scfg, &setup.q0));
            let report = report?;
            let mut row = base_row(&common, &setup, "sgd-power", trial);
            row.spectrum_tag = tag.clone();
            row.iterations_total = Some(report.iterations_total);
            row.walltime_ns = Some(ns);
            row.log_err = Some(log_err(&report.estimate.vector)?);
            rows.push(row);

            let mut c = scfg.clone();
            c.beta = Some(beta_opt);
            let mut stream = make_stream()?;
            let (report, ns) = timeit(|| minibatch_power_momentum(&mut stream, &c, &setup.q0));
            let report = report?;
            let mut row = base_row(&common, &setup, "minibatch-m", trial);
            row.spectrum_tag = tag.clone();
            row.beta = Some(beta_opt);
            row.iterations_total = Some(report.iterations_total);
            row.walltime_ns = Some(ns);
            row.log_err = Some(log_err(&report.estimate.vector)?);
            rows.push(row);

            for &cval in &oja_cs {
                let mut c = scfg.clone();
                c.eta = EtaSchedule::InverseSampleCount { c: cval };
                let mut stream = make_stream()?;
                let (report, ns) = timeit(|| oja(&mut stream, &c, &setup.q0));
                let report = report?;
                let mut row = base_row(&common, &setup, &format!("oja-{cval}"), trial);
                row.spectrum_tag = tag.clone();
                row.iterations_total = Some(report.iterations_total);
                row.walltime_ns = Some(ns);
                row.log_err = Some(log_err(&report.estimate.vector)?);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// Clustering accuracy / iteration grid on the toy datasets.
pub fn cluster_grid(cfg: &Config) -> Result<Vec<ResultRow>> {
    let experiment = "cluster-grid".to_string();
    let datasets = cfg.str_list_or("datasets", &["circles:1000", "moons:500"]);
    let noise = cfg.f64_or("noise", 0.05)?;
    let factor = cfg.f64_or("factor", 0.5)?;
    let sigma_scale = cfg.f64_or("sigma_scale", 0.13)?;
    let epsilons = cfg.f64_list_or("epsilons", &[1e-8])?;
    let rho_policies = cfg
        .str_list_or("rho_policies", &["cbrt"])
        .iter()
        .map(|s| RhoPolicy::parse(s))
        .collect::<Result<Vec<_>>>()?;
    let trials = cfg.usize_or("trials", 10)?;
    let base_seed = cfg.u64_or("seed", 1)?;
    let include_powerm = cfg.bool_or("powerm", true)?;
    let max_iter = cfg.usize_or("max_iter", 30_000)?;
    let similarity = Similarity::Gaussian(SigmaRule::ScaledMedianPairwise(sigma_scale));
    let mut rows = Vec::new();

    for (di, spec) in datasets.iter().enumerate() {
        let (kind, n) = parse_dataset(spec)?;
        for (ei, &eps) in epsilons.iter().enumerate() {
            for trial in 0..trials {
                let seed = derive_seed(base_seed, (di * 97 + ei) as u64, trial as u64);
                let points = generate_dataset(kind, n, noise, factor, seed)?;
                let tag = format!("{kind}-{n}");

                let mut emit = |method: String,
                                rho: Option<String>,
                                beta: Option<f64>,
                                solver: DpicSolver|
                 -> Result<()> {
                    let (result, ns) =
                        timeit(|| dpic_with_cap(&points, solver, eps, seed, &similarity, max_iter));
                    let result = result?;
                    rows.push(ResultRow {
                        experiment: experiment.clone(),
                        method,
                        d: n,
                        spectrum_tag: tag.clone(),
                        epsilon: Some(eps),
                        rho,
                        beta,
                        trial,
                        seed,
                        iterations_total: Some(result.solver_iterations),
                        walltime_ns: Some(ns),
                        accuracy: result.accuracy,
                        ..Default::default()
                    });
                    Ok(())
                };

                emit("power".into(), None, None, DpicSolver::Power)?;
                if include_powerm {
                    let l2 = reference_lambda2(&points, &similarity)?;
                    let beta = l2 * l2 / 4.0;
                    emit(
                        "powerm".into(),
                        None,
                        Some(beta),
                        DpicSolver::PowerMomentum { beta },
                    )?;
                }
                for policy in &rho_policies {
                    let rho = policy.resolve(eps);
                    emit(
                        "dmpower".into(),
                        Some(policy.tag()),
                        None,
                        DpicSolver::DmPower { rho },
                    )?;
                }
            }
        }
    }
    Ok(rows)
}

fn parse_dataset(spec: &str) -> Result<(&str, usize)> {
    let (kind, n) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidArgument(format!("dataset spec {spec}: want kind:n")))?;
    let n: usize = n
        .parse()
        .map_err(|e| Error::InvalidArgument(format!("dataset size {n}: {e}")))?;
    if kind != "circles" && kind != "moons" {
        return Err(Error::InvalidArgument(format!(
            "unknown dataset kind {kind}"
        )));
    }
    Ok((kind, n))
}

fn generate_dataset(kind: &str, n: usize, noise: f64, factor: f64, seed: u64) -> Result<PointSet> {
    match kind {
        "circles" => make_circles(n, factor, noise, seed),
        "moons" => make_moons(n, noise, seed),
        _ => unreachable!(),
    }
}

/// High-precision second eigenvalue of the normalized affinity, for the
/// oracle-β momentum baseline: run the two-phase solver with a tight
/// pre-momentum threshold and read off its estimate.
fn reference_lambda2(points: &PointSet, similarity: &Similarity) -> Result<f64> {
    let a = crate::clustering::affinity(points, similarity)?;
    let (wt, _) = crate::clustering::symmetric_normalized(&a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x12);
    let q0 = UnitVector::random(wt.dim(), &mut rng);
    let w0 = UnitVector::random(wt.dim(), &mut rng);
    let mut dcfg = DmPowerConfig::new(1e-10, 1.0);
    dcfg.max_iter_per_phase = 50_000;
    let report = dmpower(&wt, &q0, &w0, &dcfg)?;
    Ok(report.lambda2_estimate.unwrap())
}
