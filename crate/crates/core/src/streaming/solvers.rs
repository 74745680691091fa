use crate::error::Result;
use crate::metrics::rayleigh_quotient;
use crate::report::{EigenEstimate, SolveReport};
use crate::solvers::{deflation_update, power_update, MomentumState};
use crate::vector::UnitVector;

use super::stream::{batch_estimate, SampleStream};
use super::StreamConfig;

/// Stochastic power method: per round t draw a fresh batch estimate Â_t
/// and take one power step on it. Runs `cfg.rounds` rounds.
pub fn stochastic_power(
    stream: &mut SampleStream,
    cfg: &StreamConfig,
    q0: &UnitVector,
) -> Result<SolveReport> {
    cfg.validate()?;
    let start = stream.consumed();
    let mut q = q0.clone();
    let mut nu = 0.0;
    for _ in 0..cfg.rounds {
        let ahat = batch_estimate(stream, cfg.batch_size)?;
        let (q_next, nu_next) = power_update(&ahat, &q)?;
        q = q_next;
        nu = nu_next;
    }
    let mut report = SolveReport::single_phase(
        cfg.rounds,
        EigenEstimate {
            vector: q,
            value: nu,
        },
        None,
        true,
    );
    report.samples_consumed = Some(stream.consumed() - start);
    Ok(report)
}

/// Mini-batch momentum iteration `q_{t+1} = (Â_t q_t − βq_{t−1})/‖·‖`
/// with `q_{−1} = 0`. β must be supplied in the config.
pub fn minibatch_power_momentum(
    stream: &mut SampleStream,
    cfg: &StreamConfig,
    q0: &UnitVector,
) -> Result<SolveReport> {
    cfg.validate()?;
    let beta = cfg.beta.ok_or_else(|| {
        crate::Error::InvalidArgument("mini-batch momentum needs cfg.beta".into())
    })?;
    let start = stream.consumed();
    let mut state = MomentumState::start(q0.clone());
    let mut nu = 0.0;
    for _ in 0..cfg.rounds {
        let ahat = batch_estimate(stream, cfg.batch_size)?;
        nu = state.step(&ahat, beta)?;
    }
    let mut report = SolveReport::single_phase(
        cfg.rounds,
        EigenEstimate {
            vector: state.q,
            value: nu,
        },
        None,
        true,
    );
    report.beta_used = Some(beta);
    report.samples_consumed = Some(stream.consumed() - start);
    Ok(report)
}

/// Oja's rule `q_t = (q_{t−1} + η_t Â_t q_{t−1})/‖·‖` with the step size
/// drawn from `cfg.eta` at the cumulative sample index of each round.
pub fn oja(stream: &mut SampleStream, cfg: &StreamConfig, q0: &UnitVector) -> Result<SolveReport> {
    cfg.validate()?;
    let start = stream.consumed();
    let mut q = q0.clone();
    let mut nu = 0.0;
    let mut consumed_before: u64 = 0;
    for _ in 0..cfg.rounds {
        let ahat = batch_estimate(stream, cfg.batch_size)?;
        let eta = cfg.eta.eta(consumed_before + 1);
        let mut y = ahat.mul_unit(&q)?;
        y.mapv_inplace(|x| x * eta);
        y += q.as_array();
        q = UnitVector::normalize(y)?;
        nu = rayleigh_quotient(&ahat, &q)?;
        consumed_before += cfg.batch_size as u64;
    }
    let mut report = SolveReport::single_phase(
        cfg.rounds,
        EigenEstimate {
            vector: q,
            value: nu,
        },
        None,
        true,
    );
    report.samples_consumed = Some(stream.consumed() - start);
    Ok(report)
}

/// Configuration alias for the streaming two-phase solver; shares
/// [`StreamConfig`] fields `j_budget`, `k_budget`, `rho`, `eps`.
pub type DmStreamConfig = StreamConfig;

/// Streaming delayed momentum power method.
///
/// Phase 1 (at most `j_budget` rounds): per round draw Â_j, advance the
/// power iterate, run one inexact-deflation step on Â_j, and track
/// `μ_j = w_jᵀÂ_jw_j`; exit early once `|μ_j − μ_{j−1}| ≤ rho`. Then set
/// `β = μ_J²/4` and run the mini-batch momentum recurrence for `k_budget`
/// rounds (or until the squared iterate distance reaches `eps`, when set).
pub fn dmstream(
    stream: &mut SampleStream,
    cfg: &StreamConfig,
    q0: &UnitVector,
    w0: &UnitVector,
) -> Result<SolveReport> {
    cfg.validate()?;
    let start = stream.consumed();
    let mut q = q0.clone();
    let mut w = w0.clone();
    let mut mu_prev: Option<f64> = None;
    let mut mu = 0.0;
    let mut j_used = 0;
    for j in 1..=cfg.j_budget {
        let ahat = batch_estimate(stream, cfg.batch_size)?;
        let (q_next, nu) = power_update(&ahat, &q)?;
        q = q_next;
        let (w_next, mu_next) = deflation_update(&ahat, nu, &q, &w)?;
        w = w_next;
        j_used = j;
        let exit = mu_prev.is_some_and(|mp| (mu_next - mp).abs() <= cfg.rho);
        mu_prev = Some(mu_next);
        mu = mu_next;
        if exit {
            break;
        }
    }

    let beta = mu * mu / 4.0;
    let mut state = MomentumState::start(q);
    let mut nu = 0.0;
    let mut k_used = 0;
    let mut eps_hit = false;
    for k in 1..=cfg.k_budget {
        let ahat = batch_estimate(stream, cfg.batch_size)?;
        let q_prev = state.q.clone();
        nu = state.step(&ahat, beta)?;
        k_used = k;
        if let Some(eps) = cfg.eps {
            let dist = state.q.distance(&q_prev);
            if dist * dist <= eps {
                eps_hit = true;
                break;
            }
        }
    }

    Ok(SolveReport {
        iterations_total: j_used + k_used,
        iterations_pre_momentum: j_used,
        iterations_momentum: k_used,
        estimate: EigenEstimate {
            vector: state.q,
            value: nu,
        },
        lambda2_estimate: Some(mu),
        beta_used: Some(beta),
        trajectory: None,
        converged: cfg.eps.is_none() || eps_hit,
        samples_consumed: Some(stream.consumed() - start),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgen::{synth_covariance, Spectrum};
    use crate::matrix::SymmetricMatrix;
    use crate::report::StopRule;
    use crate::solvers::{power_method, power_momentum, MomentumConfig};
    use crate::streaming::EtaSchedule;
    use rand::SeedableRng;

    fn test_instance(d: usize, seed: u64) -> SymmetricMatrix {
        let s = Spectrum::with_tail(&[1.0, 0.9], 0.4, d).unwrap();
        synth_covariance(&s, 3 * d, seed).unwrap().covariance
    }

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn zero_variance_stochastic_power_equals_deterministic() {
        let a = test_instance(8, 1);
        let q0 = UnitVector::random(8, &mut rng(2));
        let mut stream = SampleStream::constant(a.clone());
        let mut cfg = StreamConfig::new(4, 30);
        cfg.rounds = 30;
        let sr = stochastic_power(&mut stream, &cfg, &q0).unwrap();
        let dr = power_method(&a, &q0, &StopRule::max_iterations(30)).unwrap();
        assert!(sr.estimate.vector.distance(&dr.estimate.vector) <= 1e-12);
        assert_eq!(sr.samples_consumed, Some(120));
    }

    #[test]
    fn zero_variance_minibatch_equals_power_momentum() {
        let a = test_instance(8, 3);
        let q0 = UnitVector::random(8, &mut rng(4));
        let mut stream = SampleStream::constant(a.clone());
        let mut cfg = StreamConfig::new(4, 25);
        cfg.beta = Some(0.2025);
        let sr = minibatch_power_momentum(&mut stream, &cfg, &q0).unwrap();
        let dr = power_momentum(
            &a,
            &q0,
            &MomentumConfig::new(0.2025).unwrap(),
            &StopRule::max_iterations(25),
        )
        .unwrap();
        assert!(sr.estimate.vector.distance(&dr.estimate.vector) <= 1e-12);
    }

    #[test]
    fn minibatch_beta_zero_equals_stochastic_power() {
        let a = test_instance(6, 5);
        let q0 = UnitVector::random(6, &mut rng(6));
        let mut s1 = SampleStream::gaussian(a.clone(), 99).unwrap();
        let mut s2 = SampleStream::gaussian(a, 99).unwrap();
        let mut cfg = StreamConfig::new(8, 15);
        cfg.beta = Some(0.0);
        let m = minibatch_power_momentum(&mut s1, &cfg, &q0).unwrap();
        let p = stochastic_power(&mut s2, &cfg, &q0).unwrap();
        assert!(m.estimate.vector.distance(&p.estimate.vector) <= 1e-12);
    }

    #[test]
    fn zero_variance_dmstream_equals_dmpower() {
        let a = test_instance(8, 7);
        let mut r = rng(8);
        let q0 = UnitVector::random(8, &mut r);
        let w0 = UnitVector::random(8, &mut r);
        let mut stream = SampleStream::constant(a.clone());
        let mut cfg = StreamConfig::new(4, 40);
        cfg.j_budget = 12;
        cfg.k_budget = 20;
        cfg.rho = 1e-3;
        let sr = dmstream(&mut stream, &cfg, &q0, &w0).unwrap();
        let dcfg = crate::solvers::DmPowerConfig {
            rho: 1e-3,
            rho_mode: crate::solvers::RhoMode::MuDiff,
            j: Some(12),
            eps: 1e-300, // momentum phase runs its full budget
            max_iter_per_phase: 20,
        };
        let dr = crate::solvers::dmpower(&a, &q0, &w0, &dcfg).unwrap();
        assert_eq!(sr.iterations_pre_momentum, dr.iterations_pre_momentum);
        assert!(
            (sr.lambda2_estimate.unwrap() - dr.lambda2_estimate.unwrap()).abs() <= 1e-15,
            "mu mismatch"
        );
        assert!(sr.estimate.vector.distance(&dr.estimate.vector) <= 1e-12);
    }

    #[test]
    fn oja_zero_step_keeps_start() {
        let a = test_instance(6, 9);
        let q0 = UnitVector::random(6, &mut rng(10));
        let mut stream = SampleStream::gaussian(a, 1).unwrap();
        let mut cfg = StreamConfig::new(4, 10);
        cfg.eta = EtaSchedule::Fixed(0.0);
        let r = oja(&mut stream, &cfg, &q0).unwrap();
        assert!(r.estimate.vector.distance(&q0) <= 1e-15);
    }

    #[test]
    fn oja_huge_step_is_one_power_step() {
        let a = test_instance(6, 11);
        let q0 = UnitVector::random(6, &mut rng(12));
        let mut stream = SampleStream::constant(a.clone());
        let mut cfg = StreamConfig::new(4, 1);
        cfg.eta = EtaSchedule::Fixed(1e6);
        let r = oja(&mut stream, &cfg, &q0).unwrap();
        let (pq, _) = power_update(&a, &q0).unwrap();
        assert!(r.estimate.vector.distance(&pq) <= 1e-5);
    }

    #[test]
    fn sample_accounting_is_exact() {
        let a = test_instance(5, 13);
        let mut r = rng(14);
        let q0 = UnitVector::random(5, &mut r);
        let w0 = UnitVector::random(5, &mut r);
        let mut stream = SampleStream::gaussian(a, 15).unwrap();
        let mut cfg = StreamConfig::new(7, 20);
        cfg.j_budget = 5;
        cfg.k_budget = 9;
        cfg.rho = 1e-12; // never exits early
        let rep = dmstream(&mut stream, &cfg, &q0, &w0).unwrap();
        assert_eq!(rep.iterations_pre_momentum, 5);
        assert_eq!(rep.iterations_momentum, 9);
        assert_eq!(rep.samples_consumed, Some(7 * 14));
    }

    #[test]
    fn stream_determinism_same_seed_same_report() {
        let a = test_instance(6, 15);
        let q0 = UnitVector::random(6, &mut rng(16));
        let cfg = StreamConfig::new(5, 12);
        let mut s1 = SampleStream::gaussian(a.clone(), 1234).unwrap();
        let mut s2 = SampleStream::gaussian(a, 1234).unwrap();
        let r1 = stochastic_power(&mut s1, &cfg, &q0).unwrap();
        let r2 = stochastic_power(&mut s2, &cfg, &q0).unwrap();
        assert_eq!(r1.estimate.vector, r2.estimate.vector);
        assert_eq!(r1.estimate.value, r2.estimate.value);
    }

    #[test]
    fn stochastic_power_converges_on_easy_instance() {
        let a = test_instance(10, 17);
        let (_, v1) = crate::oracle::oracle_top(&a).unwrap();
        let mut errs = Vec::new();
        for seed in 0..10 {
            let q0 = UnitVector::random(10, &mut rng(100 + seed));
            let mut stream = SampleStream::gaussian(a.clone(), 200 + seed).unwrap();
            let cfg = StreamConfig::new(500, 50);
            let r = stochastic_power(&mut stream, &cfg, &q0).unwrap();
            errs.push(crate::metrics::sin2_error(&r.estimate.vector, &v1).unwrap());
        }
        errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(errs[5] <= 0.05, "median sin² {}", errs[5]);
    }
}
