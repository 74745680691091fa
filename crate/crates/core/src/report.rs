use crate::vector::UnitVector;

/// An eigenpair estimate: unit vector plus its Rayleigh quotient.
#[derive(Debug, Clone)]
pub struct EigenEstimate {
    pub vector: UnitVector,
    pub value: f64,
}

/// Termination criteria shared by the iterative solvers.
#[derive(Debug, Clone)]
pub enum StopKind {
    /// Stop once the squared distance between successive normalized
    /// iterates, `‖q_k − q_{k−1}‖²`, drops to the threshold. The squared
    /// scale keeps the threshold comparable to sin²-style angular errors;
    /// the benchmark epsilons are quoted on this scale throughout.
    IterateDistance,
    /// Stop once `|ν_k − ν_{k−1}| ≤ ε` for the Rayleigh quotient sequence.
    RayleighDistance,
    /// Stop once `sin²θ(q_k, reference) ≤ ε`. The reference is an externally
    /// supplied ground-truth vector, so this rule is for instrumentation
    /// rather than production solves.
    SineSquaredVsReference(UnitVector),
    /// No early exit: run for exactly `max_iter` rounds.
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct StopRule {
    pub kind: StopKind,
    pub threshold: f64,
    pub max_iter: usize,
}

/// Iteration cap used when callers do not say otherwise.
pub const DEFAULT_MAX_ITER: usize = 100_000;

impl StopRule {
    pub fn iterate_distance(threshold: f64) -> Self {
        Self {
            kind: StopKind::IterateDistance,
            threshold,
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    pub fn rayleigh_distance(threshold: f64) -> Self {
        Self {
            kind: StopKind::RayleighDistance,
            threshold,
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    pub fn sine_squared_vs(reference: UnitVector, threshold: f64) -> Self {
        Self {
            kind: StopKind::SineSquaredVsReference(reference),
            threshold,
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    pub fn max_iterations(n: usize) -> Self {
        Self {
            kind: StopKind::MaxIterations,
            threshold: 0.0,
            max_iter: n,
        }
    }

    pub fn with_max_iter(mut self, n: usize) -> Self {
        self.max_iter = n;
        self
    }

    pub(crate) fn validate(&self) -> crate::Result<()> {
        if !matches!(self.kind, StopKind::MaxIterations) && !(self.threshold > 0.0) {
            return Err(crate::Error::InvalidArgument(
                "stop threshold must be > 0".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(crate::Error::InvalidArgument(
                "max_iter must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Statistic for the active rule at the step `prev → (next, nu_next)`.
    pub(crate) fn statistic(
        &self,
        prev: &UnitVector,
        next: &UnitVector,
        nu_prev: f64,
        nu_next: f64,
    ) -> f64 {
        match &self.kind {
            StopKind::IterateDistance => {
                let d = next.distance(prev);
                d * d
            }
            StopKind::RayleighDistance => (nu_next - nu_prev).abs(),
            StopKind::SineSquaredVsReference(r) => crate::metrics::sin2_error(next, r)
                .expect("reference dimension checked at solve start"),
            StopKind::MaxIterations => f64::INFINITY,
        }
    }

    pub(crate) fn fires(&self, statistic: f64) -> bool {
        !matches!(self.kind, StopKind::MaxIterations) && statistic <= self.threshold
    }
}

/// Outcome of one solver run.
///
/// `iterations_total = iterations_pre_momentum + iterations_momentum`
/// always holds; single-phase methods report zero pre-momentum rounds.
/// `beta_used` is present exactly when a momentum phase ran.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations_total: usize,
    pub iterations_pre_momentum: usize,
    pub iterations_momentum: usize,
    pub estimate: EigenEstimate,
    pub lambda2_estimate: Option<f64>,
    pub beta_used: Option<f64>,
    /// Per-iteration values of the active stop statistic, when recorded.
    pub trajectory: Option<Vec<(usize, f64)>>,
    pub converged: bool,
    /// Streaming solvers: total samples drawn from the stream.
    pub samples_consumed: Option<u64>,
}

impl SolveReport {
    pub(crate) fn single_phase(
        iterations: usize,
        estimate: EigenEstimate,
        trajectory: Option<Vec<(usize, f64)>>,
        converged: bool,
    ) -> Self {
        Self {
            iterations_total: iterations,
            iterations_pre_momentum: 0,
            iterations_momentum: iterations,
            estimate,
            lambda2_estimate: None,
            beta_used: None,
            trajectory,
            converged,
            samples_consumed: None,
        }
    }
}
