//! Fixed-step continuation from `t = 0` to `t = 1`.

use std::time::{Duration, Instant};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::homotopy::{newton_step, ostrowski_step, HomotopyProblem};
use crate::system::NonlinearSystem;

/// Local iteration applied at each fixed value of `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Corrector {
    Newton,
    Ostrowski,
}

impl Corrector {
    pub fn name(self) -> &'static str {
        match self {
            Corrector::Newton => "Newton-HCM",
            Corrector::Ostrowski => "Ostrowski-HCM",
        }
    }
}

/// Stopping rule for the corrector at each intermediate `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMode {
    /// Exactly this many corrector iterations per `t` increment.
    FixedIterations(usize),
    /// Iterate until `||H(x, t)||_inf <= tol` or `max_iterations` is spent.
    Tolerance { tol: f64, max_iterations: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackerConfig {
    /// Number of uniform increments; `t_k = k / t_steps`.
    pub t_steps: usize,
    pub corrector: Corrector,
    pub mode: StepMode,
    /// Residual bound `||F(x)||_inf` required at `t = 1`.
    pub final_tol: f64,
    /// Corrector iterations allowed at `t = 1` to reach `final_tol`.
    pub final_max_iterations: usize,
    pub divergence_norm_bound: f64,
    pub denominator_guard: f64,
    pub record_trace: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            t_steps: 100,
            corrector: Corrector::Ostrowski,
            mode: StepMode::Tolerance {
                tol: 1e-10,
                max_iterations: 50,
            },
            final_tol: 1e-10,
            final_max_iterations: 50,
            divergence_norm_bound: 1e8,
            denominator_guard: 1e-14,
            record_trace: false,
        }
    }
}

impl TrackerConfig {
    /// One corrector iteration per increment of `t`, polished at `t = 1`.
    pub fn single_step(corrector: Corrector, t_steps: usize) -> Self {
        Self {
            t_steps,
            corrector,
            mode: StepMode::FixedIterations(1),
            ..Self::default()
        }
    }

    pub fn with_corrector(mut self, corrector: Corrector) -> Self {
        self.corrector = corrector;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.t_steps == 0 {
            return bad("t_steps must be at least 1".into());
        }
        match self.mode {
            StepMode::FixedIterations(0) => {
                return bad("fixed iteration count must be at least 1".into())
            }
            StepMode::Tolerance { tol, max_iterations } => {
                if !(tol > 0.0) {
                    return bad(format!("step tolerance must be positive, got {tol}"));
                }
                if max_iterations == 0 {
                    return bad("max_iterations must be at least 1".into());
                }
            }
            StepMode::FixedIterations(_) => {}
        }
        if !(self.final_tol > 0.0) {
            return bad(format!("final_tol must be positive, got {}", self.final_tol));
        }
        if !(self.divergence_norm_bound > 0.0) {
            return bad("divergence_norm_bound must be positive".into());
        }
        if !(self.denominator_guard > 0.0) {
            return bad("denominator_guard must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub residual_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// `||x||_inf` exceeded the bound or a NaN/infinity appeared.
    Diverged,
    SingularJacobian,
    /// Reached `t = 1` but the polish did not meet `final_tol`.
    NotConverged,
}

/// Where tracking stopped when it did not converge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub t: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub root: Vec<f64>,
    pub converged: bool,
    /// Corrector iterations summed over every `t` value, including the polish.
    pub total_corrector_iterations: usize,
    pub final_residual_norm: f64,
    pub wall_time: Duration,
    pub guarded_denominators: usize,
    /// Iterate after the last increment, before the polish at `t = 1`.
    pub continuation_endpoint: Vec<f64>,
    /// Iterations spent at `t = 1` after the last increment.
    pub polish_iterations: usize,
    pub failure: Option<Failure>,
    pub trace: Option<Vec<TracePoint>>,
}

impl SolveReport {
    pub fn root_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.root)
    }
}

struct Tracker<'a, F, G> {
    problem: &'a HomotopyProblem<F, G>,
    config: &'a TrackerConfig,
    iterations: usize,
    guarded: usize,
}

enum Stop {
    Diverged,
    Singular,
}

impl<F: NonlinearSystem, G: NonlinearSystem> Tracker<'_, F, G> {
    fn residual_norm(&self, x: &DVector<f64>, t: f64) -> f64 {
        let r = self.problem.eval_unchecked(x, t);
        if r.iter().all(|v| v.is_finite()) {
            r.amax()
        } else {
            f64::INFINITY
        }
    }

    fn step(&mut self, x: &DVector<f64>, t: f64) -> Result<DVector<f64>, Stop> {
        let next = match self.config.corrector {
            Corrector::Newton => newton_step(self.problem, x, t),
            Corrector::Ostrowski => {
                ostrowski_step(self.problem, x, t, self.config.denominator_guard).map(|s| {
                    self.guarded += s.guarded;
                    s.x
                })
            }
        }
        .map_err(|_| Stop::Singular)?;
        self.iterations += 1;
        if next.iter().any(|v| !v.is_finite()) || next.amax() > self.config.divergence_norm_bound
        {
            return Err(Stop::Diverged);
        }
        Ok(next)
    }

    /// Iterates at fixed `t` until `tol` is met or `max` iterations are spent.
    fn converge(
        &mut self,
        mut x: DVector<f64>,
        t: f64,
        tol: f64,
        max: usize,
    ) -> Result<(DVector<f64>, f64), (Stop, DVector<f64>)> {
        let mut norm = self.residual_norm(&x, t);
        for _ in 0..max {
            if norm <= tol {
                break;
            }
            x = match self.step(&x, t) {
                Ok(next) => next,
                Err(stop) => return Err((stop, x)),
            };
            norm = self.residual_norm(&x, t);
        }
        Ok((x, norm))
    }
}

/// Tracks `H(x, t) = 0` from `x0` at `t = 0` to a root of the target at `t = 1`.
///
/// For `k = 1..=t_steps` the corrector runs at `t_k = k / t_steps` under the
/// configured [`StepMode`], seeding each value of `t` with the previous point.
/// At `t = 1` the corrector then continues until `||F(x)||_inf <= final_tol`.
///
/// Only contract violations (bad dimensions, invalid configuration) are
/// errors; divergence and singular Jacobians are reported with
/// `converged == false` and a [`Failure`] diagnostic.
pub fn track<F, G>(
    problem: &HomotopyProblem<F, G>,
    x0: &DVector<f64>,
    config: &TrackerConfig,
) -> Result<SolveReport>
where
    F: NonlinearSystem,
    G: NonlinearSystem,
{
    check_dim(problem.dim(), x0.len())?;
    config.validate()?;

    let start = Instant::now();
    let mut tracker = Tracker {
        problem,
        config,
        iterations: 0,
        guarded: 0,
    };
    let mut trace = config.record_trace.then(Vec::new);
    let mut x = x0.clone();

    let failure = |kind: FailureKind, t: f64, x: &DVector<f64>| Failure {
        kind,
        t,
        x: x.as_slice().to_vec(),
    };
    let stop_kind = |stop: Stop| match stop {
        Stop::Diverged => FailureKind::Diverged,
        Stop::Singular => FailureKind::SingularJacobian,
    };

    let mut outcome = None;
    for k in 1..=config.t_steps {
        let t = k as f64 / config.t_steps as f64;
        let result = match config.mode {
            StepMode::FixedIterations(count) => {
                let mut current = x.clone();
                let mut stopped = None;
                for _ in 0..count {
                    match tracker.step(&current, t) {
                        Ok(next) => current = next,
                        Err(stop) => {
                            stopped = Some(stop);
                            break;
                        }
                    }
                }
                match stopped {
                    None => Ok(current),
                    Some(stop) => Err((stop, current)),
                }
            }
            StepMode::Tolerance {
                tol,
                max_iterations,
            } => tracker
                .converge(x.clone(), t, tol, max_iterations)
                .map(|(x, _)| x),
        };
        match result {
            Ok(next) => x = next,
            Err((stop, last)) => {
                outcome = Some(failure(stop_kind(stop), t, &last));
                x = last;
                break;
            }
        }
        if let Some(trace) = trace.as_mut() {
            trace.push(TracePoint {
                t,
                x: x.as_slice().to_vec(),
                residual_norm: tracker.residual_norm(&x, t),
            });
        }
    }

    let continuation_endpoint = x.as_slice().to_vec();
    let before_polish = tracker.iterations;
    let final_residual_norm = if outcome.is_none() {
        match tracker.converge(x.clone(), 1.0, config.final_tol, config.final_max_iterations) {
            Ok((polished, norm)) => {
                x = polished;
                if norm > config.final_tol {
                    outcome = Some(failure(FailureKind::NotConverged, 1.0, &x));
                }
                norm
            }
            Err((stop, last)) => {
                outcome = Some(failure(stop_kind(stop), 1.0, &last));
                x = last;
                tracker.residual_norm(&x, 1.0)
            }
        }
    } else {
        tracker.residual_norm(&x, 1.0)
    };

    Ok(SolveReport {
        root: x.as_slice().to_vec(),
        converged: outcome.is_none() && final_residual_norm <= config.final_tol,
        total_corrector_iterations: tracker.iterations,
        final_residual_norm,
        wall_time: start.elapsed(),
        guarded_denominators: tracker.guarded,
        continuation_endpoint,
        polish_iterations: tracker.iterations - before_polish,
        failure: outcome,
        trace,
    })
}
