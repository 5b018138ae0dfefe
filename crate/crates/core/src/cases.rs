//! The reference inverse and forward solves, with their registered budgets.
//!
//! Every case runs the single-step protocol: one corrector iteration per
//! increment of `t`, then the polish at `t = 1` down to `final_tol`. A case's
//! budget for a method is the smallest increment count whose continuation
//! endpoint, before the polish, lies within [`AGREEMENT_TOL`] of the case
//! root. [`ReferenceCase::calibrate`] recomputes it.

use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::{DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homotopy::{newton_step, HomotopyProblem};
use crate::kinematics::{
    forward_presets, inverse_presets, to_local_frame, AuxiliaryPreset, ForwardSystem, LimbSystem,
    LimbVars, ManipulatorParams, FORWARD_START,
};
use crate::system::SharedSystem;
use crate::tracker::{track, Corrector, SolveReport, TrackerConfig};

/// Agreement required between a continuation endpoint and the case root.
pub const AGREEMENT_TOL: f64 = 1e-6;

/// Platform origin used by the inverse cases, global frame.
pub const INVERSE_POSE: [f64; 3] = [0.5, -1.5, 1.0];

/// Starting joint variables of the inverse cases, radians.
pub const INVERSE_START: [f64; 3] = [-1.0, -0.5, 1.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    Inverse,
    Forward,
}

/// One row of the inverse or forward result tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCase {
    pub kind: CaseKind,
    /// Row number within its table, from 1.
    pub row: usize,
    /// Published root: `(theta1 deg, theta2 deg, L)` or `(P, Y, Z)`.
    pub published: [f64; 3],
    /// Registered increment counts, `[newton, ostrowski]`.
    pub steps: [usize; 2],
    /// Iteration counts listed in the publication, `[newton, ostrowski]`.
    pub published_iterations: [usize; 2],
}

const CASES: [ReferenceCase; 10] = [
    ReferenceCase { kind: CaseKind::Inverse, row: 1, published: [288.435, 26.91928, 1.36504], steps: [1121, 175], published_iterations: [100_000, 100] },
    ReferenceCase { kind: CaseKind::Inverse, row: 2, published: [108.43492, 162.37416, 2.04095], steps: [1863, 361], published_iterations: [100_000, 290] },
    ReferenceCase { kind: CaseKind::Forward, row: 1, published: [1.57197, 0.71419, 0.58723], steps: [474, 20], published_iterations: [10_000, 68] },
    ReferenceCase { kind: CaseKind::Forward, row: 2, published: [2.37060, 0.93539, -0.71988], steps: [611, 35], published_iterations: [10_000, 143] },
    ReferenceCase { kind: CaseKind::Forward, row: 3, published: [1.17091, -0.43286, 0.03721], steps: [503, 133], published_iterations: [10_000, 253] },
    ReferenceCase { kind: CaseKind::Forward, row: 4, published: [1.54796, -0.28820, -1.08312], steps: [708, 24], published_iterations: [10_000, 58] },
    ReferenceCase { kind: CaseKind::Forward, row: 5, published: [2.40438, -0.28933, 1.34928], steps: [728, 32], published_iterations: [10_000, 81] },
    ReferenceCase { kind: CaseKind::Forward, row: 6, published: [3.21157, -0.42875, -0.02965], steps: [692, 87], published_iterations: [10_000, 181] },
    ReferenceCase { kind: CaseKind::Forward, row: 7, published: [2.48980, -1.38318, -0.64092], steps: [2137, 186], published_iterations: [10_000, 323] },
    ReferenceCase { kind: CaseKind::Forward, row: 8, published: [1.47615, -1.10076, 0.47274], steps: [2670, 240], published_iterations: [10_000, 791] },
];

/// The two inverse cases followed by the eight forward cases.
pub fn reference_cases() -> Vec<ReferenceCase> {
    CASES.to_vec()
}

/// Looks a case up by id, e.g. `inverse-1` or `forward-8`.
pub fn find_case(id: &str) -> Option<ReferenceCase> {
    CASES.iter().copied().find(|c| c.id() == id)
}

fn method_index(corrector: Corrector) -> usize {
    match corrector {
        Corrector::Newton => 0,
        Corrector::Ostrowski => 1,
    }
}

/// A case's homotopy, built once so runs can be timed around tracking only.
pub struct CaseProblem {
    case: ReferenceCase,
    problem: HomotopyProblem<SharedSystem, SharedSystem>,
    x0: DVector<f64>,
}

/// Outcome of one run of a case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRun {
    /// Root in the published units: `(theta1 deg, theta2 deg, L)` or `(P, Y, Z)`.
    pub solution: [f64; 3],
    pub report: SolveReport,
}

impl ReferenceCase {
    pub fn id(&self) -> String {
        let kind = match self.kind {
            CaseKind::Inverse => "inverse",
            CaseKind::Forward => "forward",
        };
        format!("{kind}-{}", self.row)
    }

    pub fn preset(&self) -> AuxiliaryPreset {
        let presets = match self.kind {
            CaseKind::Inverse => inverse_presets(),
            CaseKind::Forward => forward_presets(),
        };
        presets.into_iter().nth(self.row - 1).expect("registered row has a preset")
    }

    pub fn registered_steps(&self, corrector: Corrector) -> usize {
        self.steps[method_index(corrector)]
    }

    /// The registered single-step configuration for `corrector`.
    pub fn config(&self, corrector: Corrector) -> TrackerConfig {
        TrackerConfig::single_step(corrector, self.registered_steps(corrector))
    }

    /// Single-step configuration with the published iteration count as the
    /// number of increments.
    pub fn published_budget_config(&self, corrector: Corrector) -> TrackerConfig {
        TrackerConfig::single_step(corrector, self.published_iterations[method_index(corrector)])
    }

    pub fn start(&self) -> [f64; 3] {
        match self.kind {
            CaseKind::Inverse => INVERSE_START,
            CaseKind::Forward => FORWARD_START,
        }
    }

    /// Builds the homotopy for `params`; inverse cases use the first limb.
    pub fn problem(&self, params: &ManipulatorParams) -> Result<CaseProblem> {
        self.problem_from(params, self.start())
    }

    /// Like [`ReferenceCase::problem`] with another starting point, in solver units.
    pub fn problem_from(&self, params: &ManipulatorParams, x0: [f64; 3]) -> Result<CaseProblem> {
        match self.kind {
            CaseKind::Inverse => self.limb_problem(params, INVERSE_POSE, 0, x0),
            CaseKind::Forward => self.build(Arc::new(ForwardSystem::new(params.clone())?), x0),
        }
    }

    /// This inverse case's auxiliary system applied to any pose and limb.
    pub fn limb_problem(
        &self,
        params: &ManipulatorParams,
        pose: [f64; 3],
        limb: usize,
        x0: [f64; 3],
    ) -> Result<CaseProblem> {
        if self.kind != CaseKind::Inverse {
            return Err(Error::InvalidConfig(format!("{} is not an inverse case", self.id())));
        }
        params.validate()?;
        let beta = *params.betas.get(limb).ok_or_else(|| {
            Error::InvalidParams(format!("limb {limb} out of range for {} limbs", params.limb_count()))
        })?;
        let local = to_local_frame(&Vector3::from(pose), beta);
        self.build(Arc::new(LimbSystem::new(local, params.e, params.dr)), x0)
    }

    fn build(&self, target: SharedSystem, x0: [f64; 3]) -> Result<CaseProblem> {
        Ok(CaseProblem {
            case: *self,
            problem: HomotopyProblem::new(target, self.preset().system)?,
            x0: DVector::from_column_slice(&x0),
        })
    }

    /// Converts a solver vector to the published units.
    pub fn to_published_units(&self, x: &[f64]) -> [f64; 3] {
        match self.kind {
            CaseKind::Inverse => LimbVars::from_slice(x).canonical().degrees(),
            CaseKind::Forward => [x[0], x[1], x[2]],
        }
    }

    /// Converts a vector in published units to solver units.
    pub fn to_solver_units(&self, v: [f64; 3]) -> [f64; 3] {
        match self.kind {
            CaseKind::Inverse => {
                let l = LimbVars::from_degrees(v[0], v[1], v[2]);
                [l.theta1, l.theta2, l.length]
            }
            CaseKind::Forward => v,
        }
    }

    /// The published root refined by Newton's method on the target system.
    ///
    /// Returned in solver units, canonical for inverse cases.
    pub fn reference_root(&self, params: &ManipulatorParams) -> Result<[f64; 3]> {
        let cp = self.problem(params)?;
        let mut x = DVector::from_column_slice(&self.to_solver_units(self.published));
        for _ in 0..50 {
            let next = newton_step(&cp.problem, &x, 1.0)?;
            let done = (&next - &x).amax() < 1e-15;
            x = next;
            if done {
                break;
            }
        }
        let x = [x[0], x[1], x[2]];
        Ok(match self.kind {
            CaseKind::Inverse => {
                let l = LimbVars::from_slice(&x).canonical();
                [l.theta1, l.theta2, l.length]
            }
            CaseKind::Forward => x,
        })
    }

    /// Smallest single-step increment count, up to `max_steps`, whose
    /// continuation endpoint agrees with `reference` (solver units) within
    /// [`AGREEMENT_TOL`].
    pub fn calibrate(
        &self,
        params: &ManipulatorParams,
        corrector: Corrector,
        reference: [f64; 3],
        max_steps: usize,
    ) -> Result<Option<usize>> {
        let cp = self.problem(params)?;
        for steps in 1..=max_steps {
            let report = cp.run(&TrackerConfig::single_step(corrector, steps))?.report;
            if report.converged && self.endpoint_distance(&report, reference) < AGREEMENT_TOL {
                return Ok(Some(steps));
            }
        }
        Ok(None)
    }

    /// Infinity-norm distance from the pre-polish endpoint to `reference`.
    pub fn endpoint_distance(&self, report: &SolveReport, reference: [f64; 3]) -> f64 {
        let end = &report.continuation_endpoint;
        let end = match self.kind {
            CaseKind::Inverse => {
                let l = LimbVars::from_slice(end).canonical();
                [l.theta1, l.theta2, l.length]
            }
            CaseKind::Forward => [end[0], end[1], end[2]],
        };
        end.iter()
            .zip(reference)
            .map(|(a, b)| angle_aware_diff(self.kind, *a, b))
            .fold(0.0, f64::max)
    }
}

// Canonical angles near 0 and 2pi are the same angle.
fn angle_aware_diff(kind: CaseKind, a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    match kind {
        CaseKind::Inverse => d.min((d - std::f64::consts::TAU).abs()),
        CaseKind::Forward => d,
    }
}

impl CaseProblem {
    pub fn case(&self) -> &ReferenceCase {
        &self.case
    }

    pub fn run(&self, config: &TrackerConfig) -> Result<CaseRun> {
        let report = track(&self.problem, &self.x0, config)?;
        Ok(CaseRun {
            solution: self.case.to_published_units(&report.root),
            report,
        })
    }

    /// Runs `repeats` identical solves and returns the first run with the
    /// median tracking time.
    pub fn timed(&self, config: &TrackerConfig, repeats: usize) -> Result<(CaseRun, Duration)> {
        if repeats == 0 || repeats % 2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "repeat count must be odd and positive, got {repeats}"
            )));
        }
        let mut times = Vec::with_capacity(repeats);
        let mut first = None;
        for _ in 0..repeats {
            let start = Instant::now();
            let run = self.run(config)?;
            times.push(start.elapsed());
            first.get_or_insert(run);
        }
        times.sort();
        Ok((first.expect("at least one repeat"), times[repeats / 2]))
    }
}
