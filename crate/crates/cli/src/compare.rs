use hcm_core::kinematics::ManipulatorParams;
use hcm_core::{CaseKind, CaseProblem, Corrector, ReferenceCase};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{BenchRecord, TraceRecord};

/// Solutions of the two methods must agree this closely, in published units.
pub const AGREEMENT_TOL: f64 = 1e-6;

/// Residuals at or below this are round-off and compare as equal.
pub const RESIDUAL_FLOOR: f64 = 1e-14;

/// Paired Newton and Ostrowski runs of one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub newton: BenchRecord,
    pub ostrowski: BenchRecord,
    /// Largest componentwise difference between the two solutions.
    pub agreement: f64,
    /// Both converged, solutions agree, and Ostrowski's residual is not worse.
    pub criterion_met: bool,
    #[serde(default)]
    pub traces: Vec<TraceRecord>,
}

impl Comparison {
    /// Describes a criterion violation with both solutions.
    pub fn violation(&self) -> Option<String> {
        if self.criterion_met {
            return None;
        }
        let (n, o) = (&self.newton, &self.ostrowski);
        Some(format!(
            "{}: comparison failed; Newton {:?} (converged {}, residual {:e}), Ostrowski {:?} (converged {}, residual {:e}), difference {:e}",
            n.case, n.solution, n.converged, n.final_residual_norm, o.solution, o.converged, o.final_residual_norm, self.agreement
        ))
    }
}

pub(crate) fn solution_distance(kind: CaseKind, a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| {
            let d = (x - y).abs();
            // Canonical angles in degrees wrap at 360.
            if kind == CaseKind::Inverse && i < 2 {
                d.min((d - 360.0).abs())
            } else {
                d
            }
        })
        .fold(0.0, f64::max)
}

pub(crate) fn timed_record(
    case: &ReferenceCase,
    problem: &CaseProblem,
    corrector: Corrector,
    config: &RunConfig,
) -> CliResult<(BenchRecord, Option<TraceRecord>)> {
    let tracker = config.tracker(case, corrector);
    let (run, median) = problem.timed(&tracker, config.repeats)?;
    let trace = run.report.trace.clone().map(|points| TraceRecord {
        label: format!("{} {}", case.id(), corrector.name()),
        points,
    });
    Ok((
        BenchRecord {
            case: case.id(),
            method: corrector,
            solution: run.solution,
            converged: run.report.converged,
            iterations: run.report.total_corrector_iterations,
            runtime_seconds: median.as_secs_f64(),
            final_residual_norm: run.report.final_residual_norm,
            reduction_percent: None,
        },
        trace,
    ))
}

/// Runs both methods on `case` to the same final tolerance and applies the
/// cross-method criterion. Newton runs first; timing runs are sequential.
pub fn bench_compare(case: &ReferenceCase, config: &RunConfig) -> CliResult<Comparison> {
    let params: &ManipulatorParams = &config.params;
    let problem = match case.kind {
        CaseKind::Inverse => case.limb_problem(params, config.pose, 0, case.start())?,
        CaseKind::Forward => case.problem(params)?,
    };
    let (mut newton, tn) = timed_record(case, &problem, Corrector::Newton, config)?;
    let (mut ostrowski, to) = timed_record(case, &problem, Corrector::Ostrowski, config)?;
    let agreement = solution_distance(case.kind, &newton.solution, &ostrowski.solution);
    let both = newton.converged && ostrowski.converged;
    if both {
        let reduction = (1.0 - ostrowski.runtime_seconds / newton.runtime_seconds) * 100.0;
        newton.reduction_percent = Some(reduction);
        ostrowski.reduction_percent = Some(reduction);
    }
    let criterion_met = both
        && agreement < AGREEMENT_TOL
        && ostrowski.final_residual_norm <= newton.final_residual_norm.max(RESIDUAL_FLOOR);
    Ok(Comparison {
        newton,
        ostrowski,
        agreement,
        criterion_met,
        traces: tn.into_iter().chain(to).collect(),
    })
}
