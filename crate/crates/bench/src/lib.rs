//! Shared setup for the corrector benchmarks.

use hcm_core::kinematics::ManipulatorParams;
use hcm_core::{reference_cases, CaseProblem, Corrector, TrackerConfig};

/// A registered case ready to track, with its budget for one method.
pub struct Prepared {
    pub id: String,
    pub corrector: Corrector,
    pub problem: CaseProblem,
    pub config: TrackerConfig,
}

/// Every registered case under both correctors, on the reference geometry.
pub fn prepared_cases() -> Vec<Prepared> {
    let params = ManipulatorParams::reference();
    let mut out = Vec::new();
    for case in reference_cases() {
        for corrector in [Corrector::Newton, Corrector::Ostrowski] {
            out.push(Prepared {
                id: case.id(),
                corrector,
                problem: case.problem(&params).expect("reference geometry is valid"),
                config: case.config(corrector),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_prepared_case_converges() {
        let cases = prepared_cases();
        assert_eq!(cases.len(), 20);
        for p in &cases {
            assert!(p.problem.run(&p.config).unwrap().report.converged, "{} {:?}", p.id, p.corrector);
        }
    }
}
