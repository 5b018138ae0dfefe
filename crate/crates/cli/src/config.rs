use std::path::Path;

use hcm_core::cases::INVERSE_POSE;
use hcm_core::kinematics::ManipulatorParams;
use hcm_core::{Corrector, ReferenceCase, StepMode, TrackerConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::report::Format;

/// Contents of a `--params` file. Angles are radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub e: f64,
    pub dr: f64,
    pub betas: Vec<f64>,
    #[serde(default)]
    pub lengths: Option<Vec<f64>>,
    /// Platform origin for inverse kinematics.
    #[serde(default)]
    pub pose: Option<[f64; 3]>,
}

impl ParamsFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid params file {}: {e}", path.display())))
    }

    pub fn params(&self) -> ManipulatorParams {
        ManipulatorParams {
            e: self.e,
            dr: self.dr,
            betas: self.betas.clone(),
            lengths: self.lengths.clone(),
        }
    }
}

/// Everything a subcommand needs besides its own arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ManipulatorParams,
    pub pose: [f64; 3],
    /// Restricts single-method commands; comparisons always run both.
    pub method: Option<Corrector>,
    pub final_tol: Option<f64>,
    pub t_steps: Option<usize>,
    /// Switches to tolerance mode with this per-step tolerance.
    pub step_tol: Option<f64>,
    pub repeats: usize,
    pub format: Format,
    pub trace: bool,
    /// Use the published iteration counts as increment counts.
    pub paper_budgets: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ManipulatorParams::reference(),
            pose: INVERSE_POSE,
            method: None,
            final_tol: None,
            t_steps: None,
            step_tol: None,
            repeats: 11,
            format: Format::Markdown,
            trace: false,
            paper_budgets: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.repeats == 0 || self.repeats % 2 == 0 {
            return Err(CliError::Usage(format!(
                "--repeats must be odd and at least 1, got {}",
                self.repeats
            )));
        }
        if let Some(tol) = self.final_tol.filter(|t| !(*t > 0.0)) {
            return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
        }
        if let Some(tol) = self.step_tol.filter(|t| !(*t > 0.0)) {
            return Err(CliError::Usage(format!("--step-tol must be positive, got {tol}")));
        }
        if self.t_steps == Some(0) {
            return Err(CliError::Usage("--t-steps must be at least 1".into()));
        }
        self.params.validate().map_err(|e| CliError::Usage(e.to_string()))
    }

    /// Method for single-method commands; Ostrowski unless overridden.
    pub fn single_method(&self) -> Corrector {
        self.method.unwrap_or(Corrector::Ostrowski)
    }

    /// Tracker settings for `case` under `corrector` with overrides applied.
    pub fn tracker(&self, case: &ReferenceCase, corrector: Corrector) -> TrackerConfig {
        let mut config = if self.paper_budgets {
            case.published_budget_config(corrector)
        } else {
            case.config(corrector)
        };
        if let Some(n) = self.t_steps {
            config.t_steps = n;
        }
        if let Some(tol) = self.step_tol {
            config.mode = StepMode::Tolerance {
                tol,
                max_iterations: 50,
            };
        }
        if let Some(tol) = self.final_tol {
            config.final_tol = tol;
        }
        config.record_trace = self.trace;
        config
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hcm_core::find_case;

    #[test]
    fn overrides_apply() {
        let case = find_case("forward-1").unwrap();
        let base = RunConfig::default();
        assert_eq!(base.tracker(&case, Corrector::Newton), case.config(Corrector::Newton));
        let cfg = RunConfig { t_steps: Some(7), final_tol: Some(1e-8), step_tol: Some(1e-6), ..base };
        let t = cfg.tracker(&case, Corrector::Ostrowski);
        assert_eq!(t.t_steps, 7);
        assert_eq!(t.final_tol, 1e-8);
        assert!(matches!(t.mode, StepMode::Tolerance { tol, .. } if tol == 1e-6));
    }

    #[test]
    fn published_budgets_replace_registered_ones() {
        let case = find_case("inverse-2").unwrap();
        let cfg = RunConfig { paper_budgets: true, ..RunConfig::default() };
        assert_eq!(cfg.tracker(&case, Corrector::Newton).t_steps, 100_000);
        assert_eq!(cfg.tracker(&case, Corrector::Ostrowski).t_steps, 290);
    }

    #[test]
    fn repeats_must_be_odd() {
        for repeats in [0, 2, 10] {
            let cfg = RunConfig { repeats, ..RunConfig::default() };
            assert!(matches!(cfg.validate(), Err(CliError::Usage(_))));
        }
        assert!(RunConfig { repeats: 1, ..RunConfig::default() }.validate().is_ok());
    }

    #[test]
    fn params_file_shape() {
        let json = r#"{"e": 0.182, "dr": 0.382, "betas": [0.0, 2.0943951023931953, 4.1887902047863905],
                       "lengths": [1.486, 1.386, 1.576], "pose": [0.5, -1.5, 1.0]}"#;
        let file: ParamsFile = serde_json::from_str(json).unwrap();
        assert_eq!(file.pose, Some([0.5, -1.5, 1.0]));
        assert_eq!(file.params().lengths.unwrap().len(), 3);
    }
}
