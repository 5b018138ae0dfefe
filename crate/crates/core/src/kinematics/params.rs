use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry of an offset 3-UPU translational manipulator.
///
/// Base and platform circumradii only enter the model through their
/// difference `dr = r - r_p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManipulatorParams {
    /// Universal-joint offset.
    pub e: f64,
    /// Circumradius difference `r - r_p`.
    pub dr: f64,
    /// Rotation of each limb frame about the global X axis, radians.
    pub betas: Vec<f64>,
    /// Prismatic joint lengths, one per limb; required for forward kinematics.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<f64>>,
}

impl ManipulatorParams {
    pub const REFERENCE_E: f64 = 0.182;
    pub const REFERENCE_DR: f64 = 0.382;
    pub const REFERENCE_LENGTHS: [f64; 3] = [1.486, 1.386, 1.576];

    /// The reference geometry: `e = 0.182`, `dr = 0.382`,
    /// `beta = (0, 2pi/3, 4pi/3)`, `L = (1.486, 1.386, 1.576)`.
    pub fn reference() -> Self {
        Self {
            e: Self::REFERENCE_E,
            dr: Self::REFERENCE_DR,
            betas: vec![0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0],
            lengths: Some(Self::REFERENCE_LENGTHS.to_vec()),
        }
    }

    pub fn with_lengths(mut self, lengths: Vec<f64>) -> Self {
        self.lengths = Some(lengths);
        self
    }

    pub fn limb_count(&self) -> usize {
        self.betas.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.e >= 0.0) || !self.e.is_finite() {
            return bad(format!("offset e must be finite and non-negative, got {}", self.e));
        }
        if !self.dr.is_finite() {
            return bad(format!("dr must be finite, got {}", self.dr));
        }
        if self.betas.is_empty() {
            return bad("at least one limb angle is required".into());
        }
        if self.betas.iter().any(|b| !b.is_finite()) {
            return bad("limb angles must be finite".into());
        }
        for (i, a) in self.betas.iter().enumerate() {
            if self.betas[i + 1..].iter().any(|b| a == b) {
                return bad(format!("limb angle {a} is repeated"));
            }
        }
        if let Some(lengths) = &self.lengths {
            if lengths.len() != self.betas.len() {
                return bad(format!(
                    "{} lengths given for {} limbs",
                    lengths.len(),
                    self.betas.len()
                ));
            }
            if let Some(l) = lengths.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
                return bad(format!("limb lengths must be positive, got {l}"));
            }
        }
        Ok(())
    }

    /// Limb lengths, or an error when they are absent.
    pub fn require_lengths(&self) -> Result<&[f64]> {
        self.validate()?;
        self.lengths
            .as_deref()
            .ok_or_else(|| Error::InvalidParams("limb lengths are required".into()))
    }
}

impl Default for ManipulatorParams {
    fn default() -> Self {
        Self::reference()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_is_valid() {
        let p = ManipulatorParams::reference();
        p.validate().unwrap();
        assert_eq!(p.require_lengths().unwrap(), &[1.486, 1.386, 1.576]);
        assert_eq!(p.limb_count(), 3);
    }

    #[test]
    fn rejects_bad_geometry() {
        let base = ManipulatorParams::reference();
        let cases = [
            ManipulatorParams { e: -0.1, ..base.clone() },
            ManipulatorParams { betas: vec![0.0, 0.0, 1.0], ..base.clone() },
            ManipulatorParams { lengths: Some(vec![1.0, 1.0]), ..base.clone() },
            ManipulatorParams { lengths: Some(vec![1.0, 0.0, 1.0]), ..base.clone() },
            ManipulatorParams { betas: vec![], lengths: None, ..base.clone() },
            ManipulatorParams { dr: f64::NAN, ..base.clone() },
        ];
        for p in cases {
            assert!(matches!(p.validate(), Err(Error::InvalidParams(_))), "{p:?}");
        }
    }

    #[test]
    fn lengths_required_for_forward() {
        let p = ManipulatorParams { lengths: None, ..ManipulatorParams::reference() };
        assert!(p.validate().is_ok());
        assert!(p.require_lengths().is_err());
    }

    #[test]
    fn json_shape() {
        let json = r#"{"e": 0.182, "dr": 0.382, "betas": [0.0, 2.0943951023931953, 4.1887902047863905], "lengths": [1.486, 1.386, 1.576]}"#;
        let p: ManipulatorParams = serde_json::from_str(json).unwrap();
        assert_eq!(p.lengths.as_deref(), Some(&[1.486, 1.386, 1.576][..]));
        let no_lengths: ManipulatorParams =
            serde_json::from_str(r#"{"e": 0.1, "dr": 0.2, "betas": [0.0]}"#).unwrap();
        assert!(no_lengths.lengths.is_none());
    }
}
