//! Per-limb inverse kinematics: given the platform origin in a limb frame,
//! find the joint variables `(theta1, theta2, L)`.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::frame::to_local_frame;
use super::params::ManipulatorParams;
use crate::error::Result;
use crate::homotopy::HomotopyProblem;
use crate::system::{FnSystem, NonlinearSystem, SharedSystem};
use crate::tracker::{track, SolveReport, TrackerConfig};

/// Joint variables of one limb, ordered as the solver unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimbVars {
    pub theta1: f64,
    pub theta2: f64,
    pub length: f64,
}

impl LimbVars {
    pub fn new(theta1: f64, theta2: f64, length: f64) -> Self {
        Self {
            theta1,
            theta2,
            length,
        }
    }

    /// Angles given in degrees.
    pub fn from_degrees(theta1: f64, theta2: f64, length: f64) -> Self {
        Self::new(theta1.to_radians(), theta2.to_radians(), length)
    }

    pub fn to_vector(self) -> DVector<f64> {
        DVector::from_vec(vec![self.theta1, self.theta2, self.length])
    }

    pub fn from_slice(x: &[f64]) -> Self {
        Self::new(x[0], x[1], x[2])
    }

    /// Same limb configuration with `L >= 0` and both angles in `[0, 2pi)`.
    ///
    /// `(theta2, L)` and `(theta2 + pi, -L)` describe the same limb vector.
    pub fn canonical(self) -> Self {
        let (theta2, length) = if self.length < 0.0 {
            (self.theta2 + PI, -self.length)
        } else {
            (self.theta2, self.length)
        };
        Self::new(wrap_angle(self.theta1), wrap_angle(theta2), length)
    }

    /// `(theta1 deg, theta2 deg, L)`.
    pub fn degrees(self) -> [f64; 3] {
        [self.theta1.to_degrees(), self.theta2.to_degrees(), self.length]
    }
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Limb closure residual in the limb frame:
///
/// ```text
/// (L cos t2 + 2e) cos t1 - X_i
/// (L cos t2 + 2e) sin t1 - Y_i
///  L sin t2 + dr         - Z_i
/// ```
pub fn inverse_residual(vars: LimbVars, local_pose: &Vector3<f64>, e: f64, dr: f64) -> Vector3<f64> {
    let (s1, c1) = vars.theta1.sin_cos();
    let (s2, c2) = vars.theta2.sin_cos();
    let reach = vars.length * c2 + 2.0 * e;
    Vector3::new(
        reach * c1 - local_pose.x,
        reach * s1 - local_pose.y,
        vars.length * s2 + dr - local_pose.z,
    )
}

/// Partials of [`inverse_residual`] with respect to `(theta1, theta2, L)`.
pub fn inverse_jacobian(vars: LimbVars, e: f64) -> Matrix3<f64> {
    let (s1, c1) = vars.theta1.sin_cos();
    let (s2, c2) = vars.theta2.sin_cos();
    let l = vars.length;
    let reach = l * c2 + 2.0 * e;
    Matrix3::new(
        -reach * s1, -l * s2 * c1, c2 * c1,
        reach * c1, -l * s2 * s1, c2 * s1,
        0.0, l * c2, s2,
    )
}

/// Limb closure equations for a fixed local pose, as a solver target.
#[derive(Debug, Clone, PartialEq)]
pub struct LimbSystem {
    pub local_pose: Vector3<f64>,
    pub e: f64,
    pub dr: f64,
}

impl LimbSystem {
    pub fn new(local_pose: Vector3<f64>, e: f64, dr: f64) -> Self {
        Self { local_pose, e, dr }
    }
}

impl NonlinearSystem for LimbSystem {
    fn dim(&self) -> usize {
        3
    }

    fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        let r = inverse_residual(LimbVars::from_slice(x.as_slice()), &self.local_pose, self.e, self.dr);
        DVector::from_column_slice(r.as_slice())
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let j = inverse_jacobian(LimbVars::from_slice(x.as_slice()), self.e);
        DMatrix::from_iterator(3, 3, j.iter().copied())
    }
}

/// A named auxiliary system `G` used to start the continuation.
#[derive(Clone)]
pub struct AuxiliaryPreset {
    /// Table row number the preset reproduces.
    pub id: usize,
    pub label: &'static str,
    pub system: SharedSystem,
}

impl std::fmt::Debug for AuxiliaryPreset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AuxiliaryPreset")
            .field("id", &self.id)
            .field("label", &self.label)
            .finish()
    }
}

type VecFn = fn(&DVector<f64>) -> DVector<f64>;
type MatFn = fn(&DVector<f64>) -> DMatrix<f64>;

fn diag3(a: f64, b: f64, c: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![a, b, c]))
}

/// Auxiliary functions for the inverse problem, in table order.
pub fn inverse_presets() -> Vec<AuxiliaryPreset> {
    let row1: FnSystem<VecFn, MatFn> = FnSystem::new(
        3,
        |x| DVector::from_vec(vec![x[0].cos(), x[1].sin(), x[2] * x[2]]),
        |x| diag3(-x[0].sin(), x[1].cos(), 2.0 * x[2]),
    );
    let row2: FnSystem<VecFn, MatFn> = FnSystem::new(
        3,
        |x| {
            DVector::from_vec(vec![
                -2.0 * x[0].cos(),
                x[1].sin() + 2.0 * x[1].cos() + 1.0,
                x[2] * x[2],
            ])
        },
        |x| diag3(2.0 * x[0].sin(), x[1].cos() - 2.0 * x[1].sin(), 2.0 * x[2]),
    );
    vec![
        AuxiliaryPreset {
            id: 1,
            label: "cos(t1), sin(t2), L^2",
            system: Arc::new(row1),
        },
        AuxiliaryPreset {
            id: 2,
            label: "-2cos(t1), sin(t2)+2cos(t2)+1, L^2",
            system: Arc::new(row2),
        },
    ]
}

/// Solved joint variables for one limb.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimbSolution {
    pub theta1: f64,
    pub theta2: f64,
    pub length: f64,
    pub report: SolveReport,
}

impl LimbSolution {
    pub fn vars(&self) -> LimbVars {
        LimbVars::new(self.theta1, self.theta2, self.length)
    }
}

/// Solves one limb for a platform origin given in global coordinates.
///
/// The tracker's raw root is kept in `report.root`; the returned joint
/// variables are [`LimbVars::canonical`].
pub fn solve_inverse_limb(
    pose_global: &Vector3<f64>,
    beta: f64,
    params: &ManipulatorParams,
    aux: &AuxiliaryPreset,
    x0: LimbVars,
    config: &TrackerConfig,
) -> Result<LimbSolution> {
    params.validate()?;
    let local = to_local_frame(pose_global, beta);
    let problem = HomotopyProblem::new(LimbSystem::new(local, params.e, params.dr), &aux.system)?;
    let report = track(&problem, &x0.to_vector(), config)?;
    let vars = LimbVars::from_slice(&report.root).canonical();
    Ok(LimbSolution {
        theta1: vars.theta1,
        theta2: vars.theta2,
        length: vars.length,
        report,
    })
}

/// A brute-force candidate from [`inverse_oracle_grid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCandidate {
    pub vars: LimbVars,
    pub residual_norm: f64,
}

/// Grid-search oracle for the limb equations, independent of the tracker.
///
/// Scans `theta2` over `[0, 2pi)`; the third equation fixes
/// `L = (Z_i - dr) / sin(theta2)` (the radial distance does when
/// `sin(theta2) = 0`) and the first two fix `theta1` up to the sign of
/// `L cos(theta2) + 2e`. Only `L > 0` is kept. Candidates with residual below
/// `10 * resolution` are grouped into runs of consecutive grid points, and
/// each run is represented by its smallest-residual member.
pub fn inverse_oracle_grid(
    local_pose: &Vector3<f64>,
    e: f64,
    dr: f64,
    resolution: f64,
) -> Vec<GridCandidate> {
    assert!(resolution > 0.0, "grid resolution must be positive");
    let steps = (TAU / resolution).ceil() as usize;
    let threshold = 10.0 * resolution;
    let mut clusters: Vec<GridCandidate> = Vec::new();
    let mut last_index: Option<usize> = None;

    let radial = local_pose.x.hypot(local_pose.y);
    for k in 0..steps {
        let theta2 = k as f64 * resolution;
        let (s2, c2) = theta2.sin_cos();
        // Off the horizontal, the third equation fixes L. On it, L comes from
        // the radial distance |L cos(theta2) + 2e| = sqrt(X_i^2 + Y_i^2).
        let lengths = if s2.abs() > 1e-12 {
            [Some((local_pose.z - dr) / s2), None]
        } else {
            [Some((radial - 2.0 * e) / c2), Some((-radial - 2.0 * e) / c2)]
        };
        let Some(length) = lengths.into_iter().flatten().find(|&l| l > 0.0) else {
            continue;
        };
        let reach = length * c2 + 2.0 * e;
        let theta1 = if reach >= 0.0 {
            local_pose.y.atan2(local_pose.x)
        } else {
            (-local_pose.y).atan2(-local_pose.x)
        };
        let vars = LimbVars::new(wrap_angle(theta1), theta2, length);
        let residual_norm = inverse_residual(vars, local_pose, e, dr).amax();
        if residual_norm >= threshold {
            continue;
        }
        let candidate = GridCandidate {
            vars,
            residual_norm,
        };
        match (last_index, clusters.last_mut()) {
            (Some(prev), Some(best)) if prev + 1 == k => {
                if residual_norm < best.residual_norm {
                    *best = candidate;
                }
            }
            _ => clusters.push(candidate),
        }
        last_index = Some(k);
    }
    clusters
}
