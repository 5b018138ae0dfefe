//! Homotopy continuation with Newton and fourth-order Ostrowski correctors.
//!
//! A target system `F(x) = 0` is reached from an auxiliary system `G` whose
//! root is easy to find, by tracking `H(x, t) = t F(x) + (1 - t) G(x)` as `t`
//! goes from 0 to 1. The [`kinematics`] module applies this to the inverse
//! and forward position problems of an offset 3-UPU parallel manipulator.

pub mod cases;
pub mod error;
pub mod homotopy;
pub mod kinematics;
pub mod linalg;
pub mod system;
pub mod tracker;

pub use cases::{find_case, reference_cases, CaseKind, CaseProblem, CaseRun, ReferenceCase};
pub use error::{Error, Result};
pub use homotopy::{newton_step, ostrowski_step, HomotopyProblem, OstrowskiStep};
pub use linalg::{solve_linear, Factorization};
pub use system::{finite_difference_jacobian, DiagonalAffine, FnSystem, NonlinearSystem, SharedSystem};
pub use tracker::{
    track, Corrector, Failure, FailureKind, SolveReport, StepMode, TracePoint, TrackerConfig,
};

pub use nalgebra;
