//! Offset 3-UPU translational manipulator: limb frames, inverse and forward
//! kinematics residual systems, and the auxiliary presets used to reach each
//! root by continuation.

pub mod forward;
pub mod frame;
pub mod inverse;
pub mod params;

pub use forward::{
    enumerate_solutions, enumerate_solutions_with, expand_forward, expanded_forward_residual,
    forward_jacobian, forward_presets, forward_residual, recover_x, solve_forward, Enumeration,
    ExpandedLimb, ForwardSolution, ForwardSystem, PlatformRoot, PresetOutcome, DEDUP_TOL,
    FORWARD_START, X_BRANCH_CLAMP,
};
pub use frame::{to_global_frame, to_local_frame};
pub use inverse::{
    inverse_jacobian, inverse_oracle_grid, inverse_presets, inverse_residual, solve_inverse_limb,
    wrap_angle, AuxiliaryPreset, GridCandidate, LimbSolution, LimbSystem, LimbVars,
};
pub use params::ManipulatorParams;
