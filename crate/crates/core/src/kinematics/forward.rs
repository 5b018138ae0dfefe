//! Forward kinematics in the unknowns `(P, Y, Z)` with `P = X^2 + Y^2 + Z^2`.
//!
//! Eliminating the joint angles from each limb's closure equations leaves
//!
//! ```text
//! A_i^2 - 16 e^2 (L_i^2 - (Z_i - dr)^2) = 0
//! A_i   = P - 2 dr Z_i + dr^2 - 4 e^2 - L_i^2
//! Z_i   = -Y sin(beta_i) + Z cos(beta_i)
//! ```
//!
//! `X` enters only through `P`, so each root `(P, Y, Z)` yields up to two
//! platform positions `X = +-sqrt(P - Y^2 - Z^2)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use super::inverse::AuxiliaryPreset;
use super::params::ManipulatorParams;
use crate::error::{Error, Result};
use crate::homotopy::HomotopyProblem;
use crate::system::{DiagonalAffine, NonlinearSystem};
use crate::tracker::{track, SolveReport, TrackerConfig};

/// Clamp below which `P - Y^2 - Z^2` counts as zero.
pub const X_BRANCH_CLAMP: f64 = 1e-9;

/// Roots closer than this (infinity norm) are the same root.
pub const DEDUP_TOL: f64 = 1e-6;

/// Standard starting point `(P, Y, Z) = (1, 1, 1)`.
pub const FORWARD_START: [f64; 3] = [1.0, 1.0, 1.0];

struct LimbTerms {
    /// `A_i`
    a: f64,
    /// `Z_i - dr`
    z_off: f64,
    /// `d Z_i / d(Y, Z)`
    dz: [f64; 2],
}

fn limb_terms(pyz: &Vector3<f64>, beta: f64, length: f64, e: f64, dr: f64) -> LimbTerms {
    let (s, c) = beta.sin_cos();
    let zi = -pyz.y * s + pyz.z * c;
    LimbTerms {
        a: pyz.x - 2.0 * dr * zi + dr * dr - 4.0 * e * e - length * length,
        z_off: zi - dr,
        dz: [-s, c],
    }
}

/// One residual per limb. Requires `params.lengths`.
pub fn forward_residual(pyz: &Vector3<f64>, params: &ManipulatorParams) -> Result<DVector<f64>> {
    let lengths = params.require_lengths()?;
    let e2 = params.e * params.e;
    Ok(DVector::from_iterator(
        lengths.len(),
        params.betas.iter().zip(lengths).map(|(&beta, &l)| {
            let t = limb_terms(pyz, beta, l, params.e, params.dr);
            t.a * t.a - 16.0 * e2 * (l * l - t.z_off * t.z_off)
        }),
    ))
}

/// Partials of [`forward_residual`] with respect to `(P, Y, Z)`, one row per limb.
pub fn forward_jacobian(pyz: &Vector3<f64>, params: &ManipulatorParams) -> Result<DMatrix<f64>> {
    let lengths = params.require_lengths()?;
    let e2 = params.e * params.e;
    let mut jac = DMatrix::zeros(lengths.len(), 3);
    for (i, (&beta, &l)) in params.betas.iter().zip(lengths).enumerate() {
        let t = limb_terms(pyz, beta, l, params.e, params.dr);
        // d/dq [A^2 + 16 e^2 (Z_i - dr)^2] with dA/dP = 1, dA/dq = -2 dr dZ_i/dq.
        jac[(i, 0)] = 2.0 * t.a;
        for (col, dz) in [(1, t.dz[0]), (2, t.dz[1])] {
            jac[(i, col)] = 2.0 * t.a * (-2.0 * params.dr * dz) + 32.0 * e2 * t.z_off * dz;
        }
    }
    Ok(jac)
}

/// The forward equations for fixed geometry, as a solver target.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardSystem {
    params: ManipulatorParams,
}

impl ForwardSystem {
    /// Requires three limbs with lengths, matching the three unknowns.
    pub fn new(params: ManipulatorParams) -> Result<Self> {
        let lengths = params.require_lengths()?;
        if lengths.len() != 3 {
            return Err(Error::InvalidParams(format!(
                "forward kinematics needs exactly 3 limbs, got {}",
                lengths.len()
            )));
        }
        Ok(Self { params })
    }

    pub fn params(&self) -> &ManipulatorParams {
        &self.params
    }
}

impl NonlinearSystem for ForwardSystem {
    fn dim(&self) -> usize {
        3
    }

    fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        forward_residual(&Vector3::new(x[0], x[1], x[2]), &self.params)
            .expect("validated on construction")
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        forward_jacobian(&Vector3::new(x[0], x[1], x[2]), &self.params)
            .expect("validated on construction")
    }
}

/// The reference-geometry forward polynomials with their published constants.
///
/// Constants are the printed five- to nine-digit values, so agreement with
/// [`forward_residual`] is limited by `0.866 ~ sin(2pi/3)` to about 1e-4
/// relative. The third polynomial's `Y` coefficient inside the square is
/// `-0.661624`: limb 3 has `Z_3 = 0.866 Y - 0.5 Z`, so `-2 dr Z_3`
/// contributes `-0.661624 Y`.
pub fn expanded_forward_residual(pyz: &Vector3<f64>) -> Vector3<f64> {
    let (p, y, z) = (pyz.x, pyz.y, pyz.z);
    Vector3::new(
        (p - 0.764 * z - 2.194768).powi(2) - 1.170308549 + 0.529984 * (z - 0.382).powi(2),
        (p + 0.382 * z + 0.661624 * y - 1.907568).powi(2) - 1.018097144
            + 0.529984 * (-0.866 * y - 0.5 * z - 0.382).powi(2),
        (p + 0.382 * z - 0.661624 * y - 2.470348).powi(2) - 1.31636154
            + 0.529984 * (0.866 * y - 0.5 * z - 0.382).powi(2),
    )
}

/// Forward equations multiplied out into the fixed polynomial shape
///
/// ```text
/// (P + a_y Y + a_z Z + a_0)^2 - k + m (b_y Y + b_z Z + b_0)^2
/// ```
///
/// with coefficients computed from the geometry at full precision.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedLimb {
    pub a_y: f64,
    pub a_z: f64,
    pub a_0: f64,
    pub k: f64,
    pub m: f64,
    pub b_y: f64,
    pub b_z: f64,
    pub b_0: f64,
}

impl ExpandedLimb {
    pub fn eval(&self, pyz: &Vector3<f64>) -> f64 {
        let (p, y, z) = (pyz.x, pyz.y, pyz.z);
        let inner = p + self.a_y * y + self.a_z * z + self.a_0;
        let off = self.b_y * y + self.b_z * z + self.b_0;
        inner * inner - self.k + self.m * off * off
    }
}

/// Expanded coefficients for every limb of `params`.
pub fn expand_forward(params: &ManipulatorParams) -> Result<Vec<ExpandedLimb>> {
    let lengths = params.require_lengths()?;
    let (e, dr) = (params.e, params.dr);
    let m = 16.0 * e * e;
    Ok(params
        .betas
        .iter()
        .zip(lengths)
        .map(|(&beta, &l)| {
            let (s, c) = beta.sin_cos();
            ExpandedLimb {
                a_y: 2.0 * dr * s,
                a_z: -2.0 * dr * c,
                a_0: dr * dr - 4.0 * e * e - l * l,
                k: m * l * l,
                m,
                b_y: -s,
                b_z: c,
                b_0: -dr,
            }
        })
        .collect())
}

/// A forward-kinematics root with its real platform positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformRoot {
    pub p: f64,
    pub y: f64,
    pub z: f64,
    /// Zero, one or two values of `X`.
    pub x_branches: Vec<f64>,
}

impl PlatformRoot {
    pub fn from_pyz(p: f64, y: f64, z: f64) -> Self {
        Self {
            p,
            y,
            z,
            x_branches: recover_x(p, y, z),
        }
    }

    pub fn pyz(&self) -> Vector3<f64> {
        Vector3::new(self.p, self.y, self.z)
    }

    /// Platform positions `(X, Y, Z)`, one per branch.
    pub fn positions(&self) -> Vec<Vector3<f64>> {
        self.x_branches
            .iter()
            .map(|&x| Vector3::new(x, self.y, self.z))
            .collect()
    }
}

/// `X` values with `X^2 + Y^2 + Z^2 = P`: two, one (`X = 0`), or none.
pub fn recover_x(p: f64, y: f64, z: f64) -> Vec<f64> {
    let d = p - y * y - z * z;
    if d > X_BRANCH_CLAMP {
        let x = d.sqrt();
        vec![x, -x]
    } else if d.abs() <= X_BRANCH_CLAMP {
        vec![0.0]
    } else {
        Vec::new()
    }
}

/// Auxiliary functions for the forward problem, in table order.
///
/// Every preset is componentwise affine in `(P, Y, Z)`.
pub fn forward_presets() -> Vec<AuxiliaryPreset> {
    const ROWS: [(&str, [f64; 3], [f64; 3]); 8] = [
        ("P, Y, Z", [1.0, 1.0, 1.0], [0.0, 0.0, 0.0]),
        ("-P, Y, Z", [-1.0, 1.0, 1.0], [0.0, 0.0, 0.0]),
        ("P, -Y, Z", [1.0, -1.0, 1.0], [0.0, 0.0, 0.0]),
        ("-P, -Y, Z", [-1.0, -1.0, 1.0], [0.0, 0.0, 0.0]),
        ("-P+5, -Y-1, -Z+3", [-1.0, -1.0, -1.0], [5.0, -1.0, 3.0]),
        ("-P+5, -Y-1, Z+3", [-1.0, -1.0, 1.0], [5.0, -1.0, 3.0]),
        ("-P-1, -Y+5, Z+3", [-1.0, -1.0, 1.0], [-1.0, 5.0, 3.0]),
        ("-P-1, Y+5, -Z-3", [-1.0, 1.0, -1.0], [-1.0, 5.0, -3.0]),
    ];
    ROWS.iter()
        .enumerate()
        .map(|(i, (label, scale, offset))| AuxiliaryPreset {
            id: i + 1,
            label,
            system: Arc::new(DiagonalAffine::new(scale, offset)),
        })
        .collect()
}

/// Result of one forward solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardSolution {
    pub root: PlatformRoot,
    pub report: SolveReport,
}

/// Tracks the forward system from `x0` with auxiliary `aux`, then recovers `X`.
pub fn solve_forward(
    params: &ManipulatorParams,
    aux: &AuxiliaryPreset,
    x0: &Vector3<f64>,
    config: &TrackerConfig,
) -> Result<ForwardSolution> {
    let problem = HomotopyProblem::new(ForwardSystem::new(params.clone())?, &aux.system)?;
    let report = track(&problem, &DVector::from_column_slice(x0.as_slice()), config)?;
    let root = PlatformRoot::from_pyz(report.root[0], report.root[1], report.root[2]);
    Ok(ForwardSolution { root, report })
}

/// One preset's contribution to [`enumerate_solutions`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetOutcome {
    pub preset_id: usize,
    pub solution: ForwardSolution,
    /// Index into [`Enumeration::roots`], or `None` if the solve failed.
    pub root_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    /// Distinct converged roots in order of first appearance by preset id.
    pub roots: Vec<PlatformRoot>,
    pub outcomes: Vec<PresetOutcome>,
}

impl Enumeration {
    /// Presets whose root duplicated an earlier preset's root.
    pub fn duplicates(&self) -> Vec<(usize, usize)> {
        let mut seen = vec![false; self.roots.len()];
        let mut dups = Vec::new();
        for outcome in &self.outcomes {
            if let Some(idx) = outcome.root_index {
                if seen[idx] {
                    dups.push((outcome.preset_id, idx));
                }
                seen[idx] = true;
            }
        }
        dups
    }

    /// Every signed platform position across all roots.
    pub fn positions(&self) -> Vec<Vector3<f64>> {
        self.roots.iter().flat_map(PlatformRoot::positions).collect()
    }
}

/// Runs every forward preset from `(1, 1, 1)` and collects the distinct roots.
///
/// `config_for` supplies the tracker configuration for each preset id.
/// Failed or duplicate solves shorten the root list; they are not errors.
pub fn enumerate_solutions_with<C>(
    params: &ManipulatorParams,
    presets: &[AuxiliaryPreset],
    mut config_for: C,
) -> Result<Enumeration>
where
    C: FnMut(usize) -> TrackerConfig,
{
    let x0 = Vector3::from(FORWARD_START);
    let mut roots: Vec<PlatformRoot> = Vec::new();
    let mut outcomes = Vec::with_capacity(presets.len());
    for preset in presets {
        let solution = solve_forward(params, preset, &x0, &config_for(preset.id))?;
        let root_index = solution.report.converged.then(|| {
            let pyz = solution.root.pyz();
            roots
                .iter()
                .position(|r| (r.pyz() - pyz).amax() < DEDUP_TOL)
                .unwrap_or_else(|| {
                    roots.push(solution.root.clone());
                    roots.len() - 1
                })
        });
        outcomes.push(PresetOutcome {
            preset_id: preset.id,
            solution,
            root_index,
        });
    }
    Ok(Enumeration { roots, outcomes })
}

/// [`enumerate_solutions_with`] over [`forward_presets`] with one configuration.
pub fn enumerate_solutions(params: &ManipulatorParams, config: &TrackerConfig) -> Result<Enumeration> {
    enumerate_solutions_with(params, &forward_presets(), |_| config.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::finite_difference_jacobian;
    use rand::{Rng, SeedableRng};

    fn random_pyz(rng: &mut impl Rng) -> Vector3<f64> {
        Vector3::new(rng.gen_range(0.0..4.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
    }

    #[test]
    fn table_roots_nearly_satisfy_equations() {
        let params = ManipulatorParams::reference();
        for pyz in [
            Vector3::new(1.57197, 0.71419, 0.58723),
            Vector3::new(2.37060, 0.93539, -0.71988),
        ] {
            assert!(forward_residual(&pyz, &params).unwrap().amax() < 1e-4);
            assert!(expanded_forward_residual(&pyz).amax() < 1e-4);
        }
    }

    #[test]
    fn zero_offset_reduces_to_square() {
        let params = ManipulatorParams { e: 0.0, ..ManipulatorParams::reference() };
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let pyz = random_pyz(&mut rng);
            let r = forward_residual(&pyz, &params).unwrap();
            assert!(r.iter().all(|&v| v >= 0.0));
        }
        // Root iff P - 2 dr Z_1 + dr^2 = L_1^2 on limb 1 (beta = 0).
        let (dr, l1) = (params.dr, 1.486);
        let z = 0.4;
        let pyz = Vector3::new(l1 * l1 + 2.0 * dr * z - dr * dr, 0.3, z);
        assert!(forward_residual(&pyz, &params).unwrap()[0].abs() < 1e-14);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let system = ForwardSystem::new(ManipulatorParams::reference()).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let x = DVector::from_column_slice(random_pyz(&mut rng).as_slice());
            let analytic = system.jacobian(&x);
            let fd = finite_difference_jacobian(&system, &x, 1e-6);
            let err = (&fd - &analytic).amax() / analytic.amax().max(1.0);
            assert!(err < 1e-6, "relative error {err}");
        }
    }

    #[test]
    fn jacobian_structure() {
        let params = ManipulatorParams::reference();
        let pyz = Vector3::new(1.3, -0.4, 0.8);
        let jac = forward_jacobian(&pyz, &params).unwrap();
        // Limb 1 has beta = 0, so Z_1 = Z does not depend on Y.
        assert_eq!(jac[(0, 1)], 0.0);
        for (i, limb) in expand_forward(&params).unwrap().iter().enumerate() {
            let a = pyz.x + limb.a_y * pyz.y + limb.a_z * pyz.z + limb.a_0;
            assert!((jac[(i, 0)] - 2.0 * a).abs() < 1e-14);
        }
    }

    #[test]
    fn expanded_coefficients_match_published_digits() {
        let limbs = expand_forward(&ManipulatorParams::reference()).unwrap();
        assert!((limbs[0].a_z + 0.764).abs() < 1e-15);
        assert!((limbs[0].a_0 + 2.194768).abs() < 1e-12);
        assert!((limbs[0].k - 1.170308549).abs() < 1e-9);
        assert!((limbs[0].m - 0.529984).abs() < 1e-12);
        assert!((limbs[1].a_y - 0.661624).abs() < 5e-5);
        assert!((limbs[1].a_z - 0.382).abs() < 1e-12);
        assert!((limbs[1].a_0 + 1.907568).abs() < 1e-12);
        assert!((limbs[1].k - 1.018097144).abs() < 1e-9);
        assert!((limbs[2].a_y + 0.661624).abs() < 5e-5);
        assert!((limbs[2].a_0 + 2.470348).abs() < 1e-12);
        assert!((limbs[2].k - 1.31636154).abs() < 1e-8);
        assert!((limbs[1].b_y + 0.866).abs() < 5e-4 && (limbs[2].b_y - 0.866).abs() < 5e-4);
    }

    #[test]
    fn recover_x_cases() {
        let xs = recover_x(1.57197, 0.71419, 0.58723);
        assert_eq!(xs.len(), 2);
        assert!((xs[0] - 0.84678).abs() < 1e-4);
        assert_eq!(xs[1], -xs[0]);
        assert_eq!(recover_x(0.25 + 0.36, 0.5, 0.6), vec![0.0]);
        assert!(recover_x(1.0, 1.0, 1.0).is_empty());
    }

    #[test]
    fn forward_system_needs_three_limbs() {
        let params = ManipulatorParams {
            betas: vec![0.0, 1.0],
            lengths: Some(vec![1.0, 1.0]),
            ..ManipulatorParams::reference()
        };
        assert!(matches!(ForwardSystem::new(params), Err(Error::InvalidParams(_))));
        let no_lengths = ManipulatorParams { lengths: None, ..ManipulatorParams::reference() };
        assert!(ForwardSystem::new(no_lengths).is_err());
    }

    #[test]
    fn presets_are_affine_with_known_roots() {
        let presets = forward_presets();
        assert_eq!(presets.len(), 8);
        let x = DVector::from_vec(vec![5.0, -1.0, 3.0]);
        assert_eq!(presets[4].system.residual(&x).amax(), 0.0);
        assert_eq!(presets[0].system.residual(&DVector::zeros(3)).amax(), 0.0);
    }
}
