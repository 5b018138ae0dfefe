//! The convex homotopy `H(x, t) = t F(x) + (1 - t) G(x)` and its correctors.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::linalg::Factorization;
use crate::system::NonlinearSystem;

/// A target system `F` deformed from an auxiliary system `G`.
///
/// At `t = 0` the homotopy is exactly `G`; at `t = 1` it is exactly `F`.
#[derive(Debug, Clone)]
pub struct HomotopyProblem<F, G> {
    target: F,
    auxiliary: G,
}

impl<F: NonlinearSystem, G: NonlinearSystem> HomotopyProblem<F, G> {
    pub fn new(target: F, auxiliary: G) -> Result<Self> {
        check_dim(target.dim(), auxiliary.dim())?;
        Ok(Self { target, auxiliary })
    }

    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    pub fn target(&self) -> &F {
        &self.target
    }

    pub fn auxiliary(&self) -> &G {
        &self.auxiliary
    }

    /// `H(x, t)`. The endpoints return `G(x)` and `F(x)` without blending.
    pub fn eval(&self, x: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(self.eval_unchecked(x, t))
    }

    /// `D_x H(x, t) = t J_F(x) + (1 - t) J_G(x)`.
    pub fn jacobian(&self, x: &DVector<f64>, t: f64) -> Result<DMatrix<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(self.jacobian_unchecked(x, t))
    }

    pub(crate) fn eval_unchecked(&self, x: &DVector<f64>, t: f64) -> DVector<f64> {
        if t == 0.0 {
            self.auxiliary.residual(x)
        } else if t == 1.0 {
            self.target.residual(x)
        } else {
            self.target.residual(x) * t + self.auxiliary.residual(x) * (1.0 - t)
        }
    }

    pub(crate) fn jacobian_unchecked(&self, x: &DVector<f64>, t: f64) -> DMatrix<f64> {
        if t == 0.0 {
            self.auxiliary.jacobian(x)
        } else if t == 1.0 {
            self.target.jacobian(x)
        } else {
            self.target.jacobian(x) * t + self.auxiliary.jacobian(x) * (1.0 - t)
        }
    }
}

/// One Newton correction `x - J^{-1} H(x, t)` at fixed `t`.
pub fn newton_step<F, G>(
    problem: &HomotopyProblem<F, G>,
    x: &DVector<f64>,
    t: f64,
) -> Result<DVector<f64>>
where
    F: NonlinearSystem,
    G: NonlinearSystem,
{
    check_dim(problem.dim(), x.len())?;
    let u = problem.eval_unchecked(x, t);
    let lu = Factorization::new(problem.jacobian_unchecked(x, t))?;
    Ok(x - lu.solve(&u)?)
}

/// Result of one Ostrowski correction.
#[derive(Debug, Clone, PartialEq)]
pub struct OstrowskiStep {
    pub x: DVector<f64>,
    /// Components whose denominator `u_k - 2 v_k` fell below the guard.
    pub guarded: usize,
}

/// One two-substep Ostrowski correction at fixed `t`.
///
/// With `J = D_x H(x, t)` factored once and reused:
///
/// ```text
/// u = H(x, t)
/// y = x - J^{-1} u
/// v = H(y, t)
/// w_k = u_k v_k / (u_k - 2 v_k)
/// x' = y - J^{-1} w
/// ```
///
/// For `n = 1` this is the classical fourth-order Ostrowski iteration. A
/// component with `|u_k - 2 v_k| < guard * max(1, |u_k|)` falls back to
/// `w_k = v_k`.
pub fn ostrowski_step<F, G>(
    problem: &HomotopyProblem<F, G>,
    x: &DVector<f64>,
    t: f64,
    guard: f64,
) -> Result<OstrowskiStep>
where
    F: NonlinearSystem,
    G: NonlinearSystem,
{
    check_dim(problem.dim(), x.len())?;
    if !(guard > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "denominator guard must be positive, got {guard}"
        )));
    }
    let u = problem.eval_unchecked(x, t);
    let lu = Factorization::new(problem.jacobian_unchecked(x, t))?;
    let y = x - lu.solve(&u)?;
    let v = problem.eval_unchecked(&y, t);

    let mut guarded = 0;
    let w = DVector::from_iterator(
        u.len(),
        u.iter().zip(v.iter()).map(|(&uk, &vk)| {
            let denom = uk - 2.0 * vk;
            if denom.abs() < guard * uk.abs().max(1.0) {
                // u_k == 0 lands here too; then v_k is the only sensible update.
                guarded += usize::from(uk != 0.0 || vk != 0.0);
                vk
            } else {
                uk * vk / denom
            }
        }),
    );
    Ok(OstrowskiStep {
        x: y - lu.solve(&w)?,
        guarded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::FnSystem;

    fn quadratic() -> impl NonlinearSystem + Clone {
        let f = |x: &DVector<f64>| DVector::from_element(1, x[0] * x[0] - 4.0);
        let j = |x: &DVector<f64>| DMatrix::from_element(1, 1, 2.0 * x[0]);
        std::sync::Arc::new(FnSystem::new(1, f, j))
    }

    fn linear() -> impl NonlinearSystem {
        FnSystem::new(
            1,
            |x: &DVector<f64>| DVector::from_element(1, x[0] - 1.0),
            |_: &DVector<f64>| DMatrix::from_element(1, 1, 1.0),
        )
    }

    fn scalar(v: f64) -> DVector<f64> {
        DVector::from_element(1, v)
    }

    #[test]
    fn eval_midpoint() {
        let h = HomotopyProblem::new(quadratic(), linear()).unwrap();
        assert_eq!(h.eval(&scalar(3.0), 0.5).unwrap()[0], 3.5);
        assert_eq!(h.jacobian(&scalar(3.0), 0.5).unwrap()[(0, 0)], 3.5);
    }

    #[test]
    fn eval_endpoints_are_exact() {
        let h = HomotopyProblem::new(quadratic(), linear()).unwrap();
        let x = scalar(0.1 + 0.2);
        assert_eq!(h.eval(&x, 0.0).unwrap(), linear().residual(&x));
        assert_eq!(h.eval(&x, 1.0).unwrap(), quadratic().residual(&x));
        assert_eq!(h.jacobian(&x, 0.0).unwrap(), linear().jacobian(&x));
        assert_eq!(h.jacobian(&x, 1.0).unwrap(), quadratic().jacobian(&x));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let two = FnSystem::new(
            2,
            |x: &DVector<f64>| x.clone(),
            |_: &DVector<f64>| DMatrix::identity(2, 2),
        );
        assert!(matches!(
            HomotopyProblem::new(quadratic(), two),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
        let h = HomotopyProblem::new(quadratic(), linear()).unwrap();
        assert!(h.eval(&DVector::zeros(2), 0.5).is_err());
        assert!(h.jacobian(&DVector::zeros(3), 0.5).is_err());
        assert!(newton_step(&h, &DVector::zeros(2), 0.5).is_err());
    }

    #[test]
    fn single_newton_step() {
        let h = HomotopyProblem::new(quadratic(), quadratic()).unwrap();
        let x = newton_step(&h, &scalar(3.0), 0.7).unwrap();
        assert!((x[0] - 13.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn single_ostrowski_step() {
        // Hand evaluation: y = 13/6, f(y) = 25/36,
        // x1 = y - 5 / (5 - 50/36) * (25/36) / 6.
        let expected = 13.0 / 6.0 - (5.0 / (5.0 - 50.0 / 36.0)) * ((25.0 / 36.0) / 6.0);
        let h = HomotopyProblem::new(quadratic(), quadratic()).unwrap();
        let step = ostrowski_step(&h, &scalar(3.0), 1.0, 1e-14).unwrap();
        assert!((step.x[0] - expected).abs() < 1e-15);
        assert!((step.x[0] - 2.00641).abs() < 1e-5);
        assert_eq!(step.guarded, 0);
    }

    #[test]
    fn correctors_fix_roots() {
        let h = HomotopyProblem::new(quadratic(), quadratic()).unwrap();
        let root = scalar(2.0);
        assert_eq!(newton_step(&h, &root, 1.0).unwrap(), root);
        let step = ostrowski_step(&h, &root, 1.0, 1e-14).unwrap();
        assert_eq!(step.x, root);
        assert_eq!(step.guarded, 0);
    }

    #[test]
    fn singular_jacobian_propagates() {
        let h = HomotopyProblem::new(quadratic(), quadratic()).unwrap();
        assert!(matches!(
            newton_step(&h, &scalar(0.0), 1.0),
            Err(Error::SingularMatrix { .. })
        ));
        assert!(matches!(
            ostrowski_step(&h, &scalar(0.0), 1.0, 1e-14),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn degenerate_denominator_falls_back() {
        // Piecewise-constant residual with unit slope, chosen so that v = u / 2.
        let f = FnSystem::new(
            1,
            |x: &DVector<f64>| DVector::from_element(1, if x[0] > 0.5 { 2.0 } else { 1.0 }),
            |_: &DVector<f64>| DMatrix::from_element(1, 1, 1.0),
        );
        let h = HomotopyProblem::new(&f, &f).unwrap();
        // u = 2 at x = 1, y = -1, v = 1 = u / 2.
        let step = ostrowski_step(&h, &scalar(1.0), 1.0, 1e-14).unwrap();
        assert_eq!(step.guarded, 1);
        assert_eq!(step.x[0], -2.0);
    }

    #[test]
    fn guard_must_be_positive() {
        let h = HomotopyProblem::new(quadratic(), quadratic()).unwrap();
        assert!(matches!(
            ostrowski_step(&h, &scalar(3.0), 1.0, 0.0),
            Err(Error::InvalidConfig(_))
        ));
    }
}
