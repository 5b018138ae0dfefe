//! Square nonlinear systems `F: R^n -> R^n` with analytic Jacobians.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

/// A square system of nonlinear equations together with its Jacobian.
///
/// Implementations must return a `dim()`-length residual and a
/// `dim() x dim()` Jacobian for any `dim()`-length input. Callers in this
/// crate check input lengths before evaluating.
pub trait NonlinearSystem {
    fn dim(&self) -> usize;

    fn residual(&self, x: &DVector<f64>) -> DVector<f64>;

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

impl<S: NonlinearSystem + ?Sized> NonlinearSystem for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        (**self).residual(x)
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        (**self).jacobian(x)
    }
}

impl<S: NonlinearSystem + ?Sized> NonlinearSystem for Box<S> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        (**self).residual(x)
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        (**self).jacobian(x)
    }
}

impl<S: NonlinearSystem + ?Sized> NonlinearSystem for Arc<S> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        (**self).residual(x)
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        (**self).jacobian(x)
    }
}

/// Shared, thread-safe handle to a system.
pub type SharedSystem = Arc<dyn NonlinearSystem + Send + Sync>;

/// A system built from a pair of closures.
///
/// ```
/// use hcm_core::{FnSystem, NonlinearSystem};
/// use nalgebra::{DMatrix, DVector};
///
/// let f = FnSystem::new(
///     1,
///     |x: &DVector<f64>| DVector::from_element(1, x[0] * x[0] - 4.0),
///     |x: &DVector<f64>| DMatrix::from_element(1, 1, 2.0 * x[0]),
/// );
/// assert_eq!(f.residual(&DVector::from_element(1, 3.0))[0], 5.0);
/// ```
pub struct FnSystem<R, J> {
    dim: usize,
    residual: R,
    jacobian: J,
}

impl<R, J> FnSystem<R, J>
where
    R: Fn(&DVector<f64>) -> DVector<f64>,
    J: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    pub fn new(dim: usize, residual: R, jacobian: J) -> Self {
        assert!(dim > 0, "system dimension must be positive");
        Self {
            dim,
            residual,
            jacobian,
        }
    }
}

impl<R, J> NonlinearSystem for FnSystem<R, J>
where
    R: Fn(&DVector<f64>) -> DVector<f64>,
    J: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.residual)(x)
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        (self.jacobian)(x)
    }
}

/// Componentwise affine system `G_k(x) = scale_k * x_k + offset_k`.
///
/// All of the forward-kinematics auxiliary functions are of this form,
/// e.g. `(-P + 5, -Y - 1, -Z + 3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalAffine {
    pub scale: DVector<f64>,
    pub offset: DVector<f64>,
}

impl DiagonalAffine {
    pub fn new(scale: &[f64], offset: &[f64]) -> Self {
        assert_eq!(scale.len(), offset.len(), "scale/offset length mismatch");
        assert!(!scale.is_empty(), "system dimension must be positive");
        Self {
            scale: DVector::from_column_slice(scale),
            offset: DVector::from_column_slice(offset),
        }
    }

    /// The unique root `-offset_k / scale_k`, if every scale is nonzero.
    pub fn root(&self) -> Option<DVector<f64>> {
        if self.scale.iter().any(|&s| s == 0.0) {
            return None;
        }
        Some(-self.offset.component_div(&self.scale))
    }
}

impl NonlinearSystem for DiagonalAffine {
    fn dim(&self) -> usize {
        self.scale.len()
    }

    fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        self.scale.component_mul(x) + &self.offset
    }

    fn jacobian(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.scale)
    }
}

/// Central finite-difference Jacobian with step `h_j = rel_step * max(1, |x_j|)`.
///
/// Test helper for checking analytic Jacobians; not used by the solver.
pub fn finite_difference_jacobian<S: NonlinearSystem + ?Sized>(
    system: &S,
    x: &DVector<f64>,
    rel_step: f64,
) -> DMatrix<f64> {
    let n = system.dim();
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let h = rel_step * x[j].abs().max(1.0);
        let mut plus = x.clone();
        let mut minus = x.clone();
        plus[j] += h;
        minus[j] -= h;
        let column = (system.residual(&plus) - system.residual(&minus)) / (2.0 * h);
        jac.set_column(j, &column);
    }
    jac
}
