//! Dense linear solves for the small Jacobian systems met during tracking.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};

/// Relative pivot threshold: a pivot below `PIVOT_RTOL * max_row_norm` is singular.
pub const PIVOT_RTOL: f64 = 1e-13;

/// An LU factorization with partial pivoting, reusable across right-hand sides.
///
/// The Ostrowski corrector solves twice against the same Jacobian, so the
/// factorization is kept separate from the solve.
pub struct Factorization {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl Factorization {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        let scale = a
            .row_iter()
            .map(|row| row.norm())
            .fold(0.0_f64, f64::max);
        let threshold = PIVOT_RTOL * scale;
        if !scale.is_finite() {
            return Err(Error::SingularMatrix {
                pivot: f64::NAN,
                threshold,
            });
        }
        let lu = a.lu();
        let pivot = lu.u().diagonal().amin();
        if !(pivot > threshold) {
            return Err(Error::SingularMatrix { pivot, threshold });
        }
        Ok(Self { lu })
    }

    pub fn dim(&self) -> usize {
        self.lu.l().nrows()
    }

    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim(), b.len())?;
        // Pivots were checked on construction, so the solve cannot fail.
        Ok(self.lu.solve(b).expect("nonsingular factorization"))
    }
}

/// Solves `a * x = b` by LU factorization with partial pivoting.
pub fn solve_linear(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    check_dim(a.nrows(), b.len())?;
    Factorization::new(a.clone())?.solve(b)
}
