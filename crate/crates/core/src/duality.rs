//! Legendre duality between `−log Z(β)` and `S(Ē)`, and direct images of
//! negative definite quadratic forms.
//!
//! On the Gibbs family, `log p_ω = −(β, ω) − log Z(β)`, so
//! `S(p(β)) = (β, ⟨E⟩(β)) + log Z(β)`. That identity, together with the
//! gradients `∇(−log Z) = ⟨E⟩` and `∇S = β` being mutually inverse, is what
//! makes the two functions Legendre transforms of each other.

use nalgebra::DMatrix;

use crate::gibbs::{gibbs_summary, mean_energy};
use crate::moment_solver::{invert_mean_energy, SolveOptions};
use crate::state_space::{CoVector, StateSet};
use crate::{Error, Result};

/// Symmetry tolerance, relative to the largest entry.
const SYMMETRY_TOL: f64 = 1e-12;

/// The negative definite form `f(x) = −xᵀ M x`, stored through the positive
/// definite matrix `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    matrix: DMatrix<f64>,
}

impl QuadraticForm {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::NotNegativeDefinite(format!("matrix is {}×{}", matrix.nrows(), matrix.ncols())));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("quadratic form"));
        }
        let scale = matrix.abs().max().max(1.0);
        let asym = (&matrix - matrix.transpose()).abs().max();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotNegativeDefinite(format!("asymmetry {asym:.3e}")));
        }
        if matrix.clone().cholesky().is_none() {
            return Err(Error::NotNegativeDefinite("Cholesky factorization failed".into()));
        }
        Ok(QuadraticForm { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `f(x) = −xᵀ M x`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(x);
        -v.dot(&(&self.matrix * &v))
    }

    /// The form `y ↦ f(T y)`, i.e. `Tᵀ M T`.
    ///
    /// This is how a general affine surjection `j: V → V''` is reduced to a
    /// coordinate projection: pick `T = [R | K]` where the columns of `K`
    /// span `ker j` and `j R = I`. In the new coordinates `j` keeps the
    /// first `dim V''` of them, and [`quadratic_direct_image`] applies.
    pub fn pullback(&self, t: &DMatrix<f64>) -> Result<Self> {
        if t.nrows() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: t.nrows() });
        }
        let m = t.transpose() * &self.matrix * t;
        QuadraticForm::new((&m + m.transpose()) * 0.5)
    }
}

/// `S(p(β)) − (β, ⟨E⟩(β)) − log Z(β)`; zero up to rounding.
pub fn legendre_residual(a: &StateSet, beta: &CoVector) -> Result<f64> {
    let s = gibbs_summary(a, beta)?;
    Ok(s.entropy - beta.pair(&s.mean_energy) - s.log_z)
}

/// `‖⟨E⟩(β(Ē)) − Ē‖`: the mean-energy map composed with its inverse.
pub fn legendre_roundtrip(a: &StateSet, target: &[f64], opts: &SolveOptions) -> Result<f64> {
    let report = invert_mean_energy(a, target, opts)?;
    let back = mean_energy(a, &report.beta)?;
    Ok(back.iter().zip(target).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
}

/// Direct image of `f` along the projection onto the first `kept`
/// coordinates: `(j_* f)(x'') = max_{x'} f(x'', x')`.
///
/// With `M = [[P, B], [Bᵀ, R]]` the maximizer is `x' = −R⁻¹ Bᵀ x''` and the
/// result has matrix `P − B R⁻¹ Bᵀ`.
pub fn quadratic_direct_image(f: &QuadraticForm, kept: usize) -> Result<QuadraticForm> {
    let n = f.dim();
    if kept == 0 || kept >= n {
        return Err(Error::BadSplit { kept, dim: n });
    }
    // Re-check: the stored matrix may have been built by hand through `Clone`.
    let m = &f.matrix;
    if m.clone().cholesky().is_none() {
        return Err(Error::NotNegativeDefinite("Cholesky factorization failed".into()));
    }
    let p = m.view((0, 0), (kept, kept));
    let b = m.view((0, kept), (kept, n - kept));
    let r = m.view((kept, kept), (n - kept, n - kept)).into_owned();
    let r_chol = r.cholesky().ok_or_else(|| Error::NotNegativeDefinite("trailing block".into()))?;
    let schur = p - b * r_chol.solve(&b.transpose());
    QuadraticForm::new((&schur + schur.transpose()) * 0.5)
}
