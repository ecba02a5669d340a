//! Inversion of the mean-energy map.
//!
//! For a target `Ē` in the relative interior of `Q`, the unique `β` with
//! `⟨E⟩(β) = Ē` minimizes the convex dual
//!
//! ```text
//! F(β) = log Z(β) + (β, Ē),   ∇F = Ē − ⟨E⟩(β),   ∇²F = Cov(β)
//! ```
//!
//! and the Gibbs distribution at that `β` is the entropy maximizer over all
//! distributions with mean `Ē`. `F` is minimized by damped Newton with an
//! Armijo backtracking line search, starting at `β = 0`. When `A` spans a
//! proper affine subspace the problem is solved in an orthonormal basis of
//! that subspace and `β` is lifted back with no component along its
//! annihilator (where `β` is not unique).

use nalgebra::{DMatrix, DVector};

use crate::gibbs::gibbs_summary;
use crate::linalg::{inf_norm, solve_psd};
use crate::polytope::{convex_hull, GEOMETRY_TOL};
use crate::state_space::{CoVector, StateSet};
use crate::{Error, Result};

/// Armijo sufficient-decrease constant.
const ARMIJO: f64 = 1e-4;
const POLISH_STEPS: usize = 3;
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Stop when `‖Ē − ⟨E⟩(β)‖∞ / diam(A)` falls to this value.
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Step shrink factor for backtracking, in `(0, 1)`.
    pub line_search_shrink: f64,
    /// Relative diagonal shift used when the Hessian fails Cholesky.
    pub regularization_floor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { grad_tol: 1e-10, max_iter: 100, line_search_shrink: 0.5, regularization_floor: 1e-12 }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidOptions(msg.to_string()));
        if !(self.grad_tol > 0.0 && self.grad_tol < 1.0) {
            return bad("grad_tol must lie in (0, 1)");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive");
        }
        if !(self.line_search_shrink > 0.0 && self.line_search_shrink < 1.0) {
            return bad("line_search_shrink must lie in (0, 1)");
        }
        if !(self.regularization_floor > 0.0 && self.regularization_floor.is_finite()) {
            return bad("regularization_floor must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub beta: CoVector,
    /// Newton steps taken.
    pub iterations: usize,
    /// Scaled gradient norm at the returned `beta`.
    pub grad_norm: f64,
    /// `S(Ē)`, the entropy of the Gibbs distribution at `beta`.
    pub entropy: f64,
    pub converged: bool,
    /// True when the solve ran in the coordinates of a proper affine span;
    /// `beta` is then unique only up to the annihilator of that span.
    pub reduced: bool,
    /// Newton decrement `√(gᵀ H⁻¹ g)` at each step.
    pub newton_decrements: Vec<f64>,
}

/// Checks that `target` lies in the relative interior of `Conv(A)` with room
/// to spare, returning the interior margin.
pub fn check_target(a: &StateSet, target: &[f64]) -> Result<f64> {
    a.check_dim(target.len())?;
    if target.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("target"));
    }
    let q = convex_hull(a)?;
    let band = GEOMETRY_TOL * q.diameter;
    let margin = match q.interior_margin(target) {
        Ok(m) => m,
        Err(Error::OffAffineSpan { distance }) => return Err(Error::TargetOutsideHull { margin: -distance }),
        Err(e) => return Err(e),
    };
    if margin < -band {
        return Err(Error::TargetOutsideHull { margin });
    }
    if margin < band {
        return Err(Error::TargetOnBoundary { margin });
    }
    Ok(margin)
}

/// Finds `β` with `⟨E⟩(β) = target`.
pub fn invert_mean_energy(a: &StateSet, target: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    check_target(a, target)?;

    let n = a.dim();
    let d = a.affine_dim();
    if d == 0 {
        return Ok(SolveReport {
            beta: CoVector::zeros(n),
            iterations: 0,
            grad_norm: 0.0,
            entropy: 0.0,
            converged: true,
            reduced: n > 0,
            newton_decrements: Vec::new(),
        });
    }
    let reduced = d < n;
    let span = a.affine_span();
    let basis = if reduced { span.basis.clone() } else { DMatrix::identity(n, n) };
    let project = |x: &[f64]| -> Vec<f64> {
        basis.tr_mul(&(DVector::from_column_slice(x) - &span.origin)).iter().copied().collect()
    };
    let local = StateSet::new(d, a.points().map(&project).collect(), None)?;
    let goal = project(target);
    let scale = if a.diameter() > 0.0 { a.diameter() } else { 1.0 };

    let objective = |beta: &CoVector| -> Result<(f64, crate::GibbsSummary)> {
        let s = gibbs_summary(&local, beta)?;
        Ok((s.log_z + beta.pair(&goal), s))
    };

    let mut beta = CoVector::zeros(d);
    let (mut f, mut state) = objective(&beta)?;
    let mut iterations = 0;
    let mut decrements = Vec::new();
    let mut grad_norm;
    let mut converged = false;
    loop {
        let grad: Vec<f64> = goal.iter().zip(&state.mean_energy).map(|(t, m)| t - m).collect();
        grad_norm = inf_norm(&grad) / scale;
        if grad_norm <= opts.grad_tol {
            converged = true;
            polish(&objective, &goal, scale, opts.regularization_floor, &mut beta, &mut state, &mut grad_norm)?;
            break;
        }
        if iterations == opts.max_iter {
            break;
        }
        let g = DVector::from_vec(grad);
        let (step, _) = solve_psd(&state.covariance, &(-&g), opts.regularization_floor);
        let slope = g.dot(&step);
        decrements.push((-slope).max(0.0).sqrt());

        // Rounding in F is a few ulps of its largest term.
        let slack = 8.0 * f64::EPSILON * (1.0 + state.log_z.abs() + beta.pair(&goal).abs());
        let mut t = 1.0;
        let mut next = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial = CoVector::new(beta.components().iter().zip(step.iter()).map(|(b, s)| b + t * s).collect());
            let (ft, st) = objective(&trial)?;
            if ft <= f + ARMIJO * t * slope + slack {
                next = Some((trial, ft, st));
                break;
            }
            t *= opts.line_search_shrink;
        }
        iterations += 1;
        match next {
            Some((b, ft, st)) => {
                beta = b;
                f = ft;
                state = st;
            }
            // No decrease is representable along this direction.
            None => break,
        }
    }

    let report = SolveReport {
        beta: if reduced {
            span.lift_covector(&DVector::from_column_slice(beta.components()))
        } else {
            beta
        },
        iterations,
        grad_norm,
        entropy: state.entropy,
        converged,
        reduced,
        newton_decrements: decrements,
    };
    if converged {
        Ok(report)
    } else {
        Err(Error::NoConvergence(Box::new(report)))
    }
}

/// Full Newton steps past the stopping test, kept while the gradient keeps
/// shrinking. When the covariance is small the gradient test alone leaves
/// `β` loose by roughly `grad_tol / λ_min`.
fn polish<F>(
    objective: &F,
    goal: &[f64],
    scale: f64,
    floor: f64,
    beta: &mut CoVector,
    state: &mut crate::GibbsSummary,
    grad_norm: &mut f64,
) -> Result<()>
where
    F: Fn(&CoVector) -> Result<(f64, crate::GibbsSummary)>,
{
    for _ in 0..POLISH_STEPS {
        let g: DVector<f64> = DVector::from_iterator(goal.len(), goal.iter().zip(&state.mean_energy).map(|(t, m)| t - m));
        let (step, _) = solve_psd(&state.covariance, &(-&g), floor);
        let trial = CoVector::new(beta.components().iter().zip(step.iter()).map(|(b, s)| b + s).collect());
        let (_, st) = objective(&trial)?;
        let norm = goal.iter().zip(&st.mean_energy).map(|(t, m)| (t - m).abs()).fold(0.0, f64::max) / scale;
        if norm >= *grad_norm {
            break;
        }
        *beta = trial;
        *state = st;
        *grad_norm = norm;
    }
    Ok(())
}

/// `S(Ē)`: the maximal entropy among distributions with mean `target`.
pub fn entropy_of_mean(a: &StateSet, target: &[f64], opts: &SolveOptions) -> Result<f64> {
    Ok(invert_mean_energy(a, target, opts)?.entropy)
}

/// `∇S(Ē)`, which equals the solved `β(Ē)`.
pub fn solve_gradient(a: &StateSet, target: &[f64]) -> Result<CoVector> {
    Ok(invert_mean_energy(a, target, &SolveOptions::default())?.beta)
}
