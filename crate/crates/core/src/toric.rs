//! Positive part of the toric variety `X_A` and the projective moment map.
//!
//! For `β ∈ ℝⁿ*` the point `x(β) = (exp(−(β, ω)))_ω` lies on the positive
//! part of `X_A`. The moment map only sees `‖a_ω‖²`, so the image of `x(β)`
//! is the mean energy at `2β`.

use crate::gibbs::neg_pairings;
use crate::state_space::{CoVector, StateSet};
use crate::{Error, Result};

/// Squared moduli `‖a_ω‖²` of a point of the projective space `ℙᴬ`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::NonFinite("weights must be finite and non-negative"));
        }
        if weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::AllZeroWeights);
        }
        Ok(WeightVector { weights })
    }

    /// Weights from complex-free amplitudes, `‖a_ω‖² = a_ω²`.
    pub fn from_amplitudes(amplitudes: &[f64]) -> Result<Self> {
        WeightVector::new(amplitudes.iter().map(|a| a * a).collect())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

fn shifted_exp(scores: &[f64], factor: f64) -> Vec<f64> {
    let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    scores.iter().map(|s| (factor * (s - m)).exp()).collect()
}

/// `x(β)`, rescaled so its largest coordinate is 1 (the same projective point).
///
/// The coordinates are the amplitudes `x_ω`, not squared moduli: square them
/// with [`WeightVector::from_amplitudes`] before [`projective_moment`], or use
/// [`moment_of_beta`], which does the squaring in log space.
pub fn positive_point(a: &StateSet, beta: &CoVector) -> Result<WeightVector> {
    beta.check_against(a)?;
    Ok(WeightVector { weights: shifted_exp(&neg_pairings(a, beta), 1.0) })
}

/// `μ(a) = Σ_ω ω ‖a_ω‖² / Σ_ω ‖a_ω‖²`.
pub fn projective_moment(a: &StateSet, w: &WeightVector) -> Result<Vec<f64>> {
    if w.len() != a.len() {
        return Err(Error::LengthMismatch { expected: a.len(), found: w.len() });
    }
    let total: f64 = w.weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::AllZeroWeights);
    }
    let mut m = vec![0.0; a.dim()];
    for (p, wt) in a.points().zip(&w.weights) {
        if *wt == 0.0 {
            continue;
        }
        for (mi, x) in m.iter_mut().zip(p) {
            *mi += wt * x;
        }
    }
    m.iter_mut().for_each(|x| *x /= total);
    Ok(m)
}

/// The moment map on the positive part, `μ(x(β))`. Equals `⟨E⟩(2β)`.
pub fn moment_of_beta(a: &StateSet, beta: &CoVector) -> Result<Vec<f64>> {
    beta.check_against(a)?;
    // ‖x_ω(β)‖² taken in log space.
    let squared = WeightVector { weights: shifted_exp(&neg_pairings(a, beta), 2.0) };
    projective_moment(a, &squared)
}
