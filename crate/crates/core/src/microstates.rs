//! Distinguishable particles distributed over the states.
//!
//! A microstate assigns each of `total` particles to a state; drawing the
//! particles i.i.d. from `p` gives the multinomial measure on occupation
//! counts. The log of the number of microstates whose frequencies equal `p`
//! grows like `total · S(p)`.
//!
//! # Generator
//!
//! Sampling uses ChaCha20 ([`rand_chacha::ChaCha20Rng`]), a counter-based
//! generator with published test vectors, seeded by
//! `SeedableRng::seed_from_u64(seed)` on stream 0. Each particle consumes one
//! `u64`, mapped to a uniform in `[0, 1)` as `(x >> 11) · 2⁻⁵³`, and is placed
//! in the first state whose cumulative probability exceeds it. This fixes
//! the counts for a given `(p, total, seed)` on every platform.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use statrs::function::gamma::ln_gamma;

use crate::gibbs::Distribution;
use crate::{Error, Result};

pub const GENERATOR: &str = "ChaCha20/seed_from_u64/stream0";

/// Occupation counts `N_ω` of a microstate with `total` particles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MicrostateCounts {
    pub counts: Vec<u64>,
    pub total: u64,
    /// Seed the counts were drawn with; 0 for hand-built counts.
    pub seed: u64,
}

impl MicrostateCounts {
    pub fn new(counts: Vec<u64>, seed: u64) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidTotal(0));
        }
        Ok(MicrostateCounts { counts, total, seed })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

fn unit_interval(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws `total` particles i.i.d. from `p` and counts them per state.
pub fn sample_counts(p: &Distribution, total: u64, seed: u64) -> Result<MicrostateCounts> {
    if total == 0 {
        return Err(Error::InvalidTotal(total));
    }
    let probs = p.probs();
    let mut cumulative: Vec<f64> = probs
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    // Rounding can leave the last cumulative just below 1; the remainder
    // belongs to the last state with positive probability.
    let last = probs.iter().rposition(|&w| w > 0.0).expect("normalized");
    cumulative[last..].iter_mut().for_each(|c| *c = f64::INFINITY);

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..total {
        let u = unit_interval(rng.next_u64());
        counts[cumulative.partition_point(|&c| c <= u)] += 1;
    }
    Ok(MicrostateCounts { counts, total, seed })
}

/// Observed frequencies `q_ω = N_ω / total`.
pub fn empirical_distribution(c: &MicrostateCounts) -> Distribution {
    let total = c.total as f64;
    Distribution::from_weights(&c.counts.iter().map(|&k| k as f64 / total).collect::<Vec<_>>())
        .expect("counts sum to total >= 1")
}

/// `log( total! ∏_ω p_ω^{n_ω} / n_ω! )`, the log-probability of the counts.
///
/// Returns `f64::NEG_INFINITY` when some state with `p_ω = 0` is occupied:
/// that event has measure zero.
pub fn log_multinomial_measure(p: &Distribution, counts: &MicrostateCounts) -> Result<f64> {
    if p.len() != counts.len() {
        return Err(Error::LengthMismatch { expected: p.len(), found: counts.len() });
    }
    let mut value = ln_gamma(counts.total as f64 + 1.0);
    for (&w, &k) in p.probs().iter().zip(&counts.counts) {
        if k == 0 {
            continue;
        }
        if w == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        value += k as f64 * w.ln() - ln_gamma(k as f64 + 1.0);
    }
    Ok(value)
}

/// `log Γ(total + 1) − Σ_ω log Γ(total · p_ω + 1)`: the log-count of
/// equilibrium microstates, with the Gamma function interpolating factorials.
pub fn log_equilibrium_count(p: &Distribution, total: u64) -> Result<f64> {
    if total == 0 {
        return Err(Error::InvalidTotal(total));
    }
    let n = total as f64;
    Ok(ln_gamma(n + 1.0) - p.probs().iter().map(|w| ln_gamma(n * w + 1.0)).sum::<f64>())
}

/// `Σ_ω q_ω (log p_ω − log q_ω)`, the per-particle Stirling exponent of the
/// measure of counts with frequencies `q`. Non-positive, zero iff `q = p`.
pub fn stirling_rate(q: &Distribution, p: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { expected: p.len(), found: q.len() });
    }
    let mut value = 0.0;
    for (&qw, &pw) in q.probs().iter().zip(p.probs()) {
        if qw == 0.0 {
            continue;
        }
        if pw == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        value += qw * (pw.ln() - qw.ln());
    }
    Ok(value)
}
