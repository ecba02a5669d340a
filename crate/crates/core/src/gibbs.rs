//! Forward thermodynamics: partition function, Gibbs distribution and its moments.
//!
//! Everything is evaluated through the log-sum-exp shift
//! `m = max_ω −(β, ω)`, so weights never overflow for any finite `β`.

use nalgebra::DMatrix;

use crate::state_space::{CoVector, Observable, StateSet};
use crate::{Error, Result};

/// Tolerance on `|Σ p − 1|` for a valid distribution.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A probability vector on the states of a state set (matched by length).
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no states".into()));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("probs[{i}] = {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!("sum is {total}")));
        }
        Ok(Distribution { probs })
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Distribution::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Distribution::from_weights(&vec![1.0; n])
    }

    /// Unit mass on state `index` of `n`.
    pub fn point_mass(n: usize, index: usize) -> Result<Self> {
        let mut w = vec![0.0; n];
        *w.get_mut(index).ok_or(Error::LengthMismatch { expected: n, found: index + 1 })? = 1.0;
        Distribution::new(w)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Mean of the states themselves, `Σ p_ω ω`.
    pub fn mean_point(&self, a: &StateSet) -> Result<Vec<f64>> {
        check_len(a.len(), self.len())?;
        let mut mean = vec![0.0; a.dim()];
        for (p, w) in a.points().zip(&self.probs) {
            for (m, x) in mean.iter_mut().zip(p) {
                *m += w * x;
            }
        }
        Ok(mean)
    }
}

/// Everything the forward map produces at one `β`.
#[derive(Debug, Clone)]
pub struct GibbsSummary {
    pub log_z: f64,
    pub distribution: Distribution,
    pub mean_energy: Vec<f64>,
    pub covariance: DMatrix<f64>,
    /// Entropy in nats.
    pub entropy: f64,
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

/// `log Σ_ω exp(s_ω)` with the max shift.
pub(crate) fn log_sum_exp(scores: &[f64]) -> f64 {
    let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + scores.iter().map(|s| (s - m).exp()).sum::<f64>().ln()
}

/// `−(β, ω)` for every state.
pub(crate) fn neg_pairings(a: &StateSet, beta: &CoVector) -> Vec<f64> {
    a.points().map(|p| -beta.pair(p)).collect()
}

fn log_z_and_probs(a: &StateSet, beta: &CoVector) -> Result<(f64, Vec<f64>)> {
    beta.check_against(a)?;
    let scores = neg_pairings(a, beta);
    let log_z = log_sum_exp(&scores);
    let mut probs: Vec<f64> = scores.iter().map(|s| (s - log_z).exp()).collect();
    // Renormalize the last few ulps away.
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok((log_z, probs))
}

/// `log Z(β) = log Σ_ω exp(−(β, ω))`.
pub fn log_partition(a: &StateSet, beta: &CoVector) -> Result<f64> {
    beta.check_against(a)?;
    Ok(log_sum_exp(&neg_pairings(a, beta)))
}

/// `p_ω(β) = exp(−(β, ω)) / Z(β)`.
pub fn gibbs_distribution(a: &StateSet, beta: &CoVector) -> Result<Distribution> {
    let (_, probs) = log_z_and_probs(a, beta)?;
    Ok(Distribution { probs })
}

/// `⟨O⟩_p = Σ_ω p_ω O(ω)`.
pub fn mean_observable(p: &Distribution, o: &Observable) -> Result<f64> {
    check_len(p.len(), o.len())?;
    Ok(p.probs.iter().zip(o.values()).map(|(w, v)| w * v).sum())
}

/// The mean-energy map `⟨E⟩(β) = Σ_ω p_ω(β) ω = −∇ log Z(β)`.
pub fn mean_energy(a: &StateSet, beta: &CoVector) -> Result<Vec<f64>> {
    gibbs_distribution(a, beta)?.mean_point(a)
}

/// `Σ_ω p_ω (ω − μ)(ω − μ)ᵀ`; the Hessian of `log Z`.
pub(crate) fn covariance_of(a: &StateSet, probs: &[f64], mean: &[f64]) -> DMatrix<f64> {
    let n = a.dim();
    let mut cov = DMatrix::zeros(n, n);
    let mut centered = vec![0.0; n];
    for (p, w) in a.points().zip(probs) {
        for ((c, x), m) in centered.iter_mut().zip(p).zip(mean) {
            *c = x - m;
        }
        for i in 0..n {
            let wi = w * centered[i];
            for j in 0..=i {
                cov[(i, j)] += wi * centered[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            cov[(j, i)] = cov[(i, j)];
        }
    }
    cov
}

/// Covariance of the energy vector under the Gibbs distribution.
pub fn energy_covariance(a: &StateSet, beta: &CoVector) -> Result<DMatrix<f64>> {
    let p = gibbs_distribution(a, beta)?;
    let mean = p.mean_point(a)?;
    Ok(covariance_of(a, &p.probs, &mean))
}

/// `S(p) = −Σ p_ω log p_ω` in nats, with `0 · log 0 = 0`.
pub fn entropy(p: &Distribution) -> f64 {
    -p.probs.iter().filter(|&&w| w > 0.0).map(|w| w * w.ln()).sum::<f64>()
}

pub fn gibbs_summary(a: &StateSet, beta: &CoVector) -> Result<GibbsSummary> {
    let (log_z, probs) = log_z_and_probs(a, beta)?;
    let distribution = Distribution { probs };
    let mean_energy = distribution.mean_point(a)?;
    let covariance = covariance_of(a, &distribution.probs, &mean_energy);
    let entropy = entropy(&distribution);
    Ok(GibbsSummary { log_z, distribution, mean_energy, covariance, entropy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn line(xs: &[f64]) -> StateSet {
        StateSet::new(1, xs.iter().map(|&x| vec![x]).collect(), None).unwrap()
    }

    fn square() -> StateSet {
        StateSet::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]], None).unwrap()
    }

    fn b(x: &[f64]) -> CoVector {
        CoVector::new(x.to_vec())
    }

    // Direct summation without the max shift; only safe at small |β|.
    fn naive_log_z(a: &StateSet, beta: &CoVector) -> f64 {
        a.points().map(|p| (-beta.pair(p)).exp()).sum::<f64>().ln()
    }

    #[test]
    fn log_partition_examples() {
        let ln3 = 3f64.ln();
        assert_abs_diff_eq!(log_partition(&line(&[0.0, 1.0]), &b(&[0.0])).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(log_partition(&line(&[0.0, 1.0]), &b(&[ln3])).unwrap(), (4.0f64 / 3.0).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            log_partition(&line(&[0.0, 1.0, 2.0]), &b(&[2f64.ln()])).unwrap(),
            (7.0f64 / 4.0).ln(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!((7.0f64 / 4.0).ln(), 0.5596158, epsilon = 1e-7);
    }

    #[test]
    fn gibbs_distribution_examples() {
        let p = gibbs_distribution(&line(&[0.0, 1.0]), &b(&[0.0])).unwrap();
        assert_eq!(p.probs(), &[0.5, 0.5]);
        let p = gibbs_distribution(&line(&[0.0, 1.0]), &b(&[3f64.ln()])).unwrap();
        assert_abs_diff_eq!(p.probs()[0], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(p.probs()[1], 0.25, epsilon = 1e-15);
        let p = gibbs_distribution(&line(&[0.0, 1.0, 2.0]), &b(&[2f64.ln()])).unwrap();
        for (got, want) in p.probs().iter().zip([4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn mean_observable_examples() {
        let a = line(&[0.0, 1.0]);
        let u = Distribution::uniform(2).unwrap();
        assert_eq!(mean_observable(&u, &Observable::energy_component(&a, 0).unwrap()).unwrap(), 0.5);
        let p = Distribution::new(vec![0.2, 0.8]).unwrap();
        assert_abs_diff_eq!(mean_observable(&p, &Observable::new(vec![3.5, 3.5]).unwrap()).unwrap(), 3.5, epsilon = 1e-15);
        let a3 = line(&[0.0, 1.0, 2.0]);
        let p = gibbs_distribution(&a3, &b(&[2f64.ln()])).unwrap();
        let sq = Observable::from_fn(&a3, |w| w[0] * w[0]).unwrap();
        assert_abs_diff_eq!(mean_observable(&p, &sq).unwrap(), 6.0 / 7.0, epsilon = 1e-15);
        assert!(matches!(
            mean_observable(&p, &Observable::new(vec![1.0]).unwrap()),
            Err(Error::LengthMismatch { expected: 3, found: 1 })
        ));
    }

    #[test]
    fn mean_energy_examples() {
        assert_abs_diff_eq!(mean_energy(&line(&[0.0, 1.0]), &b(&[3f64.ln()])).unwrap()[0], 0.25, epsilon = 1e-15);
        assert_eq!(mean_energy(&square(), &b(&[0.0, 0.0])).unwrap(), vec![0.5, 0.5]);
        assert_abs_diff_eq!(mean_energy(&line(&[0.0, 1.0, 2.0]), &b(&[2f64.ln()])).unwrap()[0], 4.0 / 7.0, epsilon = 1e-15);
        assert!(matches!(mean_energy(&square(), &b(&[0.0])), Err(Error::DimensionMismatch { expected: 2, found: 1 })));
    }

    #[test]
    fn covariance_examples() {
        assert_abs_diff_eq!(energy_covariance(&line(&[0.0, 1.0]), &b(&[0.0])).unwrap()[(0, 0)], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(
            energy_covariance(&line(&[0.0, 1.0]), &b(&[3f64.ln()])).unwrap()[(0, 0)],
            3.0 / 16.0,
            epsilon = 1e-15
        );
        let c = energy_covariance(&square(), &b(&[0.0, 0.0])).unwrap();
        assert_eq!(c, DMatrix::from_row_slice(2, 2, &[0.25, 0.0, 0.0, 0.25]));
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(entropy(&Distribution::uniform(4).unwrap()), 4f64.ln(), epsilon = 1e-15);
        assert_eq!(entropy(&Distribution::point_mass(3, 1).unwrap()), 0.0);
        let h = entropy(&Distribution::new(vec![0.75, 0.25]).unwrap());
        assert_abs_diff_eq!(h, 4f64.ln() - 0.75 * 3f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(h, 0.5623351, epsilon = 1e-7);
    }

    #[test]
    fn summary_examples() {
        let s = gibbs_summary(&line(&[0.0, 1.0]), &b(&[0.0])).unwrap();
        assert_abs_diff_eq!(s.log_z, 2f64.ln(), epsilon = 1e-15);
        assert_eq!(s.mean_energy, vec![0.5]);
        assert_eq!(s.covariance[(0, 0)], 0.25);
        assert_abs_diff_eq!(s.entropy, 2f64.ln(), epsilon = 1e-15);
        assert_eq!(s.entropy, entropy(&s.distribution));

        let s = gibbs_summary(&line(&[0.0, 1.0]), &b(&[3f64.ln()])).unwrap();
        assert_abs_diff_eq!(s.log_z, (4.0f64 / 3.0).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.covariance[(0, 0)], 3.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.entropy, 0.5623351, epsilon = 1e-7);

        for beta in [-3.0, 0.0, 0.7, 40.0] {
            let s = gibbs_summary(&line(&[5.0]), &b(&[beta])).unwrap();
            assert_eq!(s.log_z, -5.0 * beta);
            assert_eq!(s.distribution.probs(), &[1.0]);
            assert_eq!(s.mean_energy, vec![5.0]);
            assert_eq!(s.covariance[(0, 0)], 0.0);
            assert_eq!(s.entropy, 0.0);
        }
    }

    #[test]
    fn zero_beta_is_uniform_with_max_entropy() {
        let a = line(&[0.0, 1.0, 2.0, 5.0, 7.5]);
        let s = gibbs_summary(&a, &b(&[0.0])).unwrap();
        assert!(s.distribution.probs().iter().all(|&p| p == 0.2));
        assert_abs_diff_eq!(s.entropy, 5f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn large_beta_stays_finite() {
        let a = StateSet::new(2, vec![vec![0.0, 10.0], vec![10.0, -10.0], vec![-7.0, 3.0]], None).unwrap();
        for beta in [[1e4, 0.0], [-1e4, 3e3], [7e3, -7e3]] {
            let s = gibbs_summary(&a, &b(&beta)).unwrap();
            assert!(s.log_z.is_finite() && s.entropy.is_finite());
            assert!(s.mean_energy.iter().chain(s.covariance.iter()).all(|x| x.is_finite()));
        }
    }

    #[test]
    fn scalar_limits_approach_extremes() {
        let a = line(&[0.0, 1.0, 2.0, 5.0]);
        // gap between the two smallest energies is 1
        let low = mean_energy(&a, &b(&[50.0])).unwrap()[0];
        assert!(low > 0.0 && low < 1e-20);
        let high = mean_energy(&a, &b(&[-50.0 / 3.0])).unwrap()[0];
        assert!(high <= 5.0 && 5.0 - high < 1e-6);
        let high = mean_energy(&a, &b(&[-5.0])).unwrap()[0];
        assert!(high < 5.0 && 5.0 - high < 1e-5);
    }

    fn instance() -> impl Strategy<Value = (StateSet, CoVector)> {
        (1usize..4).prop_flat_map(|n| {
            (
                prop::collection::vec(prop::collection::vec(-3.0f64..3.0, n), 2..10),
                prop::collection::vec(-2.0f64..2.0, n),
            )
                .prop_map(move |(pts, beta)| (StateSet::new(n, pts, None).unwrap(), CoVector::new(beta)))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_naive_summation((a, beta) in instance()) {
            let lz = log_partition(&a, &beta).unwrap();
            prop_assert!((lz - naive_log_z(&a, &beta)).abs() < 1e-12 * (1.0 + lz.abs()));
        }

        #[test]
        fn translation_covariance((a, beta) in instance(), shift in prop::collection::vec(-4.0f64..4.0, 3)) {
            let c = &shift[..a.dim()];
            let moved = a.translated(c).unwrap();
            let s0 = gibbs_summary(&a, &beta).unwrap();
            let s1 = gibbs_summary(&moved, &beta).unwrap();
            prop_assert!((s1.log_z - (s0.log_z - beta.pair(c))).abs() < 1e-10);
            for i in 0..a.dim() {
                prop_assert!((s1.mean_energy[i] - s0.mean_energy[i] - c[i]).abs() < 1e-10);
            }
            prop_assert!((&s1.covariance - &s0.covariance).abs().max() < 1e-10);
            prop_assert!((s1.entropy - s0.entropy).abs() < 1e-10);
        }

        #[test]
        fn gradient_of_log_z_is_minus_mean((a, beta) in instance()) {
            let mean = mean_energy(&a, &beta).unwrap();
            for i in 0..a.dim() {
                let h = 1e-5 * (1.0 + beta[i].abs());
                let mut plus = beta.components().to_vec();
                let mut minus = plus.clone();
                plus[i] += h;
                minus[i] -= h;
                let fd = (log_partition(&a, &CoVector::new(plus)).unwrap()
                    - log_partition(&a, &CoVector::new(minus)).unwrap()) / (2.0 * h);
                prop_assert!((fd + mean[i]).abs() <= 1e-6 * mean[i].abs().max(1.0));
            }
        }

        #[test]
        fn jacobian_of_mean_is_minus_covariance((a, beta) in instance()) {
            let cov = energy_covariance(&a, &beta).unwrap();
            let scale = cov.abs().max().max(1e-3);
            for j in 0..a.dim() {
                let h = 1e-5;
                let mut plus = beta.components().to_vec();
                let mut minus = plus.clone();
                plus[j] += h;
                minus[j] -= h;
                let mp = mean_energy(&a, &CoVector::new(plus)).unwrap();
                let mm = mean_energy(&a, &CoVector::new(minus)).unwrap();
                for i in 0..a.dim() {
                    let fd = (mp[i] - mm[i]) / (2.0 * h);
                    prop_assert!((fd + cov[(i, j)]).abs() <= 1e-5 * scale);
                }
            }
        }

        #[test]
        fn covariance_is_psd_and_entropy_bounded((a, beta) in instance()) {
            let s = gibbs_summary(&a, &beta).unwrap();
            let eig = s.covariance.clone().symmetric_eigenvalues();
            prop_assert!(eig.iter().all(|&l| l > -1e-12));
            prop_assert!(s.entropy >= 0.0 && s.entropy <= (a.len() as f64).ln() + 1e-12);
            let total: f64 = s.distribution.probs().iter().sum();
            prop_assert!((total - 1.0).abs() <= NORMALIZATION_TOL);
        }

        #[test]
        fn scalar_mean_is_strictly_decreasing(
            energies in prop::collection::btree_set(-20i32..20, 2..8),
            beta in -0.5f64..0.5,
        ) {
            let xs: Vec<f64> = energies.into_iter().map(f64::from).collect();
            let a = line(&xs);
            let (lo, hi) = (xs[0], *xs.last().unwrap());
            let m0 = mean_energy(&a, &b(&[beta])).unwrap()[0];
            let m1 = mean_energy(&a, &b(&[beta + 0.01])).unwrap()[0];
            let var = energy_covariance(&a, &b(&[beta])).unwrap()[(0, 0)];
            prop_assert!(m1 < m0);
            prop_assert!(var > 0.0);
            prop_assert!(lo < m0 && m0 < hi);
        }
    }
}
