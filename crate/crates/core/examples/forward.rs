//! Forward thermodynamics: from β to log Z, the Gibbs distribution, mean
//! energy, covariance and entropy.
//!
//! ```text
//! cargo run --example forward
//! ```

use moment_gibbs::{gibbs, CoVector, StateSet};

pub fn run() -> moment_gibbs::Result<()> {
    let square = StateSet::from_json(include_str!("../data/square.json"))?;

    for beta in [[0.0, 0.0], [1.0, -2.0], [8.0, 8.0]] {
        let s = gibbs::gibbs_summary(&square, &CoVector::new(beta.to_vec()))?;
        println!("beta = {beta:?}");
        println!("  log Z    = {:.12}", s.log_z);
        println!("  p        = {:.6?}", s.distribution.probs());
        println!("  <E>      = {:.6?}", s.mean_energy);
        println!("  S        = {:.12}", s.entropy);
        println!("  Cov diag = [{:.6}, {:.6}]", s.covariance[(0, 0)], s.covariance[(1, 1)]);
    }

    // Far outside the range where exp(−(β, ω)) is representable.
    let huge = StateSet::new(1, vec![vec![0.0], vec![1.0]], None)?;
    let s = gibbs::gibbs_summary(&huge, &CoVector::new(vec![-1e6]))?;
    println!("beta = -1e6 on {{0, 1}}: log Z = {:e}, p = {:?}", s.log_z, s.distribution.probs());
    Ok(())
}

#[allow(dead_code)]
fn main() -> moment_gibbs::Result<()> {
    run()
}
