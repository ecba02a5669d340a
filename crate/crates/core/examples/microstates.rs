//! Counting microstates: seeded multinomial sampling of distinguishable
//! particles, and log(#equilibrium microstates)/N approaching the entropy.

use moment_gibbs::{gibbs, microstates, Distribution};

pub fn run() -> moment_gibbs::Result<()> {
    let p = Distribution::new(vec![0.5, 0.3, 0.2])?;
    let s = gibbs::entropy(&p);
    println!("generator: {}", microstates::GENERATOR);

    let c = microstates::sample_counts(&p, 100_000, 42)?;
    println!("100000 particles, seed 42: counts {:?}", c.counts);
    println!("  empirical {:.5?}", microstates::empirical_distribution(&c).probs());

    println!("S(p) = {s:.10}");
    for total in [1_000u64, 10_000, 100_000, 1_000_000] {
        let per = microstates::log_equilibrium_count(&p, total)? / total as f64;
        println!("  N = {total:>7}: log count / N = {per:.10}, gap {:.3e}", s - per);
    }

    // Σ q (log p − log q) ≤ 0, with equality only at q = p.
    for q in [[0.5, 0.3, 0.2], [0.4, 0.4, 0.2], [1.0 / 3.0; 3]] {
        let q = Distribution::new(q.to_vec())?;
        println!("  rate at q = {:.3?}: {:.6}", q.probs(), microstates::stirling_rate(&q, &p)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> moment_gibbs::Result<()> {
    run()
}
