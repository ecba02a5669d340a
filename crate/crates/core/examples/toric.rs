//! The toric picture: β gives the positive point (e^{−(β, ω)})_ω, and the
//! projective moment map sends it to ⟨E⟩(2β).

use moment_gibbs::{gibbs, toric, CoVector, StateSet, WeightVector};

pub fn run() -> moment_gibbs::Result<()> {
    let square = StateSet::from_json(include_str!("../data/square.json"))?;
    let beta = CoVector::new(vec![0.4, -1.1]);

    let x = toric::positive_point(&square, &beta)?;
    let moment = toric::projective_moment(&square, &WeightVector::from_amplitudes(x.weights())?)?;
    let doubled = gibbs::mean_energy(&square, &beta.scaled(2.0))?;
    println!("positive point (max-normalized amplitudes): {:.6?}", x.weights());
    println!("projective moment: {moment:?}");
    println!("<E>(2 beta):       {doubled:?}");
    println!("moment_of_beta:    {:?}", toric::moment_of_beta(&square, &beta)?);

    // Amplitudes enter only through their squared magnitudes.
    let w = WeightVector::from_amplitudes(&[0.0, 3.0, 0.0, -4.0])?;
    println!("amplitudes (0, 3, 0, -4) map to {:?}", toric::projective_moment(&square, &w)?);

    let vertex = WeightVector::new(vec![0.0, 0.0, 1.0, 0.0])?;
    println!("indicator of (0, 1) maps to {:?}", toric::projective_moment(&square, &vertex)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> moment_gibbs::Result<()> {
    run()
}
