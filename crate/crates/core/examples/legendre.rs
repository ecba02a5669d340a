//! Legendre duality between −log Z(β) and S(Ē): the residual
//! S − (β, Ē) − log Z vanishes, and ∇S(Ē) = β.

use moment_gibbs::{duality, gibbs, moment_solver, CoVector, SolveOptions, StateSet};

pub fn run() -> moment_gibbs::Result<()> {
    let square = StateSet::from_json(include_str!("../data/square.json"))?;
    let opts = SolveOptions::default();

    let mut worst = 0.0f64;
    for i in -4..=4 {
        for j in -4..=4 {
            let beta = CoVector::new(vec![i as f64, j as f64 * 0.75]);
            worst = worst.max(duality::legendre_residual(&square, &beta)?.abs());
        }
    }
    println!("max |S - (beta, E) - log Z| over an 81-point grid: {worst:e}");

    let target = [0.3, 0.6];
    let beta = moment_solver::solve_gradient(&square, &target)?;
    let h = 1e-6;
    let fd: Vec<f64> = (0..2)
        .map(|k| {
            let (mut up, mut down) = (target, target);
            up[k] += h;
            down[k] -= h;
            let s = |t: &[f64]| moment_solver::entropy_of_mean(&square, t, &opts);
            Ok((s(&up)? - s(&down)?) / (2.0 * h))
        })
        .collect::<moment_gibbs::Result<_>>()?;
    println!("grad S at {target:?}: finite difference {fd:.8?}, solved beta {:.8?}", beta.components());

    let err = duality::legendre_roundtrip(&square, &target, &opts)?;
    println!("E -> beta -> E round trip error: {err:e}");

    // −log Z is concave: midpoint value above the chord.
    let (b1, b2) = (CoVector::new(vec![2.0, -1.0]), CoVector::new(vec![-3.0, 0.5]));
    let mid = CoVector::new(vec![-0.5, -0.25]);
    let f = |b: &CoVector| gibbs::log_partition(&square, b).map(|z| -z);
    println!("-log Z: f(mid) - chord = {:.6} (>= 0)", f(&mid)? - 0.5 * (f(&b1)? + f(&b2)?));
    Ok(())
}

#[allow(dead_code)]
fn main() -> moment_gibbs::Result<()> {
    run()
}
