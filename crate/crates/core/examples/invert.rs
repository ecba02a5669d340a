//! Inverting the mean-energy map: given Ē in the interior of Conv(A), find
//! the β whose Gibbs distribution has that mean, and the entropy S(Ē).

use moment_gibbs::{gibbs, moment_solver, Error, SolveOptions, StateSet};

pub fn run() -> moment_gibbs::Result<()> {
    let opts = SolveOptions::default();

    let ladder = StateSet::from_json(include_str!("../data/three_level.json"))?;
    let r = moment_solver::invert_mean_energy(&ladder, &[4.0 / 7.0], &opts)?;
    println!("{{0,1,2}}, E = 4/7: beta = {:.15} (log 2 = {:.15}), {} iterations", r.beta[0], 2f64.ln(), r.iterations);

    let square = StateSet::from_json(include_str!("../data/square.json"))?;
    let target = [0.2, 0.7];
    let r = moment_solver::invert_mean_energy(&square, &target, &opts)?;
    let back = gibbs::mean_energy(&square, &r.beta)?;
    println!("square, E = {target:?}: beta = {:?}, S = {:.12}", r.beta.components(), r.entropy);
    println!("  forward again: {back:?}");
    println!("  Newton decrements: {}", r.newton_decrements.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>().join(", "));

    // A collinear state set spans a line; the solver works in the span and
    // returns the β with no component along the annihilator.
    let line = StateSet::from_json(include_str!("../data/collinear.json"))?;
    let r = moment_solver::invert_mean_energy(&line, &[1.0, 1.0], &opts)?;
    println!("collinear, E = (1, 1): beta = {:?}, reduced = {}", r.beta.components(), r.reduced);

    for bad in [[1.5, 0.5], [1.0, 0.5]] {
        match moment_solver::invert_mean_energy(&square, &bad, &opts) {
            Err(e @ (Error::TargetOutsideHull { .. } | Error::TargetOnBoundary { .. })) => {
                println!("square, E = {bad:?}: {e}")
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> moment_gibbs::Result<()> {
    run()
}
