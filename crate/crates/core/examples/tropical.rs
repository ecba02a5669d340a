//! Polytope geometry of the energy spectrum and low-temperature limits:
//! along a ray tβ the Gibbs measure concentrates on the face of Conv(A)
//! minimizing β, and ⟨E⟩(tβ) tends to that face's barycenter.

use moment_gibbs::{gibbs, polytope, CoVector, StateSet};

pub fn run() -> moment_gibbs::Result<()> {
    let cube = StateSet::from_json(include_str!("../data/cube.json"))?;
    let q = polytope::convex_hull(&cube)?;
    println!("cube: {} vertices (centre point excluded), {} facets", q.vertices.len(), q.facets.len());
    for f in &q.facets {
        println!("  {:?} . x >= {}   on {:?}", f.normal.components(), f.offset, f.vertices);
    }
    println!("  margin of centre: {}", q.interior_margin(&[0.5, 0.5, 0.5])?);

    let square = StateSet::from_json(include_str!("../data/square.json"))?;
    let direction = CoVector::new(vec![1.0, 0.0]);
    let face = polytope::min_face(&square, &direction)?;
    let limit = polytope::tropical_limit(&square, &direction)?;
    println!("square, direction (1, 0): face {:?}, limit {limit:?}", face.indices);
    for t in [1.0, 5.0, 10.0, 20.0, 50.0] {
        let mean = gibbs::mean_energy(&square, &direction.scaled(t))?;
        let gap = mean.iter().zip(&limit).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("  t = {t:>4}: <E> = [{:.3e}, {:.6}], distance {gap:.3e}", mean[0], mean[1]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> moment_gibbs::Result<()> {
    run()
}
