//! Pushing a concave quadratic "entropy" f(x) = −xᵀ M x forward along the
//! projection onto the first coordinates: the direct image maximizes over
//! each fiber, and for quadratics that is a Schur complement.

use moment_gibbs::{duality, QuadraticForm};
use nalgebra::DMatrix;

pub fn run() -> moment_gibbs::Result<()> {
    let f = QuadraticForm::new(DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, -1.0, 0.5, -1.0, 2.0]))?;
    let image = duality::quadratic_direct_image(&f, 1)?;
    println!("direct image onto x1: {:.6}", image.matrix()[(0, 0)]);

    // Same value by maximizing f over the fiber {x1 = 1} on a crude grid.
    let mut best = f64::NEG_INFINITY;
    for i in -200..=200 {
        for j in -200..=200 {
            let x = [1.0, i as f64 * 0.01, j as f64 * 0.01];
            best = best.max(f.evaluate(&x));
        }
    }
    println!("fiber maximum at x1 = 1 on a 0.01 grid: {:.6} (exact {:.6})", best, image.evaluate(&[1.0]));

    let pair = duality::quadratic_direct_image(&f, 2)?;
    println!("direct image onto (x1, x2):\n{:.6}", pair.matrix());
    Ok(())
}

#[allow(dead_code)]
fn main() -> moment_gibbs::Result<()> {
    run()
}
