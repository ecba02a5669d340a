//! Orientation predicate with an exact rational fallback.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num::{BigRational, Signed, Zero};

/// Relative size below which a floating determinant is not trusted.
const FILTER: f64 = 1e-9;

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

/// Sign of `det[b₁ − b₀, …, b_{d−1} − b₀, q − b₀]` for `d` base points in ℝᵈ.
pub(crate) fn orient(base: &[&[f64]], q: &[f64]) -> Ordering {
    let d = q.len();
    debug_assert_eq!(base.len(), d);
    let origin = base[0];
    let mut m = DMatrix::zeros(d, d);
    let mut hadamard = 1.0;
    for r in 0..d {
        let row = if r + 1 < d { base[r + 1] } else { q };
        let mut norm2 = 0.0;
        for c in 0..d {
            let v = row[c] - origin[c];
            m[(r, c)] = v;
            norm2 += v * v;
        }
        hadamard *= norm2.sqrt();
    }
    let det = m.determinant();
    if det.abs() > FILTER * hadamard {
        return det.partial_cmp(&0.0).unwrap();
    }
    exact_orient(base, q)
}

/// The hyperplane through `d` base points with its orientation normal cached,
/// so that [`Plane::side`] agrees with [`orient`] on the same base.
pub(crate) struct Plane {
    normal: Vec<f64>,
    /// `Π ‖bᵢ − b₀‖`, the Hadamard bound of the first `d − 1` rows.
    scale: f64,
}

impl Plane {
    pub(crate) fn new(base: &[&[f64]]) -> Self {
        let d = base[0].len();
        let origin = base[0];
        let edges = DMatrix::from_fn(d - 1, d, |r, c| base[r + 1][c] - origin[c]);
        let scale = edges.row_iter().map(|r| r.norm()).product();
        // expanding the determinant along its last row
        let sign = if (d - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        let normal = crate::linalg::generalized_cross(&edges).iter().map(|x| sign * x).collect();
        Plane { normal, scale }
    }

    pub(crate) fn side(&self, base: &[&[f64]], q: &[f64]) -> Ordering {
        let origin = base[0];
        let (mut value, mut norm2) = (0.0, 0.0);
        for ((n, x), o) in self.normal.iter().zip(q).zip(origin) {
            let v = x - o;
            value += n * v;
            norm2 += v * v;
        }
        if value.abs() > FILTER * self.scale * norm2.sqrt() {
            return value.partial_cmp(&0.0).unwrap();
        }
        exact_orient(base, q)
    }
}

fn exact_orient(base: &[&[f64]], q: &[f64]) -> Ordering {
    let d = q.len();
    let origin: Vec<BigRational> = base[0].iter().map(|&x| rational(x)).collect();
    let mut m: Vec<Vec<BigRational>> = (0..d)
        .map(|r| {
            let row = if r + 1 < d { base[r + 1] } else { q };
            row.iter().zip(&origin).map(|(&x, o)| rational(x) - o).collect()
        })
        .collect();
    // Fraction-exact Gaussian elimination; only the sign is needed.
    let mut sign = Ordering::Greater;
    for col in 0..d {
        let Some(pivot) = (col..d).find(|&r| !m[r][col].is_zero()) else {
            return Ordering::Equal;
        };
        if pivot != col {
            m.swap(pivot, col);
            sign = sign.reverse();
        }
        if m[col][col].is_negative() {
            sign = sign.reverse();
        }
        for r in col + 1..d {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &m[col][col];
            for c in col..d {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    sign
}
