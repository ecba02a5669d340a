//! Convex hull of a full-dimensional point set in ℝᵈ, `1 ≤ d ≤ 6`.
//!
//! `d = 1` is an interval, `d = 2` uses Andrew's monotone chain, and `d ≥ 3`
//! uses incremental beneath-beyond insertion over simplicial facets, with
//! coplanar simplices merged into true facets at the end.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};

use super::exact::{orient, Plane};
use crate::linalg::{generalized_cross, right_singular};

/// A facet in reduced coordinates: `(normal, y) ≥ offset` on the hull.
#[derive(Debug, Clone)]
pub(crate) struct RawFacet {
    pub normal: Vec<f64>,
    pub offset: f64,
    /// Every input point on the facet's hyperplane, sorted.
    pub support: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct RawHull {
    pub vertices: Vec<usize>,
    pub facets: Vec<RawFacet>,
}

pub(crate) fn hull(points: &[Vec<f64>]) -> RawHull {
    match points[0].len() {
        1 => interval(points),
        2 => monotone_chain(points),
        _ => incremental(points),
    }
}

fn interval(points: &[Vec<f64>]) -> RawHull {
    let by_value = |a: &usize, b: &usize| points[*a][0].total_cmp(&points[*b][0]);
    let lo = (0..points.len()).min_by(by_value).unwrap();
    let hi = (0..points.len()).max_by(by_value).unwrap();
    let mut vertices = vec![lo, hi];
    vertices.sort_unstable();
    RawHull {
        vertices,
        facets: vec![
            RawFacet { normal: vec![1.0], offset: points[lo][0], support: vec![lo] },
            RawFacet { normal: vec![-1.0], offset: -points[hi][0], support: vec![hi] },
        ],
    }
}

fn turn(points: &[Vec<f64>], a: usize, b: usize, c: usize) -> Ordering {
    orient(&[&points[a], &points[b]], &points[c])
}

fn monotone_chain(points: &[Vec<f64>]) -> RawHull {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]).then(points[a][1].total_cmp(&points[b][1])));
    let mut chain: Vec<usize> = Vec::with_capacity(2 * order.len());
    for pass in [order.clone(), order.iter().rev().copied().collect()] {
        let floor = chain.len();
        for &i in &pass {
            while chain.len() >= floor + 2
                && turn(points, chain[chain.len() - 2], chain[chain.len() - 1], i) != Ordering::Greater
            {
                chain.pop();
            }
            chain.push(i);
        }
        chain.pop();
    }
    // `chain` is the counter-clockwise cycle of strict vertices.
    let k = chain.len();
    let facets = (0..k)
        .map(|e| {
            let (a, b) = (chain[e], chain[(e + 1) % k]);
            let (dx, dy) = (points[b][0] - points[a][0], points[b][1] - points[a][1]);
            let normal = vec![-dy, dx];
            let offset = normal[0] * points[a][0] + normal[1] * points[a][1];
            let support = (0..points.len())
                .filter(|&c| c == a || c == b || turn(points, a, b, c) == Ordering::Equal)
                .collect();
            RawFacet { normal, offset, support }
        })
        .collect();
    let mut vertices = chain;
    vertices.sort_unstable();
    RawHull { vertices, facets }
}

struct Simplex {
    verts: Vec<usize>,
    /// Orientation of the interior reference point relative to `verts`.
    inner: Ordering,
    plane: Plane,
}

fn incremental(points: &[Vec<f64>]) -> RawHull {
    let d = points[0].len();
    let seed = initial_simplex(points);
    let center: Vec<f64> =
        (0..d).map(|c| seed.iter().map(|&i| points[i][c]).sum::<f64>() / (d + 1) as f64).collect();

    let base = |verts: &[usize]| -> Vec<&[f64]> { verts.iter().map(|&i| points[i].as_slice()).collect() };
    let side = |f: &Simplex, q: &[f64]| f.plane.side(&base(&f.verts), q);
    let make = |verts: Vec<usize>| {
        let plane = Plane::new(&base(&verts));
        let inner = plane.side(&base(&verts), &center);
        Simplex { verts, inner, plane }
    };

    let mut facets: Vec<Simplex> = (0..=d)
        .map(|skip| {
            let mut v: Vec<usize> = seed.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &i)| i).collect();
            v.sort_unstable();
            make(v)
        })
        .collect();

    for p in 0..points.len() {
        if seed.contains(&p) {
            continue;
        }
        let visible: Vec<bool> =
            facets.iter().map(|f| side(f, &points[p]) == f.inner.reverse()).collect();
        if !visible.contains(&true) {
            continue;
        }
        let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
        for f in facets.iter().zip(&visible).filter(|(_, v)| **v).map(|(f, _)| f) {
            for skip in 0..d {
                let ridge: Vec<usize> =
                    f.verts.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &i)| i).collect();
                *ridges.entry(ridge).or_default() += 1;
            }
        }
        let mut horizon: Vec<Vec<usize>> =
            ridges.into_iter().filter(|(_, count)| *count == 1).map(|(r, _)| r).collect();
        horizon.sort();
        let mut kept: Vec<Simplex> =
            facets.into_iter().zip(visible).filter(|(_, v)| !*v).map(|(f, _)| f).collect();
        for mut ridge in horizon {
            ridge.push(p);
            ridge.sort_unstable();
            kept.push(make(ridge));
        }
        facets = kept;
    }

    // Merge coplanar simplices by their support sets.
    let mut merged: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for f in &facets {
        let support: Vec<usize> =
            (0..points.len()).filter(|&q| f.verts.contains(&q) || side(f, &points[q]) == Ordering::Equal).collect();
        merged.entry(support).or_insert_with(|| f.verts.clone());
    }
    let raw: Vec<RawFacet> = merged
        .into_iter()
        .map(|(support, verts)| {
            let origin = &points[verts[0]];
            let edges = DMatrix::from_fn(d - 1, d, |r, c| points[verts[r + 1]][c] - origin[c]);
            let mut normal: Vec<f64> = generalized_cross(&edges).iter().copied().collect();
            let norm = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
            normal.iter_mut().for_each(|x| *x /= norm);
            let mut offset: f64 = normal.iter().zip(origin).map(|(a, b)| a * b).sum();
            let at_center: f64 = normal.iter().zip(&center).map(|(a, b)| a * b).sum();
            if at_center < offset {
                normal.iter_mut().for_each(|x| *x = -*x);
                offset = -offset;
            }
            RawFacet { normal, offset, support }
        })
        .collect();

    // A point is a vertex iff the normals of the facets through it span ℝᵈ.
    let vertices = (0..points.len())
        .filter(|&q| {
            let normals: Vec<&Vec<f64>> = raw.iter().filter(|f| f.support.contains(&q)).map(|f| &f.normal).collect();
            if normals.len() < d {
                return false;
            }
            let m = DMatrix::from_fn(normals.len(), d, |r, c| normals[r][c]);
            let (sigmas, _) = right_singular(&m);
            sigmas[d - 1] > 1e-9
        })
        .collect();
    RawHull { vertices, facets: raw }
}

/// Greedy choice of `d + 1` affinely independent points: lexicographic
/// minimum first, then repeatedly the point farthest from the current flat.
fn initial_simplex(points: &[Vec<f64>]) -> Vec<usize> {
    let d = points[0].len();
    let first = (0..points.len())
        .min_by(|&a, &b| points[a].partial_cmp(&points[b]).unwrap_or(Ordering::Equal))
        .unwrap();
    let mut chosen = vec![first];
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let origin = DVector::from_column_slice(&points[first]);
    while chosen.len() < d + 1 {
        let residual = |q: usize| {
            let mut r = DVector::from_column_slice(&points[q]) - &origin;
            for b in &basis {
                r -= b * b.dot(&r);
            }
            r
        };
        let best = (0..points.len())
            .filter(|q| !chosen.contains(q))
            .max_by(|&a, &b| residual(a).norm().total_cmp(&residual(b).norm()))
            .expect("point set spans ℝᵈ");
        let r = residual(best);
        basis.push(&r / r.norm());
        chosen.push(best);
    }
    chosen
}
