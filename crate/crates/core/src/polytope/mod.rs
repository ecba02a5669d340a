//! Geometry of `Q = Conv(A)` and low-temperature (tropical) limits.

mod exact;
mod hull;

use nalgebra::{DMatrix, DVector};

use crate::state_space::{CoVector, StateSet};
use crate::{Error, Result};

/// Largest affine dimension the hull code accepts.
pub const MAX_HULL_DIM: usize = 6;

/// Relative tolerance for facet membership, span equations and margins.
pub const GEOMETRY_TOL: f64 = 1e-9;

/// Relative tolerance for ties in [`min_face`].
pub const TIE_TOL: f64 = 1e-9;

/// `(normal, x) ≥ offset` on `Q`, with equality on the facet.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: CoVector,
    pub offset: f64,
    /// Indices of the vertices of `Q` lying on the facet.
    pub vertices: Vec<usize>,
}

impl Facet {
    /// Euclidean signed distance of `x` from the facet hyperplane, positive inside.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        let norm = self.normal.components().iter().map(|v| v * v).sum::<f64>().sqrt();
        (self.normal.pair(x) - self.offset) / norm
    }
}

/// An affine equation `(normal, x) = value` satisfied by every point of `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanEquation {
    pub normal: CoVector,
    pub value: f64,
}

/// The convex hull of a state set.
///
/// When `affine_dim < n` the facets are relative to the affine span, which is
/// cut out by `span_equations`.
#[derive(Debug, Clone)]
pub struct Polytope {
    pub vertices: Vec<usize>,
    pub facets: Vec<Facet>,
    pub affine_dim: usize,
    pub span_equations: Vec<SpanEquation>,
    pub diameter: f64,
}

/// The set of states minimizing a pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceResult {
    pub indices: Vec<usize>,
    pub value: f64,
    pub barycenter: Vec<f64>,
}

/// Rescales `v` to a primitive integer vector if one is parallel to it.
fn integral_direction(v: &[f64]) -> Option<(Vec<f64>, f64)> {
    let smallest = v.iter().filter(|x| x.abs() > 1e-12).map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    if !smallest.is_finite() {
        return None;
    }
    for k in 1..=24 {
        let scale = k as f64 / smallest;
        let scaled: Vec<f64> = v.iter().map(|x| x * scale).collect();
        if scaled.iter().all(|x| (x - x.round()).abs() < 1e-9 * (1.0 + x.abs())) {
            let ints: Vec<i64> = scaled.iter().map(|x| x.round() as i64).collect();
            let g = ints.iter().fold(0i64, |g, &x| num::integer::gcd(g, x)).max(1);
            let scale = scale / g as f64;
            return Some((ints.iter().map(|&x| (x / g) as f64).collect(), scale));
        }
    }
    None
}

fn presentable(a: &StateSet, normal: Vec<f64>, offset: f64) -> (CoVector, f64) {
    let (normal, offset) = presentable_signed(a, normal, offset);
    // `+ 0.0` turns −0 into +0
    (CoVector::new(normal.components().iter().map(|x| x + 0.0).collect()), offset + 0.0)
}

fn presentable_signed(a: &StateSet, normal: Vec<f64>, offset: f64) -> (CoVector, f64) {
    let norm = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
    let unit: Vec<f64> = normal.iter().map(|x| x / norm).collect();
    let offset = offset / norm;
    if a.is_lattice() {
        if let Some((ints, scale)) = integral_direction(&unit) {
            // A hyperplane through lattice points has an integral offset.
            let rescaled = offset * scale;
            if (rescaled - rescaled.round()).abs() < 1e-6 {
                return (CoVector::new(ints), rescaled.round());
            }
        }
    }
    (CoVector::new(unit), offset)
}

/// `d` coordinate axes on which the projection of the affine span is
/// injective, chosen greedily by largest residual of the rows of `basis`.
fn injective_axes(basis: &DMatrix<f64>) -> Vec<usize> {
    let d = basis.ncols();
    let mut chosen: Vec<usize> = Vec::with_capacity(d);
    let mut ortho: Vec<DVector<f64>> = Vec::with_capacity(d);
    for _ in 0..d {
        let residual = |r: usize| {
            let mut v = basis.row(r).transpose();
            for o in &ortho {
                v -= o * o.dot(&v);
            }
            v
        };
        let best = (0..basis.nrows())
            .filter(|r| !chosen.contains(r))
            .max_by(|&a, &b| residual(a).norm().total_cmp(&residual(b).norm()))
            .expect("span dimension at most n");
        let v = residual(best);
        ortho.push(&v / v.norm());
        chosen.push(best);
    }
    chosen.sort_unstable();
    chosen
}

/// Vertices and facets of `Conv(A)`.
///
/// The hull is computed on `affine_dim` of the original coordinates, chosen
/// so that the projection is injective on the affine span; the inputs stay
/// exact and the orientation predicate stays exact. Facet normals are then
/// moved into the span direction so margins are measured within the span.
pub fn convex_hull(a: &StateSet) -> Result<Polytope> {
    let d = a.affine_dim();
    if d > MAX_HULL_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    let n = a.dim();
    let span = a.affine_span();

    let span_equations = (0..span.complement.ncols())
        .map(|k| {
            let w: Vec<f64> = span.complement.column(k).iter().copied().collect();
            let value = w.iter().zip(span.origin.iter()).map(|(a, b)| a * b).sum();
            let (normal, value) = presentable(a, w, value);
            SpanEquation { normal, value }
        })
        .collect();

    let (vertices, facets) = if d == 0 {
        (vec![0], Vec::new())
    } else {
        let axes = injective_axes(&span.basis);
        let projected: Vec<Vec<f64>> = a.points().map(|p| axes.iter().map(|&c| p[c]).collect()).collect();
        let raw = hull::hull(&projected);
        let along_span = &span.basis * span.basis.transpose();
        let mut facets: Vec<Facet> = raw
            .facets
            .into_iter()
            .map(|f| {
                let mut normal = DVector::zeros(n);
                for (&c, v) in axes.iter().zip(&f.normal) {
                    normal[c] = *v;
                }
                let mut offset = f.offset;
                if d < n {
                    let inside = &along_span * &normal;
                    offset -= (&normal - &inside).dot(&span.origin);
                    normal = inside;
                }
                let (normal, offset) = presentable(a, normal.iter().copied().collect(), offset);
                let vertices = f.support.into_iter().filter(|i| raw.vertices.contains(i)).collect();
                Facet { normal, offset, vertices }
            })
            .collect();
        facets.sort_by(|x, y| x.vertices.cmp(&y.vertices));
        (raw.vertices, facets)
    };
    Ok(Polytope { vertices, facets, affine_dim: d, span_equations, diameter: a.diameter() })
}

impl Polytope {
    /// Distance from `x` to the affine span of `A`.
    pub fn span_distance(&self, x: &[f64]) -> f64 {
        self.span_equations
            .iter()
            .map(|e| {
                let norm2: f64 = e.normal.components().iter().map(|v| v * v).sum();
                (e.normal.pair(x) - e.value).powi(2) / norm2
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn interior_margin(&self, x: &[f64]) -> Result<f64> {
        interior_margin(self, x)
    }
}

/// Smallest signed distance from `x` to a facet hyperplane: positive in the
/// relative interior, zero on the boundary, negative outside. A single-point
/// polytope has no facets and reports `+∞` for its own point.
pub fn interior_margin(q: &Polytope, x: &[f64]) -> Result<f64> {
    let n = q.span_equations.len() + q.affine_dim;
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    let distance = q.span_distance(x);
    if distance > GEOMETRY_TOL * q.diameter.max(1.0) {
        return Err(Error::OffAffineSpan { distance });
    }
    Ok(q.facets.iter().map(|f| f.signed_distance(x)).fold(f64::INFINITY, f64::min))
}

/// States minimizing `(direction, ω)`, with ties resolved to within
/// `TIE_TOL` times the spread of pairing values.
pub fn min_face(a: &StateSet, direction: &CoVector) -> Result<FaceResult> {
    direction.check_against(a)?;
    let values: Vec<f64> = a.points().map(|p| direction.pair(p)).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOL * (hi - lo);
    let indices: Vec<usize> = (0..values.len()).filter(|&i| values[i] - lo <= tol).collect();
    let mut barycenter = vec![0.0; a.dim()];
    for &i in &indices {
        for (b, x) in barycenter.iter_mut().zip(a.point(i)) {
            *b += x;
        }
    }
    barycenter.iter_mut().for_each(|b| *b /= indices.len() as f64);
    Ok(FaceResult { indices, value: lo, barycenter })
}

/// `lim_{t→+∞} ⟨E⟩(t · direction)`: the barycenter of the minimizing face.
pub fn tropical_limit(a: &StateSet, direction: &CoVector) -> Result<Vec<f64>> {
    direction.check_against(a)?;
    if direction.components().iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroDirection);
    }
    Ok(min_face(a, direction)?.barycenter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gibbs::mean_energy;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn set(dim: usize, pts: &[&[f64]]) -> StateSet {
        StateSet::new(dim, pts.iter().map(|p| p.to_vec()).collect(), None).unwrap()
    }

    fn square() -> StateSet {
        set(2, &[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]])
    }

    fn cv(x: &[f64]) -> CoVector {
        CoVector::new(x.to_vec())
    }

    #[test]
    fn interval_hull() {
        let q = convex_hull(&set(1, &[&[0.0], &[1.0], &[2.0]])).unwrap();
        assert_eq!(q.vertices, vec![0, 2]);
        assert_eq!(q.facets.len(), 2);
        assert_eq!(q.facets[0], Facet { normal: cv(&[1.0]), offset: 0.0, vertices: vec![0] });
        assert_eq!(q.facets[1], Facet { normal: cv(&[-1.0]), offset: -2.0, vertices: vec![2] });
    }

    #[test]
    fn unit_square_hull() {
        let q = convex_hull(&square()).unwrap();
        assert_eq!(q.vertices, vec![0, 1, 2, 3]);
        assert_eq!(q.affine_dim, 2);
        assert!(q.span_equations.is_empty());
        let got: Vec<(Vec<f64>, f64, Vec<usize>)> =
            q.facets.iter().map(|f| (f.normal.components().to_vec(), f.offset, f.vertices.clone())).collect();
        assert_eq!(
            got,
            vec![
                (vec![0.0, 1.0], 0.0, vec![0, 1]),
                (vec![1.0, 0.0], 0.0, vec![0, 2]),
                (vec![-1.0, 0.0], -1.0, vec![1, 3]),
                (vec![0.0, -1.0], -1.0, vec![2, 3]),
            ]
        );
    }

    #[test]
    fn collinear_hull_is_a_segment() {
        let q = convex_hull(&set(2, &[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]])).unwrap();
        assert_eq!(q.vertices, vec![0, 2]);
        assert_eq!(q.affine_dim, 1);
        assert_eq!(q.facets.len(), 2);
        assert_eq!(q.span_equations.len(), 1);
        let eq = &q.span_equations[0];
        // x = y up to sign
        assert_eq!(eq.value, 0.0);
        assert_eq!(eq.normal.components()[0], -eq.normal.components()[1]);
        assert_eq!(eq.normal.components()[0].abs(), 1.0);
        assert_abs_diff_eq!(q.interior_margin(&[1.0, 1.0]).unwrap(), 2f64.sqrt(), epsilon = 1e-12);
        assert!(matches!(q.interior_margin(&[1.0, 0.0]), Err(Error::OffAffineSpan { .. })));
    }

    #[test]
    fn single_point_hull() {
        let q = convex_hull(&set(2, &[&[3.0, 4.0]])).unwrap();
        assert_eq!(q.vertices, vec![0]);
        assert!(q.facets.is_empty());
        assert_eq!(q.interior_margin(&[3.0, 4.0]).unwrap(), f64::INFINITY);
        assert!(q.interior_margin(&[3.0, 4.5]).is_err());
    }

    #[test]
    fn square_margins() {
        let q = convex_hull(&square()).unwrap();
        assert_eq!(interior_margin(&q, &[0.5, 0.5]).unwrap(), 0.5);
        assert_eq!(interior_margin(&q, &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(interior_margin(&q, &[2.0, 2.0]).unwrap(), -1.0);
    }

    #[test]
    fn cube_in_r4_subspace() {
        let mut pts = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    pts.push(vec![x, y, z, x + y + z]);
                }
            }
        }
        let a = StateSet::new(4, pts, None).unwrap();
        let q = convex_hull(&a).unwrap();
        assert_eq!(q.affine_dim, 3);
        assert_eq!(q.vertices.len(), 8);
        assert_eq!(q.facets.len(), 6);
        assert!(q.facets.iter().all(|f| f.vertices.len() == 4));
        // facet x = 0 has in-span normal (3, −1, −1, 1); the centre sits at 1/√3 from it
        assert!(q.facets.iter().any(|f| f.normal.components() == [3.0, -1.0, -1.0, 1.0] && f.offset == 0.0));
        assert_abs_diff_eq!(q.interior_margin(&[0.5, 0.5, 0.5, 1.5]).unwrap(), 1.0 / 3f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn high_dimension_is_rejected() {
        let mut pts = vec![vec![0.0; 7]];
        for i in 0..7 {
            let mut e = vec![0.0; 7];
            e[i] = 1.0;
            pts.push(e);
        }
        let a = StateSet::new(7, pts, None).unwrap();
        assert!(matches!(convex_hull(&a), Err(Error::UnsupportedDimension(7))));
    }

    #[test]
    fn min_face_examples() {
        let a = square();
        let f = min_face(&a, &cv(&[1.0, 1.0])).unwrap();
        assert_eq!(f.indices, vec![0]);
        assert_eq!(f.barycenter, vec![0.0, 0.0]);
        let f = min_face(&a, &cv(&[1.0, 0.0])).unwrap();
        assert_eq!(f.indices, vec![0, 2]);
        assert_eq!(f.barycenter, vec![0.0, 0.5]);
        let f = min_face(&a, &cv(&[0.0, 0.0])).unwrap();
        assert_eq!(f.indices, vec![0, 1, 2, 3]);
        assert_eq!(f.barycenter, a.barycenter());
    }

    #[test]
    fn tropical_limit_examples() {
        let two = set(1, &[&[0.0], &[1.0]]);
        assert_eq!(tropical_limit(&two, &cv(&[1.0])).unwrap(), vec![0.0]);
        assert_eq!(tropical_limit(&two, &cv(&[-1.0])).unwrap(), vec![1.0]);
        assert_eq!(tropical_limit(&square(), &cv(&[1.0, 0.0])).unwrap(), vec![0.0, 0.5]);
        assert!(matches!(tropical_limit(&square(), &cv(&[0.0, 0.0])), Err(Error::ZeroDirection)));
    }

    /// Carathéodory membership: `x` lies in some full-dimensional simplex of points.
    fn in_hull_brute_force(a: &StateSet, x: &[f64]) -> bool {
        let n = a.dim();
        let idx: Vec<usize> = (0..a.len()).collect();
        let mut found = false;
        let mut combo = vec![0usize; n + 1];
        fn rec(start: usize, depth: usize, combo: &mut Vec<usize>, idx: &[usize], f: &mut dyn FnMut(&[usize])) {
            if depth == combo.len() {
                f(combo);
                return;
            }
            for i in start..idx.len() {
                combo[depth] = idx[i];
                rec(i + 1, depth + 1, combo, idx, f);
            }
        }
        rec(0, 0, &mut combo, &idx, &mut |c| {
            if found {
                return;
            }
            let m = DMatrix::from_fn(n + 1, n + 1, |r, col| if r < n { a.point(c[col])[r] } else { 1.0 });
            let mut rhs = DVector::from_element(n + 1, 1.0);
            for r in 0..n {
                rhs[r] = x[r];
            }
            if let Some(lambda) = m.lu().solve(&rhs) {
                if lambda.iter().all(|&l| l >= -1e-12) {
                    found = true;
                }
            }
        });
        found
    }

    #[derive(Debug, PartialEq)]
    enum Class {
        Interior,
        Boundary,
        Exterior,
    }

    fn brute_class(a: &StateSet, x: &[f64]) -> Class {
        if !in_hull_brute_force(a, x) {
            return Class::Exterior;
        }
        let delta = 1e-6;
        for i in 0..a.dim() {
            for s in [-delta, delta] {
                let mut y = x.to_vec();
                y[i] += s;
                if !in_hull_brute_force(a, &y) {
                    return Class::Boundary;
                }
            }
        }
        Class::Interior
    }

    fn full_dim_sets() -> impl Strategy<Value = StateSet> {
        (1usize..=3)
            .prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-3i32..=3, n), n + 1..=10))
            .prop_filter_map("needs full affine span", |pts| {
                let n = pts[0].len();
                let mut pts: Vec<Vec<f64>> = pts.into_iter().map(|p| p.into_iter().map(f64::from).collect()).collect();
                pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                pts.dedup();
                StateSet::new(n, pts, None).ok().filter(|a| a.affine_dim() == n)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn hull_classification_matches_brute_force(
            a in full_dim_sets(),
            probes in prop::collection::vec(prop::collection::vec(-16i32..=16, 3), 12),
        ) {
            let q = convex_hull(&a).unwrap();
            for f in &q.facets {
                prop_assert!(f.vertices.len() >= q.affine_dim);
                for p in a.points() {
                    prop_assert!(f.signed_distance(p) >= -GEOMETRY_TOL);
                }
            }
            for v in &q.vertices {
                prop_assert!(q.facets.iter().any(|f| f.vertices.contains(v)));
            }
            for probe in probes {
                let x: Vec<f64> = probe[..a.dim()].iter().map(|&v| f64::from(v) / 4.0).collect();
                let m = interior_margin(&q, &x).unwrap();
                let ours = if m > GEOMETRY_TOL { Class::Interior } else if m >= -GEOMETRY_TOL { Class::Boundary } else { Class::Exterior };
                prop_assert_eq!(ours, brute_class(&a, &x), "x = {:?}, margin = {}", x, m);
            }
            // vertices are exactly the points not in the hull of the others
            for i in 0..a.len() {
                let others: Vec<Vec<f64>> = (0..a.len()).filter(|&j| j != i).map(|j| a.point(j).to_vec()).collect();
                let is_vertex = match StateSet::new(a.dim(), others, None) {
                    Ok(rest) if rest.affine_dim() == a.dim() => !in_hull_brute_force(&rest, a.point(i)),
                    _ => true,
                };
                prop_assert_eq!(q.vertices.contains(&i), is_vertex, "point {}", i);
            }
        }

        #[test]
        fn mean_energy_is_strictly_inside(a in full_dim_sets(), beta in prop::collection::vec(-5.0f64..5.0, 3)) {
            let q = convex_hull(&a).unwrap();
            let m = mean_energy(&a, &CoVector::new(beta[..a.dim()].to_vec())).unwrap();
            prop_assert!(interior_margin(&q, &m).unwrap() > 0.0);
        }

        #[test]
        fn min_face_invariant_under_positive_scaling(
            a in full_dim_sets(),
            dir in prop::collection::vec(-3i32..=3, 3),
            scale in 0.01f64..100.0,
        ) {
            let d = CoVector::new(dir[..a.dim()].iter().map(|&v| f64::from(v)).collect());
            prop_assert_eq!(min_face(&a, &d).unwrap().indices, min_face(&a, &d.scaled(scale)).unwrap().indices);
        }

        #[test]
        fn tropical_convergence_rate(a in full_dim_sets(), dir in prop::collection::vec(-3i32..=3, 3)) {
            let d = CoVector::new(dir[..a.dim()].iter().map(|&v| f64::from(v)).collect());
            let face = min_face(&a, &d).unwrap();
            prop_assume!(face.indices.len() == 1);
            let mut pairings: Vec<f64> = a.points().map(|p| d.pair(p)).collect();
            pairings.sort_by(f64::total_cmp);
            let gap = pairings[1] - pairings[0];
            let limit = tropical_limit(&a, &d).unwrap();
            let mut last = f64::INFINITY;
            for t in [10.0, 20.0, 50.0] {
                let t = t / gap;
                let m = mean_energy(&a, &d.scaled(t)).unwrap();
                let err = m.iter().zip(&limit).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                let bound = (a.len() - 1) as f64 * a.diameter() * (-t * gap).exp();
                prop_assert!(err <= bound * (1.0 + 1e-9) + 1e-15, "err {} bound {}", err, bound);
                prop_assert!(err <= last);
                last = err;
            }
            prop_assert!(last <= 1e-6);
        }
    }
}
