//! Finite state sets with a vector-valued energy embedding.

use std::ops::Index;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg::{self, rank_threshold};
use crate::{Error, Result};

/// A finite set of distinct points `A ⊂ ℝⁿ`; each point is the energy vector of one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateSetJson", into = "StateSetJson")]
pub struct StateSet {
    dim: usize,
    coords: Vec<f64>,
    labels: Option<Vec<String>>,
    affine_dim: usize,
    is_lattice: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateSetJson {
    dim: usize,
    points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<StateSetJson> for StateSet {
    type Error = Error;

    fn try_from(json: StateSetJson) -> Result<Self> {
        StateSet::new(json.dim, json.points, json.labels)
    }
}

impl From<StateSet> for StateSetJson {
    fn from(a: StateSet) -> Self {
        StateSetJson {
            dim: a.dim,
            points: a.points().map(<[f64]>::to_vec).collect(),
            labels: a.labels,
        }
    }
}

impl StateSet {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if points.is_empty() {
            return Err(Error::EmptyStateSet);
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("point coordinates"));
            }
            coords.extend_from_slice(p);
        }
        if let Some(l) = &labels {
            if l.len() != points.len() {
                return Err(Error::LengthMismatch { expected: points.len(), found: l.len() });
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::DuplicatePoint { first: i, second: j });
                }
            }
        }
        let is_lattice = coords.iter().all(|x| x.fract() == 0.0);
        let mut a = StateSet { dim, coords, labels, affine_dim: 0, is_lattice };
        a.affine_dim = a.compute_affine_dim();
        Ok(a)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let json: StateSetJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("state set JSON: {e}")))?;
        StateSet::try_from(json)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of states `N = |A|`.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Dimension of the affine span, cached at construction.
    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    /// True when every coordinate was an integer.
    pub fn is_lattice(&self) -> bool {
        self.is_lattice
    }

    pub fn barycenter(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for p in self.points() {
            for (ci, x) in c.iter_mut().zip(p) {
                *ci += x;
            }
        }
        let n = self.len() as f64;
        c.iter_mut().for_each(|x| *x /= n);
        c
    }

    /// Largest pairwise Euclidean distance.
    pub fn diameter(&self) -> f64 {
        let mut d2: f64 = 0.0;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let s: f64 = self.point(i).iter().zip(self.point(j)).map(|(a, b)| (a - b).powi(2)).sum();
                d2 = d2.max(s);
            }
        }
        d2.sqrt()
    }

    /// Returns a copy with `shift` added to every point.
    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        self.check_dim(shift.len())?;
        let pts = self.points().map(|p| p.iter().zip(shift).map(|(a, b)| a + b).collect()).collect();
        StateSet::new(self.dim, pts, self.labels.clone())
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found });
        }
        Ok(())
    }

    pub(crate) fn as_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.len(), self.dim, &self.coords)
    }

    fn centered_at(&self, origin: &[f64]) -> DMatrix<f64> {
        let mut m = self.as_matrix();
        for mut row in m.row_iter_mut() {
            for (x, o) in row.iter_mut().zip(origin) {
                *x -= o;
            }
        }
        m
    }

    fn compute_affine_dim(&self) -> usize {
        let (sigmas, _) = linalg::right_singular(&self.centered_at(self.point(0)));
        let cut = rank_threshold(sigmas[0]);
        sigmas.iter().filter(|&&s| s > cut).count()
    }

    /// Orthonormal description of the affine span.
    pub fn affine_span(&self) -> AffineSpan {
        let origin = self.barycenter();
        let (_, v) = linalg::right_singular(&self.centered_at(self.point(0)));
        let d = self.affine_dim;
        AffineSpan {
            basis: v.columns(0, d).into_owned(),
            complement: v.columns(d, self.dim - d).into_owned(),
            origin: DVector::from_vec(origin),
        }
    }
}

/// The affine span of a state set: `origin + span(basis)`, with `complement`
/// an orthonormal basis of its orthogonal complement.
#[derive(Debug, Clone)]
pub struct AffineSpan {
    /// `n × d` with orthonormal columns.
    pub basis: DMatrix<f64>,
    /// `n × (n − d)` with orthonormal columns.
    pub complement: DMatrix<f64>,
    pub origin: DVector<f64>,
}

impl AffineSpan {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Coordinates of `x` in the span basis, relative to `origin`.
    pub fn reduce(&self, x: &[f64]) -> DVector<f64> {
        self.basis.tr_mul(&(DVector::from_column_slice(x) - &self.origin))
    }

    /// Euclidean distance from `x` to the span.
    pub fn distance(&self, x: &[f64]) -> f64 {
        self.complement.tr_mul(&(DVector::from_column_slice(x) - &self.origin)).norm()
    }

    /// Lifts a covector on the reduced coordinates to ℝⁿ*, with zero
    /// component along the annihilator of the span.
    pub fn lift_covector(&self, reduced: &DVector<f64>) -> CoVector {
        CoVector::new((&self.basis * reduced).iter().copied().collect())
    }
}

/// A real-valued function on the states, `O: A → ℝ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    values: Vec<f64>,
}

impl Observable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observable values"));
        }
        Ok(Observable { values })
    }

    /// Evaluates `f` on every point of `a`.
    pub fn from_fn(a: &StateSet, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Observable::new(a.points().map(f).collect())
    }

    /// The `axis`-th energy component.
    pub fn energy_component(a: &StateSet, axis: usize) -> Result<Self> {
        if axis >= a.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), found: axis + 1 });
        }
        Observable::from_fn(a, |p| p[axis])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// An inverse-temperature covector `β ∈ ℝⁿ*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoVector(Vec<f64>);

impl CoVector {
    pub fn new(components: Vec<f64>) -> Self {
        CoVector(components)
    }

    pub fn zeros(dim: usize) -> Self {
        CoVector(vec![0.0; dim])
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(β, ω) = Σᵢ βᵢ ωᵢ`.
    pub fn pair(&self, point: &[f64]) -> f64 {
        linalg::dot(&self.0, point)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        CoVector(self.0.iter().map(|b| b * factor).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|b| b.is_finite())
    }

    pub(crate) fn check_against(&self, a: &StateSet) -> Result<()> {
        a.check_dim(self.len())?;
        if !self.is_finite() {
            return Err(Error::NonFinite("covector"));
        }
        Ok(())
    }
}

impl Index<usize> for CoVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for CoVector {
    fn from(v: Vec<f64>) -> Self {
        CoVector(v)
    }
}
