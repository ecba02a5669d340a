use nalgebra::{DMatrix, DVector};

/// Relative cutoff below which a singular value counts as zero.
pub(crate) const RANK_RTOL: f64 = 1e-9;

pub(crate) fn rank_threshold(largest: f64) -> f64 {
    RANK_RTOL * largest.max(1.0)
}

/// Singular values (descending) and the matching right singular vectors as
/// the columns of a full `ncols × ncols` orthogonal matrix.
pub(crate) fn right_singular(x: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = x.ncols();
    // Pad to at least n rows so the SVD yields a complete right basis.
    let rows = x.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (x.nrows(), n)).copy_from(x);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigmas = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut v = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        v.set_column(col, &v_t.row(i).transpose());
    }
    (sigmas, v)
}

/// Solves `h x = rhs` for symmetric PSD `h`. If Cholesky fails, an additive
/// shift `floor · trace/n` is applied and grown tenfold until it succeeds.
/// Returns the solution and the shift that was used.
pub(crate) fn solve_psd(h: &DMatrix<f64>, rhs: &DVector<f64>, floor: f64) -> (DVector<f64>, f64) {
    if let Some(chol) = h.clone().cholesky() {
        return (chol.solve(rhs), 0.0);
    }
    let n = h.nrows();
    let scale = (h.trace() / n as f64).max(f64::MIN_POSITIVE);
    let mut shift = floor * scale;
    loop {
        let shifted = h + DMatrix::identity(n, n) * shift;
        if let Some(chol) = shifted.cholesky() {
            return (chol.solve(rhs), shift);
        }
        shift *= 10.0;
    }
}

/// Normal of the hyperplane spanned by the rows of a `(d−1) × d` matrix of
/// edge vectors, as the vector of signed maximal minors.
pub(crate) fn generalized_cross(edges: &DMatrix<f64>) -> DVector<f64> {
    let d = edges.ncols();
    debug_assert_eq!(edges.nrows() + 1, d);
    if d == 1 {
        return DVector::from_element(1, 1.0);
    }
    DVector::from_fn(d, |k, _| {
        let minor = edges.clone().remove_column(k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sign * minor.determinant()
    })
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
