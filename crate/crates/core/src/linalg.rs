//! Small dense linear-algebra helpers over `nalgebra`.

use nalgebra::{DMatrix, DVector};

pub(crate) fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(r, c, |i, j| rows[i][j])
}

pub(crate) fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let m = to_matrix(rows);
    let scale = m.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1.0);
    m.svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol * scale)
        .count()
}

/// Singular values in decreasing order.
pub(crate) fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Unit vector `x` minimising `|m x|`, with the minimum.
pub(crate) fn min_right_singular(m: &DMatrix<f64>) -> (DVector<f64>, f64) {
    let cols = m.ncols();
    // pad so the SVD exposes a full right basis
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let (idx, &s) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("non-empty");
    (v_t.row(idx).transpose(), s)
}

/// Minimum-norm solution of `j x = r` via the pseudo-inverse.
pub(crate) fn min_norm_solve(j: &DMatrix<f64>, r: &DVector<f64>) -> DVector<f64> {
    let svd = j.clone().svd(true, true);
    svd.solve(r, 1e-13 * svd.singular_values.max().max(1e-300))
        .unwrap_or_else(|_| DVector::zeros(j.ncols()))
}

/// Projects `g` onto the null space of `j`.
pub(crate) fn project_null(j: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let jg = j * g;
    let corr = min_norm_solve(j, &jg);
    g - corr
}

/// Solves the square system `a x = b`, `None` when singular.
pub(crate) fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let m = to_matrix(a);
    let lu = m.lu();
    let x = lu.solve(&DVector::from_column_slice(b))?;
    if x.iter().all(|v| v.is_finite()) {
        Some(x.iter().copied().collect())
    } else {
        None
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
