//! Thin helpers over nalgebra for the dense complex linear algebra the
//! checkers need.

use nalgebra::DMatrix;

use crate::scalar::Scalar;

pub type Matrix = DMatrix<Scalar>;

/// Orthonormal basis (as columns) of `{x : A x = 0}`; singular values at or
/// below `tol * max(1, σ_max)` count as zero.
pub fn null_space(a: &Matrix, tol: f64) -> Matrix {
    let (m, n) = a.shape();
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    if m == 0 {
        return Matrix::identity(n, n);
    }
    // SVD only yields a full V when rows >= cols
    let padded = if m < n {
        let mut p = Matrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let cut = tol * sigma_max.max(1.0);
    let cols: Vec<_> = (0..n)
        .filter(|&k| svd.singular_values[k] <= cut)
        .map(|k| v_t.row(k).adjoint())
        .collect();
    if cols.is_empty() {
        Matrix::zeros(n, 0)
    } else {
        Matrix::from_columns(&cols)
    }
}

pub fn singular_values(a: &Matrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().cloned().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// `σ_min / σ_max`, the reciprocal condition number (0 for singular input).
pub fn inverse_condition(a: &Matrix) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 && a.is_square() => lo / hi,
        _ => 0.0,
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), Matrix::zeros(0, 0));
    }
    // symmetrize away rounding before the solver sees it
    let h = (a + a.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    (values, vectors)
}

/// Largest entry modulus, 0 for empty matrices.
pub fn max_abs(a: &Matrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise distance from the conjugate transpose.
pub fn hermitian_residual(a: &Matrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(a - a.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;

    #[test]
    fn null_space_of_rank_one() {
        let a = Matrix::from_row_slice(2, 2, &[real(1.0), real(1.0), real(1.0), real(1.0)]);
        let k = null_space(&a, 1e-10);
        assert_eq!(k.ncols(), 1);
        assert!(max_abs(&(&a * &k)) < 1e-12);
    }

    #[test]
    fn null_space_wide_matrix() {
        let a = Matrix::from_row_slice(1, 3, &[real(1.0), real(0.0), real(0.0)]);
        assert_eq!(null_space(&a, 1e-10).ncols(), 2);
    }

    #[test]
    fn eigen_is_sorted() {
        let a = Matrix::from_row_slice(2, 2, &[real(2.0), real(0.0), real(0.0), real(-1.0)]);
        let (vals, vecs) = hermitian_eigen(&a);
        assert_eq!(vals, vec![-1.0, 2.0]);
        assert!((vecs[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }
}
