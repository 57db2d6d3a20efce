//! Small dense helpers written over [`Scalar`], plus `f64` conveniences.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{GeomError, Result};
use crate::jet::Scalar;

pub type Mat<S> = Vec<Vec<S>>;

pub fn zeros<S: Scalar>(rows: usize, cols: usize) -> Mat<S> {
    vec![vec![S::zero(); cols]; rows]
}

pub fn identity<S: Scalar>(n: usize) -> Mat<S> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = S::one();
    }
    m
}

pub fn matmul<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> Mat<S> {
    let (n, k, p) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    let mut out = zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            let mut acc = S::zero();
            for l in 0..k {
                acc = acc + a[i][l].clone() * &b[l][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn transpose<S: Scalar>(a: &Mat<S>) -> Mat<S> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Gauss–Jordan inverse with partial pivoting on the values.
pub fn inverse<S: Scalar>(a: &Mat<S>) -> Result<Mat<S>> {
    let n = a.len();
    let mut work = a.clone();
    let mut inv = identity::<S>(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| {
                work[x][col]
                    .value()
                    .abs()
                    .total_cmp(&work[y][col].value().abs())
            })
            .expect("non-empty range");
        if work[pivot][col].value().abs() < 1e-300 {
            return Err(GeomError::Geometry("singular matrix".into()));
        }
        work.swap(col, pivot);
        inv.swap(col, pivot);
        let r = work[col][col].recip();
        for j in 0..n {
            work[col][j] = work[col][j].clone() * &r;
            inv[col][j] = inv[col][j].clone() * &r;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let factor = work[i][col].clone();
            for j in 0..n {
                work[i][j] = work[i][j].clone() - factor.clone() * &work[col][j];
                inv[i][j] = inv[i][j].clone() - factor.clone() * &inv[col][j];
            }
        }
    }
    Ok(inv)
}

pub fn values<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(Scalar::value).collect()
}

pub fn mat_values<S: Scalar>(m: &Mat<S>) -> Mat<f64> {
    m.iter().map(|r| values(r)).collect()
}

pub fn to_dmatrix(m: &Mat<f64>) -> DMatrix<f64> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, cols, |i, j| m[i][j])
}

pub fn from_dmatrix(m: &DMatrix<f64>) -> Mat<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn mat_vec(m: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Eigenvalues ascending with matching eigenvectors (columns) of a symmetric matrix.
pub fn symmetric_eigen(m: &Mat<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let eig = SymmetricEigen::new(to_dmatrix(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (vals, vecs)
}

pub fn frobenius(m: &Mat<f64>) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}
