//! Small dense row-major matrices and a cyclic Jacobi eigensolver for the
//! symmetric matrices that come up in operator-norm work (`T^T T` and its
//! compressions to a subspace).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::sqrt;
use crate::space::Vector;
use crate::tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::input(
                "matrix must have at least one row and one column",
            ));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::input("matrix rows have different lengths"));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_columns(columns: &[Vector]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vector::dim);
        if r == 0 || c == 0 || columns.iter().any(|v| v.dim() != r) {
            return Err(Error::input("columns must be nonempty and of equal length"));
        }
        let mut m = Matrix::zeros(r, c);
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.coords().iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `self^T other` without materializing the transpose.
    pub fn tr_matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "tr_matmul shape mismatch");
        let mut out = Matrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            for i in 0..self.cols {
                let a = self[(k, i)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "apply shape mismatch");
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Matrix, b: f64) -> Matrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(u, v)| a * u + b * v)
                .collect(),
        }
    }

    pub fn scaled(&self, a: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| a * v).collect(),
        }
    }

    /// `(M + M^T) / 2`.
    pub fn symmetric_part(&self) -> Matrix {
        assert_eq!(
            self.rows, self.cols,
            "symmetric part of a non-square matrix"
        );
        let mut s = self.clone();
        for i in 0..self.rows {
            for j in 0..i {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        s
    }

    pub fn frobenius(&self) -> f64 {
        sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (u, v)| m.max((u - v).abs()))
    }

    /// Keep the first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Matrix {
        let mut m = Matrix::zeros(self.rows, k);
        for i in 0..self.rows {
            for j in 0..k {
                m[(i, j)] = self[(i, j)];
            }
        }
        m
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi. Stops once the off-diagonal Frobenius mass falls below
/// `JACOBI_OFF_DIAGONAL * ||A||_F`, then runs one polishing sweep; the method
/// converges quadratically so the last sweep leaves the off-diagonal at
/// rounding level.
pub fn symmetric_eigen(a: &Matrix) -> Result<SymmetricEigen> {
    let n = a.rows;
    if n != a.cols {
        return Err(Error::input(format!(
            "eigensolve needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let asym = (0..n)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .fold(0.0f64, |m, (i, j)| m.max((a[(i, j)] - a[(j, i)]).abs()));
    if asym > 1e-12 * a.frobenius().max(f64::MIN_POSITIVE) {
        return Err(Error::input("eigensolve needs a symmetric matrix"));
    }

    let mut m = a.symmetric_part();
    let mut v = Matrix::identity(n);
    let scale = m.frobenius();
    let mut sweeps = 0;
    let mut polished = false;
    while sweeps < MAX_SWEEPS {
        let off = off_diagonal(&m);
        if off <= tolerance::JACOBI_OFF_DIAGONAL * scale {
            if polished || off == 0.0 {
                break;
            }
            polished = true;
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable, so tied eigenvalues keep the input order
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new)] = v[(r, old)];
        }
    }
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

fn off_diagonal(m: &Matrix) -> f64 {
    let n = m.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    sqrt(s)
}

fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    if apq == 0.0 {
        return;
    }
    let app = m[(p, p)];
    let aqq = m[(q, q)];
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + sqrt(theta * theta + 1.0))
    };
    let c = 1.0 / sqrt(t * t + 1.0);
    let s = t * c;
    let n = m.rows;

    m[(p, p)] = app - t * apq;
    m[(q, q)] = aqq + t * apq;
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for r in 0..n {
        if r != p && r != q {
            let arp = m[(r, p)];
            let arq = m[(r, q)];
            let new_p = c * arp - s * arq;
            let new_q = s * arp + c * arq;
            m[(r, p)] = new_p;
            m[(p, r)] = new_p;
            m[(r, q)] = new_q;
            m[(q, r)] = new_q;
        }
    }
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = c * vrp - s * vrq;
        v[(r, q)] = s * vrp + c * vrq;
    }
}

/// Modified Gram-Schmidt on the columns of `m`; columns that become
/// numerically dependent are dropped.
pub fn orthonormalize_columns(m: &Matrix) -> Matrix {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for j in 0..m.cols {
        let mut col: Vec<f64> = (0..m.rows).map(|i| m[(i, j)]).collect();
        let original = sqrt(col.iter().map(|v| v * v).sum());
        for b in &basis {
            let d: f64 = col.iter().zip(b).map(|(u, v)| u * v).sum();
            for (c, bv) in col.iter_mut().zip(b) {
                *c -= d * bv;
            }
        }
        let len = sqrt(col.iter().map(|v| v * v).sum());
        if len > 1e-10 * original.max(f64::MIN_POSITIVE) {
            basis.push(col.iter().map(|v| v / len).collect());
        }
    }
    let cols: Vec<Vector> = basis.into_iter().map(Vector::new).collect();
    Matrix::from_columns(&cols).unwrap_or_else(|_| Matrix::zeros(m.rows, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn diagonal_is_already_solved() {
        let e = symmetric_eigen(&Matrix::diagonal(&[1.0, 3.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        assert_eq!(e.vectors.column(0).coords(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn identity_keeps_standard_basis_order() {
        let e = symmetric_eigen(&Matrix::identity(3)).unwrap();
        assert_eq!(e.vectors, Matrix::identity(3));
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = symmetric_eigen(&a).unwrap();
        assert_abs_diff_eq!(e.values[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
        let v0 = e.vectors.column(0);
        assert_abs_diff_eq!(v0.coords()[0].abs(), sqrt(0.5), epsilon = 1e-14);
    }

    #[test]
    fn reconstruction() {
        let a = Matrix::from_rows(&[
            vec![4.0, -1.0, 0.5, 2.0],
            vec![-1.0, 3.0, 1.5, 0.0],
            vec![0.5, 1.5, -2.0, 1.0],
            vec![2.0, 0.0, 1.0, 1.0],
        ])
        .unwrap();
        let e = symmetric_eigen(&a).unwrap();
        let d = Matrix::diagonal(&e.values);
        let back = e.vectors.matmul(&d).matmul(&e.vectors.transpose());
        assert!(back.max_abs_diff(&a) < 1e-13);
        let gram = e.vectors.tr_matmul(&e.vectors);
        assert!(gram.max_abs_diff(&Matrix::identity(4)) < 1e-14);
    }

    #[test]
    fn rejects_non_symmetric() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(symmetric_eigen(&a).is_err());
    }

    #[test]
    fn gram_schmidt_drops_dependent_columns() {
        let m = Matrix::from_rows(&[
            vec![1.0, 2.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        let q = orthonormalize_columns(&m);
        assert_eq!(q.cols(), 2);
    }
}
