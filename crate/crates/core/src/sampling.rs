//! Deterministic random inputs.
//!
//! Every sample comes from a ChaCha stream addressed by `(seed, stream, index)`,
//! so a trial can be regenerated on its own regardless of how many trials ran
//! before it or on which thread.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::float::sqrt;
use crate::linalg::{orthonormalize_columns, Matrix};
use crate::space::Vector;

pub type TrialRng = ChaCha8Rng;

/// Words reserved per trial inside one stream.
const TRIAL_WORDS_LOG2: u32 = 36;

pub fn trial_rng(seed: u64, stream: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) << TRIAL_WORDS_LOG2);
    rng
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    Vector::new((0..n).map(|_| gaussian(rng)).collect())
}

/// Uniform on the Euclidean unit sphere of `R^n`.
pub fn unit_sphere<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    loop {
        let g = gaussian_vector(rng, n);
        let len = sqrt(g.coords().iter().map(|v| v * v).sum());
        if len > 1e-300 {
            return g.scaled(1.0 / len);
        }
    }
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    let data: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| gaussian(rng)).collect())
        .collect();
    Matrix::from_rows(&data).expect("positive shape")
}

/// Haar-ish orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    loop {
        let q = orthonormalize_columns(&gaussian_matrix(rng, n, n));
        if q.cols() == n {
            return q;
        }
    }
}

/// `U diag(values) V^T` with random orthogonal `U` (rows x rows) and `V`
/// (cols x cols); `values` fills the leading diagonal, the rest is zero.
pub fn with_singular_values<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    values: &[f64],
) -> Matrix {
    assert!(values.len() <= rows.min(cols), "too many singular values");
    let u = random_orthogonal(rng, rows);
    let v = random_orthogonal(rng, cols);
    let mut s = Matrix::zeros(rows, cols);
    for (i, sv) in values.iter().enumerate() {
        s[(i, i)] = *sv;
    }
    u.matmul(&s).matmul(&v.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eigen;

    #[test]
    fn trials_are_addressable() {
        let a = gaussian_vector(&mut trial_rng(7, 3, 41), 4);
        let b = gaussian_vector(&mut trial_rng(7, 3, 41), 4);
        let c = gaussian_vector(&mut trial_rng(7, 3, 42), 4);
        let d = gaussian_vector(&mut trial_rng(7, 4, 41), 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn prescribed_singular_values() {
        let mut rng = trial_rng(1, 0, 0);
        let m = with_singular_values(&mut rng, 4, 3, &[3.0, 3.0, 1.0]);
        let e = symmetric_eigen(&m.tr_matmul(&m)).unwrap();
        for (got, want) in e.values.iter().zip([9.0, 9.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }
}
