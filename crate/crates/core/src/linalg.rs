//! Small dense helpers over `&[f64]` points plus an SPD matrix newtype.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Symmetric positive-definite matrix with its Cholesky factor and extreme
/// eigenvalues cached.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    matrix: DMatrix<f64>,
    /// Lower-triangular `L` with `Q = L Lᵀ`.
    chol_lower: DMatrix<f64>,
    eigen_min: f64,
    eigen_max: f64,
}

impl SpdMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(Error::NotSpd);
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotSpd);
        }
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > 1e-12 * matrix.amax().max(1.0) {
            return Err(Error::NotSpd);
        }
        let chol = matrix.clone().cholesky().ok_or(Error::NotSpd)?;
        let eig = matrix.clone().symmetric_eigen();
        let eigen_min = eig.eigenvalues.min();
        let eigen_max = eig.eigenvalues.max();
        if eigen_min <= 0.0 {
            return Err(Error::NotSpd);
        }
        Ok(Self {
            matrix,
            chol_lower: chol.l(),
            eigen_min,
            eigen_max,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSpd);
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim)).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn chol_lower(&self) -> &DMatrix<f64> {
        &self.chol_lower
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigen_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigen_max
    }

    pub fn is_identity(&self) -> bool {
        let n = self.dim();
        self.matrix == DMatrix::identity(n, n)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.matrix * DVector::from_column_slice(x);
        v.as_slice().to_vec()
    }

    /// `xᵀ Q x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.apply(x))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)]).collect())
            .collect()
    }
}

impl serde::Serialize for SpdMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_indefinite_and_asymmetric() {
        assert_eq!(SpdMatrix::diagonal(&[1.0, -1.0]), Err(Error::NotSpd));
        assert_eq!(
            SpdMatrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 2.0]]),
            Err(Error::NotSpd)
        );
    }

    #[test]
    fn caches_extreme_eigenvalues() {
        let q = SpdMatrix::diagonal(&[4.0, 1.0]).unwrap();
        assert_eq!(q.lambda_max(), 4.0);
        assert_eq!(q.lambda_min(), 1.0);
        assert_eq!(q.quad_form(&[1.0, 1.0]), 5.0);
        assert!(!q.is_identity());
        assert!(SpdMatrix::identity(3).is_identity());
    }
}
