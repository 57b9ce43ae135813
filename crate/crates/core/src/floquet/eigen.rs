use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::ExtendedMatrix;
use crate::error::{invalid, FloquetError, Result};

const MAX_SWEEPS: usize = 10_000;

/// Full real spectral decomposition; `vectors.column(i)` pairs with `values[i]`.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigenpairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Diagonalizes a real symmetric matrix (implicit QL with Wilkinson shifts).
pub fn diagonalize_symmetric(m: &ExtendedMatrix) -> Result<Eigenpairs> {
    diagonalize_dense(&m.entries)
}

pub fn diagonalize_dense(m: &DMatrix<f64>) -> Result<Eigenpairs> {
    if !m.is_square() {
        return Err(invalid("matrix", "must be square"));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(invalid("matrix", "contains non-finite entries"));
    }
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            if m[(i, j)] != m[(j, i)] {
                return Err(invalid("matrix", format!("not symmetric at ({i}, {j})")));
            }
        }
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, MAX_SWEEPS).ok_or(
        FloquetError::NonConvergence {
            what: "symmetric eigensolver",
            iterations: MAX_SWEEPS,
            residual: f64::NAN,
        },
    )?;
    Ok(Eigenpairs {
        values: eig.eigenvalues.iter().copied().collect(),
        vectors: eig.eigenvectors,
    })
}
