//! Thin wrappers around the dense symmetric eigensolver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct SortedEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn eigh_ascending(m: &DMatrix<f64>) -> SortedEigen {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let n = m.nrows();
    let mut vectors = DMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        values.push(eig.eigenvalues[k]);
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    SortedEigen { values, vectors }
}

pub fn eigvals_symmetric(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Lowest eigenpair and the gap to the next level (`inf` for 1x1 matrices).
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub vector: DVector<f64>,
    pub gap: f64,
}

pub fn ground_state(m: &DMatrix<f64>) -> GroundState {
    let eig = eigh_ascending(m);
    let mut vector: DVector<f64> = eig.vectors.column(0).into_owned();
    // fix the global sign: largest-magnitude component positive
    let pivot = vector.iamax();
    if vector[pivot] < 0.0 {
        vector.neg_mut();
    }
    GroundState {
        energy: eig.values[0],
        vector,
        gap: eig
            .values
            .get(1)
            .map_or(f64::INFINITY, |e1| e1 - eig.values[0]),
    }
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}
