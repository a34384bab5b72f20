//! Finite-dimensional Hilbert-space machinery over the real or complex field.
//!
//! Everything is stored with complex scalars; a [`Field`] tag records whether
//! a value is constrained to the reals. Real-field values always carry exactly
//! zero imaginary parts.

mod basis;
pub mod json;
mod operator;
mod path;
mod random;
mod vector;

pub use basis::{basis_containing, basis_containing_with, gram_schmidt, OrthonormalBasis};
pub use operator::{born_probability, transition_probabilities, DensityMatrix, Projector, UnitaryMatrix};
pub use path::{path_step_bound, principal_generator, unitary_path, unitary_path_to_permutation, Permutation};
pub use random::{
    random_basis, random_basis_with, random_density_matrix, random_unit_vector, random_unitary,
};
pub use vector::{Field, UnitVector};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest entrywise modulus of `a - b`.
pub fn max_entry_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub(crate) fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_entry_distance(m, &m.adjoint())
}

pub(crate) fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// `trace(a * b)` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}
