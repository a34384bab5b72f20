use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::{CMatrix, CVector, DensityMatrix, Field, OrthonormalBasis, UnitVector, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::seed;

fn gaussian_scalar<R: Rng + ?Sized>(field: Field, rng: &mut R) -> Complex64 {
    match field {
        Field::Real => Complex64::new(rng.sample(StandardNormal), 0.0),
        Field::Complex => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            Complex64::new(s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal))
        }
    }
}

pub(crate) fn gaussian_vector<R: Rng + ?Sized>(dim: usize, field: Field, rng: &mut R) -> CVector {
    CVector::from_fn(dim, |_, _| gaussian_scalar(field, rng))
}

/// Uniformly distributed point on the unit sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, field: Field, rng: &mut R) -> Result<UnitVector> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    loop {
        match UnitVector::normalized(field, gaussian_vector(dim, field, rng)) {
            Ok(v) => return Ok(v),
            Err(Error::DegenerateInput(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Haar-distributed orthogonal (real field) or unitary (complex field) matrix.
///
/// QR-factorizes a matrix of independent standard Gaussians and multiplies
/// each column of Q by the phase of the matching diagonal entry of R, which
/// removes the bias of the factorization's sign convention.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, field: Field, rng: &mut R) -> Result<UnitaryMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian_scalar(field, rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    if field == Field::Real {
        q.iter_mut().for_each(|z| z.im = 0.0);
    }
    UnitaryMatrix::new(q)
}

/// Columns of a Haar-random unitary, labelled `random-<seed>`.
pub fn random_basis(dim: usize, field: Field, seed: u64) -> Result<OrthonormalBasis> {
    random_basis_with(dim, field, &mut seed::rng(seed), format!("random-{seed}"))
}

pub fn random_basis_with<R: Rng + ?Sized>(
    dim: usize,
    field: Field,
    rng: &mut R,
    label: impl Into<String>,
) -> Result<OrthonormalBasis> {
    let u = random_unitary(dim, field, rng)?;
    OrthonormalBasis::from_columns(label, field, u.matrix())
}

/// Random density matrix of the given rank: spectrum uniform on the simplex,
/// eigenbasis Haar-random.
pub fn random_density_matrix<R: Rng + ?Sized>(
    dim: usize,
    field: Field,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidArgument(format!("rank {rank} for dimension {dim}")));
    }
    let mut weights: Vec<f64> = (0..dim).map(|i| if i < rank { Exp1.sample(rng) } else { 0.0 }).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let basis = random_basis_with(dim, field, rng, "eigen")?;
    DensityMatrix::from_spectrum(&weights, &basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_bases_repeat() {
        assert_eq!(random_basis(3, Field::Complex, 42).unwrap(), random_basis(3, Field::Complex, 42).unwrap());
        assert_ne!(random_basis(3, Field::Complex, 42).unwrap(), random_basis(3, Field::Complex, 43).unwrap());
    }

    #[test]
    fn real_bases_are_real_orthonormal() {
        for s in 0..20 {
            let b = random_basis(4, Field::Real, s).unwrap();
            assert_eq!(b.field(), Field::Real);
            assert!(b.matrix().iter().all(|z| z.im == 0.0));
        }
    }

    #[test]
    fn density_matrices_have_requested_rank() {
        let mut rng = seed::rng(5);
        let rho = random_density_matrix(4, Field::Complex, 2, &mut rng).unwrap();
        let ev = rho.eigenvalues();
        assert!(ev[1] > 1e-6 && ev[2].abs() < 1e-12 && ev[3].abs() < 1e-12);
    }
}
