use std::f64::consts::PI;

use num_complex::Complex64;

use super::{hermitize, CMatrix, UnitaryMatrix};
use crate::error::{Error, Result};

/// Branch-cut rotation used when taking eigenvalue logarithms: eigenvalues
/// at (or numerically next to) -1 all receive the angle +pi.
const BRANCH_SHIFT: f64 = 1e-9;

/// Bijection of `0..n`, stored as the image of each index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection of 0..{n}")));
            }
        }
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Transposition of `a` and `b`.
    pub fn swap(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut v: Vec<usize> = (0..n).collect();
        if a >= n || b >= n {
            return Err(Error::InvalidPermutation(format!("swap ({a} {b}) in dimension {n}")));
        }
        v.swap(a, b);
        Ok(Self(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// +1 for even permutations, -1 for odd ones.
    pub fn sign(&self) -> i32 {
        let mut seen = vec![false; self.len()];
        let mut sign = 1;
        for start in 0..self.len() {
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            if len > 0 && len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }
}

impl std::str::FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let images = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| Error::InvalidPermutation(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(images)
    }
}

/// Hermitian `H` with `U = exp(iH)`, eigen-angles taken on the principal
/// branch `(-pi, pi]`.
///
/// Uses the complex Schur form, which is diagonal for normal matrices.
pub fn principal_generator(u: &UnitaryMatrix) -> Result<CMatrix> {
    let (q, t) = u.matrix().clone().schur().unpack();
    let n = u.dim();
    let off_diagonal = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| t[(i, j)].norm())
        .fold(0.0, f64::max);
    if off_diagonal > 1e-8 {
        return Err(Error::InvalidArgument(format!("Schur form not diagonal ({off_diagonal:e})")));
    }
    let shift = Complex64::from_polar(1.0, -BRANCH_SHIFT);
    let angles = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new((t[(i, i)] * shift).arg() + BRANCH_SHIFT, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(hermitize(&(&q * angles * q.adjoint())))
}

/// `steps + 1` matrices `U(k / steps) = exp(i k H / steps)` joining the
/// identity to `target`.
pub fn unitary_path(target: &UnitaryMatrix, steps: usize) -> Result<Vec<UnitaryMatrix>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("steps must be at least 2, got {steps}")));
    }
    let generator = principal_generator(target)?;
    let eig = generator.clone().symmetric_eigen();
    let v = eig.eigenvectors;
    let n = target.dim();
    let mut path = Vec::with_capacity(steps + 1);
    path.push(UnitaryMatrix::identity(n));
    for k in 1..steps {
        let t = k as f64 / steps as f64;
        let d = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, t * eig.eigenvalues[i])
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        path.push(UnitaryMatrix::new(&v * d * v.adjoint())?);
    }
    path.push(target.clone());
    Ok(path)
}

/// Continuous unitary path from the identity to the permutation matrix of
/// `perm`, sampled at `steps + 1` equally spaced times.
///
/// Odd permutations have determinant -1, so the interior of the path is
/// necessarily complex.
pub fn unitary_path_to_permutation(perm: &Permutation, steps: usize) -> Result<Vec<UnitaryMatrix>> {
    if perm.len() < 2 {
        return Err(Error::InvalidDimension(perm.len()));
    }
    unitary_path(&UnitaryMatrix::permutation(perm), steps)
}

/// Bound on the operator-norm distance between consecutive path samples.
pub fn path_step_bound(steps: usize) -> f64 {
    2.0 * PI / steps as f64
}
