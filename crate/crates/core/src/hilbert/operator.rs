use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    hermitian_eigen, hermiticity_defect, hermitize, max_entry_distance, trace_product, CMatrix, OrthonormalBasis,
    Permutation, UnitVector, ONE, ZERO,
};
use crate::error::{Error, Result};
use crate::tolerance::{DERIVED, STRUCTURAL};

/// Orthogonal projector: hermitian, idempotent, integer trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: CMatrix,
    rank: usize,
}

impl Projector {
    pub fn rank_one(v: &UnitVector) -> Self {
        let c = v.components();
        Self { matrix: c * c.adjoint(), rank: 1 }
    }

    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let h = hermiticity_defect(&matrix);
        if h > STRUCTURAL {
            return Err(Error::NotHermitian(h));
        }
        let idem = max_entry_distance(&(&matrix * &matrix), &matrix);
        if idem > DERIVED {
            return Err(Error::NotProjector(format!("P^2 - P deviates by {idem:e}")));
        }
        let tr = matrix.trace().re;
        let rank = tr.round();
        if (tr - rank).abs() > DERIVED || rank < 1.0 {
            return Err(Error::NotProjector(format!("trace {tr} is not a positive integer")));
        }
        Ok(Self { matrix, rank: rank as usize })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn distance(&self, other: &Projector) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_entry_distance(&self.matrix, &other.matrix)
    }

    /// `U P U^dagger`.
    pub fn conjugated_by(&self, u: &UnitaryMatrix) -> Result<Self> {
        check_dim(self.dim(), u.dim())?;
        Projector::from_matrix(hermitize(&(u.matrix() * &self.matrix * u.matrix().adjoint())))
    }

    /// A unit vector spanning the range of a rank-1 projector.
    pub fn range_vector(&self) -> Result<UnitVector> {
        if self.rank != 1 {
            return Err(Error::InvalidArgument(format!("projector has rank {}", self.rank)));
        }
        let col = (0..self.dim())
            .max_by(|&a, &b| self.matrix[(a, a)].re.total_cmp(&self.matrix[(b, b)].re))
            .unwrap_or(0);
        let field = if self.matrix.iter().all(|z| z.im == 0.0) { super::Field::Real } else { super::Field::Complex };
        UnitVector::normalized(field, self.matrix.column(col).into_owned())
    }
}

/// Positive semidefinite hermitian operator with unit trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RhoJson", into = "RhoJson")]
pub struct DensityMatrix {
    matrix: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct RhoJson(#[serde(with = "super::json::matrix")] CMatrix);

impl TryFrom<RhoJson> for DensityMatrix {
    type Error = Error;
    fn try_from(j: RhoJson) -> Result<Self> {
        DensityMatrix::new(j.0)
    }
}

impl From<DensityMatrix> for RhoJson {
    fn from(r: DensityMatrix) -> Self {
        RhoJson(r.matrix)
    }
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        if matrix.nrows() < 2 {
            return Err(Error::InvalidDimension(matrix.nrows()));
        }
        let h = hermiticity_defect(&matrix);
        if h > STRUCTURAL {
            return Err(Error::NotHermitian(h));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > DERIVED {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let (values, _) = hermitian_eigen(&matrix);
        let min = values.last().copied().unwrap_or(0.0);
        if min < -DERIVED {
            return Err(Error::NotDensityMatrix(format!("eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    pub fn pure(v: &UnitVector) -> Self {
        Self { matrix: Projector::rank_one(v).matrix }
    }

    pub fn from_projector(p: &Projector) -> Result<Self> {
        if p.rank() != 1 {
            return Err(Error::InvalidArgument(format!("projector has rank {}", p.rank())));
        }
        Ok(Self { matrix: p.matrix.clone() })
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(CMatrix::identity(dim, dim).map(|z| z / dim as f64))
    }

    /// `sum_i weights[i] |b_i><b_i|`.
    pub fn from_spectrum(weights: &[f64], basis: &OrthonormalBasis) -> Result<Self> {
        if weights.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: weights.len() });
        }
        let mut m = CMatrix::zeros(basis.dim(), basis.dim());
        for (w, v) in weights.iter().zip(basis.vectors()) {
            m += Projector::rank_one(v).matrix.map(|z| z * *w);
        }
        Self::new(hermitize(&m))
    }

    /// Nearest density matrix to a hermitian estimate: eigenvalues clipped at
    /// zero, then rescaled to unit trace. A non-positive estimate maps to the
    /// maximally mixed state.
    pub fn project_psd(estimate: &CMatrix) -> Result<Self> {
        let n = estimate.nrows();
        let (values, vectors) = hermitian_eigen(estimate);
        let clipped: Vec<f64> = values.iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if !(total > 1e-12) {
            return Self::maximally_mixed(n);
        }
        let mut m = CMatrix::zeros(n, n);
        for (k, &l) in clipped.iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            let c = vectors.column(k);
            m += (c * c.adjoint()).map(|z| z * (l / total));
        }
        Self::new(hermitize(&m))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    /// Eigenvalues (descending) and the matching eigenvectors as a basis.
    pub fn eigen(&self, field: super::Field) -> Result<(Vec<f64>, OrthonormalBasis)> {
        let (values, vectors) = hermitian_eigen(&self.matrix);
        let mut vectors = vectors;
        if field == super::Field::Real {
            vectors.iter_mut().for_each(|z| z.im = 0.0);
        }
        let columns: Vec<_> = vectors.column_iter().map(|c| c.into_owned()).collect();
        Ok((values, super::gram_schmidt(field, &columns, "eigen")?))
    }

    /// `<x|rho|x>`.
    pub fn expectation(&self, x: &UnitVector) -> Result<f64> {
        check_dim(self.dim(), x.dim())?;
        let c = x.components();
        Ok(c.dotc(&(&self.matrix * c)).re)
    }

    pub fn conjugated_by(&self, u: &UnitaryMatrix) -> Result<Self> {
        check_dim(self.dim(), u.dim())?;
        Self::new(hermitize(&(u.matrix() * &self.matrix * u.matrix().adjoint())))
    }

    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        max_entry_distance(&self.matrix, &other.matrix)
    }

    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im.abs() <= STRUCTURAL)
    }
}

/// Square matrix with `U^dagger U = I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UnitaryJson", into = "UnitaryJson")]
pub struct UnitaryMatrix {
    matrix: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct UnitaryJson(#[serde(with = "super::json::matrix")] CMatrix);

impl TryFrom<UnitaryJson> for UnitaryMatrix {
    type Error = Error;
    fn try_from(j: UnitaryJson) -> Result<Self> {
        UnitaryMatrix::with_tolerance(j.0, 1e-8)
    }
}

impl From<UnitaryMatrix> for UnitaryJson {
    fn from(u: UnitaryMatrix) -> Self {
        UnitaryJson(u.matrix)
    }
}

impl UnitaryMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DERIVED)
    }

    pub fn with_tolerance(matrix: CMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let d = unitarity_defect(&matrix);
        if d > tol {
            return Err(Error::NotUnitary(d));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim) }
    }

    /// Matrix sending `e_j` to `e_{perm[j]}`.
    pub fn permutation(perm: &Permutation) -> Self {
        let n = perm.len();
        let mut m = CMatrix::from_element(n, n, ZERO);
        for (j, &i) in perm.as_slice().iter().enumerate() {
            m[(i, j)] = ONE;
        }
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    pub fn compose(&self, other: &UnitaryMatrix) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self { matrix: &self.matrix * &other.matrix })
    }

    pub fn determinant(&self) -> Complex64 {
        self.matrix.determinant()
    }

    /// `max |(U^dagger U - I)_ij|`.
    pub fn defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }

    pub fn apply(&self, v: &UnitVector) -> Result<UnitVector> {
        check_dim(self.dim(), v.dim())?;
        let out = &self.matrix * v.components();
        let field = if v.field() == super::Field::Real && self.is_real() {
            super::Field::Real
        } else {
            super::Field::Complex
        };
        UnitVector::normalized(field, out)
    }

    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0)
    }

    /// Largest imaginary part among the entries.
    pub fn max_imaginary(&self) -> f64 {
        self.matrix.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

pub(crate) fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_entry_distance(&(m.adjoint() * m), &CMatrix::identity(n, n))
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Probability `trace(rho P)` of the outcome represented by the rank-1
/// projector `p`, clamped to `[0, 1]`.
pub fn born_probability(p: &Projector, rho: &DensityMatrix) -> Result<f64> {
    check_dim(p.dim(), rho.dim())?;
    if p.rank() != 1 {
        return Err(Error::InvalidArgument(format!("projector has rank {}", p.rank())));
    }
    let t = trace_product(rho.matrix(), p.matrix());
    debug_assert!(t.im.abs() <= STRUCTURAL * p.dim() as f64, "trace(rho P) has imaginary part {}", t.im);
    debug_assert!((-DERIVED..=1.0 + DERIVED).contains(&t.re), "trace(rho P) = {}", t.re);
    Ok(t.re.clamp(0.0, 1.0))
}

/// Born probabilities of every outcome of `target`, starting from the pure
/// state projected by `state`. This is the single code path used for exact
/// transition tables everywhere in the crate.
pub fn transition_probabilities(state: &Projector, target: &OrthonormalBasis) -> Result<Vec<f64>> {
    let rho = DensityMatrix::from_projector(state)?;
    target.projectors().iter().map(|q| born_probability(q, &rho)).collect()
}
