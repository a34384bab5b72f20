use rand::Rng;
use serde::{Deserialize, Serialize};

use super::json::{vector_from_json, vector_to_json, Scalar};
use super::{CMatrix, CVector, Field, Projector, UnitVector};
use crate::error::{Error, Result};
use crate::seed;
use crate::tolerance::DERIVED;

/// An ordered orthonormal basis with an identifying label; a measurement
/// context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BasisJson", into = "BasisJson")]
pub struct OrthonormalBasis {
    label: String,
    field: Field,
    vectors: Vec<UnitVector>,
}

impl OrthonormalBasis {
    pub fn new(label: impl Into<String>, vectors: Vec<UnitVector>) -> Result<Self> {
        let dim = vectors.first().map(UnitVector::dim).ok_or(Error::InvalidDimension(0))?;
        if vectors.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: vectors.len() });
        }
        if let Some(v) = vectors.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: v.dim() });
        }
        let field = if vectors.iter().all(|v| v.field() == Field::Real) { Field::Real } else { Field::Complex };
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in (i + 1)..dim {
                worst = worst.max(vectors[i].inner(&vectors[j]).norm());
            }
        }
        if worst > DERIVED {
            return Err(Error::NotOrthonormal(worst));
        }
        Ok(Self { label: label.into(), field, vectors })
    }

    /// Standard basis `e_0 .. e_{dim-1}`.
    pub fn standard(dim: usize, field: Field, label: impl Into<String>) -> Result<Self> {
        let vectors = (0..dim).map(|k| UnitVector::basis_vector(dim, k, field)).collect::<Result<_>>()?;
        Self::new(label, vectors)
    }

    /// Basis made of the columns of `m`.
    pub fn from_columns(label: impl Into<String>, field: Field, m: &CMatrix) -> Result<Self> {
        let vectors = m
            .column_iter()
            .map(|c| UnitVector::new(field, c.into_owned()))
            .collect::<Result<_>>()?;
        Self::new(label, vectors)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[UnitVector] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> Result<&UnitVector> {
        self.vectors.get(i).ok_or(Error::IndexOutOfRange { index: i, len: self.dim() })
    }

    pub fn projectors(&self) -> Vec<Projector> {
        self.vectors.iter().map(UnitVector::projector).collect()
    }

    /// Matrix whose columns are the basis vectors.
    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim(), self.dim(), |r, c| self.vectors[c].components()[r])
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Reordered copy: position `i` of the result holds vector `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let perm = super::Permutation::new(order.to_vec())?;
        if perm.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: perm.len() });
        }
        Ok(Self {
            label: self.label.clone(),
            field: self.field,
            vectors: perm.as_slice().iter().map(|&i| self.vectors[i].clone()).collect(),
        })
    }

    /// Copy with each vector multiplied by the matching unit-modulus phase.
    pub fn rephased(&self, phases: &[num_complex::Complex64]) -> Result<Self> {
        if phases.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: phases.len() });
        }
        let vectors = self
            .vectors
            .iter()
            .zip(phases)
            .map(|(v, &p)| v.scaled_by_phase(p))
            .collect::<Result<_>>()?;
        Self::new(self.label.clone(), vectors)
    }
}

/// Orthonormalizes `vectors` (modified Gram-Schmidt, two passes).
///
/// The first output vector is parallel to the first input vector.
pub fn gram_schmidt(field: Field, vectors: &[CVector], label: impl Into<String>) -> Result<OrthonormalBasis> {
    let dim = vectors.first().map(|v| v.len()).ok_or(Error::InvalidDimension(0))?;
    if vectors.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: vectors.len() });
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
    }
    let m = CMatrix::from_columns(vectors);
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let smallest = m.singular_values().iter().copied().fold(f64::INFINITY, f64::min);
    if !(smallest > 1e-8 * scale.max(1.0)) {
        return Err(Error::DegenerateInput(format!("smallest singular value {smallest:e}")));
    }
    let mut out: Vec<CVector> = Vec::with_capacity(dim);
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dotc(&w);
                w -= q * c;
            }
        }
        let n = w.norm();
        out.push(w.unscale(n));
    }
    let vectors = out.into_iter().map(|c| UnitVector::normalized(field, c)).collect::<Result<_>>()?;
    OrthonormalBasis::new(label, vectors)
}

/// A basis whose first vector is exactly `v`; the remaining vectors are a
/// random orthonormal completion drawn from `seed`.
pub fn basis_containing(v: &UnitVector, seed: u64) -> Result<OrthonormalBasis> {
    basis_containing_with(v, &mut seed::rng(seed), format!("ctx-{seed}"))
}

pub fn basis_containing_with<R: Rng + ?Sized>(
    v: &UnitVector,
    rng: &mut R,
    label: impl Into<String>,
) -> Result<OrthonormalBasis> {
    let dim = v.dim();
    let field = v.field();
    loop {
        let mut columns = vec![v.components().clone()];
        for _ in 1..dim {
            columns.push(super::random::gaussian_vector(dim, field, rng));
        }
        match gram_schmidt(field, &columns, "") {
            Ok(b) => {
                let mut vectors = b.vectors;
                // keep the caller's vector bit-for-bit
                vectors[0] = v.clone();
                return OrthonormalBasis::new(label, vectors);
            }
            Err(Error::DegenerateInput(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct BasisJson {
    dim: usize,
    field: Field,
    label: String,
    vectors: Vec<Vec<Scalar>>,
}

impl TryFrom<BasisJson> for OrthonormalBasis {
    type Error = Error;

    fn try_from(j: BasisJson) -> Result<Self> {
        let vectors = j
            .vectors
            .iter()
            .map(|v| UnitVector::new(j.field, vector_from_json(v)))
            .collect::<Result<Vec<_>>>()?;
        if vectors.len() != j.dim {
            return Err(Error::DimensionMismatch { expected: j.dim, found: vectors.len() });
        }
        let mut b = OrthonormalBasis::new(j.label, vectors)?;
        b.field = j.field;
        Ok(b)
    }
}

impl From<OrthonormalBasis> for BasisJson {
    fn from(b: OrthonormalBasis) -> Self {
        BasisJson {
            dim: b.dim(),
            field: b.field,
            vectors: b.vectors.iter().map(|v| vector_to_json(v.components())).collect(),
            label: b.label,
        }
    }
}
