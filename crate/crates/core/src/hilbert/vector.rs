use std::fmt;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CVector, Projector, ZERO};
use crate::error::{Error, Result};
use crate::tolerance::STRUCTURAL;

/// Scalar field of a Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    #[serde(rename = "R")]
    Real,
    #[serde(rename = "C")]
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Real => "R",
            Field::Complex => "C",
        })
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" | "r" | "real" => Ok(Field::Real),
            "C" | "c" | "complex" => Ok(Field::Complex),
            other => Err(Error::InvalidArgument(format!("unknown field {other:?}"))),
        }
    }
}

/// A point on the unit sphere of an N-dimensional Hilbert space, N >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    field: Field,
    components: CVector,
}

impl UnitVector {
    /// Wraps already-normalized components.
    pub fn new(field: Field, components: CVector) -> Result<Self> {
        let components = check_components(field, components)?;
        let norm = components.norm();
        if (norm - 1.0).abs() > STRUCTURAL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { field, components })
    }

    /// Normalizes arbitrary non-zero components.
    pub fn normalized(field: Field, components: CVector) -> Result<Self> {
        let components = check_components(field, components)?;
        let norm = components.norm();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::DegenerateInput(format!("cannot normalize vector of norm {norm}")));
        }
        Ok(Self { field, components: components.unscale(norm) })
    }

    pub fn real(components: &[f64]) -> Result<Self> {
        Self::normalized(
            Field::Real,
            CVector::from_iterator(components.len(), components.iter().map(|&x| Complex64::new(x, 0.0))),
        )
    }

    pub fn complex(components: &[Complex64]) -> Result<Self> {
        Self::normalized(Field::Complex, CVector::from_column_slice(components))
    }

    /// The `k`-th standard basis vector.
    pub fn basis_vector(dim: usize, k: usize, field: Field) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, len: dim });
        }
        let mut c = CVector::from_element(dim, ZERO);
        c[k] = Complex64::new(1.0, 0.0);
        Self::new(field, c)
    }

    pub fn from_real3(v: &Vector3<f64>) -> Result<Self> {
        Self::real(v.as_slice())
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn components(&self) -> &CVector {
        &self.components
    }

    pub fn into_components(self) -> CVector {
        self.components
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &UnitVector) -> Complex64 {
        self.components.dotc(&other.components)
    }

    /// `|<self|other>|^2`.
    pub fn overlap(&self, other: &UnitVector) -> f64 {
        self.inner(other).norm_sqr().min(1.0)
    }

    pub fn projector(&self) -> Projector {
        Projector::rank_one(self)
    }

    /// Distance between the rays of `self` and `other`, zero iff they differ
    /// by a unit-modulus factor. Equals `sqrt(1 - overlap)`, computed as the
    /// norm of the part of `self` orthogonal to `other` so that it stays
    /// accurate near zero.
    pub fn ray_distance(&self, other: &UnitVector) -> f64 {
        let along = other.components.dotc(&self.components);
        (&self.components - &other.components * along).norm().min(1.0)
    }

    pub fn same_ray(&self, other: &UnitVector, tol: f64) -> bool {
        self.dim() == other.dim() && self.ray_distance(other) <= tol
    }

    /// Representative of the ray whose first component of largest modulus
    /// is real and positive.
    pub fn canonical_phase(&self) -> UnitVector {
        let pivot = self
            .components
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bm), (i, z)| if z.norm() > bm + 1e-12 { (i, z.norm()) } else { (bi, bm) })
            .0;
        let z = self.components[pivot];
        let phase = z.conj() / z.norm();
        let mut components = self.components.map(|c| c * phase);
        if self.field == Field::Real {
            components.iter_mut().for_each(|c| c.im = 0.0);
        }
        UnitVector { field: self.field, components }
    }

    pub fn scaled_by_phase(&self, phase: Complex64) -> Result<UnitVector> {
        if (phase.norm() - 1.0).abs() > STRUCTURAL {
            return Err(Error::InvalidArgument(format!("phase {phase} is not unit modulus")));
        }
        let field = if phase.im.abs() > 0.0 { Field::Complex } else { self.field };
        Ok(UnitVector { field, components: self.components.map(|c| c * phase) })
    }

    pub fn negated(&self) -> UnitVector {
        UnitVector { field: self.field, components: -&self.components }
    }

    /// Real 3-vector view; fails unless the vector lives in R^3.
    pub fn to_real3(&self) -> Result<Vector3<f64>> {
        if self.dim() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: self.dim() });
        }
        if self.components.iter().any(|z| z.im.abs() > STRUCTURAL) {
            return Err(Error::FieldMismatch("expected a real vector".into()));
        }
        Ok(Vector3::new(self.components[0].re, self.components[1].re, self.components[2].re))
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.components.iter().map(|z| z.re).collect()
    }
}

fn check_components(field: Field, mut components: CVector) -> Result<CVector> {
    if components.len() < 2 {
        return Err(Error::InvalidDimension(components.len()));
    }
    if components.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument("non-finite component".into()));
    }
    if field == Field::Real {
        if let Some(z) = components.iter().find(|z| z.im.abs() > STRUCTURAL) {
            return Err(Error::FieldMismatch(format!("component {z} is not real")));
        }
        components.iter_mut().for_each(|z| z.im = 0.0);
    }
    Ok(components)
}
