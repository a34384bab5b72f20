//! Wire encodings shared by every JSON format in the crate.
//!
//! A complex scalar is `[re, im]`; a vector is an array of scalars; a matrix is
//! a row-major array of rows. Writers emit plain numbers when every entry of
//! the vector or matrix is real, readers accept either form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMatrix, CVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Scalar> for Complex64 {
    fn from(s: Scalar) -> Self {
        match s {
            Scalar::Real(re) => Complex64::new(re, 0.0),
            Scalar::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

fn encode<'a>(values: impl Iterator<Item = &'a Complex64>, all_real: bool) -> Vec<Scalar> {
    values
        .map(|z| if all_real { Scalar::Real(z.re) } else { Scalar::Complex([z.re, z.im]) })
        .collect()
}

pub fn vector_to_json(v: &CVector) -> Vec<Scalar> {
    let all_real = v.iter().all(|z| z.im == 0.0);
    encode(v.iter(), all_real)
}

pub fn vector_from_json(v: &[Scalar]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&s| s.into()))
}

pub fn matrix_to_json(m: &CMatrix) -> Vec<Vec<Scalar>> {
    let all_real = m.iter().all(|z| z.im == 0.0);
    m.row_iter().map(|row| encode(row.iter(), all_real)).collect()
}

pub fn matrix_from_json(rows: &[Vec<Scalar>]) -> Result<CMatrix> {
    let n = rows.len();
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: r.len() });
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j].into()))
}

/// Serde adapter for square matrices, usable with `#[serde(with = ...)]`.
pub mod matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_json(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<Scalar>>::deserialize(d)?;
        matrix_from_json(&rows).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for vectors.
pub mod vector {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> std::result::Result<S::Ok, S::Error> {
        vector_to_json(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CVector, D::Error> {
        Ok(vector_from_json(&Vec::<Scalar>::deserialize(d)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_scalars_are_pairs() {
        let v = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, -2.0)]);
        assert_eq!(serde_json::to_string(&vector_to_json(&v)).unwrap(), "[[1.0,0.0],[0.5,-2.0]]");
        let r = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)]);
        assert_eq!(serde_json::to_string(&vector_to_json(&r)).unwrap(), "[1.0,0.5]");
    }

    #[test]
    fn mixed_input_is_accepted() {
        let rows: Vec<Vec<Scalar>> = serde_json::from_str("[[1, [0, 1]], [[0, -1], 2.5]]").unwrap();
        let m = matrix_from_json(&rows).unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 1.0));
        assert_eq!(m[(1, 1)], Complex64::new(2.5, 0.0));
        assert!(matrix_from_json(&rows[..1]).is_err());
    }
}
