use serde::{Deserialize, Serialize};

use super::FrameFunction;
use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, Field, OrthonormalBasis, UnitVector};
use crate::tolerance::STRUCTURAL;

/// Mixed-state frame function on R^3,
/// `f(u) = M cos^2(u,p) + m cos^2(u,q) + (1 - M - m) cos^2(u,r)`,
/// with `M` the maximum and `m` the minimum of `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralFrameParams {
    max: f64,
    min: f64,
    basis: OrthonormalBasis,
}

impl GeneralFrameParams {
    /// Requires `0 <= m <= 1 - M - m <= M <= 1`, which makes `M` and `m`
    /// the extreme values; `basis` is `{p, q, r}` in R^3.
    pub fn new(max: f64, min: f64, basis: OrthonormalBasis) -> Result<Self> {
        if basis.dim() != 3 || basis.field() != Field::Real {
            return Err(Error::InvalidParams("basis must be an orthonormal basis of R^3".into()));
        }
        let middle = 1.0 - max - min;
        let t = STRUCTURAL;
        if !(min >= -t && max <= 1.0 + t && max + min <= 1.0 + t) {
            return Err(Error::InvalidParams(format!("need 0 <= m, M <= 1, M + m <= 1 (M = {max}, m = {min})")));
        }
        if !(min <= middle + t && middle <= max + t) {
            return Err(Error::InvalidParams(format!(
                "need m <= 1 - M - m <= M (M = {max}, m = {min}, 1 - M - m = {middle})"
            )));
        }
        Ok(Self { max, min, basis })
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn weights(&self) -> [f64; 3] {
        [self.max, self.min, 1.0 - self.max - self.min]
    }

    pub fn basis(&self) -> &OrthonormalBasis {
        &self.basis
    }

    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_spectrum(&self.weights(), &self.basis)
    }

    pub fn frame_function(&self) -> FrameFunction {
        let params = self.clone();
        FrameFunction::closed_form(3, Field::Real, "general", move |u| {
            eval_general_form(&params, u).expect("arguments validated by the frame function")
        })
    }
}

pub fn eval_general_form(params: &GeneralFrameParams, u: &UnitVector) -> Result<f64> {
    if u.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: u.dim() });
    }
    let value = params.weights().iter().zip(params.basis.vectors()).map(|(w, b)| w * b.overlap(u)).sum();
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard() -> OrthonormalBasis {
        OrthonormalBasis::standard(3, Field::Real, "pqr").unwrap()
    }

    #[test]
    fn pole_of_a_pure_state() {
        let p = GeneralFrameParams::new(1.0, 0.0, standard()).unwrap();
        let u = UnitVector::basis_vector(3, 0, Field::Real).unwrap();
        assert_eq!(eval_general_form(&p, &u).unwrap(), 1.0);
    }

    #[test]
    fn maximally_mixed_is_flat() {
        let third = 1.0 / 3.0;
        let p = GeneralFrameParams::new(third, third, standard()).unwrap();
        let u = UnitVector::real(&[0.3, -0.9, 0.2]).unwrap();
        assert!((eval_general_form(&p, &u).unwrap() - third).abs() < 1e-12);
    }

    #[test]
    fn axis_values() {
        let p = GeneralFrameParams::new(0.6, 0.1, standard()).unwrap();
        let q = UnitVector::basis_vector(3, 1, Field::Real).unwrap();
        let r = UnitVector::basis_vector(3, 2, Field::Real).unwrap();
        assert!((eval_general_form(&p, &q).unwrap() - 0.1).abs() < 1e-12);
        assert!((eval_general_form(&p, &r).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(GeneralFrameParams::new(0.7, 0.4, standard()), Err(Error::InvalidParams(_))));
        assert!(matches!(GeneralFrameParams::new(0.3, 0.5, standard()), Err(Error::InvalidParams(_))));
        assert!(GeneralFrameParams::new(0.9, 0.05, standard()).is_ok());
        let c = OrthonormalBasis::standard(3, Field::Complex, "c").unwrap();
        assert!(GeneralFrameParams::new(0.6, 0.1, c).is_err());
    }
}
