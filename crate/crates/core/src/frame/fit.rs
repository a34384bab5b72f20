use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_frame_condition, check_frame_condition_on, FrameFunction, FrameKind};
use crate::error::{Error, Result};
use crate::hilbert::{json, random_unit_vector, CMatrix, CVector, DensityMatrix, Field, OrthonormalBasis, UnitVector};
use crate::seed;
use crate::tolerance::Tolerances;

/// Bases drawn when a fit double-checks the frame condition.
const FRAME_BASES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Regular,
    ViolatesFrame,
    NotRegular,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    #[serde(with = "json::vector")]
    pub v: CVector,
    pub f: f64,
    pub fitted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub fitted_rho: DensityMatrix,
    /// Largest `|<x|rho|x> - f(x)|` over the validation sample.
    pub max_residual: f64,
    pub n_samples: usize,
    /// Frame-condition deviation, `None` when no basis could be checked.
    pub frame_deviation: Option<f64>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame_witness: Option<OrthonormalBasis>,
}

pub fn reconstruct_rho(f: &FrameFunction, n_samples: usize, seed: u64) -> Result<RegularityReport> {
    reconstruct_rho_with(f, n_samples, seed, &Tolerances::default())
}

/// Fits the hermitian form closest (least squares) to `f` on sampled unit
/// vectors, projects it onto the density-matrix cone and validates the result
/// on a fresh sample.
///
/// Tabulated functions are fitted and validated on their stored directions,
/// and their frame condition is checked on the bases the table contains.
pub fn reconstruct_rho_with(
    f: &FrameFunction,
    n_samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<RegularityReport> {
    let dim = f.dim();
    let needed = dim * dim;
    let (fit_points, validation) = match f.entries() {
        Some(entries) => {
            let pts: Vec<UnitVector> = entries.iter().map(|e| e.v.clone()).collect();
            (pts.clone(), pts)
        }
        None => (
            sample_sphere(dim, f.field(), n_samples, seed::split(seed, 0))?,
            sample_sphere(dim, f.field(), n_samples, seed::split(seed, 1))?,
        ),
    };
    if fit_points.len() < needed {
        return Err(Error::InsufficientSamples { needed, got: fit_points.len() });
    }
    let values = fit_points.par_iter().map(|x| f.evaluate(x)).collect::<Result<Vec<_>>>()?;
    let form = fit_hermitian_form(&fit_points, &values, f.field())?;
    let fitted_rho = DensityMatrix::project_psd(&form)?;

    let residuals = validation
        .par_iter()
        .map(|x| {
            let fx = f.evaluate(x)?;
            let fitted = fitted_rho.expectation(x)?;
            Ok(((fitted - fx).abs(), fx, fitted))
        })
        .collect::<Result<Vec<_>>>()?;
    let (worst, &(max_residual, fx, fitted)) = residuals
        .iter()
        .enumerate()
        .reduce(|a, b| if b.1 .0 > a.1 .0 { b } else { a })
        .expect("non-empty validation sample");

    let frame = if f.kind() == FrameKind::Tabulated {
        let bases = f.stored_bases(10_000);
        if bases.is_empty() {
            None
        } else {
            Some(check_frame_condition_on(f, &bases)?)
        }
    } else {
        Some(check_frame_condition(f, FRAME_BASES, seed::split(seed, 2))?)
    };
    let frame_deviation = frame.as_ref().map(|r| r.max_deviation);

    let verdict = if frame_deviation.is_some_and(|d| d > tol.frame) {
        Verdict::ViolatesFrame
    } else if !(max_residual <= tol.regularity) {
        Verdict::NotRegular
    } else {
        Verdict::Regular
    };
    let failed = verdict != Verdict::Regular;
    Ok(RegularityReport {
        fitted_rho,
        max_residual,
        n_samples: fit_points.len(),
        frame_deviation,
        verdict,
        residual_witness: failed.then(|| Witness { v: validation[worst].components().clone(), f: fx, fitted }),
        frame_witness: if verdict == Verdict::ViolatesFrame { frame.map(|r| r.worst_basis) } else { None },
    })
}

fn sample_sphere(dim: usize, field: Field, n: usize, seed: u64) -> Result<Vec<UnitVector>> {
    let mut rng = seed::rng(seed);
    (0..n).map(|_| random_unit_vector(dim, field, &mut rng)).collect()
}

/// Least-squares hermitian `H` minimizing `sum |x^dagger H x - f(x)|^2`.
///
/// Unknowns: the real diagonal, and the real (plus, over C, imaginary) parts
/// of the strict upper triangle. For real sample vectors the imaginary parts
/// do not enter the quadratic form, so they are omitted.
fn fit_hermitian_form(points: &[UnitVector], values: &[f64], field: Field) -> Result<CMatrix> {
    let dim = points[0].dim();
    let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|k| ((k + 1)..dim).map(move |l| (k, l))).collect();
    let complex = field == Field::Complex;
    let n_params = dim + pairs.len() * if complex { 2 } else { 1 };
    let mut a = DMatrix::<f64>::zeros(points.len(), n_params);
    for (row, x) in points.iter().enumerate() {
        let c = x.components();
        for k in 0..dim {
            a[(row, k)] = c[k].norm_sqr();
        }
        for (i, &(k, l)) in pairs.iter().enumerate() {
            let z = c[k].conj() * c[l];
            a[(row, dim + i)] = 2.0 * z.re;
            if complex {
                a[(row, dim + pairs.len() + i)] = -2.0 * z.im;
            }
        }
    }
    let b = DVector::from_column_slice(values);
    let theta = a
        .svd(true, true)
        .solve(&b, 1e-13)
        .map_err(|e| Error::DegenerateInput(format!("least-squares fit failed: {e}")))?;
    let mut h = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        h[(k, k)] = Complex64::new(theta[k], 0.0);
    }
    for (i, &(k, l)) in pairs.iter().enumerate() {
        let im = if complex { theta[dim + pairs.len() + i] } else { 0.0 };
        h[(k, l)] = Complex64::new(theta[dim + i], im);
        h[(l, k)] = Complex64::new(theta[dim + i], -im);
    }
    Ok(h)
}
