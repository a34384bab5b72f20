use rayon::prelude::*;
use serde::Serialize;

use super::FrameFunction;
use crate::error::{Error, Result};
use crate::hilbert::{random_basis, OrthonormalBasis};
use crate::seed;

#[derive(Debug, Clone, Serialize)]
pub struct FrameReport {
    /// `max |sum_i f(x_i) - 1|` over the checked bases.
    pub max_deviation: f64,
    /// `sum_i f(x_i)` on the worst basis.
    pub worst_sum: f64,
    pub worst_basis: OrthonormalBasis,
    pub n_bases: usize,
}

fn basis_sum(f: &FrameFunction, b: &OrthonormalBasis) -> Result<f64> {
    b.vectors().iter().map(|x| f.evaluate(x)).sum()
}

/// Checks the frame condition on `n_bases` Haar-random bases; basis `i` is
/// drawn from `split(seed, i)`.
pub fn check_frame_condition(f: &FrameFunction, n_bases: usize, seed: u64) -> Result<FrameReport> {
    if n_bases == 0 {
        return Err(Error::InvalidArgument("n_bases must be at least 1".into()));
    }
    let results = (0..n_bases)
        .into_par_iter()
        .map(|i| {
            let b = random_basis(f.dim(), f.field(), seed::split(seed, i as u64))?;
            let s = basis_sum(f, &b)?;
            Ok((i, s, b))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(results))
}

/// Same check on caller-supplied bases.
pub fn check_frame_condition_on(f: &FrameFunction, bases: &[OrthonormalBasis]) -> Result<FrameReport> {
    if bases.is_empty() {
        return Err(Error::InvalidArgument("no bases to check".into()));
    }
    let results = bases
        .par_iter()
        .enumerate()
        .map(|(i, b)| {
            if b.dim() != f.dim() {
                return Err(Error::DimensionMismatch { expected: f.dim(), found: b.dim() });
            }
            Ok((i, basis_sum(f, b)?, b.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(results))
}

fn summarize(results: Vec<(usize, f64, OrthonormalBasis)>) -> FrameReport {
    let n_bases = results.len();
    // first index wins ties, so the witness does not depend on scheduling
    let (_, worst_sum, worst_basis) = results
        .into_iter()
        .reduce(|a, b| if (b.1 - 1.0).abs() > (a.1 - 1.0).abs() { b } else { a })
        .expect("at least one basis");
    FrameReport { max_deviation: (worst_sum - 1.0).abs(), worst_sum, worst_basis, n_bases }
}
