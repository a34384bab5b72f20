use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::FrameFunction;
use crate::error::{Error, Result};
use crate::hilbert::{json, random_unit_vector, CVector, Field, UnitVector};
use crate::seed;
use crate::sphere::tangent_frame;

/// Sampled best starting points refined by local search.
const REFINE_STARTS: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct Extremes {
    pub sup: f64,
    pub inf: f64,
    #[serde(serialize_with = "unit_vector_json")]
    pub argmax: UnitVector,
    #[serde(serialize_with = "unit_vector_json")]
    pub argmin: UnitVector,
}

fn unit_vector_json<S: serde::Serializer>(v: &UnitVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    json::vector::serialize(v.components(), s)
}

/// Estimates `sup f` and `inf f` with their arguments: random sampling, then
/// compass search on the sphere from the best few samples. Tabulated
/// functions are scanned exactly.
pub fn extreme_values(f: &FrameFunction, n_samples: usize, seed: u64) -> Result<Extremes> {
    if let Some(entries) = f.entries() {
        let max = entries.iter().reduce(|a, b| if b.f > a.f { b } else { a }).expect("non-empty table");
        let min = entries.iter().reduce(|a, b| if b.f < a.f { b } else { a }).expect("non-empty table");
        return Ok(Extremes { sup: max.f, inf: min.f, argmax: max.v.clone(), argmin: min.v.clone() });
    }
    if n_samples < 100 {
        return Err(Error::InsufficientSamples { needed: 100, got: n_samples });
    }
    let mut rng = seed::rng(seed);
    let mut samples = (0..n_samples)
        .map(|_| {
            let x = random_unit_vector(f.dim(), f.field(), &mut rng)?;
            Ok((f.evaluate(&x)?, x))
        })
        .collect::<Result<Vec<_>>>()?;
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let k = REFINE_STARTS.min(samples.len());
    let refine = |starts: &[(f64, UnitVector)], sign: f64| -> Result<(f64, UnitVector)> {
        let results = starts
            .par_iter()
            .map(|(v, x)| compass_search(f, x.clone(), *v, sign))
            .collect::<Result<Vec<_>>>()?;
        Ok(results
            .into_iter()
            .reduce(|a, b| if sign * b.0 > sign * a.0 { b } else { a })
            .expect("at least one start"))
    };
    let (sup, argmax) = refine(&samples[samples.len() - k..], 1.0)?;
    let (inf, argmin) = refine(&samples[..k], -1.0)?;
    Ok(Extremes { sup, inf, argmax, argmin })
}

/// Maximizes `sign * f` by pattern search along `+-e_k` (and `+-i e_k` over
/// C), renormalizing after every move, halving the step when no move helps.
fn compass_search(f: &FrameFunction, mut x: UnitVector, mut value: f64, sign: f64) -> Result<(f64, UnitVector)> {
    let dim = f.dim();
    let mut directions: Vec<CVector> = Vec::new();
    let units: &[Complex64] = match f.field() {
        Field::Real => &[Complex64::new(1.0, 0.0)],
        Field::Complex => &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
    };
    for k in 0..dim {
        for &u in units {
            for s in [1.0, -1.0] {
                let mut d = CVector::zeros(dim);
                d[k] = u * s;
                directions.push(d);
            }
        }
    }
    let mut step = 0.25;
    let mut evaluations = 0usize;
    while step > 1e-10 && evaluations < 50_000 {
        let mut improved = false;
        for d in &directions {
            let candidate = UnitVector::normalized(f.field(), x.components() + d * Complex64::new(step, 0.0))?;
            let v = f.evaluate(&candidate)?;
            evaluations += 1;
            if sign * v > sign * value {
                x = candidate;
                value = v;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((value, x))
}

/// Sampled infimum and supremum of `f` over the latitude circle
/// `{u : cos^2(u, p) = x}` of R^3.
#[derive(Debug, Clone, Serialize)]
pub struct Band {
    pub latitude: f64,
    pub inf: f64,
    pub sup: f64,
}

pub fn latitude_band_bounds(f: &FrameFunction, p: &UnitVector, x: f64, n_samples: usize, seed: u64) -> Result<Band> {
    if f.dim() != 3 || f.field() != Field::Real {
        return Err(Error::InvalidArgument("latitude bands are defined on R^3".into()));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!("latitude {x} outside [0, 1]")));
    }
    if n_samples < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: n_samples });
    }
    let pole = p.to_real3()?;
    let (e1, e2) = tangent_frame(&pole);
    let (a, b) = (x.sqrt(), (1.0 - x).sqrt());
    let point = |phi: f64| UnitVector::from_real3(&(pole * a + (e1 * phi.cos() + e2 * phi.sin()) * b));
    let eval = |phi: f64| -> Result<f64> { f.evaluate(&point(phi)?) };

    let offset: f64 = seed::rng(seed).random::<f64>();
    let width = TAU / n_samples as f64;
    let values = (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let phi = (k as f64 + offset) * width;
            Ok((phi, eval(phi)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let lo = values.iter().copied().reduce(|s, t| if t.1 < s.1 { t } else { s }).expect("samples");
    let hi = values.iter().copied().reduce(|s, t| if t.1 > s.1 { t } else { s }).expect("samples");
    let inf = golden_section(&eval, lo.0 - width, lo.0 + width, -1.0)?.min(lo.1);
    let sup = golden_section(&eval, hi.0 - width, hi.0 + width, 1.0)?.max(hi.1);
    Ok(Band { latitude: x, inf, sup })
}

/// Best value of `sign * g` found by golden-section search on `[lo, hi]`,
/// reported in the original sign.
fn golden_section(g: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, sign: f64) -> Result<f64> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut gc, mut gd) = (sign * g(c)?, sign * g(d)?);
    let mut best = gc.max(gd);
    for _ in 0..80 {
        if gc > gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - r * (hi - lo);
            gc = sign * g(c)?;
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + r * (hi - lo);
            gd = sign * g(d)?;
        }
        best = best.max(gc).max(gd);
    }
    Ok(sign * best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{random_basis, DensityMatrix, OrthonormalBasis};

    fn spectrum_rho(weights: [f64; 3], seed: u64) -> (DensityMatrix, OrthonormalBasis) {
        let basis = random_basis(3, Field::Real, seed).unwrap();
        (DensityMatrix::from_spectrum(&weights, &basis).unwrap(), basis)
    }

    #[test]
    fn pure_state_extremes() {
        let p = UnitVector::real(&[0.1, 0.7, -0.3]).unwrap();
        let e = extreme_values(&FrameFunction::born(DensityMatrix::pure(&p), Field::Real), 500, 1).unwrap();
        assert!((e.sup - 1.0).abs() < 1e-8);
        assert!(e.inf < 1e-8);
        assert!(e.argmax.same_ray(&p, 1e-4));
    }

    #[test]
    fn mixed_state_extremes_match_eigenvalues() {
        let (rho, _) = spectrum_rho([0.6, 0.3, 0.1], 2);
        let e = extreme_values(&FrameFunction::born(rho, Field::Real), 500, 3).unwrap();
        assert!((e.sup - 0.6).abs() < 1e-4, "{}", e.sup);
        assert!((e.inf - 0.1).abs() < 1e-4, "{}", e.inf);
    }

    #[test]
    fn complex_extremes() {
        let rho = crate::hilbert::random_density_matrix(3, Field::Complex, 3, &mut seed::rng(4)).unwrap();
        let ev = rho.eigenvalues();
        let e = extreme_values(&FrameFunction::born(rho, Field::Complex), 500, 5).unwrap();
        assert!((e.sup - ev[0]).abs() < 1e-4);
        assert!((e.inf - ev[2]).abs() < 1e-4);
    }

    #[test]
    fn constant_extremes() {
        let e = extreme_values(&FrameFunction::constant(3, Field::Real), 100, 1).unwrap();
        assert!((e.sup - 1.0 / 3.0).abs() < 1e-15 && (e.inf - 1.0 / 3.0).abs() < 1e-15);
        assert!(extreme_values(&FrameFunction::constant(3, Field::Real), 99, 1).is_err());
    }

    #[test]
    fn pole_band_is_a_point() {
        let p = UnitVector::real(&[0.0, 0.6, 0.8]).unwrap();
        let f = FrameFunction::cos_squared(&p);
        let b = latitude_band_bounds(&f, &p, 1.0, 16, 1).unwrap();
        assert!((b.inf - 1.0).abs() < 1e-12 && (b.sup - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cos_squared_has_no_longitude_dependence() {
        let p = UnitVector::real(&[0.3, 0.4, 0.5]).unwrap();
        let f = FrameFunction::cos_squared(&p);
        for x in [0.0, 0.2, 0.5, 0.9] {
            let b = latitude_band_bounds(&f, &p, x, 64, 2).unwrap();
            assert!((b.inf - x).abs() < 1e-10 && (b.sup - x).abs() < 1e-10);
        }
    }

    #[test]
    fn anisotropic_band_matches_eigenvalues() {
        // rho = 0.6 |b0><b0| + 0.3 |b1><b1| + 0.1 |b2><b2|, pole b0: on the
        // circle of latitude x, f = 0.6 x + (1 - x)(0.3 cos^2 + 0.1 sin^2).
        let (rho, basis) = spectrum_rho([0.6, 0.3, 0.1], 6);
        let f = FrameFunction::born(rho, Field::Real);
        let b = latitude_band_bounds(&f, basis.vector(0).unwrap(), 0.5, 128, 3).unwrap();
        assert!((b.inf - (0.3 + 0.05)).abs() < 1e-9, "{}", b.inf);
        assert!((b.sup - (0.3 + 0.15)).abs() < 1e-9, "{}", b.sup);
        assert!(b.sup - b.inf > 0.0);
    }
}
