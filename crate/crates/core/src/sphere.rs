//! Geometry of the unit sphere of R^3 around a pole `p`: latitudes
//! `h(u) = cos^2(u, p)`, descents (great circles through `u` that meet the
//! equator at directions orthogonal to `u`), the central projection onto the
//! tangent plane at the pole, and chains of successive descents.
//!
//! Directions are rays: `u` and `-u` are identified and every vector is
//! replaced by its northern representative before use.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::FrameFunction;
use crate::hilbert::{json, UnitVector};
use crate::tolerance::{DERIVED, ON_CIRCLE, STRUCTURAL};

/// Smallest latitude gap a chain is asked to bridge.
pub const MIN_CHAIN_GAP: f64 = 1e-6;

/// Orthonormal pair spanning the plane orthogonal to the unit vector `p`,
/// with `(a, b, p)` right-handed.
pub fn tangent_frame(p: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let axis = if p.x.abs() <= p.y.abs() && p.x.abs() <= p.z.abs() {
        Vector3::x()
    } else if p.y.abs() <= p.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let a = (axis - p * axis.dot(p)).normalize();
    let b = p.cross(&a);
    (a, b)
}

fn real3(u: &UnitVector) -> Result<Vector3<f64>> {
    u.to_real3()
}

fn unit(v: &Vector3<f64>) -> Result<UnitVector> {
    UnitVector::from_real3(v)
}

fn northern(u: &Vector3<f64>, p: &Vector3<f64>) -> Vector3<f64> {
    if u.dot(p) < 0.0 {
        -u
    } else {
        *u
    }
}

/// `h(u) = cos^2(u, p)`.
pub fn latitude(u: &UnitVector, p: &UnitVector) -> Result<f64> {
    if u.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: u.dim() });
    }
    Ok(u.overlap(p))
}

#[derive(Debug, Clone, Serialize)]
pub struct Descent {
    #[serde(serialize_with = "vec3")]
    u: Vector3<f64>,
    #[serde(serialize_with = "vec3")]
    plane_normal: Vector3<f64>,
    #[serde(serialize_with = "vec3")]
    equatorial: Vector3<f64>,
}

fn vec3<S: serde::Serializer>(v: &Vector3<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_slice().serialize(s)
}

impl Descent {
    /// Northern representative of the vector the descent passes through.
    pub fn top(&self) -> Result<UnitVector> {
        unit(&self.u)
    }

    pub fn plane_normal(&self) -> Result<UnitVector> {
        unit(&self.plane_normal)
    }

    /// Point where the descent meets the equator, orthogonal to `u`.
    pub fn equatorial(&self) -> Result<UnitVector> {
        unit(&self.equatorial)
    }

    /// `cos(t) u + sin(t) e`.
    pub fn point(&self, t: f64) -> Result<UnitVector> {
        unit(&(self.u * t.cos() + self.equatorial * t.sin()))
    }

    /// Distance of `v` from the descent plane.
    pub fn offset(&self, v: &UnitVector) -> Result<f64> {
        Ok(real3(v)?.dot(&self.plane_normal).abs())
    }
}

pub fn descent_through(u: &UnitVector, p: &UnitVector) -> Result<Descent> {
    let (u, p) = (real3(u)?, real3(p)?);
    descent3(&u, &p)
}

fn descent3(u: &Vector3<f64>, p: &Vector3<f64>) -> Result<Descent> {
    let u = northern(u, p);
    let h = u.dot(p).powi(2);
    if h >= 1.0 - STRUCTURAL {
        return Err(Error::AtPole);
    }
    if h <= STRUCTURAL {
        return Err(Error::AtEquator);
    }
    let equatorial = u.cross(p).normalize();
    let plane_normal = u.cross(&equatorial).normalize();
    Ok(Descent { u, plane_normal, equatorial })
}

/// The five values entering `f(u) = f(u') + f(v')` on a descent.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaDecomposition {
    pub f_u: f64,
    pub f_v: f64,
    pub f_uprime: f64,
    pub f_vprime: f64,
    pub f_w: f64,
    /// `|f(u) - f(u') - f(v')|`.
    pub residual: f64,
    #[serde(serialize_with = "unit_json")]
    pub v: UnitVector,
    #[serde(serialize_with = "unit_json")]
    pub v_prime: UnitVector,
    #[serde(serialize_with = "unit_json")]
    pub w: UnitVector,
}

fn unit_json<S: serde::Serializer>(v: &UnitVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    json::vector::serialize(v.components(), s)
}

/// With `v` (resp. `v'`) the vector of the descent plane orthogonal to `u`
/// (resp. `u'`) and `w` normal to the plane, `{u, v, w}` and `{u', v', w}` are
/// orthonormal bases, and `v` lies on the equator.
pub fn basic_lemma_decomposition(
    f: &FrameFunction,
    u: &UnitVector,
    u_prime: &UnitVector,
    p: &UnitVector,
) -> Result<LemmaDecomposition> {
    let d = descent_through(u, p)?;
    let up = real3(u_prime)?;
    let off = up.dot(&d.plane_normal).abs();
    if off > ON_CIRCLE {
        return Err(Error::NotOnDescent(off));
    }
    let v = unit(&d.equatorial)?;
    let w = unit(&d.plane_normal)?;
    let v_prime = unit(&d.plane_normal.cross(&up))?;
    let f_u = f.evaluate(&unit(&d.u)?)?;
    let f_uprime = f.evaluate(u_prime)?;
    let f_vprime = f.evaluate(&v_prime)?;
    Ok(LemmaDecomposition {
        f_u,
        f_v: f.evaluate(&v)?,
        f_uprime,
        f_vprime,
        f_w: f.evaluate(&w)?,
        residual: (f_u - f_uprime - f_vprime).abs(),
        v,
        v_prime,
        w,
    })
}

/// Image of `u` in the plane tangent to the sphere at `p`, projecting from
/// the centre, in the coordinates of [`tangent_frame`]. Its distance to the
/// origin is `tan(angle(u, p))`.
pub fn central_projection(u: &UnitVector, p: &UnitVector) -> Result<[f64; 2]> {
    let (u, p) = (real3(u)?, real3(p)?);
    project3(&u, &p)
}

fn project3(u: &Vector3<f64>, p: &Vector3<f64>) -> Result<[f64; 2]> {
    let c = u.dot(p);
    if c.abs() <= STRUCTURAL {
        return Err(Error::AtEquator);
    }
    let (a, b) = tangent_frame(p);
    Ok([u.dot(&a) / c, u.dot(&b) / c])
}

fn unproject3(point: [f64; 2], p: &Vector3<f64>) -> Vector3<f64> {
    let (a, b) = tangent_frame(p);
    (p + a * point[0] + b * point[1]).normalize()
}

/// Inverse of [`central_projection`], returning the northern vector.
pub fn inverse_central_projection(point: [f64; 2], p: &UnitVector) -> Result<UnitVector> {
    unit(&unproject3(point, &real3(p)?))
}

/// `w_0 .. w_N` with each `w_n` on the descent through `w_{n-1}` and
/// latitudes strictly decreasing.
#[derive(Debug, Clone, Serialize)]
pub struct PironChain {
    #[serde(serialize_with = "unit_json")]
    pole: UnitVector,
    #[serde(serialize_with = "chain_json")]
    vectors: Vec<UnitVector>,
}

fn chain_json<S: serde::Serializer>(v: &[UnitVector], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for u in v {
        seq.serialize_element(&u.real_parts())?;
    }
    seq.end()
}

impl PironChain {
    /// Validates the chain invariants.
    pub fn new(pole: UnitVector, vectors: Vec<UnitVector>) -> Result<Self> {
        let p = real3(&pole)?;
        if vectors.len() < 2 {
            return Err(Error::InvalidArgument("a chain needs at least two vectors".into()));
        }
        let vs = vectors.iter().map(|v| real3(v).map(|v| northern(&v, &p))).collect::<Result<Vec<_>>>()?;
        for n in 1..vs.len() {
            let d = descent3(&vs[n - 1], &p)?;
            let off = vs[n].dot(&d.plane_normal).abs();
            if off > ON_CIRCLE {
                return Err(Error::NotOnDescent(off));
            }
            let (h0, h1) = (vs[n - 1].dot(&p).powi(2), vs[n].dot(&p).powi(2));
            if !(h0 - h1 > DERIVED) {
                return Err(Error::InvalidArgument(format!("latitude does not decrease at step {n}: {h0} -> {h1}")));
            }
        }
        let vectors = vs.iter().map(unit).collect::<Result<_>>()?;
        Ok(Self { pole, vectors })
    }

    pub fn pole(&self) -> &UnitVector {
        &self.pole
    }

    pub fn vectors(&self) -> &[UnitVector] {
        &self.vectors
    }

    /// Number of descent steps `N`.
    pub fn len(&self) -> usize {
        self.vectors.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn latitudes(&self) -> Vec<f64> {
        self.vectors.iter().map(|v| v.overlap(&self.pole)).collect()
    }
}

/// Azimuth gained by moving along a tangent line from radius `r` to radius
/// `r * exp(s)` in the projected plane.
fn swing(s: f64) -> f64 {
    (-s).exp().clamp(-1.0, 1.0).acos()
}

/// Connects `u` to `v` (`h(u) > h(v)`, both strictly northern) by a chain of
/// descents.
///
/// In the projected plane a descent through `W` is the line tangent at `W` to
/// the circle `|z| = |W|`; moving along it to radius `r'` turns the azimuth by
/// `acos(|W| / r')`. The chain takes `m` forward steps with equal radius
/// ratios, each turning towards `v`, then a final pair of steps turning in
/// opposite senses that lands exactly on `v`. `m` is the smallest count that
/// leaves the final pair a remaining turn of at most three quarters of its
/// maximum, which keeps every step non-degenerate. A `v` already on the
/// descent through `u` is reached in one step.
pub fn build_piron_chain(u: &UnitVector, v: &UnitVector, p: &UnitVector, max_len: usize) -> Result<PironChain> {
    let pole = real3(p)?;
    let (u3, v3) = (northern(&real3(u)?, &pole), northern(&real3(v)?, &pole));
    let (hu, hv) = (u3.dot(&pole).powi(2), v3.dot(&pole).powi(2));
    if hv <= STRUCTURAL {
        return Err(Error::AtEquator);
    }
    let descent = descent3(&u3, &pole)?;
    if !(hu - hv > MIN_CHAIN_GAP) {
        return Err(Error::InvalidArgument(format!("latitude gap {} below {MIN_CHAIN_GAP:e}", hu - hv)));
    }
    let finish = |vectors: Vec<Vector3<f64>>| -> Result<PironChain> {
        PironChain::new(p.clone(), vectors.iter().map(unit).collect::<Result<_>>()?)
    };
    if v3.dot(&descent.plane_normal).abs() <= ON_CIRCLE {
        if max_len < 1 {
            return Err(Error::ChainTooLong { needed: 1, max_len });
        }
        return finish(vec![u3, v3]);
    }

    let (pu, pv) = (project3(&u3, &pole)?, project3(&v3, &pole)?);
    let (ru, rv) = (pu[0].hypot(pu[1]), pv[0].hypot(pv[1]));
    let (phi_u, phi_v) = (pu[1].atan2(pu[0]), pv[1].atan2(pv[0]));
    let mut delta = phi_v - phi_u;
    while delta > PI {
        delta -= 2.0 * PI;
    }
    while delta <= -PI {
        delta += 2.0 * PI;
    }
    let sense = if delta < 0.0 { -1.0 } else { 1.0 };
    let turn = delta.abs();
    let span = (rv / ru).ln();

    let forward = (0..)
        .take_while(|&m| m + 2 <= max_len.max(2))
        .find(|&m| {
            let step = swing(span / (m as f64 + 1.0));
            (turn - m as f64 * step).abs() <= 0.75 * step
        });
    let Some(m) = forward.filter(|&m| m + 2 <= max_len) else {
        return Err(Error::ChainTooLong { needed: estimate_len(turn, span), max_len });
    };

    let lambda = span / (m as f64 + 1.0);
    let mut points = vec![u3];
    let (mut r, mut phi) = (ru, phi_u);
    for _ in 0..m {
        phi += sense * swing(lambda);
        r *= lambda.exp();
        points.push(unproject3([r * phi.cos(), r * phi.sin()], &pole));
    }
    let remaining = turn - m as f64 * swing(lambda);
    let pair_sense = sense * if remaining < 0.0 { -1.0 } else { 1.0 };
    let target = remaining.abs();
    // acos(r / r1) - acos(r1 / rv) increases from -swing to +swing on (r, rv)
    let (mut lo, mut hi) = (r, rv);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (r / mid).acos() - (mid / rv).clamp(-1.0, 1.0).acos() < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r1 = 0.5 * (lo + hi);
    let phi1 = phi + pair_sense * (r / r1).acos();
    points.push(unproject3([r1 * phi1.cos(), r1 * phi1.sin()], &pole));
    let landing = unproject3([rv * (phi1 - pair_sense * (r1 / rv).acos()).cos(), rv * (phi1 - pair_sense * (r1 / rv).acos()).sin()], &pole);
    let miss = (landing - v3).norm();
    if miss > ON_CIRCLE {
        return Err(Error::InvalidArgument(format!("chain construction missed the target by {miss:e}")));
    }
    points.push(v3);
    finish(points)
}

/// Length the construction above would need, for error reporting.
fn estimate_len(turn: f64, span: f64) -> usize {
    (0..1_000_000usize)
        .find(|&m| {
            let step = swing(span / (m as f64 + 1.0));
            (turn - m as f64 * step).abs() <= 0.75 * step
        })
        .map_or(usize::MAX, |m| m + 2)
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainStep {
    pub step: usize,
    pub vector: [f64; 3],
    pub h: f64,
    pub f: f64,
}

/// `(step, w_n, h(w_n), f(w_n))` for every vertex of the chain.
pub fn chain_profile(f: &FrameFunction, chain: &PironChain) -> Result<Vec<ChainStep>> {
    chain
        .vectors
        .iter()
        .enumerate()
        .map(|(step, w)| {
            let r = w.real_parts();
            Ok(ChainStep { step, vector: [r[0], r[1], r[2]], h: w.overlap(&chain.pole), f: f.evaluate(w)? })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub steps: Vec<ChainStep>,
    /// `min_n f(w_{n-1}) - f(w_n)`.
    pub min_drop: f64,
    pub f_start: f64,
    pub f_end: f64,
}

/// Checks `f(w_{n-1}) >= f(w_n) - 1e-8` along the chain and `f(u) >= f(v)`
/// overall.
pub fn verify_monotonicity(f: &FrameFunction, chain: &PironChain) -> Result<MonotonicityReport> {
    let steps = chain_profile(f, chain)?;
    let mut min_drop = f64::INFINITY;
    for n in 1..steps.len() {
        let (before, after) = (steps[n - 1].f, steps[n].f);
        if before < after - ON_CIRCLE {
            return Err(Error::MonotonicityViolation { step: n, before, after });
        }
        min_drop = min_drop.min(before - after);
    }
    let (f_start, f_end) = (steps[0].f, steps[steps.len() - 1].f);
    if f_start < f_end - ON_CIRCLE {
        return Err(Error::MonotonicityViolation { step: steps.len() - 1, before: f_start, after: f_end });
    }
    Ok(MonotonicityReport { steps, min_drop, f_start, f_end })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::TableEntry;
    use crate::hilbert::Field;

    fn pole() -> UnitVector {
        UnitVector::basis_vector(3, 2, Field::Real).unwrap()
    }

    /// Point of latitude `h` and longitude `phi` (radians) around the z pole.
    fn at(h: f64, phi: f64) -> UnitVector {
        let (c, s) = (h.sqrt(), (1.0 - h).sqrt());
        UnitVector::real(&[s * phi.cos(), s * phi.sin(), c]).unwrap()
    }

    #[test]
    fn latitudes() {
        let p = pole();
        assert_eq!(latitude(&p, &p).unwrap(), 1.0);
        assert_eq!(latitude(&UnitVector::basis_vector(3, 0, Field::Real).unwrap(), &p).unwrap(), 0.0);
        assert!((latitude(&UnitVector::real(&[1.0, 0.0, 1.0]).unwrap(), &p).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn descent_invariants_and_errors() {
        let p = pole();
        let u = at(0.5, 0.0);
        let d = descent_through(&u, &p).unwrap();
        let (n, e) = (d.plane_normal().unwrap(), d.equatorial().unwrap());
        assert!(u.inner(&n).norm() < 1e-10);
        assert!(e.inner(&u).norm() < 1e-10 && e.inner(&p).norm() < 1e-10 && e.inner(&n).norm() < 1e-10);
        assert!(matches!(descent_through(&p, &p), Err(Error::AtPole)));
        assert!(matches!(descent_through(&at(0.0, 1.0), &p), Err(Error::AtEquator)));
    }

    #[test]
    fn descent_top_has_maximal_latitude() {
        let p = pole();
        let u = at(0.37, 2.1);
        let d = descent_through(&u, &p).unwrap();
        for k in 0..100 {
            let w = d.point(k as f64 * 2.0 * PI / 100.0).unwrap();
            assert!(w.overlap(&p) <= 0.37 + 1e-12);
        }
    }

    #[test]
    fn lemma_on_cos_squared() {
        let p = pole();
        let f = FrameFunction::cos_squared(&p);
        let u = at(0.8, 0.4);
        let d = descent_through(&u, &p).unwrap();
        let t = (0.3f64 / 0.8).sqrt().acos();
        let up = d.point(t).unwrap();
        let r = basic_lemma_decomposition(&f, &u, &up, &p).unwrap();
        assert!((r.f_u - 0.8).abs() < 1e-12);
        assert!((r.f_uprime - 0.3).abs() < 1e-12);
        assert!((r.f_vprime - 0.5).abs() < 1e-12);
        assert!(r.residual < 1e-10 && r.f_v < 1e-15);

        let same = basic_lemma_decomposition(&f, &u, &u, &p).unwrap();
        assert!(same.f_vprime < 1e-15 && same.residual < 1e-15);
        let off = at(0.3, 2.0);
        assert!(matches!(basic_lemma_decomposition(&f, &u, &off, &p), Err(Error::NotOnDescent(_))));
    }

    #[test]
    fn projection_radii() {
        let p = pole();
        assert_eq!(central_projection(&p, &p).unwrap(), [0.0, 0.0]);
        let q = central_projection(&at(0.5, 1.0), &p).unwrap();
        assert!((q[0].hypot(q[1]) - 1.0).abs() < 1e-12);
        assert!(matches!(central_projection(&at(0.0, 0.3), &p), Err(Error::AtEquator)));
        let back = inverse_central_projection(q, &p).unwrap();
        assert!(back.same_ray(&at(0.5, 1.0), 1e-12));
    }

    #[test]
    fn descents_project_to_tangent_lines() {
        let p = pole();
        let u = at(0.6, 0.9);
        let d = descent_through(&u, &p).unwrap();
        let pts: Vec<[f64; 2]> = (0..50)
            .map(|k| -1.2 + 2.4 * k as f64 / 49.0)
            .map(|t| central_projection(&d.point(t).unwrap(), &p).unwrap())
            .collect();
        // least-squares line a x + b y = c with a^2 + b^2 = 1 via the principal axis
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|q| q[0]).sum::<f64>() / n, pts.iter().map(|q| q[1]).sum::<f64>() / n);
        let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
        for q in &pts {
            sxx += (q[0] - mx).powi(2);
            sxy += (q[0] - mx) * (q[1] - my);
            syy += (q[1] - my).powi(2);
        }
        let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
        let normal = [-angle.sin(), angle.cos()];
        let c = normal[0] * mx + normal[1] * my;
        let worst = pts.iter().map(|q| (normal[0] * q[0] + normal[1] * q[1] - c).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
        let radius = (0.4f64 / 0.6).sqrt();
        assert!((c.abs() - radius).abs() < 1e-8);
    }

    #[test]
    fn direct_descent_is_one_step() {
        let p = pole();
        let u = at(0.7, 0.2);
        let v = descent_through(&u, &p).unwrap().point(0.6).unwrap();
        assert_eq!(build_piron_chain(&u, &v, &p, 5).unwrap().len(), 1);
    }

    #[test]
    fn same_longitude_is_two_steps() {
        let p = pole();
        let chain = build_piron_chain(&at(0.8, 1.0), &at(0.3, 1.0), &p, 5).unwrap();
        assert_eq!(chain.len(), 2);
        let h = chain.latitudes();
        assert!(h[0] > h[1] && h[1] > h[2]);
        assert!(chain.vectors()[2].same_ray(&at(0.3, 1.0), 1e-8));
    }

    #[test]
    fn close_latitudes_need_long_chains() {
        let p = pole();
        let (u, v) = (at(0.51, 0.0), at(0.50, PI / 2.0));
        assert!(matches!(build_piron_chain(&u, &v, &p, 10), Err(Error::ChainTooLong { .. })));
        let long = build_piron_chain(&u, &v, &p, 500).unwrap();
        let short = build_piron_chain(&at(0.6, 0.0), &v, &p, 500).unwrap();
        assert!(long.len() > short.len());
        assert!(long.len() > 10);
    }

    #[test]
    fn gap_and_pole_errors() {
        let p = pole();
        assert!(build_piron_chain(&at(0.5, 0.0), &at(0.5, 1.0), &p, 100).is_err());
        assert!(matches!(build_piron_chain(&p, &at(0.5, 1.0), &p, 100), Err(Error::AtPole)));
    }

    #[test]
    fn monotone_on_cos_squared_and_caught_on_bump() {
        let p = pole();
        let chain = build_piron_chain(&at(0.9, 0.0), &at(0.2, 2.5), &p, 200).unwrap();
        let f = FrameFunction::cos_squared(&p);
        let report = verify_monotonicity(&f, &chain).unwrap();
        assert!((report.f_start - 0.9).abs() < 1e-12 && (report.f_end - 0.2).abs() < 1e-12);

        // a table that jumps up by 0.05 below latitude 0.4
        let chain = build_piron_chain(&at(0.41, 0.0), &at(0.39, 0.0), &p, 200).unwrap();
        let entries = chain
            .vectors()
            .iter()
            .map(|w| {
                let h = w.overlap(&p);
                TableEntry { v: w.clone(), f: if h < 0.4 { h + 0.05 } else { h } }
            })
            .collect();
        let bumped = FrameFunction::tabulated(Field::Real, entries).unwrap();
        assert!(matches!(verify_monotonicity(&bumped, &chain), Err(Error::MonotonicityViolation { .. })));
    }
}
