//! Finite-grid check of the scalar lemma: a function `g` on `[0, 1]` with
//! `g(0) = 0`, strictly increasing, and `g(a) + g(b) + g(c) = 1` whenever
//! `a + b + c = 1` is the identity.
//!
//! Arguments are exact grid points `k/Q`; only the values `g(k/Q)` are
//! floating point. Points in the excluded set are skipped, as is every triple
//! that touches one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::{DERIVED, STRUCTURAL};

/// Largest `|g(a) - a|` accepted as the identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// The exact rational `k/Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GridPoint {
    pub k: u32,
    #[serde(rename = "Q")]
    pub q: u32,
}

impl GridPoint {
    pub fn new(k: u32, q: u32) -> Result<Self> {
        if q == 0 || k > q {
            return Err(Error::OffGrid(format!("{k}/{q}")));
        }
        Ok(Self { k, q })
    }

    pub fn as_f64(self) -> f64 {
        self.k as f64 / self.q as f64
    }

    pub fn as_rational(self) -> Rational64 {
        Rational64::new(self.k as i64, self.q as i64)
    }

    /// The grid point of denominator `q` equal to `x`, if any.
    pub fn from_rational(x: Rational64, q: u32) -> Result<Self> {
        let scaled = x * Rational64::from_integer(q as i64);
        if !scaled.is_integer() || scaled < Rational64::from_integer(0) || scaled > Rational64::from_integer(q as i64) {
            return Err(Error::OffGrid(format!("{x} on grid 1/{q}")));
        }
        Self::new(scaled.to_integer() as u32, q)
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.k, self.q)
    }
}

/// Values of `g` on the grid `{k/Q}` minus an excluded set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CandidateJson", into = "CandidateJson")]
pub struct ScalarCandidate {
    q: u32,
    values: BTreeMap<u32, f64>,
    excluded: BTreeSet<u32>,
}

#[derive(Serialize, Deserialize)]
struct CandidateJson {
    #[serde(rename = "Q")]
    q: u32,
    #[serde(default)]
    excluded: Vec<u32>,
    values: BTreeMap<u32, f64>,
}

impl TryFrom<CandidateJson> for ScalarCandidate {
    type Error = Error;

    fn try_from(j: CandidateJson) -> Result<Self> {
        Self::new(j.q, j.values, j.excluded.into_iter().collect())
    }
}

impl From<ScalarCandidate> for CandidateJson {
    fn from(c: ScalarCandidate) -> Self {
        Self { q: c.q, excluded: c.excluded.into_iter().collect(), values: c.values }
    }
}

impl ScalarCandidate {
    /// Values at excluded points are dropped. Every other point needs a
    /// finite value in `[0, 1]`.
    pub fn new(q: u32, mut values: BTreeMap<u32, f64>, excluded: BTreeSet<u32>) -> Result<Self> {
        if q < 3 {
            return Err(Error::InvalidParams(format!("grid denominator must be at least 3, got {q}")));
        }
        if let Some(&k) = excluded.iter().chain(values.keys()).find(|&&k| k > q) {
            return Err(Error::OffGrid(format!("{k}/{q}")));
        }
        values.retain(|k, _| !excluded.contains(k));
        for k in (0..=q).filter(|k| !excluded.contains(k)) {
            match values.get(&k) {
                None => return Err(Error::InvalidParams(format!("no value at {k}/{q}"))),
                Some(v) if !(0.0..=1.0).contains(v) => {
                    return Err(Error::InvalidParams(format!("g({k}/{q}) = {v} outside [0, 1]")))
                }
                _ => {}
            }
        }
        Ok(Self { q, values, excluded })
    }

    /// Samples `g` at every non-excluded point.
    pub fn from_fn(q: u32, excluded: &[u32], g: impl Fn(f64) -> f64) -> Result<Self> {
        let excluded: BTreeSet<u32> = excluded.iter().copied().collect();
        let values = (0..=q).filter(|k| !excluded.contains(k)).map(|k| (k, g(k as f64 / q as f64))).collect();
        Self::new(q, values, excluded)
    }

    pub fn identity(q: u32) -> Result<Self> {
        Self::from_fn(q, &[], |x| x)
    }

    /// Replaces `g(k/Q)`.
    pub fn with_value(mut self, k: u32, value: f64) -> Result<Self> {
        self.excluded.remove(&k);
        self.values.insert(k, value);
        Self::new(self.q, self.values, self.excluded)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn excluded(&self) -> &BTreeSet<u32> {
        &self.excluded
    }

    pub fn is_excluded(&self, k: u32) -> bool {
        self.excluded.contains(&k)
    }

    /// `g(k/Q)`, `None` when excluded.
    pub fn value(&self, k: u32) -> Option<f64> {
        self.values.get(&k).copied()
    }

    pub fn point(&self, k: u32) -> Result<GridPoint> {
        GridPoint::new(k, self.q)
    }

    fn g(&self, p: GridPoint) -> Result<f64> {
        if p.q != self.q {
            return Err(Error::OffGrid(format!("{p} on grid 1/{}", self.q)));
        }
        self.value(p.k).ok_or_else(|| Error::OffGrid(format!("{p} is excluded")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisResult {
    pub pass: bool,
    /// Largest violation seen (zero when nothing was checked).
    pub deviation: f64,
    /// Points of the worst violation, empty on a pass.
    pub witness: Vec<GridPoint>,
    pub checked: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisResults {
    #[serde(rename = "H1_g0")]
    pub h1_g0: HypothesisResult,
    #[serde(rename = "H2_monotone")]
    pub h2_monotone: HypothesisResult,
    #[serde(rename = "H3_triple_sum")]
    pub h3_triple_sum: HypothesisResult,
}

impl HypothesisResults {
    pub fn all_pass(&self) -> bool {
        self.h1_g0.pass && self.h2_monotone.pass && self.h3_triple_sum.pass
    }
}

/// H1: `|g(0)| <= 1e-12`. H2: strict increase between consecutive
/// non-excluded points, which covers all ordered pairs. H3: every
/// non-excluded triple `i <= j <= k` with `i + j + k = Q` sums to 1 within
/// 1e-10; the witness is the triple with the largest defect.
pub fn check_hypotheses(c: &ScalarCandidate) -> HypothesisResults {
    let q = c.q;
    let h1_g0 = match c.value(0) {
        Some(g0) => HypothesisResult {
            pass: g0.abs() <= STRUCTURAL,
            deviation: g0.abs(),
            witness: if g0.abs() <= STRUCTURAL { vec![] } else { vec![GridPoint { k: 0, q }] },
            checked: 1,
        },
        None => HypothesisResult { pass: false, deviation: f64::INFINITY, witness: vec![GridPoint { k: 0, q }], checked: 0 },
    };

    let present: Vec<(u32, f64)> = c.values.iter().map(|(&k, &v)| (k, v)).collect();
    let mut h2_monotone = HypothesisResult { pass: true, deviation: 0.0, witness: vec![], checked: 0 };
    for pair in present.windows(2) {
        let ((a, ga), (b, gb)) = (pair[0], pair[1]);
        h2_monotone.checked += 1;
        if !(ga < gb) && ga - gb >= h2_monotone.deviation {
            if h2_monotone.pass || ga - gb > h2_monotone.deviation {
                h2_monotone.witness = vec![GridPoint { k: a, q }, GridPoint { k: b, q }];
            }
            h2_monotone.pass = false;
            h2_monotone.deviation = ga - gb;
        }
    }

    let (checked, worst) = (0..=q / 3)
        .into_par_iter()
        .map(|i| {
            let mut checked = 0usize;
            let mut worst: Option<(f64, [u32; 3])> = None;
            let Some(gi) = c.value(i) else { return (0, None) };
            for j in i..=(q - i) / 2 {
                let k = q - i - j;
                let (Some(gj), Some(gk)) = (c.value(j), c.value(k)) else { continue };
                checked += 1;
                let d = (gi + gj + gk - 1.0).abs();
                if worst.is_none_or(|(w, _)| d > w) {
                    worst = Some((d, [i, j, k]));
                }
            }
            (checked, worst)
        })
        .reduce(
            || (0, None),
            |(na, a), (nb, b)| {
                let best = match (a, b) {
                    (Some(x), Some(y)) => Some(if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x }),
                    (x, None) => x,
                    (None, y) => y,
                };
                (na + nb, best)
            },
        );
    let deviation = worst.map_or(0.0, |w| w.0);
    let pass = deviation <= DERIVED;
    let h3_triple_sum = HypothesisResult {
        pass,
        deviation,
        witness: match worst {
            Some((_, t)) if !pass => t.iter().map(|&k| GridPoint { k, q }).collect(),
            _ => vec![],
        },
        checked,
    };
    HypothesisResults { h1_g0, h2_monotone, h3_triple_sum }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Additivity {
    /// `g(r a0) + g(s a0)`.
    pub lhs: f64,
    /// `g((r + s) a0)`.
    pub rhs: f64,
    pub deviation: f64,
}

/// `g(r a0) + g(s a0)` against `g((r + s) a0)`. All three arguments and
/// `1 - (r + s) a0` must be non-excluded grid points, so that the identity
/// follows from two triple-sum instances.
pub fn derive_additivity(c: &ScalarCandidate, a0: GridPoint, r: Rational64, s: Rational64) -> Result<Additivity> {
    let a = a0.as_rational();
    let ra = GridPoint::from_rational(r * a, c.q)?;
    let sa = GridPoint::from_rational(s * a, c.q)?;
    let sum = GridPoint::from_rational((r + s) * a, c.q)?;
    let rest = GridPoint { k: c.q - sum.k, q: c.q };
    c.g(rest)?;
    let lhs = c.g(ra)? + c.g(sa)?;
    let rhs = c.g(sum)?;
    Ok(Additivity { lhs, rhs, deviation: (lhs - rhs).abs() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    /// `g(1) = 1 - 2 g(0)` from the triple `(0, 0, 1)`.
    Unit,
    /// `g(a) + g(1 - a) = 1` from the triple `(0, a, 1 - a)`.
    Complement,
    /// `g(k a0) + g(a0) = g((k + 1) a0)`.
    Additivity,
    /// `g(a0) = g(1) / n` where `n a0 = 1`.
    Base,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivationLink {
    pub kind: LinkKind,
    pub points: Vec<GridPoint>,
    pub deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LemmaVerdict {
    Identity,
    NotIdentity,
    HypothesesFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    #[serde(rename = "Q")]
    pub q: u32,
    pub excluded: Vec<u32>,
    pub hypothesis_results: HypothesisResults,
    /// `max |g(a) - a|` over non-excluded points.
    pub identity_deviation: f64,
    pub worst_point: Option<GridPoint>,
    pub derivation: Vec<DerivationLink>,
    pub max_link_deviation: f64,
    pub verdict: LemmaVerdict,
}

fn identity_deviation(c: &ScalarCandidate) -> (f64, Option<GridPoint>) {
    c.values.iter().fold((0.0, None), |(d, w), (&k, &g)| {
        let e = (g - k as f64 / c.q as f64).abs();
        if e > d {
            (e, Some(GridPoint { k, q: c.q }))
        } else {
            (d, w)
        }
    })
}

/// Runs the derivation on the grid: the unit and complement rules, then
/// additivity along the multiples of the smallest usable step `a0`, which
/// pins `g(a0) = a0` through `g(1) = n g(a0)`. Each link records its defect.
fn derivation(c: &ScalarCandidate) -> Vec<DerivationLink> {
    let q = c.q;
    let pt = |k| GridPoint { k, q };
    let mut links = Vec::new();
    if let (Some(_), Some(g1)) = (c.value(0), c.value(q)) {
        links.push(DerivationLink { kind: LinkKind::Unit, points: vec![pt(0), pt(0), pt(q)], deviation: (g1 - 1.0).abs() });
    }
    for k in 1..=q / 2 {
        if let (Some(a), Some(b)) = (c.value(k), c.value(q - k)) {
            links.push(DerivationLink {
                kind: LinkKind::Complement,
                points: vec![pt(k), pt(q - k)],
                deviation: (a + b - 1.0).abs(),
            });
        }
    }
    // smallest step whose multiples all survive the exclusions
    let step = (1..=q).find(|&d| q.is_multiple_of(d) && (0..=q).step_by(d as usize).all(|k| !c.is_excluded(k)));
    if let Some(d) = step {
        let a0 = pt(d);
        for m in 1..q / d {
            if let Ok(add) = derive_additivity(c, a0, Rational64::from_integer(m as i64), Rational64::from_integer(1)) {
                links.push(DerivationLink {
                    kind: LinkKind::Additivity,
                    points: vec![pt(m * d), a0, pt((m + 1) * d)],
                    deviation: add.deviation,
                });
            }
        }
        if let (Some(ga), Some(g1)) = (c.value(d), c.value(q)) {
            let n = (q / d) as f64;
            links.push(DerivationLink {
                kind: LinkKind::Base,
                points: vec![a0, pt(q)],
                deviation: (ga - g1 / n).abs(),
            });
        }
    }
    links
}

/// Hypotheses plus identity deviation, whatever the hypotheses say.
pub fn lemma_report(c: &ScalarCandidate) -> LemmaReport {
    let hypothesis_results = check_hypotheses(c);
    let (dev, worst_point) = identity_deviation(c);
    let derivation = derivation(c);
    let max_link_deviation = derivation.iter().map(|l| l.deviation).fold(0.0, f64::max);
    let verdict = if !hypothesis_results.all_pass() {
        LemmaVerdict::HypothesesFailed
    } else if dev <= IDENTITY_TOLERANCE {
        LemmaVerdict::Identity
    } else {
        LemmaVerdict::NotIdentity
    };
    LemmaReport {
        q: c.q,
        excluded: c.excluded.iter().copied().collect(),
        hypothesis_results,
        identity_deviation: dev,
        worst_point,
        derivation,
        max_link_deviation,
        verdict,
    }
}

/// Like [`lemma_report`] but refuses candidates that fail a hypothesis.
pub fn verify_identity(c: &ScalarCandidate) -> Result<LemmaReport> {
    let report = lemma_report(c);
    let h = &report.hypothesis_results;
    if !h.all_pass() {
        let failed: Vec<&str> = [(h.h1_g0.pass, "H1"), (h.h2_monotone.pass, "H2"), (h.h3_triple_sum.pass, "H3")]
            .iter()
            .filter(|(ok, _)| !ok)
            .map(|(_, n)| *n)
            .collect();
        return Err(Error::HypothesesNotMet(failed.join(", ")));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn identity_passes() {
        let h = check_hypotheses(&ScalarCandidate::identity(12).unwrap());
        assert!(h.all_pass());
        assert_eq!(h.h3_triple_sum.checked, 19);
    }

    #[test]
    fn square_fails_triple_sum_at_thirds() {
        let h = check_hypotheses(&ScalarCandidate::from_fn(3, &[], |x| x * x).unwrap());
        assert!(h.h1_g0.pass && h.h2_monotone.pass && !h.h3_triple_sum.pass);
        assert_eq!(h.h3_triple_sum.witness, vec![GridPoint { k: 1, q: 3 }; 3]);
        assert!((h.h3_triple_sum.deviation - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn offset_origin_fails_h1() {
        let c = ScalarCandidate::identity(12).unwrap().with_value(0, 0.01).unwrap();
        let h = check_hypotheses(&c);
        assert!(!h.h1_g0.pass);
        assert_eq!(h.h1_g0.witness, vec![GridPoint { k: 0, q: 12 }]);
    }

    #[test]
    fn non_increasing_fails_h2() {
        let c = ScalarCandidate::identity(12).unwrap().with_value(5, 4.0 / 12.0).unwrap();
        let h = check_hypotheses(&c);
        assert!(!h.h2_monotone.pass);
        assert_eq!(h.h2_monotone.witness, vec![GridPoint { k: 4, q: 12 }, GridPoint { k: 5, q: 12 }]);
    }

    #[test]
    fn additivity_examples() {
        let id = ScalarCandidate::identity(12).unwrap();
        let a = derive_additivity(&id, GridPoint::new(1, 12).unwrap(), r(2), r(3)).unwrap();
        assert!((a.lhs - 5.0 / 12.0).abs() < 1e-15 && (a.rhs - 5.0 / 12.0).abs() < 1e-15);

        let sq = ScalarCandidate::from_fn(12, &[], |x| x * x).unwrap();
        let a0 = GridPoint::new(1, 12).unwrap();
        let a = derive_additivity(&sq, a0, r(2), r(3)).unwrap();
        let expect = 2.0 * 2.0 * 3.0 * (1.0f64 / 12.0).powi(2);
        assert!((a.deviation - expect).abs() < 1e-15);

        assert!(matches!(derive_additivity(&id, a0, Rational64::new(1, 2), r(1)), Err(Error::OffGrid(_))));
        assert!(matches!(derive_additivity(&id, a0, r(7), r(6)), Err(Error::OffGrid(_))));
        let ex = ScalarCandidate::from_fn(12, &[7], |x| x).unwrap();
        assert!(matches!(derive_additivity(&ex, a0, r(2), r(3)), Err(Error::OffGrid(_))));
    }

    #[test]
    fn identity_verdicts() {
        let rep = verify_identity(&ScalarCandidate::identity(60).unwrap()).unwrap();
        assert_eq!(rep.verdict, LemmaVerdict::Identity);
        assert_eq!(rep.identity_deviation, 0.0);
        assert!(rep.max_link_deviation < 1e-12);

        let sine = ScalarCandidate::from_fn(60, &[], |x| x + 0.001 * (2.0 * std::f64::consts::PI * x).sin()).unwrap();
        let rep = lemma_report(&sine);
        assert!(!rep.hypothesis_results.h3_triple_sum.pass);
        assert!(matches!(verify_identity(&sine), Err(Error::HypothesesNotMet(m)) if m == "H3"));

        let ex = ScalarCandidate::from_fn(42, &[6], |x| x).unwrap();
        let rep = verify_identity(&ex).unwrap();
        assert_eq!(rep.verdict, LemmaVerdict::Identity);
        assert_eq!(rep.excluded, vec![6]);
    }

    #[test]
    fn excluded_values_are_free() {
        // an arbitrary value at an excluded point changes nothing
        let mut values: BTreeMap<u32, f64> = (0..=42).map(|k| (k, k as f64 / 42.0)).collect();
        values.insert(6, 0.9);
        let c = ScalarCandidate::new(42, values, [6].into()).unwrap();
        assert_eq!(c.value(6), None);
        assert_eq!(verify_identity(&c).unwrap().verdict, LemmaVerdict::Identity);
    }

    #[test]
    fn json_shape() {
        let c = ScalarCandidate::from_fn(3, &[2], |x| x).unwrap();
        let j = serde_json::to_value(&c).unwrap();
        assert_eq!(j, serde_json::json!({"Q": 3, "excluded": [2], "values": {"0": 0.0, "1": 1.0 / 3.0, "3": 1.0}}));
        let back: ScalarCandidate = serde_json::from_value(j).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<ScalarCandidate>(r#"{"Q":3,"values":{"0":0.0,"1":0.3}}"#).is_err());
    }

    fn candidate() -> impl Strategy<Value = ScalarCandidate> {
        (3u32..=40)
            .prop_flat_map(|q| {
                (Just(q), prop::collection::btree_set(1..=q, 0..3), prop::collection::vec((0..=q, -2i32..=2), 0..3))
            })
            .prop_map(|(q, excluded, bumps)| {
                let mut values: BTreeMap<u32, f64> = (0..=q).map(|k| (k, k as f64 / q as f64)).collect();
                for (k, b) in bumps {
                    let v = values[&k] + b as f64 * 1e-3;
                    values.insert(k, v.clamp(0.0, 1.0));
                }
                values.retain(|k, _| !excluded.contains(k));
                ScalarCandidate::new(q, values, excluded).unwrap()
            })
    }

    proptest! {
        #[test]
        fn passing_candidates_are_additive(c in candidate()) {
            let h = check_hypotheses(&c);
            prop_assume!(h.all_pass());
            let q = c.q();
            for a in 1..=q {
                for rn in 0..=q {
                    for sn in 0..=q - rn {
                        if (rn + sn) * a > q { break; }
                        let a0 = GridPoint::new(a, q).unwrap();
                        if let Ok(add) = derive_additivity(&c, a0, r(rn as i64), r(sn as i64)) {
                            prop_assert!(add.deviation <= DERIVED, "{a0} {rn} {sn}: {}", add.deviation);
                        }
                    }
                }
            }
        }

        #[test]
        fn unit_and_complement_are_forced(c in candidate()) {
            let h = check_hypotheses(&c);
            prop_assume!(h.h1_g0.pass && h.h3_triple_sum.pass);
            let q = c.q();
            if let Some(g1) = c.value(q) {
                prop_assert!((g1 - 1.0).abs() <= DERIVED);
            }
            for k in 0..=q {
                if let (Some(a), Some(b)) = (c.value(k), c.value(q - k)) {
                    prop_assert!((a + b - 1.0).abs() <= DERIVED);
                }
            }
        }
    }
}
