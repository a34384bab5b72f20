//! Frame functions: assignments of probabilities to unit vectors that sum to
//! one over every orthonormal basis.
//!
//! A [`FrameFunction`] is either tabulated on finitely many directions, a
//! closed-form Rust closure, or the Born functional `x -> <x|rho|x>` of a
//! density matrix. Evaluation is ray-invariant: closed forms receive the
//! canonical-phase representative of their argument and tabulated lookups use
//! the distance between rays.

mod check;
mod extremes;
mod fit;
mod general;

pub use check::{check_frame_condition, check_frame_condition_on, FrameReport};
pub use extremes::{extreme_values, latitude_band_bounds, Band, Extremes};
pub use fit::{reconstruct_rho, reconstruct_rho_with, RegularityReport, Verdict, Witness};
pub use general::{eval_general_form, GeneralFrameParams};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::json::{vector_from_json, vector_to_json, Scalar};
use crate::hilbert::{DensityMatrix, Field, OrthonormalBasis, UnitVector};
use crate::tolerance::DERIVED;

/// Largest ray distance at which a tabulated entry answers a lookup.
pub const TABLE_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FrameKind {
    Tabulated,
    ClosedForm,
    Born,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub v: UnitVector,
    pub f: f64,
}

type Closure = Arc<dyn Fn(&UnitVector) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Evaluator {
    Tabulated(Vec<TableEntry>),
    ClosedForm(Closure),
    Born(DensityMatrix),
}

#[derive(Clone)]
pub struct FrameFunction {
    dim: usize,
    field: Field,
    name: String,
    evaluator: Evaluator,
}

impl fmt::Debug for FrameFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrameFunction")
            .field("dim", &self.dim)
            .field("field", &self.field)
            .field("name", &self.name)
            .field("kind", &self.kind())
            .finish()
    }
}

impl FrameFunction {
    pub fn born(rho: DensityMatrix, field: Field) -> Self {
        Self { dim: rho.dim(), field, name: "born".into(), evaluator: Evaluator::Born(rho) }
    }

    pub fn closed_form(
        dim: usize,
        field: Field,
        name: impl Into<String>,
        f: impl Fn(&UnitVector) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { dim, field, name: name.into(), evaluator: Evaluator::ClosedForm(Arc::new(f)) }
    }

    /// `x -> 1 / dim`.
    pub fn constant(dim: usize, field: Field) -> Self {
        let c = 1.0 / dim as f64;
        Self::closed_form(dim, field, "constant", move |_| c)
    }

    /// `u -> cos^2(u, p)` written as a closed form.
    pub fn cos_squared(p: &UnitVector) -> Self {
        let p = p.clone();
        Self::closed_form(p.dim(), p.field(), "cos2", move |u| u.overlap(&p))
    }

    pub fn tabulated(field: Field, entries: Vec<TableEntry>) -> Result<Self> {
        let dim = entries.first().map(|e| e.v.dim()).ok_or(Error::InvalidArgument("empty table".into()))?;
        if let Some(e) = entries.iter().find(|e| e.v.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: e.v.dim() });
        }
        Ok(Self { dim, field, name: "tabulated".into(), evaluator: Evaluator::Tabulated(entries) })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> FrameKind {
        match self.evaluator {
            Evaluator::Tabulated(_) => FrameKind::Tabulated,
            Evaluator::ClosedForm(_) => FrameKind::ClosedForm,
            Evaluator::Born(_) => FrameKind::Born,
        }
    }

    pub fn entries(&self) -> Option<&[TableEntry]> {
        match &self.evaluator {
            Evaluator::Tabulated(e) => Some(e),
            _ => None,
        }
    }

    pub fn rho(&self) -> Option<&DensityMatrix> {
        match &self.evaluator {
            Evaluator::Born(r) => Some(r),
            _ => None,
        }
    }

    /// `f(x)`; fails if the raw value leaves `[0, 1]` by more than the
    /// derived tolerance, otherwise clamps into `[0, 1]`.
    pub fn evaluate(&self, x: &UnitVector) -> Result<f64> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.dim() });
        }
        let value = match &self.evaluator {
            Evaluator::Born(rho) => rho.expectation(x)?,
            Evaluator::ClosedForm(f) => f(&x.canonical_phase()),
            Evaluator::Tabulated(entries) => {
                let (distance, entry) = entries
                    .iter()
                    .map(|e| (e.v.ray_distance(x), e))
                    .min_by(|a, b| a.0.total_cmp(&b.0))
                    .expect("table is non-empty");
                if distance > TABLE_RADIUS {
                    return Err(Error::NoTableEntry { distance, tolerance: TABLE_RADIUS });
                }
                entry.f
            }
        };
        if !(-DERIVED..=1.0 + DERIVED).contains(&value) {
            return Err(Error::EvaluationRange { value });
        }
        Ok(value.clamp(0.0, 1.0))
    }

    /// Orthonormal bases formed entirely by tabulated directions, at most
    /// `limit` of them, in lexicographic order of entry indices.
    pub fn stored_bases(&self, limit: usize) -> Vec<OrthonormalBasis> {
        let Some(entries) = self.entries() else { return Vec::new() };
        let n = entries.len();
        let orthogonal: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| i != j && entries[i].v.inner(&entries[j].v).norm() <= DERIVED).collect())
            .collect();
        let mut out = Vec::new();
        let mut stack = Vec::new();
        fn extend(
            start: usize,
            stack: &mut Vec<usize>,
            dim: usize,
            orth: &[Vec<bool>],
            entries: &[TableEntry],
            out: &mut Vec<OrthonormalBasis>,
            limit: usize,
        ) {
            if out.len() >= limit {
                return;
            }
            if stack.len() == dim {
                let vectors = stack.iter().map(|&i| entries[i].v.clone()).collect();
                let label = format!("table{stack:?}");
                if let Ok(b) = OrthonormalBasis::new(label, vectors) {
                    out.push(b);
                }
                return;
            }
            for j in start..entries.len() {
                if stack.iter().all(|&i| orth[i][j]) {
                    stack.push(j);
                    extend(j + 1, stack, dim, orth, entries, out, limit);
                    stack.pop();
                }
            }
        }
        extend(0, &mut stack, self.dim, &orthogonal, entries, &mut out, limit);
        out
    }

    pub fn to_fixture(&self) -> Result<FrameFixture> {
        match &self.evaluator {
            Evaluator::Born(rho) => Ok(FrameFixture::Born { field: Some(self.field), rho: rho.clone() }),
            Evaluator::Tabulated(entries) => Ok(FrameFixture::Tabulated {
                dim: self.dim,
                field: self.field,
                entries: entries.iter().map(|e| EntryJson { v: vector_to_json(e.v.components()), f: e.f }).collect(),
            }),
            Evaluator::ClosedForm(_) => {
                Err(Error::InvalidArgument(format!("closed-form function {:?} has no fixture form", self.name)))
            }
        }
    }

    pub fn from_fixture(fixture: FrameFixture) -> Result<Self> {
        match fixture {
            FrameFixture::Born { field, rho } => {
                let field = field.unwrap_or(if rho.is_real() { Field::Real } else { Field::Complex });
                Ok(Self::born(rho, field))
            }
            FrameFixture::Tabulated { dim, field, entries } => {
                let entries = entries
                    .into_iter()
                    .map(|e| Ok(TableEntry { v: UnitVector::normalized(field, vector_from_json(&e.v))?, f: e.f }))
                    .collect::<Result<Vec<_>>>()?;
                let f = Self::tabulated(field, entries)?;
                if f.dim != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: f.dim });
                }
                Ok(f)
            }
        }
    }
}

/// On-disk form of a frame function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FrameFixture {
    Tabulated { dim: usize, field: Field, entries: Vec<EntryJson> },
    Born {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<Field>,
        rho: DensityMatrix,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub v: Vec<Scalar>,
    pub f: f64,
}

/// Frame function on R^2 taking the value 1 on directions with polar angle
/// in `[0, pi/2)` (mod pi) and 0 elsewhere, tabulated at `2 * resolution`
/// equally spaced angles.
///
/// Every orthonormal basis of R^2 pairs one direction from each half, so the
/// frame condition holds exactly, yet the function is not a quadratic form:
/// a qubit taken alone admits non-Born probability assignments.
pub fn classical_qubit_model(resolution: usize) -> Result<FrameFunction> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let half = std::f64::consts::FRAC_PI_2;
    let entries = (0..2 * resolution)
        .map(|k| {
            let theta = half * k as f64 / resolution as f64;
            let f = if k < resolution { 1.0 } else { 0.0 };
            Ok(TableEntry { v: UnitVector::real(&[theta.cos(), theta.sin()])?, f })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameFunction::tabulated(Field::Real, entries)?.with_name("classical-qubit"))
}
