//! Measurement as pre-measurement, sectorization and readout.
//!
//! The state of the measuring context is never modelled: it is an opaque
//! [`ContextStateLabel`] attached to each system projector. Interacting with
//! a context `C` turns a modality into a mixture with one sector per outcome
//! of `C`, and reading the result selects one sector as the new modality.
//! Zero-probability sectors are kept so that sector indices stay stable.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csm::{sample_index, sampling_weights, Context, FrequencyTable, MeasurementRecord};
use crate::error::{Error, Result};
use crate::hilbert::json::{vector_from_json, Scalar};
use crate::hilbert::{transition_probabilities, Field, OrthonormalBasis, Projector, UnitVector, UnitaryMatrix};
use crate::seed::{self, split};
use crate::tolerance::{DERIVED, STRUCTURAL};

/// Largest `||U^dagger U - I||` accepted by [`evolve`].
pub const UNITARY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextStateLabel {
    pub context: String,
    pub sector: usize,
    #[serde(default)]
    pub metadata: String,
}

impl ContextStateLabel {
    pub fn new(context: impl Into<String>, sector: usize) -> Self {
        Self { context: context.into(), sector, metadata: String::new() }
    }
}

/// System projector together with the label of the context state.
#[derive(Debug, Clone)]
pub struct PreMeasurementModality {
    projector: Projector,
    context_state: ContextStateLabel,
}

impl PreMeasurementModality {
    pub fn new(projector: Projector, context_state: ContextStateLabel) -> Result<Self> {
        if projector.rank() != 1 {
            return Err(Error::NotProjector(format!("rank {} instead of 1", projector.rank())));
        }
        Ok(Self { projector, context_state })
    }

    pub fn from_vector(v: &UnitVector, context_state: ContextStateLabel) -> Self {
        Self { projector: v.projector(), context_state }
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }

    pub fn context_state(&self) -> &ContextStateLabel {
        &self.context_state
    }

    pub fn dim(&self) -> usize {
        self.projector.dim()
    }
}

#[derive(Debug, Clone)]
pub struct Sector {
    pub p: f64,
    pub projector: Projector,
    pub context_state: ContextStateLabel,
}

/// `sum_j p_j |phi_j><phi_j| (x) rho_j`, with the `rho_j` as labels.
#[derive(Debug, Clone)]
pub struct SectorizedState {
    sectors: Vec<Sector>,
}

impl SectorizedState {
    /// Probabilities must sum to 1 within 1e-10 (entries down to -1e-12 are
    /// clamped to 0) and the projectors must be mutually orthogonal.
    pub fn new(mut sectors: Vec<Sector>) -> Result<Self> {
        if sectors.is_empty() {
            return Err(Error::InvalidArgument("no sectors".into()));
        }
        for s in &mut sectors {
            if s.p < -STRUCTURAL || s.p > 1.0 + DERIVED || !s.p.is_finite() {
                return Err(Error::InvalidArgument(format!("sector probability {}", s.p)));
            }
            s.p = s.p.clamp(0.0, 1.0);
        }
        let total: f64 = sectors.iter().map(|s| s.p).sum();
        if (total - 1.0).abs() > DERIVED {
            return Err(Error::InvalidArgument(format!("sector probabilities sum to {total}")));
        }
        for j in 0..sectors.len() {
            if sectors[j].projector.rank() != 1 {
                return Err(Error::NotProjector(format!("sector {j} has rank {}", sectors[j].projector.rank())));
            }
            for k in j + 1..sectors.len() {
                let overlap = (sectors[j].projector.matrix() * sectors[k].projector.matrix()).trace().norm();
                if overlap >= DERIVED {
                    return Err(Error::InvalidArgument(format!("sectors {j} and {k} overlap: {overlap:e}")));
                }
            }
        }
        Ok(Self { sectors })
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.sectors.iter().map(|s| s.p).collect()
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }
}

/// One sector per outcome of `c2`, weighted by the Born probability.
pub fn pre_measure(m: &PreMeasurementModality, c2: &OrthonormalBasis) -> Result<SectorizedState> {
    if m.dim() != c2.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: c2.dim() });
    }
    let probs = transition_probabilities(&m.projector, c2)?;
    let sectors = c2
        .projectors()
        .into_iter()
        .zip(probs)
        .enumerate()
        .map(|(j, (projector, p))| Sector { p, projector, context_state: ContextStateLabel::new(c2.label(), j) })
        .collect();
    SectorizedState::new(sectors)
}

pub fn read_out(s: &SectorizedState, k: usize) -> Result<PreMeasurementModality> {
    let sector = s.sectors.get(k).ok_or(Error::IndexOutOfRange { index: k, len: s.len() })?;
    if sector.p <= STRUCTURAL {
        return Err(Error::ZeroProbabilitySector { index: k, probability: sector.p });
    }
    PreMeasurementModality::new(sector.projector.clone(), sector.context_state.clone())
}

/// `P -> U P U^dagger`; the context label is unchanged.
pub fn evolve(m: &PreMeasurementModality, u: &UnitaryMatrix) -> Result<PreMeasurementModality> {
    if u.dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: u.dim() });
    }
    let defect = u.defect();
    if defect > UNITARY_TOLERANCE {
        return Err(Error::NotUnitary(defect));
    }
    PreMeasurementModality::new(m.projector.conjugated_by(u)?, m.context_state.clone())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanStep {
    pub context: Context,
    /// Applied before the context interacts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<UnitaryMatrix>,
}

#[derive(Serialize, Deserialize)]
struct InitialJson {
    vector: Vec<Scalar>,
    #[serde(default)]
    field: Option<Field>,
    #[serde(default = "initial_label")]
    context: String,
    #[serde(default)]
    sector: usize,
    #[serde(default)]
    metadata: String,
}

fn initial_label() -> String {
    "initial".into()
}

/// Chain plan, as JSON:
/// `{"initial": {"vector": [..], "context": "z"}, "steps": [{"context": <basis>, "unitary": <rows>}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PlanJson", into = "PlanJson")]
pub struct MeasurementPlan {
    pub initial: UnitVector,
    pub label: ContextStateLabel,
    pub steps: Vec<PlanStep>,
}

#[derive(Serialize, Deserialize)]
struct PlanJson {
    initial: InitialJson,
    steps: Vec<PlanStep>,
}

impl TryFrom<PlanJson> for MeasurementPlan {
    type Error = Error;

    fn try_from(j: PlanJson) -> Result<Self> {
        let components = vector_from_json(&j.initial.vector);
        let field = j.initial.field.unwrap_or(if components.iter().all(|c| c.im == 0.0) { Field::Real } else { Field::Complex });
        let initial = UnitVector::normalized(field, components)?;
        let label = ContextStateLabel { context: j.initial.context, sector: j.initial.sector, metadata: j.initial.metadata };
        Self::new(initial, label, j.steps)
    }
}

impl From<MeasurementPlan> for PlanJson {
    fn from(p: MeasurementPlan) -> Self {
        PlanJson {
            initial: InitialJson {
                vector: crate::hilbert::json::vector_to_json(p.initial.components()),
                field: Some(p.initial.field()),
                context: p.label.context,
                sector: p.label.sector,
                metadata: p.label.metadata,
            },
            steps: p.steps,
        }
    }
}

impl MeasurementPlan {
    pub fn new(initial: UnitVector, label: ContextStateLabel, steps: Vec<PlanStep>) -> Result<Self> {
        let dim = initial.dim();
        for s in &steps {
            if s.context.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: s.context.dim() });
            }
            if let Some(u) = &s.unitary {
                if u.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: u.dim() });
                }
            }
        }
        Ok(Self { initial, label, steps })
    }

    /// Plain chain of contexts without evolution.
    pub fn contexts(initial: UnitVector, label: impl Into<String>, contexts: &[Context]) -> Result<Self> {
        let steps = contexts.iter().map(|c| PlanStep { context: c.clone(), unitary: None }).collect();
        Self::new(initial, ContextStateLabel::new(label, 0), steps)
    }

    pub fn start(&self) -> PreMeasurementModality {
        PreMeasurementModality::from_vector(&self.initial, self.label.clone())
    }
}

#[derive(Debug, Clone)]
pub struct ChainOutcome {
    pub record: MeasurementRecord,
    pub last: PreMeasurementModality,
}

pub fn run_measurement_chain_with<R: Rng + ?Sized>(plan: &MeasurementPlan, rng: &mut R) -> Result<ChainOutcome> {
    let mut m = plan.start();
    let mut record = MeasurementRecord::default();
    for step in &plan.steps {
        if let Some(u) = &step.unitary {
            m = evolve(&m, u)?;
        }
        let s = pre_measure(&m, &step.context)?;
        let k = sample_index(&sampling_weights(&s.probabilities()), rng);
        record.push(step.context.label(), k);
        m = read_out(&s, k)?;
    }
    Ok(ChainOutcome { record, last: m })
}

/// Evolve, pre-measure and read out a sampled sector at each step.
pub fn run_measurement_chain(plan: &MeasurementPlan, seed: u64) -> Result<ChainOutcome> {
    run_measurement_chain_with(plan, &mut seed::rng(seed))
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainStatistics {
    pub runs: usize,
    /// Outcome counts per step.
    pub steps: Vec<FrequencyTable>,
    /// Counts of complete outcome sequences, keyed like `"0-1-0"`.
    pub sequences: BTreeMap<String, u64>,
}

/// `runs` independent chains, run `r` seeded with `split(seed, r)`.
pub fn run_chains(plan: &MeasurementPlan, runs: usize, seed: u64) -> Result<ChainStatistics> {
    let records = (0..runs)
        .into_par_iter()
        .map(|r| run_measurement_chain(plan, split(seed, r as u64)).map(|o| o.record.outcomes()))
        .collect::<Result<Vec<_>>>()?;
    let dim = plan.initial.dim();
    let mut steps: Vec<FrequencyTable> =
        plan.steps.iter().map(|_| FrequencyTable { trials: runs, counts: vec![0; dim] }).collect();
    let mut sequences = BTreeMap::new();
    for outcomes in &records {
        for (t, &k) in outcomes.iter().enumerate() {
            steps[t].counts[k] += 1;
        }
        let key = outcomes.iter().map(usize::to_string).collect::<Vec<_>>().join("-");
        *sequences.entry(key).or_insert(0) += 1;
    }
    Ok(ChainStatistics { runs, steps, sequences })
}

/// Exact distribution of the outcome at every step, obtained by pushing the
/// sector weights through the plan.
pub fn exact_step_marginals(plan: &MeasurementPlan) -> Result<Vec<Vec<f64>>> {
    // weights over the modalities currently possible, keyed by projector
    let mut current: Vec<(f64, PreMeasurementModality)> = vec![(1.0, plan.start())];
    let mut out = Vec::with_capacity(plan.steps.len());
    for step in &plan.steps {
        let mut marginal = vec![0.0; step.context.dim()];
        let mut next: Vec<(f64, PreMeasurementModality)> = Vec::new();
        for (w, m) in &current {
            let m = match &step.unitary {
                Some(u) => evolve(m, u)?,
                None => m.clone(),
            };
            let s = pre_measure(&m, &step.context)?;
            for (k, sector) in s.sectors().iter().enumerate() {
                if sector.p <= STRUCTURAL {
                    continue;
                }
                marginal[k] += w * sector.p;
                let new = read_out(&s, k)?;
                match next.iter_mut().find(|(_, n)| n.context_state == new.context_state) {
                    Some((acc, _)) => *acc += w * sector.p,
                    None => next.push((w * sector.p, new)),
                }
            }
        }
        out.push(marginal);
        current = next;
    }
    Ok(out)
}

/// Context that measures in the basis `u^dagger C`, so that measuring it
/// equals evolving by `u` and then measuring `C`.
pub fn rotated_context(c: &OrthonormalBasis, u: &UnitaryMatrix) -> Result<Context> {
    let vectors = c.vectors().iter().map(|v| u.adjoint().apply(v)).collect::<Result<Vec<_>>>()?;
    Ok(Arc::new(OrthonormalBasis::new(format!("{}'", c.label()), vectors)?))
}
