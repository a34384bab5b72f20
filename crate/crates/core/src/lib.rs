//! Numerical toolkit around contextual measurements and Gleason's theorem.
//!
//! * [`hilbert`]: vectors, bases, projectors, density matrices, unitaries and
//!   seeded random generators over the real or complex field.
//! * [`frame`]: frame functions, their regularity check and density-matrix
//!   reconstruction.
//! * [`sphere`]: latitudes, descents and descent chains on the unit sphere
//!   of R^3.
//! * [`scalar_lemma`]: grid verification that a monotone, triple-additive
//!   function on [0, 1] is the identity.
//! * [`csm`]: contexts, modalities, extravalence classes and Monte-Carlo
//!   transition experiments.
//! * [`pipeline`]: pre-measurement modalities, sectorized states and
//!   measurement chains.

// negated float comparisons below are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csm;
pub mod error;
pub mod frame;
pub mod hilbert;
pub mod pipeline;
pub mod scalar_lemma;
pub mod seed;
pub mod sphere;
pub mod tolerance;

pub use csm::{Context, MeasurementRecord, Modality, QuantumSystem};
pub use error::{Error, Result};
pub use frame::{FrameFunction, RegularityReport, Verdict};
pub use hilbert::{
    born_probability, DensityMatrix, Field, OrthonormalBasis, Permutation, Projector, UnitVector, UnitaryMatrix,
};
pub use pipeline::{MeasurementPlan, PreMeasurementModality, SectorizedState};
pub use scalar_lemma::{LemmaReport, ScalarCandidate};
pub use sphere::PironChain;
pub use tolerance::Tolerances;
