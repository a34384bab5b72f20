//! Numerical tolerances shared by every module.
//!
//! The constants are the defaults; [`Tolerances`] bundles them so callers
//! (the CLI in particular) can override thresholds that decide verdicts.

use serde::{Deserialize, Serialize};

/// Exact-by-construction quantities (norms, hermiticity).
pub const STRUCTURAL: f64 = 1e-12;
/// Quantities derived through a few matrix products (orthogonality, traces).
pub const DERIVED: f64 = 1e-10;
/// Maximum validation residual for a frame function to count as regular.
pub const REGULARITY: f64 = 1e-6;
/// Maximum frame-condition deviation accepted when fitting.
pub const FRAME: f64 = 1e-6;
/// Distance from a great circle still counted as "on" it.
pub const ON_CIRCLE: f64 = 1e-8;
/// Width of the statistical acceptance band, in standard errors.
pub const SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub structural: f64,
    pub derived: f64,
    pub regularity: f64,
    pub frame: f64,
    pub on_circle: f64,
    pub sigmas: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structural: STRUCTURAL,
            derived: DERIVED,
            regularity: REGULARITY,
            frame: FRAME,
            on_circle: ON_CIRCLE,
            sigmas: SIGMAS,
        }
    }
}

impl Tolerances {
    /// Half-width of the acceptance band for an empirical frequency
    /// estimated from `trials` Bernoulli draws with success probability `p`.
    ///
    /// For `p` at 0 or 1 the band collapses to zero: such outcomes are
    /// deterministic and must be reproduced exactly.
    pub fn binomial_band(&self, p: f64, trials: usize) -> f64 {
        self.sigmas * binomial_sigma(p, trials)
    }
}

pub fn binomial_sigma(p: f64, trials: usize) -> f64 {
    let p = p.clamp(0.0, 1.0);
    (p * (1.0 - p) / trials as f64).sqrt()
}
