//! Deterministic adaptive quadrature.
//!
//! Two integration domains are supported:
//!
//! * the standard probability simplex `x_i >= 0, sum x_i = 1` carrying the
//!   Feynman-parameter measure `dmu_n` ([`integrate_simplex`]), and
//! * `R^4` with the momentum measure `d^4k/(2pi)^4` ([`integrate_r4`]).
//!
//! The simplex is mapped to the unit cube by a stick-breaking (Duffy)
//! transform, oriented so that a declared singular face collapses to a
//! coordinate origin; the cube is then integrated with an adaptive
//! Genz-Malik rule (Gauss-Kronrod 15 in one dimension). `R^4` uses spherical
//! coordinates with fixed Gauss rules in the angles and an adaptive,
//! compactified radial direction.
//!
//! Subdivision order, region identifiers and the final reduction order are
//! all fixed, so results are bit-identical for any worker count.

mod adaptive;
mod r4;
mod rules;
mod simplex;

pub use r4::{integrate_r4, integrate_r4_vec, AngularGrid, R4Integrand, R4VecIntegrand};
pub use simplex::{
    integrate_simplex, integrate_simplex_vec, SimplexIntegrand, SimplexVecIntegrand,
};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Result of one integration run.
#[derive(Clone, Debug)]
pub struct IntegralResult {
    pub value: f64,
    /// Heuristic upper bound on the error; never zero for adaptive runs.
    pub error_estimate: f64,
    pub evaluations: u64,
    /// `false` when the evaluation budget ran out before the tolerance.
    pub converged: bool,
}

/// Result of a vector-valued integration run (components share the
/// subdivision tree; the error estimate is a max-norm bound).
#[derive(Clone, Debug)]
pub struct VecIntegralResult {
    pub values: Vec<f64>,
    pub error_estimate: f64,
    pub evaluations: u64,
    pub converged: bool,
}

impl VecIntegralResult {
    pub fn scalar(&self) -> IntegralResult {
        IntegralResult {
            value: self.values[0],
            error_estimate: self.error_estimate,
            evaluations: self.evaluations,
            converged: self.converged,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QuadError {
    /// The integrand returned a non-finite value; the offending point is named.
    NonFiniteSample { point: Vec<f64> },
    /// Invalid options or integrand metadata.
    BadInput(String),
    /// The declared large-momentum falloff failed the sampling check.
    DecayCheck { radius: f64, ratio: f64 },
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadError::NonFiniteSample { point } => {
                write!(f, "integrand returned a non-finite value at {:?}", point)
            }
            QuadError::BadInput(msg) => write!(f, "invalid quadrature input: {}", msg),
            QuadError::DecayCheck { radius, ratio } => write!(
                f,
                "declared decay exponent violated near |k| = {:.3e} (growth ratio {:.3e})",
                radius, ratio
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for QuadError {}

/// Tuning knobs shared by all integrators.
#[derive(Clone, Debug)]
pub struct QuadOptions {
    /// Integrand-call budget; exhausting it flags the result non-converged.
    pub max_evals: u64,
    /// Worker count for subregion evaluation; `<= 1` runs serially. Results
    /// are bit-identical for any value.
    pub workers: usize,
    /// Fixed angular orders for the `R^4` integrator.
    pub angular: AngularGrid,
    /// Re-run the angular sum at lower order and fold the difference into
    /// the error estimate.
    pub angular_check: bool,
    /// Scale of the radial compactification `r = scale * t/(1-t)`.
    pub radial_scale: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            max_evals: 100_000_000,
            workers: 1,
            angular: AngularGrid::default(),
            angular_check: true,
            radial_scale: 1.0,
        }
    }
}

impl QuadOptions {
    pub fn with_budget(mut self, max_evals: u64) -> Self {
        self.max_evals = max_evals;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<(), QuadError> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(QuadError::BadInput(format!("tol must be positive, got {}", tol)));
    }
    Ok(())
}
