//! Blow-up rate diagnostics: exponent selection, the vorticity energy
//! budget, synthetic self-similar families, rate fits and the ODE lemma.
//!
//! No solution on a finite grid blows up. Rate fits are only meaningful on
//! the synthetic families, whose blow-up time is known by construction.

pub mod budget;
pub mod fit;
pub mod indices;
pub mod monitor;
pub mod ode;
pub mod synthetic;

pub use budget::{energy_budget, BudgetTerms};
pub use fit::{fit_rate, RateFit};
pub use indices::{exponent_identity_check, select_indices, IndexSelection};
pub use monitor::{qualitative_blowup_monitor, QualitativeSample};
pub use ode::{ode_lower_bound, verify_ode_lemma, OdeVerdict};
pub use synthetic::{synthetic_blowup_family, NormRequest, ShellProfile};

use crate::besov::BesovParams;

/// Diagnostics at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub norms: Vec<(BesovParams, f64)>,
    pub budget: Option<BudgetTerms>,
    /// Running fitted exponent of the first norm, when a blow-up time is known.
    pub fitted_exponent: Option<f64>,
}
