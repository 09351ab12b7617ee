#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod besov;
pub mod blowup;
pub mod bony;
pub mod check;
pub mod commutator;
pub mod corpus;
pub mod cutoff;
pub mod error;
pub mod lp;
pub mod ns;
pub mod report;
pub mod spectral;

pub use check::{Ratio, Slack};
pub use cutoff::{build_cutoffs, CutoffProfile};
pub use error::{Error, Result};
pub use lp::{band_range, default_lp, delta_proj, s_proj, BandRange, LittlewoodPaley};
pub use spectral::{Exponent, GridSpec, PhysicalField, SpectralField};
