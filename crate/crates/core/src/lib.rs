//! Hausdorff-metric entropy of finitely generated semigroups of maps on
//! compact interval/circle product spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: spaces, points, metrics, grids;
//! * [`pointset`]: finite sets as hyperspace elements, Hausdorff distance;
//! * [`dynamics`]: maps, generating families, orbit sets `F^n(x)`;
//! * [`bowen`]: `n`-metrics and spanning/separated counts;
//! * [`entropy`]: growth tables and entropy estimates;
//! * [`chaos`]: Li–Yorke and distributional chaos diagnostics.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bowen;
pub mod chaos;
pub mod dynamics;
pub mod entropy;
pub mod error;
pub mod geometry;
pub mod pointset;

pub use error::{Error, Result};
