//! Structured-grid simulator for three immiscible fluids with wall
//! wettability, a standalone neo-Hookean solid solver, and an energy audit
//! that checks the dissipation balance of both.

// `!(x > 0.0)` is used on purpose so that NaN is rejected; stencil loops
// index several arrays at once.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod audit;
pub mod config;
pub mod energy;
pub mod error;
pub mod grid;
pub mod linsolve;
pub mod material;
pub mod measure;
pub mod output;
pub mod runner;
pub mod scenario;
pub mod solid;
pub mod spectral;
pub mod stepper;
pub mod wetting;

pub use error::{Error, Result};
