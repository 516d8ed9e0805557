//! Exact and statistical verification of the duality between moments of
//! random-polytope volumes and factorial moments of their vertex counts.
//!
//! The crate is split into an exact-arithmetic half ([`exactsym`],
//! [`duality`], [`oracle`]) and a simulation half ([`geometry`],
//! [`montecarlo`]). [`cli`] ties both to the `efron-dual` binary and owns the
//! report formats.

pub mod cli;
pub mod duality;
pub mod error;
pub mod exactsym;
pub mod geometry;
pub mod montecarlo;
pub mod oracle;

pub use error::{Error, Result};

/// Version string written into every report.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
