//! Monotone least-squares regression and its pointwise limit theory.
//!
//! The crate has three layers:
//!
//! * estimation: the isotonic least-squares fit computed by pool adjacent
//!   violators ([`isotonic`]), with two independent closed-form routes
//!   (the min-max window formula and the CUSUM/greatest-convex-minorant
//!   construction in [`gcm`]) used as cross-checking oracles;
//! * limit laws: seeded Monte Carlo sampling of the slope-from-left at
//!   zero of the greatest convex minorant of a drifted two-sided Brownian
//!   motion ([`limit_law`]), together with the triangular-array data
//!   generating processes that produce those laws ([`data_gen`]);
//! * inference: HulC, subsampling with an estimated rate, and oracle-pivot
//!   confidence intervals ([`inference`]), plus a batch experiment runner
//!   ([`harness`]) that reproduces the simulation studies and writes tidy
//!   CSV output.

pub mod data_gen;
pub mod error;
pub mod gcm;
pub mod harness;
pub mod inference;
pub mod isotonic;
pub mod limit_law;
pub mod stats;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;
