//! Epidemic simulation on household contact networks, together with
//! test-budgeted source detection algorithms and the closed-form success
//! predictions they are benchmarked against.
//!
//! The crate is organized bottom-up:
//!
//! - [`network`]: finite household networks and their infinite tree
//!   counterpart, plus a text dump/load format.
//! - [`epidemic`]: a discrete-time compartmental model with asymptomatic
//!   courses and hospitalization, run until the first hospitalized case.
//! - [`session`]: the query interface an investigation is allowed to use
//!   (rate-limited tests with one-day turnaround, contact and household
//!   queries), with full cost accounting.
//! - [`detect`]: local search source estimators driven entirely through a
//!   session.
//! - [`dmp`]: a message-passing posterior baseline with random sensors.
//! - [`sg`]: a sensor-placing baseline that filters candidates by
//!   distance/delay consistency.
//! - [`analytic`]: exact path-count combinatorics on the idealized tree and
//!   closed-form success probabilities and path-length laws.
//! - [`experiment`]: deterministic replicate orchestration (rayon-parallel by
//!   default, sequential without the `parallel` feature), CSV emission, and
//!   theory-vs-simulation tables.
//! - [`acceptance`]: the end-to-end validation suite run by both the
//!   `acceptance` test target and the CLI `validate` subcommand.

pub mod acceptance;
pub mod analytic;
pub mod detect;
pub mod dmp;
pub mod epidemic;
pub mod error;
pub mod experiment;
pub mod network;
pub mod rng;
pub mod session;
pub mod sg;
pub mod stats;

pub use error::Error;

/// Node identifier. Dense indices into adjacency storage for finite
/// networks; interned discovery order for lazily materialized trees.
pub type NodeId = usize;
