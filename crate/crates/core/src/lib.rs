//! Channel modeling, detection and capacity analysis for near-field
//! magnetic-induction links that multiplex orbital angular momentum (OAM)
//! modes over rings of coils.

pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod channel;
pub mod cli;
pub mod config;
pub mod harness;
pub mod inductance;
pub mod linalg;
pub mod metrics;
pub mod quadrature;
pub mod txrx;

pub use error::{Error, Result};
