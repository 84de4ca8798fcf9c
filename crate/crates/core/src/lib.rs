//! Exact-derivative verification of explicit Hermitian metrics: twistor-space
//! solutions of the Strominger system and Calabi-type balanced metrics on
//! canonical bundles.

pub mod acs;
pub mod calabi;
pub mod calculus;
pub mod chart;
pub mod error;
pub mod expr;
pub mod fields;
pub mod form;
pub mod harness;
pub mod hermitian;
pub mod hyperkahler;
pub mod jet;
pub mod linalg;
pub mod residual;
pub mod strominger;
pub mod twistor;

pub use error::{Error, Result};
