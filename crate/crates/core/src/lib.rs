//! Exact long-time coin states of discrete-time coined quantum walks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod characteristic;
pub mod error;
pub mod linalg;
pub mod sampling;
pub mod simulator;
pub mod states;
pub mod text;
pub mod walk;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, DensityMatrix, EigenSystem, Subsystem};
