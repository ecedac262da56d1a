//! Model-free control of switching linear plants.
//!
//! The crate simulates sampled closed loops in which a controller (classic PI,
//! the discrete intelligent PI, or the derivative-free i*-PI) regulates a plant
//! that jumps between members of a bank of linear systems. Plants may carry an
//! output (measurement) delay or a delayed state term.
//!
//! - [`plant`]: state-space plants, history buffers, RK4 zero-order-hold stepping.
//! - [`controller`]: the control laws and their estimators.
//! - [`scenario`]: references, switching schedules, and [`scenario::run_closed_loop`].
//! - [`metrics`]: ISE/IAE, overshoot, settling and post-switch recovery.
//! - [`config`] and [`export`]: JSON documents, CSV traces, SVG plots.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod controller;
mod error;
pub mod export;
pub mod metrics;
pub mod plant;
pub mod scenario;

pub use error::{Error, Result};
