//! Physical-layer-security metrics for uplink IoT-to-LEO transmission.
//!
//! A typical ground device transmits to the nearest satellite of a
//! legitimate tier while satellites of every other tier try to overhear it.
//! The device splits its power between the message and artificial noise
//! that only the legitimate receiver can cancel. The crate provides:
//!
//! * [`geometry`]: shell geometry, visibility caps, contact-angle law and
//!   point-process samplers on spheres.
//! * [`channel`]: path loss, Gamma-approximated fading and SINR assembly.
//! * [`analytics`]: closed-form availability, coverage, successful
//!   communication, secrecy outage and secure communication probabilities.
//! * [`montecarlo`]: an independent snapshot simulator estimating the same
//!   metrics with standard errors.
//! * [`experiments`]: validation tables, parameter sweeps and the
//!   power-split optimizer.
//! * [`cli`]: configuration files, output formats and command dispatch for
//!   the `leosec` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod montecarlo;

pub use analytics::quadrature::{Quadrature, QuadratureSpec};
pub use analytics::MetricsReport;
pub use config::{NetworkConfig, Tier};
pub use error::{Error, Result};
