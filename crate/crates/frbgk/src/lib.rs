//! # frbgk
//!
//! A deterministic solver library for the one-dimensional polyatomic
//! Boltzmann-BGK equation, built from:
//!
//! - a high-order flux reconstruction spatial scheme with upwind interface
//!   fluxes ([`fr`]),
//! - a truncated nodal velocity/internal-energy discretization with
//!   automatic domain-extent selection ([`phase`]),
//! - a discretely conservative velocity model: Newton projection onto the
//!   modified Maxwellian whose discrete moments match exactly ([`dvm`]),
//! - a mean-preserving squeeze limiter that keeps the distribution
//!   nonnegative ([`limiter`]),
//! - RK4 time integration with collision-time-aware step control
//!   ([`solver`]),
//! - exact Euler references and shock diagnostics for validation
//!   ([`euler`], [`diagnostics`]),
//! - benchmark cases, a flat-file run configuration, and CSV output
//!   ([`cases`], [`config`], [`runner`]).
//!
//! Runnable demonstrations live in `examples/`; the `solver` binary drives
//! full runs and the validation suites from config files.

pub mod cases;
pub mod config;
pub mod diagnostics;
pub mod dvm;
pub mod error;
pub mod euler;
pub mod fr;
pub mod limiter;
pub mod output;
pub mod phase;
pub mod runner;
pub mod solver;
pub mod state;
pub mod validate;

pub use error::{Error, Result};
pub use state::{MacroState, Primitive};
