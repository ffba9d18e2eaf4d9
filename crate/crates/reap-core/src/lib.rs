//! Privacy-payment contract design for crowdsensing data aggregation.
//!
//! A fusion center buys perturbed sensing data from participatory users.
//! Each user adds Laplace noise calibrated to a contracted differential
//! privacy level and receives a payment in return. This crate contains:
//!
//! - [`privacy`]: Laplace calibration/sampling and the privacy-to-accuracy
//!   bridge (predicted confidence interval of the average aggregate).
//! - [`discrete`]: closed-form optimal contract menus for finitely many
//!   user types, under complete and incomplete information.
//! - [`continuous`]: the optimal contract function for a continuum of
//!   types, solved by an optimal-control reduction.
//! - [`oracle`]: brute-force re-derivation of optimal menus on small
//!   instances, used to validate the closed forms.
//! - [`sim`]: agent-based simulation of menu broadcast, self-selection,
//!   perturbed reporting and Monte Carlo accuracy measurement.
//!
//! Everything is deterministic given explicit seeds; no global state.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod continuous;
pub mod discrete;
mod error;
pub(crate) mod math;
pub mod oracle;
pub mod privacy;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
