//! Analytics and threshold optimizers for energy-efficient cooperative
//! spectrum sensing with an OR-rule fusion center.
//!
//! Two sensing schemes are covered:
//!
//! * [`censoring`]: every radio collects a fixed number of samples, runs an
//!   energy detector and only reports when the accumulated energy leaves the
//!   censoring region.
//! * [`relaxed`] and [`general`]: every radio runs a truncated sequential
//!   shifted energy test and stays silent if no boundary was crossed before
//!   the truncation point. [`relaxed`] handles the single-threshold case
//!   (lower boundary pinned at zero) in closed form, [`general`] handles the
//!   full double-threshold test.
//!
//! All functions are pure; the crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod censoring;
pub mod error;
pub mod general;
pub(crate) mod math;
pub mod metrics;
pub mod model;
pub mod relaxed;
pub(crate) mod search;
pub mod sequential;
pub mod special;

pub use error::{Error, Result};
pub use metrics::{Infeasibility, Outcome, SchemeMetrics, Solution};
pub use model::{Hypothesis, NetworkModel, SensorProfile};
pub use sequential::SequentialDesign;
