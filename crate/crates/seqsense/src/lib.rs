//! Experiment drivers, Monte Carlo and quadrature oracles for censored
//! cooperative spectrum sensing. The analytic work lives in `seqsense_core`.

pub mod error;
pub mod experiments;
pub mod oracle;

pub use error::{Result, SeqsenseError};
pub use seqsense_core as core;
