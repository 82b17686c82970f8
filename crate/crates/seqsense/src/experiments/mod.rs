//! Sweeps, theorem checks and oracle validation.

pub mod config;
pub mod csv;
pub mod sweep;
pub mod theorems;
pub mod validate;
