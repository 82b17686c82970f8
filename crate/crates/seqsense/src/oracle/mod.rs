//! Independent brute-force oracles for the analytic expressions.

pub mod mc;
pub mod quadrature;
