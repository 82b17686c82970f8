//! Truncated sequential shifted energy test.
//!
//! After `n` samples the radio compares the running sum `ζ_n` of normalized
//! sample energies with the affine boundaries
//! `a_n = max(0, ā + nΛ̄)` and `b_n = b̄ + nΛ̄`: it sends 1 once `ζ_n ≥ b_n`,
//! sends 0 once `ζ_n ≤ a_n` and stays silent if neither happened by `N`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequentialDesign {
    n_trunc: u32,
    a_bar: f64,
    b_bar: f64,
    bias: f64,
}

impl SequentialDesign {
    /// Requires `ā < 0 < b̄` and a positive bias. Whether the bias lies in
    /// the admissible interval `(1, 1 + γ_min)` depends on the SNRs and is
    /// checked by the optimizers, see [`SequentialDesign::check_bias`].
    pub fn new(n_trunc: u32, a_bar: f64, b_bar: f64, bias: f64) -> Result<Self> {
        if n_trunc == 0 {
            return Err(Error::InvalidParameter("truncation point must be positive"));
        }
        if !(a_bar < 0.0 && a_bar.is_finite()) {
            return Err(Error::InvalidParameter("lower intercept must be finite and negative"));
        }
        if !(b_bar > 0.0 && b_bar.is_finite()) {
            return Err(Error::InvalidParameter("upper intercept must be finite and positive"));
        }
        if !(bias > 0.0 && bias.is_finite()) {
            return Err(Error::InvalidParameter("bias must be finite and positive"));
        }
        Ok(Self { n_trunc, a_bar, b_bar, bias })
    }

    /// Single-threshold design with `ā = -NΛ̄`, so every `a_n` is zero.
    pub fn relaxed(n_trunc: u32, b_bar: f64, bias: f64) -> Result<Self> {
        Self::new(n_trunc, -(n_trunc as f64) * bias, b_bar, bias)
    }

    pub fn n_trunc(&self) -> u32 {
        self.n_trunc
    }

    pub fn a_bar(&self) -> f64 {
        self.a_bar
    }

    pub fn b_bar(&self) -> f64 {
        self.b_bar
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// `a_i = max(0, ā + iΛ̄)`.
    pub fn lower(&self, i: u32) -> f64 {
        (self.a_bar + i as f64 * self.bias).max(0.0)
    }

    /// `b_i = b̄ + iΛ̄`.
    pub fn upper(&self, i: u32) -> f64 {
        self.b_bar + i as f64 * self.bias
    }

    /// True when `a_1 = … = a_N = 0`.
    pub fn is_relaxed(&self) -> bool {
        self.a_bar + self.n_trunc as f64 * self.bias <= 0.0
    }

    /// Number of leading zero lower boundaries, capped at `N`.
    pub fn zero_lower_count(&self) -> u32 {
        (1..=self.n_trunc).take_while(|&i| self.a_bar + i as f64 * self.bias <= 0.0).count() as u32
    }

    /// `(a_1..a_N, b_1..b_N)`.
    pub fn boundaries(&self) -> (Vec<f64>, Vec<f64>) {
        let a = (1..=self.n_trunc).map(|i| self.lower(i)).collect();
        let b = (1..=self.n_trunc).map(|i| self.upper(i)).collect();
        (a, b)
    }

    /// Checks `1 < Λ̄ < 1 + γ_min`.
    pub fn check_bias(bias: f64, gamma_min: f64) -> Result<()> {
        if bias > 1.0 && bias < 1.0 + gamma_min {
            Ok(())
        } else {
            Err(Error::InvalidParameter("bias must lie strictly between 1 and 1 + min SNR"))
        }
    }

    /// Midpoint of the admissible bias interval.
    pub fn default_bias(gamma_min: f64) -> f64 {
        1.0 + 0.5 * gamma_min
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_boundaries() {
        let d = SequentialDesign::relaxed(2, 2.0, 1.5).unwrap();
        assert_eq!(d.boundaries().1, [3.5, 5.0]);
        assert_eq!(d.boundaries().0, [0.0, 0.0]);
        let d = SequentialDesign::relaxed(1, 0.1, 1.01).unwrap();
        assert!((d.upper(1) - 1.11).abs() < 1e-15);
    }

    #[test]
    fn leading_zero_lower_boundaries() {
        let d = SequentialDesign::new(10, -100.0, 2.0, 1.5).unwrap();
        assert_eq!(d.zero_lower_count(), 10);
        assert!(d.is_relaxed());
        let d = SequentialDesign::new(10, -3.5, 2.0, 1.5).unwrap();
        assert_eq!(d.zero_lower_count(), 2);
        assert!(!d.is_relaxed());
        assert!((d.lower(3) - 1.0).abs() < 1e-15);
        let d = SequentialDesign::relaxed(30, 2.0, 1.1).unwrap();
        assert!(d.is_relaxed());
        assert_eq!(d.zero_lower_count(), 30);
    }

    #[test]
    fn validation() {
        assert!(SequentialDesign::new(0, -1.0, 1.0, 1.5).is_err());
        assert!(SequentialDesign::new(3, 0.0, 1.0, 1.5).is_err());
        assert!(SequentialDesign::new(3, -1.0, 0.0, 1.5).is_err());
        assert!(SequentialDesign::new(3, -1.0, 1.0, 0.0).is_err());
        assert!(SequentialDesign::check_bias(1.5, 1.0).is_ok());
        assert!(SequentialDesign::check_bias(1.0, 1.0).is_err());
        assert!(SequentialDesign::check_bias(2.0, 1.0).is_err());
        assert_eq!(SequentialDesign::default_bias(1.0), 1.5);
    }
}
