//! Abel–Gontcharoff polynomials.
//!
//! For nondecreasing knots `0 ≤ η_1 ≤ … ≤ η_k`,
//! `f^{(k)}(ζ) = Σ_{i<k} f_i (ζ - η_{i+1})^{k-i}/(k-i)! + f_k` is the volume
//! of `{η_i ≤ ζ_i, ζ_1 ≤ … ≤ ζ_k ≤ ζ}` for `ζ ≥ η_k`. The constants only
//! depend on the leading knots, so a basis built on `k` knots also evaluates
//! every lower order `f^{(j)}`, `j ≤ k`, on the prefix `η_1..η_j`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, inv_factorial, log, powu, CompensatedSum};

#[derive(Debug, Clone, PartialEq)]
pub struct FBasis {
    knots: Vec<f64>,
    coeffs: Vec<f64>,
}

impl FBasis {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::Domain("knots must be finite and non-negative"));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Domain("knots must be nondecreasing"));
        }
        Ok(Self::from_sorted(knots))
    }

    pub(crate) fn from_sorted(knots: Vec<f64>) -> Self {
        let k = knots.len();
        let mut coeffs = Vec::with_capacity(k + 1);
        coeffs.push(1.0);
        for m in 1..=k {
            let eta = knots[m - 1];
            let mut s = CompensatedSum::new();
            for (i, &f) in coeffs.iter().enumerate() {
                let e = (m - i) as u32;
                s.add(f * powu(eta - knots[i], e) * inv_factorial(e));
            }
            coeffs.push(-s.value());
        }
        Self { knots, coeffs }
    }

    pub fn order(&self) -> usize {
        self.knots.len()
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// `f_0 … f_k`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `f^{(order)}(ζ)`.
    pub fn eval(&self, zeta: f64) -> f64 {
        self.eval_prefix(self.order(), zeta)
    }

    /// `f^{(m)}(ζ)` on the first `m` knots.
    pub fn eval_prefix(&self, m: usize, zeta: f64) -> f64 {
        debug_assert!(m <= self.order());
        let mut s = CompensatedSum::new();
        for i in 0..m {
            let e = (m - i) as u32;
            s.add(self.coeffs[i] * powu(zeta - self.knots[i], e) * inv_factorial(e));
        }
        s.add(self.coeffs[m]);
        s.value()
    }

    /// `θ^s ∫_c^d e^{-θζ} f^{(m)}(ζ) dζ`, integrated by parts:
    /// `Σ_{i=1}^{m+1} θ^{s-i} [f^{(m+1-i)}(c) e^{-θc} - f^{(m+1-i)}(d) e^{-θd}]`.
    pub fn scaled_exp_integral(&self, m: usize, c: f64, d: f64, theta: f64, s: i32) -> f64 {
        let lt = log(theta);
        let mut acc = CompensatedSum::new();
        for i in 1..=m + 1 {
            let j = m + 1 - i;
            let p = (s - i as i32) as f64 * lt;
            acc.add(self.eval_prefix(j, c) * exp(p - theta * c));
            if d.is_finite() {
                acc.add(-self.eval_prefix(j, d) * exp(p - theta * d));
            }
        }
        acc.value()
    }
}

/// Evaluates the full-order polynomial of `basis` at `zeta`.
pub fn f_eval(basis: &FBasis, zeta: f64) -> f64 {
    basis.eval(zeta)
}
