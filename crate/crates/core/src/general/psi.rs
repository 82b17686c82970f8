//! Boundary-knot vectors of the paths whose first upper violation happens
//! at a given step.
//!
//! After exceeding `b_{i+1}` at step `i+1`, a path only needs to stay above
//! the later lower boundaries, so its remaining coordinates have lower knots
//! `max(b_{i+1}, a_l)`. The piecewise description below spells this out in
//! terms of `q`, the largest index with `a_q ≤ b_1`, and `s`, the step with
//! `b_s < c ≤ b_{s+1}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sequential::SequentialDesign;

#[derive(Debug, Clone, PartialEq)]
pub struct PsiVector(Vec<f64>);

impl PsiVector {
    pub fn knots(&self) -> &[f64] {
        &self.0
    }

    pub fn into_knots(self) -> Vec<f64> {
        self.0
    }
}

/// Largest `l ≤ N` with `ā + lΛ̄ ≤ b_1` (at least 1, since `a_1 < b_1`).
pub fn q_index(design: &SequentialDesign) -> u32 {
    let b1 = design.upper(1);
    (1..=design.n_trunc())
        .take_while(|&l| design.a_bar() + l as f64 * design.bias() <= b1)
        .count()
        .max(1) as u32
}

/// `s` with `b_s < c ≤ b_{s+1}`; 0 when `c ≤ b_1`, `N` when `c > b_N`.
pub fn s_index(design: &SequentialDesign, c: f64) -> u32 {
    (1..=design.n_trunc()).take_while(|&l| design.upper(l) < c).count() as u32
}

fn lower0(design: &SequentialDesign, l: u32) -> f64 {
    if l == 0 {
        0.0
    } else {
        design.lower(l)
    }
}

/// `ψ^n_{i,c}` of length `n - i`.
///
/// The three regimes are tried in order: `i ≤ n-q-2`, then `i ≤ s-1`, then
/// `i ≥ s`.
pub fn psi_vector(design: &SequentialDesign, n: u32, i: u32, c: f64) -> Result<PsiVector> {
    if n > design.n_trunc() {
        return Err(Error::Domain("step index exceeds the truncation point"));
    }
    if n < 2 || i > n - 2 {
        return Err(Error::Structural("no knot shape for this index pair"));
    }
    if c < lower0(design, n - 1) {
        return Err(Error::Domain("evaluation point lies below the previous lower boundary"));
    }
    let q = q_index(design);
    let s = s_index(design, c);
    let bi = design.upper(i + 1);
    let len = (n - i) as usize;
    let v = if i + q + 2 <= n {
        let mut v = vec![bi; q as usize];
        v.extend((q + i + 1..n).map(|l| design.lower(l)));
        v.push(c);
        v
    } else if i < s {
        let mut v = vec![bi; len - 1];
        v.push(c);
        v
    } else if i >= s {
        vec![bi; len]
    } else {
        return Err(Error::Structural("index pair falls outside every knot regime"));
    };
    debug_assert_eq!(v.len(), len);
    Ok(PsiVector(v))
}

/// Closed description of the same knots: `max(b_{i+1}, a_l)` for
/// `l = i+1..n-1`, then `max(b_{i+1}, c)`.
pub fn psi_max_form(design: &SequentialDesign, n: u32, i: u32, c: f64) -> Vec<f64> {
    let bi = design.upper(i + 1);
    let mut v: Vec<f64> = (i + 1..n).map(|l| bi.max(design.lower(l))).collect();
    v.push(bi.max(c));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn shortest_vector() {
        let d = SequentialDesign::new(6, -4.0, 1.0, 1.5).unwrap();
        // i = n - 2 gives two entries
        let v = psi_vector(&d, 4, 2, d.lower(3)).unwrap();
        assert_eq!(v.knots().len(), 2);
        assert_eq!(v.knots()[0], d.upper(3));
    }

    #[test]
    fn first_regime_with_low_c() {
        // steep lower boundary: q = 1
        let d = SequentialDesign::new(6, -0.5, 0.5, 1.5).unwrap();
        assert_eq!(q_index(&d), 1);
        let c = d.lower(4);
        let v = psi_vector(&d, 5, 0, c).unwrap();
        assert_eq!(v.knots(), &[d.upper(1), d.lower(2), d.lower(3), d.lower(4), c][..]);
        assert_eq!(s_index(&d, d.upper(1)), 0);
    }

    #[test]
    fn structural_errors() {
        let d = SequentialDesign::new(6, -4.0, 1.0, 1.5).unwrap();
        assert!(matches!(psi_vector(&d, 4, 3, 5.0), Err(Error::Structural(_))));
        assert!(matches!(psi_vector(&d, 1, 0, 5.0), Err(Error::Structural(_))));
        assert!(psi_vector(&d, 7, 0, 5.0).is_err());
    }

    proptest! {
        #[test]
        fn regimes_agree_with_max_form(
            n_trunc in 2u32..12,
            frac in 0.001f64..1.0,
            b in 0.05f64..8.0,
            l in 1.01f64..2.5,
            t in 0.0f64..1.0,
            pick in 0u32..1000,
        ) {
            let a_bar = -frac * n_trunc as f64 * l;
            let d = SequentialDesign::new(n_trunc, a_bar, b, l).unwrap();
            let n = 2 + pick % (n_trunc - 1);
            let i = (pick / 7) % (n - 1);
            let lo = if n >= 2 { d.lower(n - 1) } else { 0.0 };
            let c = lo + t * (d.upper(n) - lo);
            let v = psi_vector(&d, n, i, c).unwrap();
            let w = psi_max_form(&d, n, i, c);
            prop_assert_eq!(v.knots().len(), w.len());
            for (x, y) in v.knots().iter().zip(&w) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()), "{:?} vs {:?}", v, w);
            }
            prop_assert!(v.knots().windows(2).all(|p| p[1] >= p[0] - 1e-12));
        }
    }
}
