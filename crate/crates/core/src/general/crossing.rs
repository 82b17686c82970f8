//! Boundary-crossing probabilities of the double-threshold test.
//!
//! Let `U_m(ζ)` be the volume of the ordered paths `ζ_1 ≤ … ≤ ζ_m ≤ ζ` that
//! stayed inside `(a_i, b_i)`. Splitting the lower-bounded volume by the first
//! step `k+1` at which the path leaves through the top gives
//!
//! `U_m(ζ) = f^{(m)}_a(ζ) - Σ_{k<m} A(k+1) f^{(m-k)}_{ψ_k}(ζ) [ζ ≥ b_{k+1}]`
//!
//! with `A(n) = U_{n-1}(b_{n-1})`. Then `Pr(E_n) = θ^{n-1} e^{-θ b_n} A(n)` and
//! `Pr(R_n) = θ^n J^{(n)}` with `J^{(n)} = ∫_{a_n}^{b_n} e^{-θζ} U_{n-1}(ζ) dζ`.
//! The sensing region volumes do not depend on the hypothesis, so the H1
//! volumes coincide with the H0 ones.

use alloc::vec::Vec;

use super::fbasis::FBasis;
use super::psi::q_index;
use crate::error::{Error, Result};
use crate::math::{exp, inv_factorial, ln_factorial, log, powu, CompensatedSum};
use crate::metrics::{SchemeMetrics, SensorOutcome};
use crate::model::{Hypothesis, NetworkModel, SensorProfile};
use crate::relaxed::{asn_from_continuation, rate, MASS_GUARD};
use crate::sequential::SequentialDesign;

/// Largest supported truncation point for the double-threshold analytics.
pub const MAX_TRUNCATION_GENERAL: u32 = 30;

/// Boundary data and crossing volumes of one design.
#[derive(Debug, Clone)]
pub struct Geometry {
    design: SequentialDesign,
    /// `a_0 = 0, a_1, …, a_N`.
    a: Vec<f64>,
    /// `b_0 = 0, b_1, …, b_N`.
    b: Vec<f64>,
    p: u32,
    q: u32,
    lower_basis: FBasis,
    /// `ψ_k` knots `max(b_{k+1}, a_l)`, `l = k+1..N`, for `k = 0..N-2`.
    psi: Vec<FBasis>,
    volumes: Vec<f64>,
}

impl Geometry {
    pub fn new(design: &SequentialDesign) -> Result<Self> {
        let n = design.n_trunc();
        if n > MAX_TRUNCATION_GENERAL {
            return Err(Error::Range { n, max: MAX_TRUNCATION_GENERAL });
        }
        let mut a = Vec::with_capacity(n as usize + 1);
        let mut b = Vec::with_capacity(n as usize + 1);
        a.push(0.0);
        b.push(0.0);
        for i in 1..=n {
            a.push(design.lower(i));
            b.push(design.upper(i));
        }
        let lower_basis = FBasis::from_sorted(a[1..].to_vec());
        let psi = (0..n.saturating_sub(1) as usize)
            .map(|k| FBasis::from_sorted(a[k + 1..].iter().map(|&x| x.max(b[k + 1])).collect()))
            .collect();
        let mut g = Self {
            design: *design,
            a,
            b,
            p: design.zero_lower_count(),
            q: q_index(design),
            lower_basis,
            psi,
            volumes: Vec::with_capacity(n as usize),
        };
        for m in 1..=n {
            let v = g.volume(m);
            g.volumes.push(v);
        }
        Ok(g)
    }

    /// `A(n)` from the volumes already computed for `1..n`.
    fn volume(&self, n: u32) -> f64 {
        let b = &self.b;
        if n == 1 {
            return 1.0;
        }
        if n <= self.p + 1 {
            return exp(log(b[1]) + (n - 2) as f64 * log(b[n as usize]) - ln_factorial(n - 1));
        }
        let top = b[n as usize - 1];
        let m = n as usize - 1;
        let mut s = CompensatedSum::new();
        s.add(self.lower_basis.eval_prefix(m, top));
        for i in 0..m.saturating_sub(1) {
            let sub = if n <= self.q + 1 {
                let e = (m - i) as u32;
                powu(top - b[i + 1], e) * inv_factorial(e)
            } else {
                self.psi[i].eval_prefix(m - i, top)
            };
            s.add(-sub * self.volumes[i]);
        }
        s.value()
    }

    pub fn design(&self) -> &SequentialDesign {
        &self.design
    }

    /// Number of leading zero lower boundaries.
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `A(1..N)`.
    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// `θ^n ∫_c^d e^{-θζ} U_{n-1}(ζ) dζ` for `a_{n-1} ≤ c ≤ d`.
    fn scaled_j(&self, n: usize, c: f64, d: f64, theta: f64) -> f64 {
        let m = n - 1;
        let s = n as i32;
        let mut acc = CompensatedSum::new();
        acc.add(self.lower_basis.scaled_exp_integral(m, c, d, theta, s));
        for k in 0..m {
            let lo = c.max(self.b[k + 1]);
            if lo < d {
                let g = self.psi[k].scaled_exp_integral(m - k, lo, d, theta, s);
                acc.add(-self.volumes[k] * g);
            }
        }
        acc.value()
    }

    /// `J^{(n)}_{c,d}(θ)`; requires `a_{n-1} ≤ c ≤ d`.
    pub fn j_integral(&self, n: u32, c: f64, d: f64, theta: f64) -> Result<f64> {
        if n == 0 || n > self.design.n_trunc() {
            return Err(Error::Domain("step index must lie in 1..=N"));
        }
        if !(theta > 0.0) {
            return Err(Error::Domain("rate must be positive"));
        }
        if !(c >= self.a[n as usize - 1] && c <= d) {
            return Err(Error::Domain("integration limits must satisfy a_{n-1} <= c <= d"));
        }
        Ok(self.scaled_j(n as usize, c, d, theta) * exp(-(n as f64) * log(theta)))
    }

    /// Crossing and continuation probabilities at exponential rate `theta`.
    pub fn rows(&self, theta: f64) -> Result<HypothesisRows> {
        let n_max = self.design.n_trunc() as usize;
        let lt = log(theta);
        let mut rows = HypothesisRows {
            upper: Vec::with_capacity(n_max),
            lower: Vec::with_capacity(n_max),
            cont: Vec::with_capacity(n_max),
        };
        let mut prev = 1.0;
        for n in 1..=n_max {
            let e = self.volumes[n - 1] * exp((n - 1) as f64 * lt - theta * self.b[n]);
            let r = self.scaled_j(n, self.a[n], self.b[n], theta);
            let l = prev - r - e;
            for v in [e, r, l] {
                if !(-MASS_GUARD..=1.0 + MASS_GUARD).contains(&v) {
                    return Err(Error::Instability { step: n as u32, value: v });
                }
            }
            let r = r.clamp(0.0, prev);
            rows.upper.push(e.clamp(0.0, 1.0));
            rows.lower.push(l.clamp(0.0, 1.0));
            rows.cont.push(r);
            prev = r;
        }
        Ok(rows)
    }
}

/// Per-step probabilities under one hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisRows {
    /// `Pr(E_n)`: first crossing through the upper boundary at step `n`.
    pub upper: Vec<f64>,
    /// First crossing through the lower boundary at step `n`.
    pub lower: Vec<f64>,
    /// `Pr(R_n)`: still inside after step `n`.
    pub cont: Vec<f64>,
}

impl HypothesisRows {
    pub fn decide_one(&self) -> f64 {
        sum(&self.upper)
    }

    pub fn decide_zero(&self) -> f64 {
        sum(&self.lower)
    }

    pub fn censored(&self) -> f64 {
        self.cont[self.cont.len() - 1]
    }

    pub fn asn(&self) -> f64 {
        asn_from_continuation(&self.cont)
    }
}

fn sum(xs: &[f64]) -> f64 {
    let mut s = CompensatedSum::new();
    xs.iter().for_each(|&x| s.add(x));
    s.value()
}

/// Crossing volumes with both hypotheses' step probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingTable {
    /// `A(n)`, shared by both hypotheses.
    pub volumes: Vec<f64>,
    pub h0: HypothesisRows,
    pub h1: HypothesisRows,
}

pub fn crossing_probs(design: &SequentialDesign, gamma: f64) -> Result<CrossingTable> {
    let g = Geometry::new(design)?;
    Ok(CrossingTable {
        volumes: g.volumes.clone(),
        h0: g.rows(rate(Hypothesis::H0, gamma))?,
        h1: g.rows(rate(Hypothesis::H1, gamma))?,
    })
}

/// `J^{(n)}_{a_n,b_n}(θ)`.
pub fn j_fn(design: &SequentialDesign, n: u32, theta: f64) -> Result<f64> {
    let g = Geometry::new(design)?;
    if n == 0 || n > design.n_trunc() {
        return Err(Error::Domain("step index must lie in 1..=N"));
    }
    g.j_integral(n, design.lower(n), design.upper(n), theta)
}

/// Upper-crossing probability summed over all steps, without continuation terms.
pub(crate) fn decision_one(g: &Geometry, theta: f64) -> f64 {
    let lt = log(theta);
    let mut s = CompensatedSum::new();
    for (i, v) in g.volumes.iter().enumerate() {
        s.add(v * exp(i as f64 * lt - theta * g.b[i + 1]));
    }
    s.value().clamp(0.0, 1.0)
}

/// `(Q_F, Q_D)` of a design, cheaper than the full metrics.
pub(crate) fn fused_general(g: &Geometry, profiles: &[SensorProfile]) -> (f64, f64) {
    let pf = decision_one(g, 0.5);
    let qf = crate::math::or_fusion(core::iter::repeat_n(pf, profiles.len()));
    let qd = crate::math::or_fusion(profiles.iter().map(|p| decision_one(g, rate(Hypothesis::H1, p.gamma()))));
    (qf, qd)
}

pub(crate) fn metrics_from_geometry(
    g: &Geometry,
    profiles: &[SensorProfile],
    network: &NetworkModel,
) -> Result<SchemeMetrics> {
    network.check_profiles(profiles)?;
    let h0 = g.rows(0.5)?;
    let mut cache: Vec<(f64, SensorOutcome)> = Vec::new();
    let mut outcomes = Vec::with_capacity(profiles.len());
    for p in profiles {
        let gamma = p.gamma();
        let o = match cache.iter().find(|(x, _)| *x == gamma) {
            Some((_, o)) => *o,
            None => {
                let h1 = g.rows(rate(Hypothesis::H1, gamma))?;
                let o = SensorOutcome {
                    pd: h1.decide_one(),
                    delta0: h0.censored(),
                    delta1: h1.censored(),
                    asn_h0: h0.asn(),
                    asn_h1: h1.asn(),
                };
                cache.push((gamma, o));
                o
            }
        };
        outcomes.push(o);
    }
    SchemeMetrics::assemble(h0.decide_one(), &outcomes, profiles, network)
}

/// Metrics of the double-threshold test.
pub fn seq_metrics_general(
    profiles: &[SensorProfile],
    network: &NetworkModel,
    design: &SequentialDesign,
) -> Result<SchemeMetrics> {
    network.check_profiles(profiles)?;
    metrics_from_geometry(&Geometry::new(design)?, profiles, network)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relaxed;
    use proptest::prelude::*;

    #[test]
    fn first_step() {
        let d = SequentialDesign::new(4, -2.0, 2.0, 1.5).unwrap();
        let t = crossing_probs(&d, 1.0).unwrap();
        assert!((t.h0.upper[0] - (-1.75f64).exp()).abs() < 1e-15);
        let theta = 0.5;
        let j = j_fn(&d, 1, theta).unwrap();
        assert!((j - ((-theta * 0.0f64).exp() - (-theta * 3.5f64).exp()) / theta).abs() < 1e-14);
        // second lower boundary is 1.0: mass below it at step 2 is positive
        assert!(t.h0.lower[1] > 0.0);
        assert_eq!(t.h0.lower[0], 0.0);
    }

    #[test]
    fn full_mass_integral() {
        let d = SequentialDesign::new(1, -3.0, 1e9, 1.5).unwrap();
        let j = j_fn(&d, 1, 0.5).unwrap();
        assert!((j - 2.0).abs() < 1e-12);
        let g = Geometry::new(&d).unwrap();
        assert!((g.j_integral(1, 0.0, f64::INFINITY, 0.5).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn leading_volumes_are_closed_form() {
        let d = SequentialDesign::new(8, -4.6, 2.0, 1.5).unwrap();
        let g = Geometry::new(&d).unwrap();
        assert_eq!(g.p(), 3);
        let r = SequentialDesign::relaxed(8, 2.0, 1.5).unwrap();
        for n in 1..=4u32 {
            let want = relaxed::a_volume(&r, n).unwrap();
            assert!((g.volumes()[n as usize - 1] - want).abs() <= 1e-12 * want);
        }
    }

    #[test]
    fn rejects_long_horizon() {
        let d = SequentialDesign::new(31, -3.0, 2.0, 1.5).unwrap();
        assert!(matches!(crossing_probs(&d, 1.0), Err(Error::Range { .. })));
    }

    #[test]
    fn volumes_match_brute_force_three_steps() {
        // A(4) = vol{a_i < ζ_i < b_i, ζ_1 ≤ ζ_2 ≤ ζ_3} on a fine midpoint grid
        let d = SequentialDesign::new(4, -1.7, 0.8, 1.3).unwrap();
        let g = Geometry::new(&d).unwrap();
        let (a1, a2, a3) = (d.lower(1), d.lower(2), d.lower(3));
        let (b1, b2, b3) = (d.upper(1), d.upper(2), d.upper(3));
        let k = 400;
        let h1 = (b1 - a1) / k as f64;
        let mut vol = 0.0;
        for i in 0..k {
            let z1 = a1 + (i as f64 + 0.5) * h1;
            // inner two coordinates exactly: ∫_{max(a2,z1)}^{b2} (b3 - max(a3, z2)) dz2
            let lo2 = a2.max(z1);
            if lo2 >= b2 {
                continue;
            }
            let split = a3.clamp(lo2, b2);
            let flat = (split - lo2) * (b3 - a3);
            let slope = (b3 * (b2 - split)) - 0.5 * (b2 * b2 - split * split);
            vol += (flat + slope) * h1;
        }
        let got = g.volumes()[3];
        assert!((got - vol).abs() < 1e-4 * vol, "{got} vs {vol}");
    }

    fn cmp_relaxed(n: u32, b: f64, l: f64, gamma: f64, extra: f64) -> core::result::Result<(), TestCaseError> {
        let relaxed_d = SequentialDesign::relaxed(n, b, l).unwrap();
        let d = SequentialDesign::new(n, relaxed_d.a_bar() - extra, b, l).unwrap();
        let t = crossing_probs(&d, gamma).unwrap();
        let tol = 1e-9;
        let pf = relaxed::local_pf_seq(&relaxed_d).unwrap();
        let pd = relaxed::local_pd_seq(&relaxed_d, gamma).unwrap();
        prop_assert!((t.h0.decide_one() - pf).abs() < tol);
        prop_assert!((t.h1.decide_one() - pd).abs() < tol);
        for i in 1..=n {
            let r0 = relaxed::pr_continue(&relaxed_d, i, Hypothesis::H0, gamma).unwrap();
            let r1 = relaxed::pr_continue(&relaxed_d, i, Hypothesis::H1, gamma).unwrap();
            prop_assert!((t.h0.cont[i as usize - 1] - r0).abs() < tol, "n {} step {} {} vs {}", n, i, t.h0.cont[i as usize - 1], r0);
            prop_assert!((t.h1.cont[i as usize - 1] - r1).abs() < tol);
            prop_assert!(t.h0.lower[i as usize - 1] < tol);
        }
        let (e0, e1, _) = relaxed::asn(&relaxed_d, gamma, 0.5).unwrap();
        prop_assert!((t.h0.asn() - e0).abs() < tol);
        prop_assert!((t.h1.asn() - e1).abs() < tol);
        Ok(())
    }

    proptest! {
        #[test]
        fn relaxation_consistency(n in 1u32..=30, b in 0.1f64..12.0, l in 1.01f64..2.0, g in 0.1f64..3.0, extra in 0.0f64..5.0) {
            cmp_relaxed(n, b, l, g, extra)?;
        }

        #[test]
        fn probability_closure(n in 1u32..=12, frac in 0.0f64..1.0, b in 0.1f64..10.0, l in 1.01f64..2.5, g in 0.1f64..3.0) {
            let a_bar = -(1.0 - frac).max(1e-3) * n as f64 * l;
            let d = SequentialDesign::new(n, a_bar, b, l).unwrap();
            let t = crossing_probs(&d, g).unwrap();
            for rows in [&t.h0, &t.h1] {
                let total = rows.censored() + rows.decide_one() + rows.decide_zero();
                prop_assert!((total - 1.0).abs() < 1e-8);
                let mut prev = 1.0;
                for &r in &rows.cont {
                    prop_assert!(r <= prev);
                    prev = r;
                }
            }
            prop_assert!(t.h1.decide_one() >= t.h0.decide_one() - 1e-12);
            for v in &t.volumes {
                prop_assert!(*v >= -1e-9);
            }
        }
    }
}
