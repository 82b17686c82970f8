//! Closed-form analytics of the single-threshold sequential test.
//!
//! With `a_1 = … = a_N = 0` the lower boundary is never reached (the
//! increments are a.s. positive), so a radio either sends 1 at the first
//! upper crossing or stays silent. The crossing volume has the closed form
//! `A(n) = b_1 b_n^{n-2} / (n-1)!` and everything else follows from
//! `Pr(E_n) = θ^{n-1} e^{-θ b_n} A(n)`, with `θ = 1/2` under H0 and
//! `θ = 1/(2(1+γ))` under H1.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, ln_factorial, log, sqrt, CompensatedSum};
use crate::metrics::{Infeasibility, Outcome, SchemeMetrics, SensorOutcome, Solution};
use crate::model::{gamma_range, Hypothesis, NetworkModel, SensorProfile};
use crate::search::{bisect_decreasing, golden_min};
use crate::sequential::SequentialDesign;

/// Largest supported truncation point.
pub const MAX_TRUNCATION: u32 = 150;

/// Tolerance for probability mass leaving `[0, 1]` through rounding.
pub(crate) const MASS_GUARD: f64 = 1e-9;

/// Exponential rate of one normalized sample energy.
pub fn rate(hypothesis: Hypothesis, gamma: f64) -> f64 {
    match hypothesis {
        Hypothesis::H0 => 0.5,
        Hypothesis::H1 => 0.5 / (1.0 + gamma),
    }
}

fn check(design: &SequentialDesign) -> Result<()> {
    if design.n_trunc() > MAX_TRUNCATION {
        return Err(Error::Range { n: design.n_trunc(), max: MAX_TRUNCATION });
    }
    if !design.is_relaxed() {
        return Err(Error::NotRelaxed);
    }
    Ok(())
}

/// Upper boundaries `b_1..b_N`; the lower ones are all zero here.
pub fn boundaries(design: &SequentialDesign) -> Result<Vec<f64>> {
    check(design)?;
    Ok(design.boundaries().1)
}

/// `ln A(n)`.
pub(crate) fn ln_a_volume(design: &SequentialDesign, n: u32) -> f64 {
    if n == 1 {
        return 0.0;
    }
    log(design.upper(1)) + (n - 2) as f64 * log(design.upper(n)) - ln_factorial(n - 1)
}

/// Volume of `0 ≤ ζ_1 ≤ … ≤ ζ_{n-1}` with `ζ_i < b_i`.
pub fn a_volume(design: &SequentialDesign, n: u32) -> Result<f64> {
    check(design)?;
    if n == 0 || n > design.n_trunc() {
        return Err(Error::Domain("volume index must lie in 1..=N"));
    }
    Ok(exp(ln_a_volume(design, n)))
}

/// Volumes `A(n)` with the per-step crossing weights of both hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqCoefficients {
    /// `A(1..N)`.
    pub a_values: Vec<f64>,
    /// `e^{-b_n/2} / 2^{n-1}`.
    pub p: Vec<f64>,
    /// `e^{-b_n/(2(1+γ))} / (2(1+γ))^{n-1}`.
    pub q: Vec<f64>,
}

impl SeqCoefficients {
    pub fn new(design: &SequentialDesign, gamma: f64) -> Result<Self> {
        check(design)?;
        let weight = |theta: f64, n: u32| exp((n - 1) as f64 * log(theta) - theta * design.upper(n));
        let t0 = rate(Hypothesis::H0, gamma);
        let t1 = rate(Hypothesis::H1, gamma);
        let ns = 1..=design.n_trunc();
        Ok(Self {
            a_values: ns.clone().map(|n| exp(ln_a_volume(design, n))).collect(),
            p: ns.clone().map(|n| weight(t0, n)).collect(),
            q: ns.map(|n| weight(t1, n)).collect(),
        })
    }
}

/// First-crossing probabilities `Pr(E_1..E_N)` at exponential rate `theta`,
/// each product evaluated in log space.
pub(crate) fn crossing_terms(design: &SequentialDesign, theta: f64) -> Vec<f64> {
    let lt = log(theta);
    (1..=design.n_trunc())
        .map(|n| exp((n - 1) as f64 * lt - theta * design.upper(n) + ln_a_volume(design, n)))
        .collect()
}

/// `Pr(R_1..R_N)`: probability of still sensing after each step.
pub(crate) fn continuation(design: &SequentialDesign, theta: f64) -> Result<Vec<f64>> {
    let mut acc = CompensatedSum::new();
    let mut out = Vec::with_capacity(design.n_trunc() as usize);
    for (i, e) in crossing_terms(design, theta).into_iter().enumerate() {
        acc.add(e);
        let s = acc.value();
        if !(s <= 1.0 + MASS_GUARD) {
            return Err(Error::Instability { step: i as u32 + 1, value: s });
        }
        out.push((1.0 - s).clamp(0.0, 1.0));
    }
    Ok(out)
}

fn decision_probability(design: &SequentialDesign, theta: f64) -> Result<f64> {
    let r = continuation(design, theta)?;
    Ok(1.0 - r[r.len() - 1])
}

/// `P_f = Σ p_n A(n)`.
pub fn local_pf_seq(design: &SequentialDesign) -> Result<f64> {
    check(design)?;
    decision_probability(design, rate(Hypothesis::H0, 0.0))
}

/// `P_d = Σ q_n A(n)`.
pub fn local_pd_seq(design: &SequentialDesign, gamma: f64) -> Result<f64> {
    check(design)?;
    decision_probability(design, rate(Hypothesis::H1, gamma))
}

/// `Pr(R_n | H)`, the probability that no boundary was crossed in the first `n` steps.
pub fn pr_continue(design: &SequentialDesign, n: u32, hypothesis: Hypothesis, gamma: f64) -> Result<f64> {
    check(design)?;
    if n == 0 || n > design.n_trunc() {
        return Err(Error::Domain("step index must lie in 1..=N"));
    }
    Ok(continuation(design, rate(hypothesis, gamma))?[n as usize - 1])
}

/// `1 + Σ_{n<N} Pr(R_n)`.
pub(crate) fn asn_from_continuation(r: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.add(1.0);
    for &x in &r[..r.len() - 1] {
        acc.add(x);
    }
    acc.value()
}

/// `(E[N|H0], E[N|H1], π0 E[N|H0] + π1 E[N|H1])`.
pub fn asn(design: &SequentialDesign, gamma: f64, pi0: f64) -> Result<(f64, f64, f64)> {
    check(design)?;
    let e0 = asn_from_continuation(&continuation(design, rate(Hypothesis::H0, gamma))?);
    let e1 = asn_from_continuation(&continuation(design, rate(Hypothesis::H1, gamma))?);
    Ok((e0, e1, pi0 * e0 + (1.0 - pi0) * e1))
}

/// `(δ0, δ1, ρ)` with `δ0 = 1 - P_f` and `δ1 = 1 - P_d`.
pub fn censor_rate_seq(design: &SequentialDesign, gamma: f64, pi0: f64) -> Result<(f64, f64, f64)> {
    let o = sensor_outcome(design, gamma)?;
    Ok((o.delta0, o.delta1, pi0 * o.delta0 + (1.0 - pi0) * o.delta1))
}

/// Average energy of one radio per sensing period.
pub fn cost_seq(profile: &SensorProfile, design: &SequentialDesign, pi0: f64) -> Result<f64> {
    let (_, _, asn) = asn(design, profile.gamma(), pi0)?;
    let (_, _, rho) = censor_rate_seq(design, profile.gamma(), pi0)?;
    Ok(asn * profile.cost_sense() + (1.0 - rho) * profile.cost_tx())
}

fn sensor_outcome(design: &SequentialDesign, gamma: f64) -> Result<SensorOutcome> {
    check(design)?;
    let r0 = continuation(design, rate(Hypothesis::H0, gamma))?;
    let r1 = continuation(design, rate(Hypothesis::H1, gamma))?;
    let n = r0.len() - 1;
    Ok(SensorOutcome {
        pd: 1.0 - r1[n],
        delta0: r0[n],
        delta1: r1[n],
        asn_h0: asn_from_continuation(&r0),
        asn_h1: asn_from_continuation(&r1),
    })
}

pub fn relaxed_metrics(
    profiles: &[SensorProfile],
    network: &NetworkModel,
    design: &SequentialDesign,
) -> Result<SchemeMetrics> {
    network.check_profiles(profiles)?;
    let pf = local_pf_seq(design)?;
    let outcomes = profiles
        .iter()
        .map(|p| sensor_outcome(design, p.gamma()))
        .collect::<Result<Vec<_>>>()?;
    SchemeMetrics::assemble(pf, &outcomes, profiles, network)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxedOptions {
    /// Grid points over the feasible `b̄` bracket before local refinement.
    pub scan_points: usize,
}

impl Default for RelaxedOptions {
    fn default() -> Self {
        Self { scan_points: 2000 }
    }
}

/// Smallest upper intercept tried by the optimizers.
pub(crate) const B_BAR_MIN: f64 = 1e-9;

/// Upper intercept beyond which no sensor realistically crosses.
pub(crate) fn b_bar_cap(gamma_max: f64, n: u32) -> f64 {
    let nf = n as f64;
    2.0 * (1.0 + gamma_max) * (nf + 40.0 * sqrt(nf) + 40.0)
}

fn fused(profiles: &[SensorProfile], design: &SequentialDesign) -> Result<(f64, f64)> {
    let m = profiles.len();
    let pf = decision_probability(design, 0.5)?;
    let qf = crate::math::or_fusion(core::iter::repeat_n(pf, m));
    let pds = profiles
        .iter()
        .map(|p| decision_probability(design, rate(Hypothesis::H1, p.gamma())))
        .collect::<Result<Vec<_>>>()?;
    Ok((qf, crate::math::or_fusion(pds)))
}

/// Line search over `b̄` with `ā = -NΛ̄`, minimizing the largest per-radio
/// energy subject to `Q_F ≤ α` and `Q_D ≥ β`.
///
/// `Q_F` and `Q_D` both decrease in `b̄`, so the feasible set is the bracket
/// `[b̄_lo, b̄_hi]` with `Q_F(b̄_lo) = α` and `Q_D(b̄_hi) = β`. The cost need
/// not be monotone, so the bracket is scanned and the best cell refined.
pub fn optimize_b(
    profiles: &[SensorProfile],
    network: &NetworkModel,
    n_trunc: u32,
    bias: f64,
    options: RelaxedOptions,
) -> Result<Outcome<SequentialDesign>> {
    network.check_profiles(profiles)?;
    if n_trunc > MAX_TRUNCATION {
        return Err(Error::Range { n: n_trunc, max: MAX_TRUNCATION });
    }
    let (g_min, g_max) = gamma_range(profiles);
    SequentialDesign::check_bias(bias, g_min)?;
    let make = |b: f64| SequentialDesign::relaxed(n_trunc, b, bias);
    let qd_at = |b: f64| -> f64 { make(b).and_then(|d| fused(profiles, &d)).map(|x| x.1).unwrap_or(f64::NAN) };
    let qf_at = |b: f64| -> f64 { make(b).and_then(|d| fused(profiles, &d)).map(|x| x.0).unwrap_or(f64::NAN) };

    let cap = b_bar_cap(g_max, n_trunc);
    let beta = network.beta();
    let alpha = network.alpha();

    let b_hi = if qd_at(cap) >= beta {
        cap
    } else if qd_at(B_BAR_MIN) < beta {
        let d = make(B_BAR_MIN)?;
        let m = relaxed_metrics(profiles, network, &d)?;
        return Ok(infeasible(&m, network));
    } else {
        bisect_decreasing(qd_at, beta, B_BAR_MIN, cap).0
    };
    let b_lo = if qf_at(B_BAR_MIN) <= alpha {
        B_BAR_MIN
    } else if qf_at(b_hi) > alpha {
        let d = make(b_hi)?;
        let m = relaxed_metrics(profiles, network, &d)?;
        return Ok(infeasible(&m, network));
    } else {
        bisect_decreasing(qf_at, alpha, B_BAR_MIN, b_hi).1
    };

    let cost_at = |b: f64| -> f64 {
        match make(b).and_then(|d| relaxed_metrics(profiles, network, &d)) {
            Ok(m) if m.is_feasible(network) => m.max_cost,
            _ => f64::INFINITY,
        }
    };
    let pts = options.scan_points.max(2);
    let grid: Vec<f64> = (0..pts)
        .map(|k| if k + 1 == pts { b_hi } else { b_lo + (b_hi - b_lo) * k as f64 / (pts - 1) as f64 })
        .collect();
    let mut best = (grid[0], cost_at(grid[0]));
    let mut best_k = 0;
    for (k, &b) in grid.iter().enumerate().skip(1) {
        let c = cost_at(b);
        if c < best.1 {
            best = (b, c);
            best_k = k;
        }
    }
    let lo = grid[best_k.saturating_sub(1)];
    let hi = grid[(best_k + 1).min(pts - 1)];
    if hi > lo {
        let refined = golden_min(cost_at, lo, hi, 1e-10 * (1.0 + hi));
        if refined.1 < best.1 {
            best = refined;
        }
    }
    let design = make(best.0)?;
    let metrics = relaxed_metrics(profiles, network, &design)?;
    if !metrics.is_feasible(network) {
        return Ok(infeasible(&metrics, network));
    }
    Ok(Outcome::Feasible(Solution { design, metrics }))
}

fn infeasible<D>(m: &SchemeMetrics, network: &NetworkModel) -> Outcome<D> {
    let (qf_margin, qd_margin) = m.margins(network);
    Outcome::Infeasible(Infeasibility {
        pf_required: m.pf,
        pf_ceiling: network.pf_ceiling(),
        qf_margin,
        qd_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::censoring::optimize_censoring;
    use proptest::prelude::*;

    fn design(n: u32, b: f64, l: f64) -> SequentialDesign {
        SequentialDesign::relaxed(n, b, l).unwrap()
    }

    #[test]
    fn volumes() {
        let d = design(4, 2.0, 1.5);
        assert_eq!(a_volume(&d, 1).unwrap(), 1.0);
        assert!((a_volume(&d, 2).unwrap() - 3.5).abs() < 1e-14);
        assert!((a_volume(&d, 4).unwrap() - 3.5 * 64.0 / 6.0).abs() < 1e-12);
        // direct integral for n = 3: ∫_0^{b1} (b2 - u) du
        let (b1, b2) = (3.5, 5.0);
        assert!((a_volume(&d, 3).unwrap() - (b1 * b2 - b1 * b1 / 2.0)).abs() < 1e-12);
        assert!(a_volume(&d, 5).is_err());
    }

    #[test]
    fn rejects_active_lower_boundary() {
        let d = SequentialDesign::new(10, -3.0, 2.0, 1.5).unwrap();
        assert_eq!(local_pf_seq(&d), Err(Error::NotRelaxed));
        let d = design(151, 2.0, 1.5);
        assert!(matches!(local_pf_seq(&d), Err(Error::Range { .. })));
    }

    #[test]
    fn one_and_two_steps() {
        assert!((local_pf_seq(&design(1, 2.0, 1.5)).unwrap() - (-1.75f64).exp()).abs() < 1e-15);
        let want = (-1.75f64).exp() + 0.5 * 3.5 * (-2.5f64).exp();
        assert!((local_pf_seq(&design(2, 2.0, 1.5)).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.317423).abs() < 1e-6);
        assert!((local_pd_seq(&design(1, 2.0, 1.5), 1.0).unwrap() - (-3.5f64 / 4.0).exp()).abs() < 1e-15);
        assert!(local_pf_seq(&design(5, 1e4, 1.5)).unwrap() < 1e-300);
    }

    #[test]
    fn continuation_examples() {
        let d = design(5, 2.0, 1.5);
        let r = pr_continue(&d, 1, Hypothesis::H0, 1.0).unwrap();
        assert!((r - (1.0 - (-1.75f64).exp())).abs() < 1e-15);
        assert!((r - 0.826226).abs() < 1e-6);
        let far = design(10, 1e4, 1.5);
        assert_eq!(pr_continue(&far, 10, Hypothesis::H1, 1.0).unwrap(), 1.0);
        assert!(pr_continue(&d, 0, Hypothesis::H0, 1.0).is_err());
    }

    #[test]
    fn asn_limits() {
        assert_eq!(asn(&design(1, 2.0, 1.5), 1.0, 0.5).unwrap(), (1.0, 1.0, 1.0));
        let (e0, e1, e) = asn(&design(12, 1e4, 1.5), 1.0, 0.3).unwrap();
        assert_eq!((e0, e1), (12.0, 12.0));
        assert!((e - 12.0).abs() < 1e-12);
    }

    #[test]
    fn censoring_rate_examples() {
        let (d0, d1, rho) = censor_rate_seq(&design(1, 2.0, 1.5), 1.0, 0.5).unwrap();
        assert!((d0 - (1.0 - (-1.75f64).exp())).abs() < 1e-15);
        assert!((d1 - (1.0 - (-0.875f64).exp())).abs() < 1e-15);
        assert!((rho - 0.704682).abs() < 1e-6);
        let (_, _, rho) = censor_rate_seq(&design(8, 1e4, 1.5), 1.0, 0.5).unwrap();
        assert_eq!(rho, 1.0);
        let d = design(6, 3.0, 1.2);
        let pf = local_pf_seq(&d).unwrap();
        for pi0 in [0.1, 0.5, 0.9] {
            let (_, _, rho) = censor_rate_seq(&d, 1e-12, pi0).unwrap();
            assert!((rho - (1.0 - pf)).abs() < 1e-10);
        }
    }

    #[test]
    fn costs() {
        let d = design(10, 2.0, 1.5);
        let quiet = SensorProfile::new(1.0, 1.0, 0.0).unwrap();
        let (_, _, n) = asn(&d, 1.0, 0.8).unwrap();
        assert!((cost_seq(&quiet, &d, 0.8).unwrap() - n).abs() < 1e-12);
        let p = SensorProfile::new(1.0, 1.0, 10.0).unwrap();
        let (_, _, rho) = censor_rate_seq(&d, 1.0, 0.8).unwrap();
        assert!((cost_seq(&p, &d, 0.8).unwrap() - (n + 10.0 * (1.0 - rho))).abs() < 1e-12);
        let far = design(10, 1e4, 1.5);
        assert!((cost_seq(&p, &far, 0.8).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn coefficients_match_crossing_terms() {
        let d = design(7, 2.0, 1.5);
        let c = SeqCoefficients::new(&d, 1.0).unwrap();
        assert_eq!(c.a_values[0], 1.0);
        let e0 = crossing_terms(&d, 0.5);
        for n in 0..7 {
            assert!((c.p[n] * c.a_values[n] - e0[n]).abs() < 1e-14);
        }
        assert!((c.p[1] - 0.5 * (-2.5f64).exp()).abs() < 1e-15);
        assert!((c.q[0] - (-3.5f64 / 4.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn long_horizon_is_stable() {
        let d = design(150, 0.5, 1.1);
        let pf = local_pf_seq(&d).unwrap();
        assert!(pf > 0.0 && pf <= 1.0);
        let (e0, e1, _) = asn(&d, 2.0, 0.5).unwrap();
        assert!(e0 >= 1.0 && e0 <= 150.0 && e1 >= 1.0 && e1 <= e0);
    }

    fn reference_setting(pi0: f64) -> (Vec<SensorProfile>, NetworkModel) {
        (SensorProfile::new(1.0, 1.0, 10.0).unwrap().replicate(5), NetworkModel::new(5, pi0, 0.1, 0.9).unwrap())
    }

    #[test]
    fn optimizer_meets_constraints_and_beats_censoring() {
        for pi0 in [0.2, 0.8] {
            let (profiles, net) = reference_setting(pi0);
            let seq = optimize_b(&profiles, &net, 10, 1.5, RelaxedOptions::default()).unwrap();
            let s = seq.feasible().expect("feasible");
            assert!(s.metrics.qf <= 0.1);
            assert!(s.metrics.qd >= 0.9 && s.metrics.qd - 0.9 < 1e-3);
            let cs = optimize_censoring(&profiles, &net, 10).unwrap();
            assert!(s.metrics.max_cost < cs.max_cost().unwrap(), "pi0 {pi0}");
        }
    }

    #[test]
    fn optimizer_vacuous_false_alarm() {
        let profiles = SensorProfile::new(1.0, 1.0, 10.0).unwrap().replicate(5);
        let net = NetworkModel::new(5, 0.8, 1.0, 0.9).unwrap();
        let s = optimize_b(&profiles, &net, 10, 1.5, RelaxedOptions::default()).unwrap();
        assert!(s.is_feasible());
    }

    #[test]
    fn optimizer_contradictory_constraints() {
        let profiles = SensorProfile::new(1.0, 1.0, 10.0).unwrap().replicate(5);
        let net = NetworkModel::new(5, 0.8, 1e-6, 0.9999).unwrap();
        match optimize_b(&profiles, &net, 3, 1.5, RelaxedOptions::default()).unwrap() {
            Outcome::Infeasible(r) => assert!(r.qf_margin < 0.0 || r.qd_margin < 0.0),
            Outcome::Feasible(_) => panic!("expected infeasible"),
        }
    }

    #[test]
    fn optimizer_checks_bias() {
        let (profiles, net) = reference_setting(0.5);
        assert!(optimize_b(&profiles, &net, 10, 2.5, RelaxedOptions::default()).is_err());
    }

    proptest! {
        #[test]
        fn partial_sums_close(n in 1u32..60, b in 0.05f64..20.0, l in 1.01f64..3.0, g in 0.01f64..5.0) {
            let d = design(n, b, l);
            for theta in [0.5, rate(Hypothesis::H1, g)] {
                let r = continuation(&d, theta).unwrap();
                let mut prev = 1.0;
                for x in r {
                    prop_assert!((0.0..=1.0).contains(&x));
                    prop_assert!(x <= prev);
                    prev = x;
                }
            }
        }

        #[test]
        fn monotone_in_b(n in 1u32..40, b in 0.05f64..15.0, l in 1.01f64..2.5, g in 0.05f64..4.0) {
            let d1 = design(n, b, l);
            let d2 = design(n, b * 1.1 + 0.05, l);
            let strict = |x2: f64, x1: f64| x2 < x1 || (x1.max(x2) > 1.0 - 1e-9 && x2 <= x1 + 1e-12) || (x2 <= x1 && x2 < 1e-290);
            prop_assert!(strict(local_pf_seq(&d2).unwrap(), local_pf_seq(&d1).unwrap()));
            prop_assert!(strict(local_pd_seq(&d2, g).unwrap(), local_pd_seq(&d1, g).unwrap()));
            let a1 = asn(&d1, g, 0.5).unwrap();
            let a2 = asn(&d2, g, 0.5).unwrap();
            prop_assert!(a2.2 >= a1.2 - 1e-12);
            let r1 = censor_rate_seq(&d1, g, 0.5).unwrap().2;
            let r2 = censor_rate_seq(&d2, g, 0.5).unwrap().2;
            prop_assert!(r2 >= r1 - 1e-12);
        }

        #[test]
        fn detection_dominates_false_alarm(n in 1u32..60, b in 0.05f64..20.0, l in 1.01f64..3.0, g in 0.01f64..5.0) {
            let d = design(n, b, l);
            prop_assert!(local_pd_seq(&d, g).unwrap() >= local_pf_seq(&d).unwrap());
            let (e0, e1, e) = asn(&d, g, 0.3).unwrap();
            prop_assert!((1.0..=n as f64).contains(&e0));
            prop_assert!((1.0..=n as f64).contains(&e1));
            prop_assert!((1.0..=n as f64 + 1e-12).contains(&e));
        }
    }
}
