//! Fixed-sample-size censoring scheme.
//!
//! Each radio accumulates the normalized energy of `N` samples, a central
//! chi-square variable with `2N` degrees of freedom and scale 2 under H0,
//! scale `2(1+γ)` under H1. It sends 1 when the energy reaches `λ2`, sends 0
//! when it is at most `λ1` and stays silent in between.
//!
//! Raising `λ1` only moves mass out of the censoring region, so the cost is
//! nondecreasing in `λ1` and the optimum always has `λ1 = 0`. The optimizer
//! then reduces to finding the smallest shared `P_f` whose OR-fused detection
//! probability reaches `β`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::metrics::{Infeasibility, Outcome, SchemeMetrics, SensorOutcome, Solution};
use crate::model::{gamma_range, NetworkModel, SensorProfile};
use crate::search::bisect_decreasing;
use crate::special::{inv_reg_upper_gamma, upper_unchecked};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedSizeDesign {
    n_samples: u32,
    lambda1: f64,
    lambda2: f64,
}

impl FixedSizeDesign {
    /// `lambda2 = +∞` is allowed (every decision censored). `lambda1 == lambda2`
    /// gives an empty censoring region.
    pub fn new(n_samples: u32, lambda1: f64, lambda2: f64) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::InvalidParameter("sample count must be positive"));
        }
        if !(lambda1 >= 0.0 && lambda1.is_finite()) {
            return Err(Error::InvalidParameter("lambda1 must be finite and non-negative"));
        }
        if !(lambda2 >= lambda1) {
            return Err(Error::InvalidParameter("lambda2 must not be below lambda1"));
        }
        Ok(Self { n_samples, lambda1, lambda2 })
    }

    /// Single-threshold design (`λ1 = 0`).
    pub fn upper_only(n_samples: u32, lambda2: f64) -> Result<Self> {
        Self::new(n_samples, 0.0, lambda2)
    }

    pub fn n_samples(&self) -> u32 {
        self.n_samples
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }
}

fn tail(n: u32, x: f64) -> f64 {
    upper_unchecked(n, x)
}

/// `P_f = Γ(N, λ2/2)/Γ(N)`.
pub fn local_pf(design: &FixedSizeDesign) -> f64 {
    tail(design.n_samples, design.lambda2 / 2.0)
}

/// `P_d = Γ(N, λ2/(2(1+γ)))/Γ(N)`.
pub fn local_pd(design: &FixedSizeDesign, gamma: f64) -> f64 {
    tail(design.n_samples, design.lambda2 / (2.0 * (1.0 + gamma)))
}

/// Censoring probabilities `(δ0, δ1)` of the region `(λ1, λ2)`.
pub fn censor_deltas(design: &FixedSizeDesign, gamma: f64) -> (f64, f64) {
    let n = design.n_samples;
    let s1 = 2.0 * (1.0 + gamma);
    let d0 = tail(n, design.lambda1 / 2.0) - tail(n, design.lambda2 / 2.0);
    let d1 = tail(n, design.lambda1 / s1) - tail(n, design.lambda2 / s1);
    (d0.max(0.0), d1.max(0.0))
}

pub fn scheme_metrics(
    profiles: &[SensorProfile],
    network: &NetworkModel,
    design: &FixedSizeDesign,
) -> Result<SchemeMetrics> {
    network.check_profiles(profiles)?;
    let n = design.n_samples as f64;
    let outcomes: Vec<SensorOutcome> = profiles
        .iter()
        .map(|p| {
            let (delta0, delta1) = censor_deltas(design, p.gamma());
            SensorOutcome { pd: local_pd(design, p.gamma()), delta0, delta1, asn_h0: n, asn_h1: n }
        })
        .collect();
    SchemeMetrics::assemble(local_pf(design), &outcomes, profiles, network)
}

/// OR-fused detection probability of a shared upper threshold.
fn fused_detection(profiles: &[SensorProfile], n: u32, lambda2: f64) -> f64 {
    let d = FixedSizeDesign { n_samples: n, lambda1: 0.0, lambda2 };
    crate::math::or_fusion(profiles.iter().map(|p| local_pd(&d, p.gamma())))
}

/// Shared threshold `λ2` with fused detection exactly `β`, by bisection.
///
/// Works for any mix of SNRs; `Q_D` is strictly decreasing in `λ2`.
pub fn lambda2_by_bisection(profiles: &[SensorProfile], n: u32, beta: f64) -> Result<f64> {
    if profiles.is_empty() {
        return Err(Error::InvalidParameter("at least one sensor profile is required"));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be positive"));
    }
    if beta <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let (_, g_max) = gamma_range(profiles);
    let nf = n as f64;
    let mut hi = 2.0 * (1.0 + g_max) * (nf + 40.0 * crate::math::sqrt(nf) + 40.0);
    while fused_detection(profiles, n, hi) >= beta {
        hi *= 2.0;
        if !hi.is_finite() {
            return Ok(f64::INFINITY);
        }
    }
    let (x_ge, _) = bisect_decreasing(|l| fused_detection(profiles, n, l), beta, 0.0, hi);
    Ok(x_ge)
}

/// Equal-SNR closed form: per-sensor `P_d = 1 - (1-β)^{1/M}` and
/// `λ2 = 2(1+γ) Q^{-1}(N, P_d)`.
pub fn lambda2_closed_form(gamma: f64, num_sensors: usize, n: u32, beta: f64) -> Result<f64> {
    if num_sensors == 0 {
        return Err(Error::InvalidParameter("network needs at least one sensor"));
    }
    let pd = 1.0 - crate::math::pow(1.0 - beta, 1.0 / num_sensors as f64);
    if pd <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * (1.0 + gamma) * inv_reg_upper_gamma(n, pd)?)
}

/// Minimizes the maximum per-sensor energy subject to `Q_F ≤ α`, `Q_D ≥ β`.
///
/// `λ1 = 0` always. With equal SNRs the closed form is used, otherwise the
/// shared `λ2` is found by bisection on the fused detection probability.
/// Infeasible iff the required `P_f` exceeds `1 - (1-α)^{1/M}`.
pub fn optimize_censoring(
    profiles: &[SensorProfile],
    network: &NetworkModel,
    n_samples: u32,
) -> Result<Outcome<FixedSizeDesign>> {
    network.check_profiles(profiles)?;
    if n_samples == 0 {
        return Err(Error::InvalidParameter("sample count must be positive"));
    }
    let (g_min, g_max) = gamma_range(profiles);
    let lambda2 = if g_min == g_max {
        lambda2_closed_form(g_min, profiles.len(), n_samples, network.beta())?
    } else {
        lambda2_by_bisection(profiles, n_samples, network.beta())?
    };
    let design = FixedSizeDesign::upper_only(n_samples, lambda2)?;
    let metrics = scheme_metrics(profiles, network, &design)?;
    let ceiling = network.pf_ceiling();
    if metrics.pf > ceiling {
        let (qf_margin, qd_margin) = metrics.margins(network);
        return Ok(Outcome::Infeasible(Infeasibility {
            pf_required: metrics.pf,
            pf_ceiling: ceiling,
            qf_margin,
            qd_margin,
        }));
    }
    Ok(Outcome::Feasible(Solution { design, metrics }))
}
