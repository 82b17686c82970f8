//! Numerical checks of the structural results behind both schemes.

use seqsense_core::censoring::{optimize_censoring, scheme_metrics, FixedSizeDesign};
use seqsense_core::general::seq_metrics_general;
use seqsense_core::relaxed::{optimize_b, RelaxedOptions};
use seqsense_core::{NetworkModel, SequentialDesign};

use super::csv::{fmt_num, Table};
use super::config::{PointParams, SweepSpec};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCheck {
    pub name: String,
    pub passed: bool,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TheoremReport {
    pub checks: Vec<TheoremCheck>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(vec!["check", "passed", "witness"]);
        for c in &self.checks {
            t.push(vec![c.name.clone(), c.passed.to_string(), c.witness.clone()]);
        }
        t
    }
}

fn fixed_params(spec: &SweepSpec, pi0: f64) -> Result<PointParams> {
    let s = SweepSpec { pi0: vec![pi0], variable: super::config::SweepVariable::Beta, ..spec.clone() };
    s.point(0, spec.beta)
}

/// Raising the lower censoring threshold never lowers the cost, checked on
/// a `points`-long grid `λ1 ∈ [0, λ2]` at the optimal `λ2`.
pub fn lambda1_monotonicity(p: &PointParams, points: usize) -> Result<TheoremCheck> {
    let lambda2 = match optimize_censoring(&p.profiles, &p.network, p.n)? {
        seqsense_core::Outcome::Feasible(s) => s.design.lambda2(),
        seqsense_core::Outcome::Infeasible(_) => 2.0 * p.n as f64,
    };
    let mut prev = f64::NEG_INFINITY;
    let mut worst = f64::INFINITY;
    for k in 0..points {
        let l1 = (lambda2 * k as f64 / (points - 1) as f64).min(lambda2);
        let d = FixedSizeDesign::new(p.n, l1, lambda2)?;
        let c = scheme_metrics(&p.profiles, &p.network, &d)?.max_cost;
        if k > 0 {
            worst = worst.min(c - prev);
        }
        prev = c;
    }
    Ok(TheoremCheck {
        name: format!("cost nondecreasing in lambda1 (pi0={})", fmt_num(p.network.pi0())),
        passed: worst >= -1e-12,
        witness: format!("lambda2={} points={points} min_step={}", fmt_num(lambda2), fmt_num(worst)),
    })
}

/// Designs used for the censoring-rate comparison: `5 b̄ × 5 ā × 2 Λ̄`.
pub fn rate_comparison_designs(n: u32) -> Vec<SequentialDesign> {
    let mut out = Vec::new();
    for &bias in &[1.2, 1.5] {
        for &b in &[0.5, 1.0, 2.0, 4.0, 8.0] {
            for &frac in &[1.0, 0.8, 0.6, 0.4, 0.2] {
                let a = -frac * n as f64 * bias;
                out.push(SequentialDesign::new(n, a, b, bias).expect("valid grid design"));
            }
        }
    }
    out
}

/// At matched `(P_f, P_d, N)` the sequential test is silent less often than
/// a single-threshold fixed-size rule, whose censoring rate is
/// `1 - (π0 P_f + π1 P_d)`.
pub fn censoring_rate_comparison(p: &PointParams) -> Result<TheoremCheck> {
    let net = NetworkModel::new(1, p.network.pi0(), 1.0, 0.0)?;
    let prof = &p.profiles[..1];
    let mut worst = f64::NEG_INFINITY;
    let designs = rate_comparison_designs(p.n);
    for d in &designs {
        let m = seq_metrics_general(prof, &net, d)?;
        let rho_fixed = 1.0 - (net.pi0() * m.pf + net.pi1() * m.pd[0]);
        worst = worst.max(m.rho[0] - rho_fixed);
    }
    Ok(TheoremCheck {
        name: format!("sequential censoring rate below fixed-size (pi0={})", fmt_num(p.network.pi0())),
        passed: worst <= 1e-9,
        witness: format!("designs={} max(rho_seq - rho_fixed)={}", designs.len(), fmt_num(worst)),
    })
}

/// For small `π0` the optimized sequential cost does not exceed the
/// optimized fixed-size cost at the same `N`.
pub fn small_prior_dominance(p: &PointParams) -> Result<TheoremCheck> {
    let seq = optimize_b(&p.profiles, &p.network, p.n, p.bias, RelaxedOptions::default())?;
    let cs = optimize_censoring(&p.profiles, &p.network, p.n)?;
    let name = format!("sequential max cost <= censoring max cost (pi0={})", fmt_num(p.network.pi0()));
    Ok(match (seq.max_cost(), cs.max_cost()) {
        (Some(s), Some(c)) => TheoremCheck {
            name,
            passed: s <= c + 1e-9,
            witness: format!("N={} sequential={} censoring={}", p.n, fmt_num(s), fmt_num(c)),
        },
        (s, c) => TheoremCheck {
            name,
            passed: false,
            witness: format!("infeasible: sequential={:?} censoring={:?}", s, c),
        },
    })
}

/// All three suites at the sweep's fixed parameters. The first two run for
/// every prior in `spec.pi0`, the last for `π0 ∈ {0.01, 0.05}`.
pub fn verify_theorems(spec: &SweepSpec) -> Result<TheoremReport> {
    let mut report = TheoremReport::default();
    for &pi0 in &spec.pi0 {
        let p = fixed_params(spec, pi0)?;
        report.checks.push(lambda1_monotonicity(&p, 100)?);
    }
    for &pi0 in &spec.pi0 {
        let p = fixed_params(spec, pi0)?;
        report.checks.push(censoring_rate_comparison(&p)?);
    }
    for pi0 in [0.01, 0.05] {
        let p = fixed_params(spec, pi0)?;
        report.checks.push(small_prior_dominance(&p)?);
    }
    Ok(report)
}
