//! Optimized designs over a one-parameter sweep.

use rayon::prelude::*;
use seqsense_core::censoring::optimize_censoring;
use seqsense_core::general::{optimize_2d, GridOptions};
use seqsense_core::relaxed::{optimize_b, RelaxedOptions};
use seqsense_core::{Infeasibility, Outcome, SchemeMetrics};

use super::csv::{fmt_num, opt_num, Table};
use super::config::{PointParams, Scheme, SweepSpec};
use crate::error::{Result, SeqsenseError};
use crate::oracle::mc::{run_network, McConfig, NetworkEstimates, NetworkScheme};

pub const HEADER: [&str; 25] = [
    "variable", "value", "pi0", "scheme", "status", "n", "bias", "lambda2", "a_bar", "b_bar", "pf",
    "pd_min", "pd_max", "rho", "asn", "max_cost", "qf", "qd", "qf_margin", "qd_margin", "mc_trials",
    "mc_qf", "mc_qf_se", "mc_qd", "mc_qd_se",
];

#[derive(Debug, Clone, PartialEq)]
pub enum PointResult {
    Feasible {
        lambda2: Option<f64>,
        a_bar: Option<f64>,
        b_bar: Option<f64>,
        metrics: SchemeMetrics,
        mc: Option<NetworkEstimates>,
    },
    Infeasible(Infeasibility),
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub pi0: f64,
    pub scheme: Scheme,
    pub n: u32,
    pub bias: f64,
    pub result: PointResult,
}

impl SweepRow {
    pub fn metrics(&self) -> Option<&SchemeMetrics> {
        match &self.result {
            PointResult::Feasible { metrics, .. } => Some(metrics),
            _ => None,
        }
    }

    pub fn max_cost(&self) -> Option<f64> {
        self.metrics().map(|m| m.max_cost)
    }
}

fn solve(p: &PointParams, scheme: Scheme, spec: &SweepSpec) -> seqsense_core::Result<PointResult> {
    let (design, outcome_metrics, lambda2, a_bar, b_bar) = match scheme {
        Scheme::Censoring => match optimize_censoring(&p.profiles, &p.network, p.n)? {
            Outcome::Feasible(s) => {
                let l2 = s.design.lambda2();
                (NetworkScheme::Fixed(s.design), s.metrics, Some(l2), None, None)
            }
            Outcome::Infeasible(r) => return Ok(PointResult::Infeasible(r)),
        },
        Scheme::SeqRelaxed => {
            let opts = RelaxedOptions { scan_points: spec.scan_points };
            match optimize_b(&p.profiles, &p.network, p.n, p.bias, opts)? {
                Outcome::Feasible(s) => {
                    let (a, b) = (s.design.a_bar(), s.design.b_bar());
                    (NetworkScheme::Sequential(s.design), s.metrics, None, Some(a), Some(b))
                }
                Outcome::Infeasible(r) => return Ok(PointResult::Infeasible(r)),
            }
        }
        Scheme::SeqGeneral => {
            let opts = GridOptions { resolution: spec.grid_resolution, include_line_search: true };
            match optimize_2d(&p.profiles, &p.network, p.n, p.bias, opts)?.outcome {
                Outcome::Feasible(s) => {
                    let (a, b) = (s.design.a_bar(), s.design.b_bar());
                    (NetworkScheme::Sequential(s.design), s.metrics, None, Some(a), Some(b))
                }
                Outcome::Infeasible(r) => return Ok(PointResult::Infeasible(r)),
            }
        }
        Scheme::All => unreachable!("expanded before solving"),
    };
    let mc = (spec.trials > 0).then(|| {
        let cfg = McConfig { trials: spec.trials, seed: spec.seed, antithetic: spec.antithetic, paired: false };
        run_network(&design, &p.profiles, &cfg)
    });
    Ok(PointResult::Feasible { lambda2, a_bar, b_bar, metrics: outcome_metrics, mc })
}

/// Runs every (prior, value, scheme) combination; rows come back in that
/// nested order whatever the thread count.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for block in 0..spec.pi0.len() {
        for &value in &spec.values {
            for scheme in spec.scheme.expand() {
                jobs.push((block, value, scheme));
            }
        }
    }
    jobs.par_iter()
        .map(|&(block, value, scheme)| {
            let p = spec.point(block, value)?;
            let result = match solve(&p, scheme, spec) {
                Ok(r) => r,
                Err(e @ seqsense_core::Error::Range { .. }) => PointResult::Unsupported(e.to_string()),
                Err(e) => return Err(SeqsenseError::Core(e)),
            };
            Ok(SweepRow { value, pi0: p.network.pi0(), scheme, n: p.n, bias: p.bias, result })
        })
        .collect()
}

pub fn to_table(spec: &SweepSpec, rows: &[SweepRow]) -> Table {
    let mut t = Table::new(HEADER.to_vec());
    for r in rows {
        let mut cells = vec![
            spec.variable.name().to_string(),
            fmt_num(r.value),
            fmt_num(r.pi0),
            r.scheme.name().to_string(),
        ];
        let blank = |n: usize| vec![String::new(); n];
        match &r.result {
            PointResult::Feasible { lambda2, a_bar, b_bar, metrics: m, mc } => {
                cells.push("feasible".into());
                cells.push(r.n.to_string());
                cells.push(if lambda2.is_some() { String::new() } else { fmt_num(r.bias) });
                cells.extend([opt_num(*lambda2), opt_num(*a_bar), opt_num(*b_bar)]);
                cells.extend(
                    [m.pf, m.pd_min(), m.pd_max(), m.rho_at_max_cost(), m.asn_at_max_cost(), m.max_cost, m.qf, m.qd]
                        .map(fmt_num),
                );
                let (mf, md) = (spec.alpha - m.qf, m.qd - network_beta(spec, r));
                cells.extend([fmt_num(mf), fmt_num(md)]);
                match mc {
                    Some(e) => {
                        cells.push(e.qf.trials.to_string());
                        cells.extend([e.qf.mean, e.qf.stderr, e.qd.mean, e.qd.stderr].map(fmt_num));
                    }
                    None => cells.extend(blank(5)),
                }
            }
            PointResult::Infeasible(inf) => {
                cells.push("infeasible".into());
                cells.push(r.n.to_string());
                cells.extend(blank(12));
                cells.extend([fmt_num(inf.qf_margin), fmt_num(inf.qd_margin)]);
                cells.extend(blank(5));
            }
            PointResult::Unsupported(_) => {
                cells.push("unsupported".into());
                cells.push(r.n.to_string());
                cells.extend(blank(19));
            }
        }
        t.push(cells);
    }
    t
}

fn network_beta(spec: &SweepSpec, r: &SweepRow) -> f64 {
    match spec.variable {
        super::config::SweepVariable::Beta => r.value,
        _ => spec.beta,
    }
}

/// Sweep straight to CSV text.
pub fn sweep_csv(spec: &SweepSpec) -> Result<String> {
    let rows = run_sweep(spec)?;
    Ok(to_table(spec, &rows).to_csv())
}
