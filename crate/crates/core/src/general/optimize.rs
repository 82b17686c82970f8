//! Exhaustive grid search over both intercepts.

use alloc::vec::Vec;

use super::crossing::{fused_general, metrics_from_geometry, Geometry, MAX_TRUNCATION_GENERAL};
use crate::error::{Error, Result};
use crate::metrics::{Infeasibility, Outcome, SchemeMetrics, Solution};
use crate::model::{gamma_range, NetworkModel, SensorProfile};
use crate::relaxed::{b_bar_cap, optimize_b, RelaxedOptions, B_BAR_MIN};
use crate::search::bisect_decreasing;
use crate::sequential::SequentialDesign;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Points per axis.
    pub resolution: usize,
    /// Also evaluate the line-search optimum on the `ā = -NΛ̄` column.
    pub include_line_search: bool,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { resolution: 200, include_line_search: true }
    }
}

/// One feasible grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub a_bar: f64,
    pub b_bar: f64,
    pub max_cost: f64,
    pub qf: f64,
    pub qd: f64,
    pub asn: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearch {
    pub outcome: Outcome<SequentialDesign>,
    /// Every feasible cell visited, in grid order.
    pub feasible: Vec<GridPoint>,
}

fn point(d: &SequentialDesign, m: &SchemeMetrics) -> GridPoint {
    GridPoint {
        a_bar: d.a_bar(),
        b_bar: d.b_bar(),
        max_cost: m.max_cost,
        qf: m.qf,
        qd: m.qd,
        asn: m.asn_at_max_cost(),
        rho: m.rho_at_max_cost(),
    }
}

fn better(cand: &GridPoint, best: &Option<GridPoint>) -> bool {
    match best {
        None => true,
        Some(b) => {
            cand.max_cost < b.max_cost
                || (cand.max_cost == b.max_cost
                    && (cand.a_bar, cand.b_bar).partial_cmp(&(b.a_bar, b.b_bar))
                        == Some(core::cmp::Ordering::Less))
        }
    }
}

/// Minimizes the largest per-radio energy over `ā ∈ [-NΛ̄, 0)` and, for
/// each `ā`, the `b̄` bracket where `Q_F ≤ α` and `Q_D ≥ β`. Constraints are
/// re-checked exactly at every cell. Ties go to the smallest `(ā, b̄)`.
pub fn optimize_2d(
    profiles: &[SensorProfile],
    network: &NetworkModel,
    n_trunc: u32,
    bias: f64,
    options: GridOptions,
) -> Result<GridSearch> {
    network.check_profiles(profiles)?;
    if options.resolution < 2 {
        return Err(Error::InvalidParameter("grid resolution must be at least 2"));
    }
    if n_trunc == 0 {
        return Err(Error::InvalidParameter("truncation point must be positive"));
    }
    if n_trunc > MAX_TRUNCATION_GENERAL {
        return Err(Error::Range { n: n_trunc, max: MAX_TRUNCATION_GENERAL });
    }
    let (g_min, g_max) = gamma_range(profiles);
    SequentialDesign::check_bias(bias, g_min)?;
    let (alpha, beta) = (network.alpha(), network.beta());
    let cap = b_bar_cap(g_max, n_trunc);
    let res = options.resolution;
    let span = n_trunc as f64 * bias;

    let mut best: Option<GridPoint> = None;
    let mut best_metrics: Option<SchemeMetrics> = None;
    let mut feasible = Vec::new();
    let mut closest: Option<(f64, SchemeMetrics)> = None;
    let mut note_closest = |m: SchemeMetrics| {
        let (mf, md) = m.margins(network);
        let slack = mf.min(md);
        if closest.as_ref().is_none_or(|(s, _)| slack > *s) {
            closest = Some((slack, m));
        }
    };

    for k in 0..res {
        let a_bar = -span + span * k as f64 / res as f64;
        let make = |b: f64| SequentialDesign::new(n_trunc, a_bar, b, bias);
        let fused_at = |b: f64| -> (f64, f64) {
            match make(b).and_then(|d| Geometry::new(&d)) {
                Ok(g) => fused_general(&g, profiles),
                Err(_) => (f64::NAN, f64::NAN),
            }
        };
        let b_hi = if fused_at(cap).1 >= beta {
            cap
        } else if fused_at(B_BAR_MIN).1 < beta {
            let g = Geometry::new(&make(B_BAR_MIN)?)?;
            if let Ok(m) = metrics_from_geometry(&g, profiles, network) {
                note_closest(m);
            }
            continue;
        } else {
            bisect_decreasing(|b| fused_at(b).1, beta, B_BAR_MIN, cap).0
        };
        let b_lo = if fused_at(B_BAR_MIN).0 <= alpha {
            B_BAR_MIN
        } else if fused_at(b_hi).0 > alpha {
            let g = Geometry::new(&make(b_hi)?)?;
            if let Ok(m) = metrics_from_geometry(&g, profiles, network) {
                note_closest(m);
            }
            continue;
        } else {
            bisect_decreasing(|b| fused_at(b).0, alpha, B_BAR_MIN, b_hi).1
        };
        for j in 0..res {
            let b_bar = if j + 1 == res {
                b_hi
            } else {
                b_lo + (b_hi - b_lo) * j as f64 / (res - 1) as f64
            };
            let d = make(b_bar)?;
            let m = match Geometry::new(&d).and_then(|g| metrics_from_geometry(&g, profiles, network)) {
                Ok(m) => m,
                Err(Error::Instability { .. }) => continue,
                Err(e) => return Err(e),
            };
            if !m.is_feasible(network) {
                note_closest(m);
                continue;
            }
            let pt = point(&d, &m);
            feasible.push(pt);
            if better(&pt, &best) {
                best = Some(pt);
                best_metrics = Some(m);
            }
        }
    }

    if options.include_line_search {
        if let Outcome::Feasible(s) = optimize_b(profiles, network, n_trunc, bias, RelaxedOptions::default())? {
            let g = Geometry::new(&s.design)?;
            let m = metrics_from_geometry(&g, profiles, network)?;
            if m.is_feasible(network) {
                let pt = point(&s.design, &m);
                feasible.push(pt);
                if better(&pt, &best) {
                    best = Some(pt);
                    best_metrics = Some(m);
                }
            }
        }
    }

    let outcome = match (best, best_metrics) {
        (Some(pt), Some(metrics)) => {
            let design = SequentialDesign::new(n_trunc, pt.a_bar, pt.b_bar, bias)?;
            Outcome::Feasible(Solution { design, metrics })
        }
        _ => {
            let (qf_margin, qd_margin, pf) = match &closest {
                Some((_, m)) => {
                    let (a, b) = m.margins(network);
                    (a, b, m.pf)
                }
                None => (f64::NAN, f64::NAN, f64::NAN),
            };
            Outcome::Infeasible(Infeasibility {
                pf_required: pf,
                pf_ceiling: network.pf_ceiling(),
                qf_margin,
                qd_margin,
            })
        }
    };
    Ok(GridSearch { outcome, feasible })
}
