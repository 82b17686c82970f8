//! Per-sensor and network-level performance of a sensing design, and the
//! result types shared by the optimizers.

use alloc::vec::Vec;

use crate::error::Result;
use crate::math::or_fusion;
use crate::model::{NetworkModel, SensorProfile};

/// Local and global metrics of one design applied to every sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeMetrics {
    /// Local false-alarm probability, shared by all sensors.
    pub pf: f64,
    /// Local detection probability per sensor.
    pub pd: Vec<f64>,
    /// Censoring probability under H0 per sensor.
    pub delta0: Vec<f64>,
    /// Censoring probability under H1 per sensor.
    pub delta1: Vec<f64>,
    /// Average censoring rate per sensor.
    pub rho: Vec<f64>,
    pub asn_h0: Vec<f64>,
    pub asn_h1: Vec<f64>,
    /// Prior-weighted average sample number per sensor.
    pub asn: Vec<f64>,
    /// Average energy per sensing period per sensor.
    pub cost: Vec<f64>,
    /// Global false-alarm probability after OR fusion.
    pub qf: f64,
    /// Global detection probability after OR fusion.
    pub qd: f64,
    pub max_cost: f64,
}

/// What a single sensor's detector does under both hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SensorOutcome {
    pub pd: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub asn_h0: f64,
    pub asn_h1: f64,
}

impl SchemeMetrics {
    pub(crate) fn assemble(
        pf: f64,
        outcomes: &[SensorOutcome],
        profiles: &[SensorProfile],
        network: &NetworkModel,
    ) -> Result<Self> {
        network.check_profiles(profiles)?;
        debug_assert_eq!(outcomes.len(), profiles.len());
        let (pi0, pi1) = (network.pi0(), network.pi1());
        let m = profiles.len();
        let mut out = SchemeMetrics {
            pf,
            pd: Vec::with_capacity(m),
            delta0: Vec::with_capacity(m),
            delta1: Vec::with_capacity(m),
            rho: Vec::with_capacity(m),
            asn_h0: Vec::with_capacity(m),
            asn_h1: Vec::with_capacity(m),
            asn: Vec::with_capacity(m),
            cost: Vec::with_capacity(m),
            qf: or_fusion(core::iter::repeat_n(pf, m)),
            qd: or_fusion(outcomes.iter().map(|o| o.pd)),
            max_cost: f64::NEG_INFINITY,
        };
        for (o, prof) in outcomes.iter().zip(profiles) {
            let rho = pi0 * o.delta0 + pi1 * o.delta1;
            let asn = pi0 * o.asn_h0 + pi1 * o.asn_h1;
            let cost = asn * prof.cost_sense() + (1.0 - rho) * prof.cost_tx();
            out.pd.push(o.pd);
            out.delta0.push(o.delta0);
            out.delta1.push(o.delta1);
            out.rho.push(rho);
            out.asn_h0.push(o.asn_h0);
            out.asn_h1.push(o.asn_h1);
            out.asn.push(asn);
            out.cost.push(cost);
            out.max_cost = out.max_cost.max(cost);
        }
        Ok(out)
    }

    pub fn pd_min(&self) -> f64 {
        self.pd.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn pd_max(&self) -> f64 {
        self.pd.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Censoring rate of the sensor with the largest cost.
    pub fn rho_at_max_cost(&self) -> f64 {
        self.rho[self.argmax_cost()]
    }

    pub fn asn_at_max_cost(&self) -> f64 {
        self.asn[self.argmax_cost()]
    }

    fn argmax_cost(&self) -> usize {
        let mut best = 0;
        for (j, c) in self.cost.iter().enumerate() {
            if *c > self.cost[best] {
                best = j;
            }
        }
        best
    }

    /// `alpha - Q_F` and `Q_D - beta`; both non-negative iff feasible.
    pub fn margins(&self, network: &NetworkModel) -> (f64, f64) {
        (network.alpha() - self.qf, self.qd - network.beta())
    }

    pub fn is_feasible(&self, network: &NetworkModel) -> bool {
        let (mf, md) = self.margins(network);
        mf >= 0.0 && md >= 0.0
    }
}

/// Optimal design together with its metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<D> {
    pub design: D,
    pub metrics: SchemeMetrics,
}

/// Why no design satisfies both global constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Infeasibility {
    /// Local false-alarm probability forced by the detection floor.
    pub pf_required: f64,
    /// Largest local false-alarm probability the false-alarm ceiling allows.
    pub pf_ceiling: f64,
    /// `alpha - Q_F` at the point closest to feasibility.
    pub qf_margin: f64,
    /// `Q_D - beta` at the same point.
    pub qd_margin: f64,
}

/// Result of a constrained threshold optimization. Infeasibility is a
/// regular result so sweeps can record it.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<D> {
    Feasible(Solution<D>),
    Infeasible(Infeasibility),
}

impl<D> Outcome<D> {
    pub fn feasible(&self) -> Option<&Solution<D>> {
        match self {
            Outcome::Feasible(s) => Some(s),
            Outcome::Infeasible(_) => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Outcome::Feasible(_))
    }

    pub fn max_cost(&self) -> Option<f64> {
        self.feasible().map(|s| s.metrics.max_cost)
    }
}
