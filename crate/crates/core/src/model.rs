//! Sensors, network constraints and hypotheses.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::pow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// Primary user absent.
    H0,
    /// Primary user present.
    H1,
}

/// Per-radio received SNR and energy costs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorProfile {
    gamma: f64,
    cost_sense: f64,
    cost_tx: f64,
}

impl SensorProfile {
    /// `gamma` is the linear SNR; costs are energy per sample and per
    /// transmitted decision bit.
    pub fn new(gamma: f64, cost_sense: f64, cost_tx: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter("SNR must be positive and finite"));
        }
        if !(cost_sense >= 0.0 && cost_sense.is_finite()) {
            return Err(Error::InvalidParameter("sensing cost must be non-negative"));
        }
        if !(cost_tx >= 0.0 && cost_tx.is_finite()) {
            return Err(Error::InvalidParameter("transmission cost must be non-negative"));
        }
        Ok(Self { gamma, cost_sense, cost_tx })
    }

    pub fn from_db(snr_db: f64, cost_sense: f64, cost_tx: f64) -> Result<Self> {
        Self::new(db_to_linear(snr_db), cost_sense, cost_tx)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn cost_sense(&self) -> f64 {
        self.cost_sense
    }

    pub fn cost_tx(&self) -> f64 {
        self.cost_tx
    }

    /// `m` copies of this profile.
    pub fn replicate(self, m: usize) -> Vec<Self> {
        alloc::vec![self; m]
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    pow(10.0, db / 10.0)
}

/// Network size, prior and global detection constraints.
///
/// `Q_F ≤ alpha` and `Q_D ≥ beta` are the design constraints. `alpha = 1`
/// and `beta = 0` are accepted and make the respective constraint vacuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkModel {
    num_sensors: usize,
    pi0: f64,
    alpha: f64,
    beta: f64,
}

impl NetworkModel {
    pub fn new(num_sensors: usize, pi0: f64, alpha: f64, beta: f64) -> Result<Self> {
        if num_sensors == 0 {
            return Err(Error::InvalidParameter("network needs at least one sensor"));
        }
        if !(pi0 > 0.0 && pi0 < 1.0) {
            return Err(Error::InvalidParameter("pi0 must lie in (0, 1)"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter("alpha must lie in (0, 1]"));
        }
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::InvalidParameter("beta must lie in [0, 1)"));
        }
        Ok(Self { num_sensors, pi0, alpha, beta })
    }

    pub fn num_sensors(&self) -> usize {
        self.num_sensors
    }

    pub fn pi0(&self) -> f64 {
        self.pi0
    }

    pub fn pi1(&self) -> f64 {
        1.0 - self.pi0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Largest shared local false-alarm probability compatible with `Q_F ≤ alpha`.
    pub fn pf_ceiling(&self) -> f64 {
        1.0 - pow(1.0 - self.alpha, 1.0 / self.num_sensors as f64)
    }

    /// Per-sensor detection probability that meets `Q_D = beta` with equal sensors.
    pub fn pd_floor_equal(&self) -> f64 {
        1.0 - pow(1.0 - self.beta, 1.0 / self.num_sensors as f64)
    }

    pub(crate) fn check_profiles(&self, profiles: &[SensorProfile]) -> Result<()> {
        if profiles.len() != self.num_sensors {
            return Err(Error::SensorCount { expected: self.num_sensors, got: profiles.len() });
        }
        Ok(())
    }
}

pub(crate) fn gamma_range(profiles: &[SensorProfile]) -> (f64, f64) {
    profiles.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
        (lo.min(p.gamma()), hi.max(p.gamma()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SensorProfile::new(0.0, 1.0, 1.0).is_err());
        assert!(SensorProfile::new(1.0, -1.0, 1.0).is_err());
        assert!(NetworkModel::new(0, 0.5, 0.1, 0.9).is_err());
        assert!(NetworkModel::new(5, 1.0, 0.1, 0.9).is_err());
        assert!(NetworkModel::new(5, 0.5, 0.0, 0.9).is_err());
        assert!(NetworkModel::new(5, 0.5, 1.0, 0.0).is_ok());
    }

    #[test]
    fn db_conversion() {
        let p = SensorProfile::from_db(0.0, 1.0, 10.0).unwrap();
        assert_eq!(p.gamma(), 1.0);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn derived_bounds() {
        let net = NetworkModel::new(5, 0.8, 0.1, 0.9).unwrap();
        assert!((net.pi1() - 0.2).abs() < 1e-15);
        assert!((net.pd_floor_equal() - (1.0 - 0.1f64.powf(0.2))).abs() < 1e-15);
        assert!((net.pf_ceiling() - (1.0 - 0.9f64.powf(0.2))).abs() < 1e-15);
    }
}
