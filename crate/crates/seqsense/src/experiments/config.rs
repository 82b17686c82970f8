//! Sweep configuration.

use serde::{Deserialize, Serialize};
use seqsense_core::model::db_to_linear;
use seqsense_core::{NetworkModel, SensorProfile, SequentialDesign};

use crate::error::{config_err, Result, SeqsenseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Censoring,
    SeqRelaxed,
    SeqGeneral,
    All,
}

impl Scheme {
    pub fn expand(self) -> Vec<Scheme> {
        match self {
            Scheme::All => vec![Scheme::Censoring, Scheme::SeqRelaxed, Scheme::SeqGeneral],
            s => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Censoring => "censoring",
            Scheme::SeqRelaxed => "seq-relaxed",
            Scheme::SeqGeneral => "seq-general",
            Scheme::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "M")]
    M,
    #[serde(rename = "snr_db")]
    SnrDb,
    #[serde(rename = "N")]
    N,
    #[serde(rename = "ct_over_cs")]
    CtOverCs,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Beta => "beta",
            SweepVariable::M => "M",
            SweepVariable::SnrDb => "snr_db",
            SweepVariable::N => "N",
            SweepVariable::CtOverCs => "ct_over_cs",
        }
    }
}

/// Everything a sweep needs. Field names double as the config keys and the
/// CLI override flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub scheme: Scheme,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    /// One block of rows per prior.
    pub pi0: Vec<f64>,
    pub num_sensors: usize,
    pub alpha: f64,
    pub beta: f64,
    pub snr_db: f64,
    pub cost_sense: f64,
    pub cost_tx: f64,
    /// Truncation point / sample count.
    pub n: u32,
    /// Test bias; `1 + γ_min/2` when absent.
    pub bias: Option<f64>,
    pub grid_resolution: usize,
    pub scan_points: usize,
    /// Monte Carlo trials per feasible point for the fused rates; 0 disables.
    pub trials: u64,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            scheme: Scheme::All,
            variable: SweepVariable::Beta,
            values: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99],
            pi0: vec![0.2, 0.8],
            num_sensors: 5,
            alpha: 0.1,
            beta: 0.9,
            snr_db: 0.0,
            cost_sense: 1.0,
            cost_tx: 10.0,
            n: 10,
            bias: None,
            grid_resolution: 200,
            scan_points: 2000,
            trials: 0,
            seed: 1,
            antithetic: false,
        }
    }
}

/// Fixed parameters of one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointParams {
    pub profiles: Vec<SensorProfile>,
    pub network: NetworkModel,
    pub n: u32,
    pub bias: f64,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: SweepSpec = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_err(&path, e.into_inner().to_string())
        })?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(config_err("values", "sweep grid is empty"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(config_err("values", "sweep grid contains a non-finite value"));
        }
        if self.values.windows(2).any(|w| w[1] < w[0]) {
            return Err(config_err("values", "sweep grid must be sorted"));
        }
        if self.pi0.is_empty() {
            return Err(config_err("pi0", "at least one prior is required"));
        }
        if self.grid_resolution < 2 {
            return Err(config_err("grid_resolution", "must be at least 2"));
        }
        if self.scan_points < 2 {
            return Err(config_err("scan_points", "must be at least 2"));
        }
        for (i, _) in self.pi0.iter().enumerate() {
            for &v in &self.values {
                self.point(i, v).map_err(|e| match e {
                    SeqsenseError::Core(c) => config_err(self.variable.name(), c.to_string()),
                    other => other,
                })?;
            }
        }
        Ok(())
    }

    /// Parameters of prior block `block` at sweep value `value`.
    pub fn point(&self, block: usize, value: f64) -> Result<PointParams> {
        let mut m = self.num_sensors;
        let mut beta = self.beta;
        let mut snr_db = self.snr_db;
        let mut n = self.n;
        let mut cost_tx = self.cost_tx;
        match self.variable {
            SweepVariable::Beta => beta = value,
            SweepVariable::M => m = as_count("values", value)? as usize,
            SweepVariable::SnrDb => snr_db = value,
            SweepVariable::N => n = as_count("values", value)?,
            SweepVariable::CtOverCs => cost_tx = value * self.cost_sense,
        }
        let pi0 = *self.pi0.get(block).ok_or_else(|| config_err("pi0", "block index out of range"))?;
        let network = NetworkModel::new(m, pi0, self.alpha, beta)?;
        let profile = SensorProfile::new(db_to_linear(snr_db), self.cost_sense, cost_tx)?;
        let bias = self.bias.unwrap_or_else(|| SequentialDesign::default_bias(profile.gamma()));
        if n == 0 {
            return Err(config_err("n", "must be positive"));
        }
        Ok(PointParams { profiles: profile.replicate(m), network, n, bias })
    }
}

fn as_count(path: &str, v: f64) -> Result<u32> {
    if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as u32)
    } else {
        Err(config_err(path, format!("{v} is not a positive integer")))
    }
}
