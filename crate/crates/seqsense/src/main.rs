use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use seqsense::experiments::config::{Scheme, SweepSpec, SweepVariable};
use seqsense::experiments::sweep::sweep_csv;
use seqsense::experiments::theorems::verify_theorems;
use seqsense::experiments::validate::{validate_against_oracle, Suite};
use seqsense::oracle::mc::McConfig;
use seqsense::{Result, SeqsenseError};

#[derive(Parser)]
#[command(name = "seqsense", version, about = "Censored cooperative spectrum sensing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize every scheme over a parameter sweep and write CSV.
    Sweep(Common),
    /// Check the structural properties numerically.
    VerifyTheorems(Common),
    /// Compare analytic quantities with Monte Carlo and quadrature.
    ValidateOracle {
        #[command(flatten)]
        common: Common,
        /// Suites to run; all by default.
        #[arg(long, value_enum, value_delimiter = ',')]
        suite: Vec<SuiteArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Relaxed,
    General,
    Fixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Censoring,
    SeqRelaxed,
    SeqGeneral,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariableArg {
    #[value(name = "beta")]
    Beta,
    #[value(name = "M")]
    M,
    #[value(name = "snr_db")]
    SnrDb,
    #[value(name = "N")]
    N,
    #[value(name = "ct_over_cs")]
    CtOverCs,
}

#[derive(Args)]
struct Common {
    /// JSON config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials (0 disables the sweep cross-check).
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, value_enum)]
    variable: Option<VariableArg>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pi0: Option<Vec<f64>>,
    #[arg(long)]
    num_sensors: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    snr_db: Option<f64>,
    #[arg(long)]
    cost_sense: Option<f64>,
    #[arg(long)]
    cost_tx: Option<f64>,
    /// Sets `cost_tx = ratio * cost_sense`.
    #[arg(long, conflicts_with = "cost_tx")]
    ct_over_cs: Option<f64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    bias: Option<f64>,
    #[arg(long)]
    grid_resolution: Option<usize>,
    #[arg(long)]
    scan_points: Option<usize>,
    #[arg(long)]
    antithetic: bool,
}

impl Common {
    fn spec(&self) -> Result<SweepSpec> {
        let mut s = match &self.config {
            Some(path) => SweepSpec::from_json(&std::fs::read_to_string(path)?)?,
            None => SweepSpec::default(),
        };
        if let Some(v) = self.scheme {
            s.scheme = match v {
                SchemeArg::Censoring => Scheme::Censoring,
                SchemeArg::SeqRelaxed => Scheme::SeqRelaxed,
                SchemeArg::SeqGeneral => Scheme::SeqGeneral,
                SchemeArg::All => Scheme::All,
            };
        }
        if let Some(v) = self.variable {
            s.variable = match v {
                VariableArg::Beta => SweepVariable::Beta,
                VariableArg::M => SweepVariable::M,
                VariableArg::SnrDb => SweepVariable::SnrDb,
                VariableArg::N => SweepVariable::N,
                VariableArg::CtOverCs => SweepVariable::CtOverCs,
            };
        }
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = &self.$f { s.$f = v.clone(); })* };
        }
        set!(seed, trials, values, pi0, num_sensors, alpha, beta, snr_db, cost_sense, cost_tx, n, grid_resolution, scan_points);
        if let Some(r) = self.ct_over_cs {
            s.cost_tx = r * s.cost_sense;
        }
        if self.bias.is_some() {
            s.bias = self.bias;
        }
        s.antithetic |= self.antithetic;
        Ok(s)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

/// Trials for `validate-oracle` when neither config nor flag sets them.
const DEFAULT_VALIDATION_TRIALS: u64 = 1_000_000;

fn run(cli: Cli) -> Result<Option<serde_json::Value>> {
    match cli.command {
        Command::Sweep(c) => {
            let spec = c.spec()?;
            c.emit(&sweep_csv(&spec)?)?;
            Ok(None)
        }
        Command::VerifyTheorems(c) => {
            let spec = c.spec()?;
            spec.validate()?;
            let report = verify_theorems(&spec)?;
            c.emit(&report.to_table().to_csv())?;
            let failed: Vec<_> = report
                .checks
                .iter()
                .filter(|t| !t.passed)
                .map(|t| json!({ "check": t.name, "witness": t.witness }))
                .collect();
            Ok((!failed.is_empty()).then(|| json!({ "command": "verify-theorems", "failures": failed })))
        }
        Command::ValidateOracle { common: c, suite } => {
            let spec = c.spec()?;
            let suites: Vec<Suite> = if suite.is_empty() {
                vec![Suite::Relaxed, Suite::General, Suite::Fixed]
            } else {
                suite
                    .iter()
                    .map(|s| match s {
                        SuiteArg::Relaxed => Suite::Relaxed,
                        SuiteArg::General => Suite::General,
                        SuiteArg::Fixed => Suite::Fixed,
                    })
                    .collect()
            };
            let trials = if spec.trials == 0 { DEFAULT_VALIDATION_TRIALS } else { spec.trials };
            let mut mc = McConfig::new(trials, spec.seed);
            mc.antithetic = spec.antithetic;
            let pi0 = spec.pi0.first().copied().unwrap_or(0.5);
            let report = validate_against_oracle(&suites, pi0, &mc)?;
            c.emit(&report.to_table().to_csv())?;
            for (s, q, z, count) in report.max_z() {
                eprintln!("{:<12} {:<7} max|z| = {:.3} over {count} designs", s.name(), q, z);
            }
            if report.passed() {
                return Ok(None);
            }
            let mc_fail: Vec<_> = report
                .failures()
                .into_iter()
                .map(|f| {
                    json!({
                        "suite": f.suite.name(), "design": f.design, "quantity": f.quantity,
                        "analytic": f.analytic, "estimate": f.estimate, "z": f.z,
                    })
                })
                .collect();
            let quad_fail: Vec<_> = report
                .quadrature_failures()
                .into_iter()
                .map(|f| json!({ "design": f.design, "quantity": f.quantity, "rel_err": f.rel_err }))
                .collect();
            Ok(Some(json!({ "command": "validate-oracle", "failures": mc_fail, "quadrature_failures": quad_fail })))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(summary)) => {
            eprintln!("{summary}");
            ExitCode::FAILURE
        }
        Err(e) => {
            let kind = match &e {
                SeqsenseError::Config { .. } => "config",
                SeqsenseError::Core(_) => "model",
                SeqsenseError::Io(_) => "io",
            };
            let mut v = json!({ "error": kind, "message": e.to_string() });
            if let SeqsenseError::Config { path, .. } = &e {
                v["path"] = json!(path);
            }
            eprintln!("{v}");
            ExitCode::from(2)
        }
    }
}
