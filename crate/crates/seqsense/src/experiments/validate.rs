//! Analytic expressions against the Monte Carlo and quadrature oracles.

use seqsense_core::censoring::{censor_deltas, local_pd, local_pf, FixedSizeDesign};
use seqsense_core::general::{crossing_probs, Geometry, HypothesisRows};
use seqsense_core::relaxed::{self, rate};
use seqsense_core::{Hypothesis, SequentialDesign};

use super::csv::{fmt_num, Table};
use crate::error::Result;
use crate::oracle::mc::{run_fixed, run_sequential, McConfig, McEstimate, SequentialEstimates};
use crate::oracle::quadrature::Quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Relaxed,
    General,
    Fixed,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Relaxed => "seq-relaxed",
            Suite::General => "seq-general",
            Suite::Fixed => "censoring",
        }
    }
}

/// Largest tolerated `|z|`.
pub const Z_LIMIT: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub suite: Suite,
    pub design: String,
    pub quantity: &'static str,
    pub analytic: f64,
    pub estimate: f64,
    /// Standard error used for `z`.
    pub stderr: f64,
    pub z: f64,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.z.abs() <= Z_LIMIT
    }
}

/// Deterministic quadrature cross-check.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureCheck {
    pub design: String,
    pub quantity: String,
    pub analytic: f64,
    pub quadrature: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub comparisons: Vec<Comparison>,
    pub quadrature: Vec<QuadratureCheck>,
}

pub const QUADRATURE_TOL: f64 = 1e-6;

impl ValidationReport {
    pub fn failures(&self) -> Vec<&Comparison> {
        self.comparisons.iter().filter(|c| !c.passed()).collect()
    }

    pub fn quadrature_failures(&self) -> Vec<&QuadratureCheck> {
        self.quadrature.iter().filter(|q| !(q.rel_err <= QUADRATURE_TOL)).collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty() && self.quadrature_failures().is_empty()
    }

    /// `(suite, quantity, max |z|, count)` in first-seen order.
    pub fn max_z(&self) -> Vec<(Suite, &'static str, f64, usize)> {
        let mut out: Vec<(Suite, &'static str, f64, usize)> = Vec::new();
        for c in &self.comparisons {
            match out.iter_mut().find(|(s, q, _, _)| *s == c.suite && *q == c.quantity) {
                Some(e) => {
                    e.2 = e.2.max(c.z.abs());
                    e.3 += 1;
                }
                None => out.push((c.suite, c.quantity, c.z.abs(), 1)),
            }
        }
        out
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(vec!["suite", "design", "quantity", "analytic", "estimate", "stderr", "z", "passed"]);
        for c in &self.comparisons {
            t.push(vec![
                c.suite.name().into(),
                c.design.clone(),
                c.quantity.into(),
                fmt_num(c.analytic),
                fmt_num(c.estimate),
                fmt_num(c.stderr),
                fmt_num(c.z),
                c.passed().to_string(),
            ]);
        }
        for q in &self.quadrature {
            t.push(vec![
                "quadrature".into(),
                q.design.clone(),
                q.quantity.clone(),
                fmt_num(q.analytic),
                fmt_num(q.quadrature),
                String::new(),
                fmt_num(q.rel_err),
                (q.rel_err <= QUADRATURE_TOL).to_string(),
            ]);
        }
        t
    }
}

/// `N ∈ {1,2,5,10,30}`, `b̄ ∈ {0.5,2,5,10}`, `Λ̄ ∈ {1.1,1.5}`, `γ ∈ {0.5,1,2}`.
pub fn relaxed_grid() -> Vec<(SequentialDesign, f64)> {
    let mut out = Vec::new();
    for n in [1, 2, 5, 10, 30] {
        for b in [0.5, 2.0, 5.0, 10.0] {
            for bias in [1.1, 1.5] {
                for gamma in [0.5, 1.0, 2.0] {
                    out.push((SequentialDesign::relaxed(n, b, bias).expect("grid design"), gamma));
                }
            }
        }
    }
    out
}

/// 24 designs with an active lower boundary: `N ∈ {3,5,8}`, two intercept
/// pairs, two lower-intercept depths, `(Λ̄, γ) ∈ {(1.5,1), (1.2,0.5)}`.
pub fn general_grid() -> Vec<(SequentialDesign, f64)> {
    let mut out = Vec::new();
    for n in [3u32, 5, 8] {
        for b in [1.0, 3.0] {
            for frac in [0.25, 0.6] {
                for (bias, gamma) in [(1.5, 1.0), (1.2, 0.5)] {
                    let a = -frac * n as f64 * bias;
                    out.push((SequentialDesign::new(n, a, b, bias).expect("grid design"), gamma));
                }
            }
        }
    }
    out
}

/// Fixed-size designs `(N, λ1, λ2, γ)`.
pub fn fixed_grid() -> Vec<(FixedSizeDesign, f64)> {
    let ln10 = std::f64::consts::LN_10;
    [
        (1, 0.0, 2.0 * ln10, 1.0),
        (2, 1.0, 4.0, 1.0),
        (5, 0.0, 15.0, 0.5),
        (10, 0.0, 25.0, 1.0),
        (10, 2.0, 25.0, 1.0),
        (10, 15.0, 30.0, 2.0),
    ]
    .into_iter()
    .map(|(n, l1, l2, g)| (FixedSizeDesign::new(n, l1, l2).expect("grid design"), g))
    .collect()
}

fn describe(d: &SequentialDesign, gamma: f64) -> String {
    format!(
        "N={} a_bar={} b_bar={} bias={} gamma={}",
        d.n_trunc(),
        fmt_num(d.a_bar()),
        fmt_num(d.b_bar()),
        fmt_num(d.bias()),
        fmt_num(gamma)
    )
}

/// Per-design seed so designs use unrelated streams.
fn design_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Analytic side of a sequential design.
struct SeqAnalytic {
    pf: f64,
    pd: f64,
    cont0: Vec<f64>,
    cont1: Vec<f64>,
}

impl SeqAnalytic {
    fn from_rows(h0: &HypothesisRows, h1: &HypothesisRows) -> Self {
        Self { pf: h0.decide_one(), pd: h1.decide_one(), cont0: h0.cont.clone(), cont1: h1.cont.clone() }
    }
}

/// `(E[N], sd(N))` from `Pr(R_n)`, using `E[N^2] = Σ (2n-1) Pr(N ≥ n)`.
fn stop_moments(cont: &[f64]) -> (f64, f64) {
    let mut m1 = 1.0;
    let mut m2 = 1.0;
    for (i, &r) in cont[..cont.len() - 1].iter().enumerate() {
        let n = i as f64 + 2.0;
        m1 += r;
        m2 += (2.0 * n - 1.0) * r;
    }
    (m1, (m2 - m1 * m1).max(0.0).sqrt())
}

fn rate_cmp(suite: Suite, design: &str, quantity: &'static str, analytic: f64, e: &McEstimate) -> Comparison {
    Comparison {
        suite,
        design: design.to_string(),
        quantity,
        analytic,
        estimate: e.mean,
        stderr: (analytic * (1.0 - analytic) / e.trials as f64).sqrt(),
        z: e.z_rate(analytic),
    }
}

fn seq_comparisons(
    suite: Suite,
    design: &str,
    a: &SeqAnalytic,
    e0: &SequentialEstimates,
    e1: &SequentialEstimates,
    pi0: f64,
) -> Vec<Comparison> {
    let mut out = vec![rate_cmp(suite, design, "pf", a.pf, &e0.decide_one), rate_cmp(suite, design, "pd", a.pd, &e1.decide_one)];
    for (q, cont, e) in [("asn_h0", &a.cont0, e0), ("asn_h1", &a.cont1, e1)] {
        let (m, sd) = stop_moments(cont);
        out.push(Comparison {
            suite,
            design: design.to_string(),
            quantity: q,
            analytic: m,
            estimate: e.stop_time.mean,
            stderr: sd / (e.stop_time.trials as f64).sqrt(),
            z: e.stop_time.z_known(m, sd),
        });
    }
    let d0 = a.cont0[a.cont0.len() - 1];
    let d1 = a.cont1[a.cont1.len() - 1];
    let pi1 = 1.0 - pi0;
    let rho = pi0 * d0 + pi1 * d1;
    let est = pi0 * e0.censored.mean + pi1 * e1.censored.mean;
    let n = e0.censored.trials as f64;
    let se = (pi0 * pi0 * d0 * (1.0 - d0) / n + pi1 * pi1 * d1 * (1.0 - d1) / n).sqrt();
    let diff = est - rho;
    out.push(Comparison {
        suite,
        design: design.to_string(),
        quantity: "rho",
        analytic: rho,
        estimate: est,
        stderr: se,
        z: if diff == 0.0 { 0.0 } else if se > 0.0 { diff / se } else { f64::INFINITY },
    });
    out
}

fn simulate(d: &SequentialDesign, gamma: f64, mc: &McConfig, index: usize) -> (SequentialEstimates, SequentialEstimates) {
    let cfg = McConfig { seed: design_seed(mc.seed, index), ..*mc };
    (run_sequential(d, Hypothesis::H0, gamma, &cfg), run_sequential(d, Hypothesis::H1, gamma, &cfg))
}

pub fn validate_relaxed(designs: &[(SequentialDesign, f64)], pi0: f64, mc: &McConfig) -> Result<Vec<Comparison>> {
    let mut out = Vec::new();
    for (i, (d, g)) in designs.iter().enumerate() {
        let cont = |h| -> Result<Vec<f64>> {
            (1..=d.n_trunc()).map(|n| Ok(relaxed::pr_continue(d, n, h, *g)?)).collect()
        };
        let a = SeqAnalytic {
            pf: relaxed::local_pf_seq(d)?,
            pd: relaxed::local_pd_seq(d, *g)?,
            cont0: cont(Hypothesis::H0)?,
            cont1: cont(Hypothesis::H1)?,
        };
        let (e0, e1) = simulate(d, *g, mc, i);
        out.extend(seq_comparisons(Suite::Relaxed, &describe(d, *g), &a, &e0, &e1, pi0));
    }
    Ok(out)
}

pub fn validate_general(designs: &[(SequentialDesign, f64)], pi0: f64, mc: &McConfig) -> Result<Vec<Comparison>> {
    let mut out = Vec::new();
    for (i, (d, g)) in designs.iter().enumerate() {
        let t = crossing_probs(d, *g)?;
        let a = SeqAnalytic::from_rows(&t.h0, &t.h1);
        let (e0, e1) = simulate(d, *g, mc, 1000 + i);
        out.extend(seq_comparisons(Suite::General, &describe(d, *g), &a, &e0, &e1, pi0));
    }
    Ok(out)
}

/// `A(n)`, `Pr(E_n)` and `Pr(R_n)` for `n ≤ 4` against nested quadrature.
pub fn quadrature_checks(designs: &[(SequentialDesign, f64)]) -> Result<Vec<QuadratureCheck>> {
    let mut out = Vec::new();
    for (d, g) in designs {
        let geo = Geometry::new(d)?;
        let q = Quadrature::new(d);
        let name = describe(d, *g);
        let mut push = |quantity: String, analytic: f64, quad: f64| {
            let scale = analytic.abs().max(quad.abs());
            let rel_err = if scale == 0.0 { 0.0 } else { (analytic - quad).abs() / scale };
            out.push(QuadratureCheck { design: name.clone(), quantity, analytic, quadrature: quad, rel_err });
        };
        for n in 1..=d.n_trunc().min(4) as usize {
            push(format!("A({n})"), geo.volumes()[n - 1], q.volume(n));
            for (h, label) in [(Hypothesis::H0, "H0"), (Hypothesis::H1, "H1")] {
                let theta = rate(h, *g);
                let j = geo.j_integral(n as u32, d.lower(n as u32), d.upper(n as u32), theta)?;
                push(format!("J({n},{label})"), j, q.j(n, theta));
                let rows = geo.rows(theta)?;
                push(format!("Pr(E_{n}|{label})"), rows.upper[n - 1], q.pr_upper(n, theta));
                push(format!("Pr(R_{n}|{label})"), rows.cont[n - 1], q.pr_continue(n, theta));
            }
        }
    }
    Ok(out)
}

pub fn validate_fixed(designs: &[(FixedSizeDesign, f64)], mc: &McConfig) -> Vec<Comparison> {
    let mut out = Vec::new();
    for (i, (d, g)) in designs.iter().enumerate() {
        let cfg = McConfig { seed: design_seed(mc.seed, 2000 + i), ..*mc };
        let e0 = run_fixed(d, Hypothesis::H0, *g, &cfg);
        let e1 = run_fixed(d, Hypothesis::H1, *g, &cfg);
        let (d0, d1) = censor_deltas(d, *g);
        let name = format!(
            "N={} lambda1={} lambda2={} gamma={}",
            d.n_samples(),
            fmt_num(d.lambda1()),
            fmt_num(d.lambda2()),
            fmt_num(*g)
        );
        out.push(rate_cmp(Suite::Fixed, &name, "pf", local_pf(d), &e0.send_one));
        out.push(rate_cmp(Suite::Fixed, &name, "pd", local_pd(d, *g), &e1.send_one));
        out.push(rate_cmp(Suite::Fixed, &name, "delta0", d0, &e0.censored));
        out.push(rate_cmp(Suite::Fixed, &name, "delta1", d1, &e1.censored));
    }
    out
}

/// Runs the selected suites on their documented grids.
pub fn validate_against_oracle(suites: &[Suite], pi0: f64, mc: &McConfig) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    for s in suites {
        match s {
            Suite::Relaxed => report.comparisons.extend(validate_relaxed(&relaxed_grid(), pi0, mc)?),
            Suite::General => {
                let grid = general_grid();
                report.comparisons.extend(validate_general(&grid, pi0, mc)?);
                report.quadrature.extend(quadrature_checks(&grid)?);
            }
            Suite::Fixed => report.comparisons.extend(validate_fixed(&fixed_grid(), mc)),
        }
    }
    Ok(report)
}
