//! Seeded Monte Carlo simulation of single radios and the OR-fused network.
//!
//! Trials are split into fixed-size blocks. Every block, sensor and
//! hypothesis gets its own ChaCha8 stream, and blocks only report integer
//! tallies, so results are bit-identical for any number of worker threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use seqsense_core::censoring::FixedSizeDesign;
use seqsense_core::{Hypothesis, SensorProfile, SequentialDesign};

const BLOCK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Mirror the uniforms of every even trial in the following odd trial.
    pub antithetic: bool,
    /// Use the same uniforms under both hypotheses.
    pub paired: bool,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self { trials: trials.max(1), seed, antithetic: false, paired: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard error of `mean`.
    pub stderr: f64,
    pub trials: u64,
}

impl McEstimate {
    /// `(mean - target) / se`, where `se` is the binomial standard error at
    /// `target` for rates, falling back to the sample error otherwise.
    pub fn z_rate(&self, target: f64) -> f64 {
        let se = (target * (1.0 - target) / self.trials as f64).sqrt();
        z(self.mean - target, se)
    }

    /// `(mean - target) / stderr` with the error floored at `1/trials`.
    pub fn z_sample(&self, target: f64) -> f64 {
        z(self.mean - target, self.stderr.max(1.0 / self.trials as f64))
    }

    /// `(mean - target) / sd` using a known standard deviation of one trial.
    pub fn z_known(&self, target: f64, sd: f64) -> f64 {
        z(self.mean - target, sd / (self.trials as f64).sqrt())
    }
}

fn z(diff: f64, se: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else if se > 0.0 {
        diff / se
    } else {
        f64::INFINITY.copysign(diff)
    }
}

/// Uniform on the open interval `(0, 1)` with 52-bit resolution; `1 - u` lies
/// on the same grid.
fn open_uniform<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

fn scale(hypothesis: Hypothesis, gamma: f64) -> f64 {
    match hypothesis {
        Hypothesis::H0 => 2.0,
        Hypothesis::H1 => 2.0 * (1.0 + gamma),
    }
}

/// One normalized sample energy: exponential with mean 2 under H0 and
/// `2(1+γ)` under H1, by inverse-CDF transform.
pub fn sample_increment<R: RngCore>(hypothesis: Hypothesis, gamma: f64, rng: &mut R) -> f64 {
    -scale(hypothesis, gamma) * open_uniform(rng).ln()
}

/// Uniform source with optional antithetic replay.
struct Uniforms {
    rng: ChaCha8Rng,
    antithetic: bool,
    mirror: bool,
    buf: Vec<f64>,
    pos: usize,
}

impl Uniforms {
    fn new(seed: u64, stream: u64, antithetic: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, antithetic, mirror: true, buf: Vec::new(), pos: 0 }
    }

    fn start_trial(&mut self) {
        if self.antithetic {
            self.mirror = !self.mirror;
            if self.mirror {
                self.pos = 0;
            } else {
                self.buf.clear();
            }
        }
    }

    fn next(&mut self) -> f64 {
        if self.antithetic && self.mirror {
            if self.pos < self.buf.len() {
                self.pos += 1;
                return 1.0 - self.buf[self.pos - 1];
            }
            return open_uniform(&mut self.rng);
        }
        let u = open_uniform(&mut self.rng);
        if self.antithetic {
            self.buf.push(u);
        }
        u
    }
}

fn stream_id(block: u64, sensor: u64, hypothesis: Hypothesis, paired: bool) -> u64 {
    let h = match (hypothesis, paired) {
        (_, true) | (Hypothesis::H0, false) => 0,
        (Hypothesis::H1, false) => 1,
    };
    (block << 24) | (sensor << 1) | h
}

/// Integer tallies of one statistic over "units": single trials, or
/// antithetic pairs whose values are summed.
#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    sum: u64,
    sum_sq: u128,
}

impl Tally {
    fn push(&mut self, unit_sum: u64) {
        self.sum += unit_sum;
        self.sum_sq += (unit_sum as u128) * (unit_sum as u128);
    }

    fn merge(&mut self, o: &Tally) {
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    fn estimate(&self, units: u64, unit_size: u64) -> McEstimate {
        let trials = units * unit_size;
        let mean = self.sum as f64 / trials as f64;
        let u = units as f64;
        let m = self.sum as f64 / u;
        let var_unit = if units > 1 {
            ((self.sum_sq as f64 - u * m * m) / (u - 1.0)).max(0.0)
        } else {
            0.0
        };
        let stderr = (var_unit / u).sqrt() / unit_size as f64;
        McEstimate { mean, stderr, trials }
    }
}

fn unit_size(mc: &McConfig) -> u64 {
    if mc.antithetic {
        2
    } else {
        1
    }
}

/// Splits `trials` into blocks and runs `f(block_index, trials_in_block)`
/// in parallel, returning results in block order.
fn blocks<T: Send, F>(trials: u64, f: F) -> Vec<T>
where
    F: Fn(u64, u64) -> T + Sync,
{
    let n_blocks = trials.div_ceil(BLOCK);
    (0..n_blocks)
        .into_par_iter()
        .map(|k| f(k, BLOCK.min(trials - k * BLOCK)))
        .collect()
}

/// Outcome of one radio in one sensing period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Decision {
    One,
    Zero,
    Censored,
}

fn sequential_trial(design: &SequentialDesign, lower: &[f64], upper: &[f64], s: f64, u: &mut Uniforms) -> (Decision, u64) {
    let mut zeta = 0.0;
    for n in 0..design.n_trunc() as usize {
        zeta += -s * u.next().ln();
        if zeta >= upper[n] {
            return (Decision::One, n as u64 + 1);
        }
        if zeta <= lower[n] {
            return (Decision::Zero, n as u64 + 1);
        }
    }
    (Decision::Censored, design.n_trunc() as u64)
}

fn fixed_trial(design: &FixedSizeDesign, s: f64, u: &mut Uniforms) -> Decision {
    let mut e = 0.0;
    for _ in 0..design.n_samples() {
        e += -s * u.next().ln();
    }
    if e >= design.lambda2() {
        Decision::One
    } else if e <= design.lambda1() {
        Decision::Zero
    } else {
        Decision::Censored
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequentialEstimates {
    pub decide_one: McEstimate,
    pub decide_zero: McEstimate,
    pub censored: McEstimate,
    pub stop_time: McEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedEstimates {
    pub send_one: McEstimate,
    pub send_zero: McEstimate,
    pub censored: McEstimate,
}

#[derive(Default, Clone, Copy)]
struct DecisionTally {
    units: u64,
    one: Tally,
    zero: Tally,
    cens: Tally,
    time: Tally,
}

impl DecisionTally {
    fn merge(&mut self, o: &Self) {
        self.units += o.units;
        self.one.merge(&o.one);
        self.zero.merge(&o.zero);
        self.cens.merge(&o.cens);
        self.time.merge(&o.time);
    }
}

fn tally_trials<F>(count: u64, mc: &McConfig, mut trial: F) -> DecisionTally
where
    F: FnMut() -> (Decision, u64),
{
    let size = unit_size(mc);
    let mut t = DecisionTally::default();
    let mut done = 0;
    while done + size <= count {
        let (mut one, mut zero, mut cens, mut time) = (0, 0, 0, 0);
        for _ in 0..size {
            let (d, n) = trial();
            match d {
                Decision::One => one += 1,
                Decision::Zero => zero += 1,
                Decision::Censored => cens += 1,
            }
            time += n;
        }
        t.units += 1;
        t.one.push(one);
        t.zero.push(zero);
        t.cens.push(cens);
        t.time.push(time);
        done += size;
    }
    t
}

fn merge_all(parts: Vec<DecisionTally>) -> DecisionTally {
    let mut t = DecisionTally::default();
    parts.iter().for_each(|p| t.merge(p));
    t
}

/// Simulates the sequential test: decide 1 when `ζ_n ≥ b_n`, else decide 0
/// when `ζ_n ≤ a_n`, else continue; silent after `N` samples.
pub fn run_sequential(design: &SequentialDesign, hypothesis: Hypothesis, gamma: f64, mc: &McConfig) -> SequentialEstimates {
    let (lower, upper) = design.boundaries();
    let s = scale(hypothesis, gamma);
    let parts = blocks(mc.trials, |k, count| {
        let mut u = Uniforms::new(mc.seed, stream_id(k, 0, hypothesis, mc.paired), mc.antithetic);
        tally_trials(count, mc, || {
            u.start_trial();
            sequential_trial(design, &lower, &upper, s, &mut u)
        })
    });
    let t = merge_all(parts);
    let size = unit_size(mc);
    SequentialEstimates {
        decide_one: t.one.estimate(t.units, size),
        decide_zero: t.zero.estimate(t.units, size),
        censored: t.cens.estimate(t.units, size),
        stop_time: t.time.estimate(t.units, size),
    }
}

/// Simulates the fixed-size rule: send 1 when the energy is at least `λ2`,
/// else send 0 when it is at most `λ1`, else stay silent.
pub fn run_fixed(design: &FixedSizeDesign, hypothesis: Hypothesis, gamma: f64, mc: &McConfig) -> FixedEstimates {
    let s = scale(hypothesis, gamma);
    let parts = blocks(mc.trials, |k, count| {
        let mut u = Uniforms::new(mc.seed, stream_id(k, 0, hypothesis, mc.paired), mc.antithetic);
        tally_trials(count, mc, || {
            u.start_trial();
            (fixed_trial(design, s, &mut u), design.n_samples() as u64)
        })
    });
    let t = merge_all(parts);
    let size = unit_size(mc);
    FixedEstimates {
        send_one: t.one.estimate(t.units, size),
        send_zero: t.zero.estimate(t.units, size),
        censored: t.cens.estimate(t.units, size),
    }
}

/// Local rule used by every radio of a simulated network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NetworkScheme {
    Fixed(FixedSizeDesign),
    Sequential(SequentialDesign),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkEstimates {
    pub qf: McEstimate,
    pub qd: McEstimate,
}

fn fc_rate(scheme: &NetworkScheme, profiles: &[SensorProfile], hypothesis: Hypothesis, mc: &McConfig) -> McEstimate {
    let bounds = match scheme {
        NetworkScheme::Sequential(d) => Some(d.boundaries()),
        NetworkScheme::Fixed(_) => None,
    };
    let parts = blocks(mc.trials, |k, count| {
        let mut streams: Vec<Uniforms> = (0..profiles.len() as u64)
            .map(|j| Uniforms::new(mc.seed, stream_id(k, j + 1, hypothesis, mc.paired), mc.antithetic))
            .collect();
        tally_trials(count, mc, || {
            let mut any = false;
            for (p, u) in profiles.iter().zip(streams.iter_mut()) {
                u.start_trial();
                let s = scale(hypothesis, p.gamma());
                let d = match (scheme, &bounds) {
                    (NetworkScheme::Sequential(d), Some((lo, hi))) => sequential_trial(d, lo, hi, s, u).0,
                    (NetworkScheme::Fixed(d), _) => fixed_trial(d, s, u),
                    _ => unreachable!(),
                };
                any |= d == Decision::One;
            }
            (if any { Decision::One } else { Decision::Censored }, 0)
        })
    });
    let t = merge_all(parts);
    t.one.estimate(t.units, unit_size(mc))
}

/// OR-fused global false-alarm and detection rates: the fusion center
/// declares H1 iff at least one radio sends 1.
pub fn run_network(scheme: &NetworkScheme, profiles: &[SensorProfile], mc: &McConfig) -> NetworkEstimates {
    NetworkEstimates {
        qf: fc_rate(scheme, profiles, Hypothesis::H0, mc),
        qd: fc_rate(scheme, profiles, Hypothesis::H1, mc),
    }
}
