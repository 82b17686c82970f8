//! Direct nested Gauss–Legendre integration over the sensing region.
//!
//! Only meant for a handful of steps: the cost grows like `(panels·order)^n`.
//! Each level is split at the lower boundaries of the later steps, where
//! the inner integrand has kinks, and the innermost level is done exactly.

use seqsense_core::SequentialDesign;

const ORDER: usize = 24;

/// Nodes and weights of the Gauss–Legendre rule on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

pub struct Quadrature {
    lower: Vec<f64>,
    upper: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn new(design: &SequentialDesign) -> Self {
        let (lower, upper) = design.boundaries();
        let (nodes, weights) = gauss_legendre(ORDER);
        Self { lower, upper, nodes, weights }
    }

    /// `∫ over a_i < ζ_i < b_i (i < last), ζ ordered, of g(ζ_{last})`, with
    /// the last level integrated by `inner(lo, hi)`.
    fn nest(&self, level: usize, prev: f64, last: usize, inner: &dyn Fn(f64, f64) -> f64) -> f64 {
        let lo = prev.max(self.lower[level]);
        let hi = self.upper[level];
        if lo >= hi {
            return 0.0;
        }
        if level == last {
            return inner(lo, hi);
        }
        let mut cuts = vec![lo];
        for &a in &self.lower[level + 1..=last] {
            if a > lo && a < hi {
                cuts.push(a);
            }
        }
        cuts.push(hi);
        cuts.dedup();
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (c, d) = (w[0], w[1]);
            let (mid, half) = (0.5 * (c + d), 0.5 * (d - c));
            for (x, wt) in self.nodes.iter().zip(&self.weights) {
                total += wt * half * self.nest(level + 1, mid + half * x, last, inner);
            }
        }
        total
    }

    /// `A(n)`: volume of the first `n-1` coordinates of the sensing region.
    pub fn volume(&self, n: usize) -> f64 {
        if n == 1 {
            return 1.0;
        }
        self.nest(0, 0.0, n - 2, &|lo, hi| hi - lo)
    }

    /// `J^{(n)}(θ) = ∫ e^{-θ ζ_n}` over the sensing region of the first `n` steps.
    pub fn j(&self, n: usize, theta: f64) -> f64 {
        self.nest(0, 0.0, n - 1, &|lo, hi| ((-theta * lo).exp() - (-theta * hi).exp()) / theta)
    }

    /// `Pr(R_n)` at exponential rate `theta`.
    pub fn pr_continue(&self, n: usize, theta: f64) -> f64 {
        theta.powi(n as i32) * self.j(n, theta)
    }

    /// `Pr(E_n)`: first exit through the upper boundary at step `n`.
    pub fn pr_upper(&self, n: usize, theta: f64) -> f64 {
        theta.powi(n as i32 - 1) * (-theta * self.upper[n - 1]).exp() * self.volume(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(ORDER);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn simplex_volume() {
        let d = SequentialDesign::relaxed(4, 2.0, 1.5).unwrap();
        let q = Quadrature::new(&d);
        assert!((q.volume(4) - 3.5 * 64.0 / 6.0).abs() < 1e-10);
        assert!((q.j(1, 0.5) - (1.0 - (-1.75f64).exp()) / 0.5).abs() < 1e-14);
    }
}
