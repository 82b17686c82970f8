//! Thin libm shim plus compensated summation.

pub(crate) use libm::{exp, expm1, log, log1p, pow, sqrt};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `ln(n!)`, exact up to rounding for the sizes used here.
pub(crate) fn ln_factorial(n: u32) -> f64 {
    if n <= 170 {
        let mut acc = 1.0f64;
        for k in 2..=n {
            acc *= k as f64;
        }
        log(acc)
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// `1 / m!` as f64 (0 once it underflows).
pub(crate) fn inv_factorial(m: u32) -> f64 {
    let mut acc = 1.0f64;
    for k in 2..=m {
        acc /= k as f64;
    }
    acc
}

/// Integer power with a non-negative exponent; `0^0 = 1`.
pub(crate) fn powu(x: f64, e: u32) -> f64 {
    libm::pow(x, e as f64)
}

/// `1 - prod_j (1 - p_j)` evaluated through logs to keep small products accurate.
pub(crate) fn or_fusion<I: IntoIterator<Item = f64>>(ps: I) -> f64 {
    let mut s = CompensatedSum::new();
    for p in ps {
        if p >= 1.0 {
            return 1.0;
        }
        s.add(log1p(-p));
    }
    -expm1(s.value())
}
