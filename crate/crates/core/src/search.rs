//! Scalar root bracketing and minimization helpers used by the optimizers.

/// Bisection for a decreasing function `f` on `[lo, hi]` with `f(lo) ≥ target ≥ f(hi)`.
///
/// Returns the final bracket `(x_ge, x_lt)` where `f(x_ge) ≥ target` and
/// `f(x_lt) < target` (up to the bracket collapsing to adjacent floats).
pub(crate) fn bisect_decreasing<F>(mut f: F, target: f64, mut lo: f64, mut hi: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Golden-section minimization of `f` on `[lo, hi]`; returns `(x, f(x))`.
pub(crate) fn golden_min<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
