//! One-dimensional minimization: coarse grid scan followed by golden-section refinement.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping once the bracket is
/// narrower than `tol`. Returns the bracket midpoint.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
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
        // floating point can stall the bracket once it reaches ulp scale
        if x1 >= x2 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Scans `steps` evenly spaced points on `[lo, hi]`, then refines around the best one with
/// golden-section search to bracket width `tol`.
pub fn grid_then_golden(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize, tol: f64) -> f64 {
    assert!(steps >= 3 && hi > lo);
    let h = (hi - lo) / (steps - 1) as f64;
    let best = (0..steps)
        .map(|k| (k, f(lo + h * k as f64)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let a = lo + h * best.saturating_sub(1) as f64;
    let b = lo + h * (best + 1).min(steps - 1) as f64;
    golden_section(f, a, b, tol)
}
