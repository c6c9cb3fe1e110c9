//! Small 1-D numerics shared by the optimizers: bracketed root-finding on
//! monotone functions and log-grid + golden-section maximization.

/// inverse golden ratio
const INVPHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximization of `f` on `[a, b]`. Converges to the peak if
/// `f` is unimodal on the interval; callers bracket the peak first with a grid
/// scan. Returns `(x, f(x))`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: u32) -> (f64, f64) {
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Maximize `f` over `[lo, hi]` (positive bounds) by scanning a log-spaced
/// grid and refining around the best sample with golden section. `f` may
/// return `f64::NEG_INFINITY` to mark a point invalid. Returns `None` when the
/// whole grid is invalid.
pub fn maximize_log_1d(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    grid: usize,
    golden_iters: u32,
) -> Option<(f64, f64)> {
    debug_assert!(lo > 0.0 && hi > lo);
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let step = (ln_hi - ln_lo) / (grid - 1) as f64;
    let x_at = |i: usize| (ln_lo + step * i as f64).exp();
    let mut best: Option<(usize, f64, f64)> = None;
    for i in 0..grid {
        let x = x_at(i);
        let fx = f(x);
        if fx.is_finite() && best.map_or(true, |(_, _, fb)| fx > fb) {
            best = Some((i, x, fx));
        }
    }
    let (i, mut x, mut fx) = best?;
    let a = x_at(i.saturating_sub(1));
    let b = x_at((i + 1).min(grid - 1));
    if b > a {
        // Refine in log space so the relative resolution is uniform.
        let (lx, lfx) = golden_max(|t| f(t.exp()), a.ln(), b.ln(), golden_iters);
        if lfx.is_finite() && lfx >= fx {
            x = lx.exp();
            fx = lfx;
        }
    }
    Some((x, fx))
}

/// Find the root of an increasing function: doubles `hi` from `hi0` until
/// `f(hi) >= 0`, then bisects against `lo` (where `f(lo) < 0` is assumed).
/// Returns `None` if no sign change is found before `hi_cap`.
pub fn root_of_increasing(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi0: f64,
    hi_cap: f64,
    iters: u32,
) -> Option<f64> {
    let mut hi = hi0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > hi_cap {
            return None;
        }
    }
    Some(bisect(f, lo, hi, iters))
}

/// Plain bisection for a root of `f` with `f(lo) <= 0 <= f(hi)`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: u32) -> f64 {
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        // Comparison-based maximization cannot localize a quadratic peak
        // better than ~sqrt(machine eps); 1e-6 is well inside what 80
        // iterations deliver.
        let (x, fx) = golden_max(|x| -(x - 3.0) * (x - 3.0) + 5.0, 0.0, 10.0, 80);
        assert!((x - 3.0).abs() < 1e-6);
        assert!((fx - 5.0).abs() < 1e-12);
    }

    #[test]
    fn log_maximizer_handles_invalid_regions() {
        // Valid only above 1.0; peak at x = 20.
        let f = |x: f64| {
            if x < 1.0 {
                f64::NEG_INFINITY
            } else {
                -(x.ln() - 20f64.ln()).powi(2)
            }
        };
        let (x, _) = maximize_log_1d(f, 1e-3, 1e3, 129, 60).unwrap();
        assert!((x - 20.0).abs() / 20.0 < 1e-6);
        assert!(maximize_log_1d(|_| f64::NEG_INFINITY, 1e-3, 1e3, 33, 8).is_none());
    }

    #[test]
    fn root_finding_brackets_and_converges() {
        let f = |x: f64| x * x - 9.0;
        let root = root_of_increasing(f, 0.0, 1e-3, 1e12, 128).unwrap();
        assert!((root - 3.0).abs() < 1e-10);
        assert!(root_of_increasing(|x| -1.0 - x, 0.0, 1e-3, 1e6, 16).is_none());
    }
}
