//! Small deterministic 1-D search routines shared by calibration and
//! design-space optimization.
//!
//! Every routine is derivative-free, runs a fixed iteration budget, and
//! probes reproducible points, so results are bit-identical across runs.

/// (sqrt(5) - 1) / 2, the golden-section interior ratio.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimizes `f` on `[lo, hi]` by golden-section search.
///
/// Returns the best probed point and its value; the endpoints are probed
/// too, so a minimum at the boundary is never missed. Ties keep the earlier
/// probe. Assumes `f` is unimodal on the interval; on a plateau the bracket
/// still contracts and the best probe seen is returned.
pub(crate) fn golden_min(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, iters: u32) -> (f64, f64) {
    debug_assert!(lo.is_finite() && hi.is_finite() && lo <= hi);
    let mut best = (lo, f(lo));
    let fhi = f(hi);
    if fhi < best.1 {
        best = (hi, fhi);
    }
    if hi <= lo {
        return best;
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    if f1 < best.1 {
        best = (x1, f1);
    }
    if f2 < best.1 {
        best = (x2, f2);
    }
    for _ in 0..iters {
        let cand;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            cand = (x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            cand = (x2, f2);
        }
        if cand.1 < best.1 {
            best = cand;
        }
        if b - a <= 1e-15 * (a.abs() + b.abs() + 1.0) {
            break;
        }
    }
    best
}

/// Maximizes `f` on `[lo, hi]`; see [`golden_min`].
pub(crate) fn golden_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, iters: u32) -> (f64, f64) {
    let (x, neg) = golden_min(|v| -f(v), lo, hi, iters);
    (x, -neg)
}

/// Refines a bracketed minimum by successive parabolic interpolation.
///
/// `a < b < c` with `f(b)` at or below both ends. Steps that leave the
/// bracket, coincide with the center, or come from a degenerate parabola
/// fall back to bisecting the larger half. Returns the best probed point.
pub(crate) fn parabolic_min(
    mut f: impl FnMut(f64) -> f64,
    mut a: f64,
    mut b: f64,
    mut c: f64,
    iters: u32,
) -> (f64, f64) {
    debug_assert!(a <= b && b <= c);
    let mut fb = f(b);
    let (fa, fc) = (f(a), f(c));
    let mut best = (b, fb);
    if fa < best.1 {
        best = (a, fa);
    }
    if fc < best.1 {
        best = (c, fc);
    }
    let mut fa = fa;
    let mut fc = fc;
    for _ in 0..iters {
        if c - a <= 1e-15 * (a.abs() + c.abs() + 1.0) {
            break;
        }
        let denom = (b - a) * (fb - fc) - (b - c) * (fb - fa);
        let mut x = if denom.abs() > f64::MIN_POSITIVE {
            b - 0.5 * ((b - a).powi(2) * (fb - fc) - (b - c).powi(2) * (fb - fa)) / denom
        } else {
            f64::NAN
        };
        if !(x > a && x < c) || x == b {
            // Bisect the larger half to guarantee progress.
            x = if b - a > c - b {
                0.5 * (a + b)
            } else {
                0.5 * (b + c)
            };
            if x == b {
                break;
            }
        }
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
        if x < b {
            if fx <= fb {
                c = b;
                fc = fb;
                b = x;
                fb = fx;
            } else {
                a = x;
                fa = fx;
            }
        } else if fx <= fb {
            a = b;
            fa = fb;
            b = x;
            fb = fx;
        } else {
            c = x;
            fc = fx;
        }
    }
    best
}

/// Shrinks toward a feasibility boundary by bisection.
///
/// `pred(good)` must hold and `pred(bad)` must not; the predicate is assumed
/// monotone between them. Returns the last point confirmed feasible, which
/// converges to the boundary from the feasible side.
pub(crate) fn bisect_feasible(
    mut pred: impl FnMut(f64) -> bool,
    good: f64,
    bad: f64,
    iters: u32,
) -> f64 {
    let mut g = good;
    let mut b = bad;
    for _ in 0..iters {
        let m = 0.5 * (g + b);
        if m == g || m == b {
            break;
        }
        if pred(m) {
            g = m;
        } else {
            b = m;
        }
    }
    g
}
