//! Scalar root bracketing helpers.

/// Newton iteration kept inside a sign-change bracket, falling back to bisection
/// whenever the Newton update leaves the bracket or stalls.
///
/// `f` returns the value and derivative. Requires `f(lo)` and `f(hi)` of opposite
/// sign (or one of them zero).
pub(crate) fn safeguarded_newton<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> f64
where
    F: Fn(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    // orient so that f(lo) < 0 < f(hi)
    if flo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        let next = if dfx.is_finite() && dfx != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= xtol || (b - a) <= xtol {
            return next;
        }
        x = next;
    }
    x
}

/// Bisection on a predicate that is `true` at `good` and `false` at `bad`.
/// Returns the bracket `(good, bad)` narrowed to width `tol`.
pub(crate) fn bisect_predicate<P>(pred: P, mut good: f64, mut bad: f64, tol: f64) -> (f64, f64)
where
    P: Fn(f64) -> bool,
{
    for _ in 0..200 {
        if (bad - good).abs() <= tol {
            break;
        }
        let mid = 0.5 * (good + bad);
        if pred(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    (good, bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_finds_cube_root() {
        let r = safeguarded_newton(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, 1e-15);
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
        // decreasing function, reversed bracket orientation
        let r = safeguarded_newton(|x| (1.0 - x, -1.0), 3.0, -1.0, 1e-15);
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn newton_survives_flat_derivative() {
        // derivative vanishes at the initial midpoint
        let r = safeguarded_newton(|x| (x * x * x, 3.0 * x * x), -1.0, 1.0, 1e-12);
        assert!(r.abs() < 1e-4);
    }

    #[test]
    fn predicate_bisection() {
        let (g, b) = bisect_predicate(|x| x < 0.3, 0.0, 1.0, 1e-12);
        assert!(g < 0.3 && b >= 0.3 && b - g <= 1e-12);
    }
}
