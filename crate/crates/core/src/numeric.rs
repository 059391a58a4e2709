//! Floating-point comparison policy and exactly rounded summation.
//!
//! Every inequality the library asserts holds exactly in real arithmetic; the
//! slack here only absorbs rounding.

/// Relative tolerance for all comparisons.
pub const RELTOL: f64 = 1e-9;
/// Absolute floor under the relative tolerance.
pub const ABSTOL: f64 = 1e-12;

/// Slack allowed when comparing two quantities of the given magnitudes.
pub fn slack(lhs: f64, rhs: f64) -> f64 {
    ABSTOL.max(RELTOL * lhs.abs().max(rhs.abs()))
}

/// `lhs <= rhs` up to the comparison slack.
pub fn le_tol(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + slack(lhs, rhs)
}

/// `lhs == rhs` up to the comparison slack.
pub fn eq_tol(lhs: f64, rhs: f64) -> bool {
    (lhs - rhs).abs() <= slack(lhs, rhs)
}

/// Slack of `1e-12 * scale`, floored at [`ABSTOL`]; used for sums whose
/// rounding grows with their magnitude rather than their difference.
pub fn scaled_slack(scale: f64) -> f64 {
    ABSTOL.max(1e-12 * scale.abs())
}

/// Correctly rounded sum of `values` (Shewchuk's non-overlapping partials).
///
/// The result equals the real sum rounded once, so `n` copies of `x` sum to
/// exactly `n as f64 * x`.
pub fn exact_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }

    // Sum the partials from the top, with round-half-even correction.
    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        let yr = x - hi;
        if y == yr {
            hi = x;
        }
    }
    hi
}
