//! Bracketing root finder for the scalar transcendental equations of the disk.

use crate::error::{Error, Result};

const BISECTION_RTOL: f64 = 1e-13;
const MAX_EXPANSIONS: usize = 2100;

/// Root of `f` on `(0, ∞)` where `f < 0` near `0⁺` and `f > 0` for large `x`.
///
/// The bracket is grown geometrically from `x0`, shrunk by bisection to a
/// relative width of `1e-13`, then polished by two Newton steps that are only
/// accepted if they stay in the bracket and reduce `|f|`. Monotonicity of `f`
/// is not assumed.
pub(crate) fn positive_crossing(
    equation: &'static str,
    x0: f64,
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
) -> Result<f64> {
    let no_root = || Error::NoRoot { equation };
    let mut lo = x0;
    let mut hi = x0;
    let mut f_lo = f(lo);
    let mut f_hi = f_lo;
    let mut expansions = 0;
    while f_lo >= 0.0 {
        hi = lo;
        f_hi = f_lo;
        lo *= 0.5;
        f_lo = f(lo);
        expansions += 1;
        if expansions > MAX_EXPANSIONS || lo == 0.0 || f_lo.is_nan() {
            return Err(no_root());
        }
    }
    while f_hi <= 0.0 {
        lo = hi;
        hi *= 2.0;
        f_hi = f(hi);
        expansions += 1;
        if expansions > MAX_EXPANSIONS || !hi.is_finite() || f_hi.is_nan() {
            return Err(no_root());
        }
    }

    while hi - lo > BISECTION_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut x = 0.5 * (lo + hi);
    let mut fx = f(x);
    for _ in 0..2 {
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let cand = x - fx / d;
        if !(cand > lo && cand < hi) {
            break;
        }
        let fc = f(cand);
        if fc.abs() < fx.abs() {
            x = cand;
            fx = fc;
        } else {
            break;
        }
    }
    Ok(x)
}
