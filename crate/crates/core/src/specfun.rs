//! Modified Bessel functions of the second kind of integer order.
//!
//! `K₀` and `K₁` are evaluated together: by their power series (with the
//! logarithmic term) for `x ≤ 2`, and by Steed's continued fraction for the
//! scaled pair `eˣK₀, eˣK₁` above that. Higher orders follow from the
//! forward recurrence `K_{n+1} = K_{n-1} + (2n/x) K_n`, which is stable for `K`.
//!
//! Unscaled values below the smallest normal `f64` are returned as zero;
//! callers that care about the tail should use the `*_scaled` variants.

use crate::error::{require_positive, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 2.0;

/// One evaluation of `K_n(x)` in both unscaled and scaled (`eˣK_n(x)`) form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub x: f64,
    pub value: f64,
    pub scaled_value: f64,
}

impl BesselEval {
    pub fn new(n: usize, x: f64) -> Result<Self> {
        let scaled_value = kn_scaled(n, x)?;
        Ok(Self {
            x,
            value: unscale(scaled_value, x),
            scaled_value,
        })
    }
}

fn unscale(scaled: f64, x: f64) -> f64 {
    let v = scaled * (-x).exp();
    if v < f64::MIN_POSITIVE {
        0.0
    } else {
        v
    }
}

/// Unscaled `(K₀(x), K₁(x))` by the ascending series. Valid for `0 < x ≤ 2`.
fn k01_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_half = (0.5 * x).ln();

    // term_k = y^k / (k!)^2, term1_k = y^k / (k! (k+1)!)
    let mut term = 1.0;
    let mut term1 = 1.0;
    let mut harmonic = 0.0; // H_k
    let mut i0 = 1.0;
    let mut i1_series = 1.0;
    let mut k0_tail = 0.0;
    // psi(k+1) + psi(k+2) = -2γ + 2H_k + 1/(k+1)
    let mut k1_tail = -2.0 * EULER_GAMMA + 1.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * kf);
        term1 *= y / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        i0 += term;
        i1_series += term1;
        k0_tail += term * harmonic;
        k1_tail += term1 * (-2.0 * EULER_GAMMA + 2.0 * harmonic + 1.0 / (kf + 1.0));
        if term < 1e-18 * i0 && term1 < 1e-18 * i1_series {
            break;
        }
    }
    let i1 = 0.5 * x * i1_series;
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0_tail;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1_tail;
    (k0, k1)
}

/// Scaled `(eˣK₀(x), eˣK₁(x))` by Steed's continued fraction. Valid for `x ≥ 2`.
fn k01_scaled_cf(x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-17;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// Scaled pair without argument checks; `x` must be positive.
pub(crate) fn k01_scaled_unchecked(x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT {
        let (k0, k1) = k01_series(x);
        let e = x.exp();
        (k0 * e, k1 * e)
    } else {
        k01_scaled_cf(x)
    }
}

/// Ratio `K₀(x)/K₁(x)` without argument checks.
pub(crate) fn k_ratio_unchecked(x: f64) -> f64 {
    let (k0, k1) = k01_scaled_unchecked(x);
    k0 / k1
}

/// Ratio `K_{n-1}(x)/K_n(x)` for `n ≥ 1` by the ratio form of the recurrence,
/// which avoids the overflow of `K_n` itself at small `x` and large `n`.
pub(crate) fn k_prev_ratio_unchecked(n: usize, x: f64) -> f64 {
    debug_assert!(n >= 1);
    let mut q = k_ratio_unchecked(x);
    for m in 1..n {
        q = 1.0 / (q + 2.0 * m as f64 / x);
    }
    q
}

pub fn k0_scaled(x: f64) -> Result<f64> {
    require_positive("x", x)?;
    Ok(k01_scaled_unchecked(x).0)
}

pub fn k1_scaled(x: f64) -> Result<f64> {
    require_positive("x", x)?;
    Ok(k01_scaled_unchecked(x).1)
}

/// `K₀(x)`.
pub fn k0(x: f64) -> Result<f64> {
    Ok(unscale(k0_scaled(x)?, x))
}

/// `K₁(x)`.
pub fn k1(x: f64) -> Result<f64> {
    Ok(unscale(k1_scaled(x)?, x))
}

/// `K₀'(x) = -K₁(x)`.
pub fn k0_prime(x: f64) -> Result<f64> {
    Ok(-k1(x)?)
}

/// `K₁'(x) = -K₀(x) - K₁(x)/x`.
pub fn k1_prime(x: f64) -> Result<f64> {
    require_positive("x", x)?;
    let (s0, s1) = k01_scaled_unchecked(x);
    Ok(-(unscale(s0, x) + unscale(s1, x) / x))
}

/// `eˣK_n(x)` by forward recurrence from the scaled `K₀, K₁`.
pub fn kn_scaled(n: usize, x: f64) -> Result<f64> {
    require_positive("x", x)?;
    let (mut prev, mut cur) = k01_scaled_unchecked(x);
    if n == 0 {
        return Ok(prev);
    }
    for m in 1..n {
        let next = prev + 2.0 * m as f64 / x * cur;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `K_n(x)`.
pub fn kn(n: usize, x: f64) -> Result<f64> {
    Ok(unscale(kn_scaled(n, x)?, x))
}

/// `K₀(x)/K₁(x)`, computed from the scaled values so it stays finite for large `x`.
pub fn k_ratio(x: f64) -> Result<f64> {
    require_positive("x", x)?;
    Ok(k_ratio_unchecked(x))
}

/// Source of `K₀, K₁` values, so that checks can be run against a
/// substituted implementation.
pub trait BesselProvider: Sync {
    /// `(eˣK₀(x), eˣK₁(x))` for `x > 0`.
    fn k01_scaled(&self, x: f64) -> (f64, f64);

    fn k0(&self, x: f64) -> f64 {
        unscale(self.k01_scaled(x).0, x)
    }

    fn k1(&self, x: f64) -> f64 {
        unscale(self.k01_scaled(x).1, x)
    }
}

/// The implementation of this module.
#[derive(Debug, Clone, Copy, Default)]
pub struct Standard;

impl BesselProvider for Standard {
    fn k01_scaled(&self, x: f64) -> (f64, f64) {
        k01_scaled_unchecked(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_arguments() {
        for x in [0.0, -1.0, f64::NAN] {
            assert!(k0(x).is_err());
            assert!(k1(x).is_err());
            assert!(k1_prime(x).is_err());
            assert!(k0_prime(x).is_err());
            assert!(kn(3, x).is_err());
            assert!(k_ratio(x).is_err());
        }
    }

    #[test]
    fn regimes_agree_at_the_switch_point() {
        let (a0, a1) = k01_series(2.0);
        let (b0, b1) = k01_scaled_cf(2.0);
        let e = (-2.0f64).exp();
        assert!((a0 - b0 * e).abs() / a0 < 1e-14, "{a0} {}", b0 * e);
        assert!((a1 - b1 * e).abs() / a1 < 1e-14, "{a1} {}", b1 * e);
    }

    #[test]
    fn underflow_returns_zero() {
        assert_eq!(k0(800.0).unwrap(), 0.0);
        assert!(k0_scaled(800.0).unwrap() > 0.0);
    }

    #[test]
    fn k1_prime_is_the_identity() {
        for x in [0.01, 0.5, 1.0, 3.0, 40.0] {
            let lhs = k1_prime(x).unwrap();
            let rhs = -k0(x).unwrap() - k1(x).unwrap() / x;
            assert_eq!(lhs, rhs);
            assert!(lhs < 0.0);
        }
    }

    #[test]
    fn prev_ratio_matches_direct_recurrence() {
        for &x in &[0.3, 1.0, 7.5] {
            for n in 1..8 {
                let direct = kn(n - 1, x).unwrap() / kn(n, x).unwrap();
                let q = k_prev_ratio_unchecked(n, x);
                assert!((direct - q).abs() / q < 1e-13);
            }
        }
    }
}
