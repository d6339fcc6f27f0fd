//! Gauss–Legendre rules and a semi-infinite integrator for exponentially
//! decaying integrands.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrator for `∫₀^∞ h(t) dt` where `h` decays roughly like `e^{-c·scale·t}`.
///
/// Uses `t = sinh(u)/scale` and Gauss–Legendre panels of fixed width in `u`,
/// stopping once a panel contributes less than `1e-16` of the running total.
/// The same panels are integrated at a lower order to produce an error estimate.
#[derive(Debug, Clone)]
pub struct SemiInfinite {
    rule: GaussLegendre,
    check: GaussLegendre,
    panel_width: f64,
    max_panels: usize,
    tolerance: f64,
}

impl Default for SemiInfinite {
    fn default() -> Self {
        Self::new(20, 0.5)
    }
}

impl SemiInfinite {
    pub fn new(order: usize, panel_width: f64) -> Self {
        Self {
            rule: GaussLegendre::new(order),
            check: GaussLegendre::new(order.div_ceil(2) + 2),
            panel_width,
            max_panels: 200,
            tolerance: 1e-10,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Returns `(value, error_estimate)` without failing.
    pub fn estimate(&self, scale: f64, mut h: impl FnMut(f64) -> f64) -> (f64, f64) {
        let (v, e) = self.estimate_many(scale, |t| [h(t)]);
        (v[0], e[0])
    }

    /// Several integrands sharing the same nodes; panels are added until every
    /// component has become negligible.
    pub fn estimate_many<const N: usize>(
        &self,
        scale: f64,
        mut h: impl FnMut(f64) -> [f64; N],
    ) -> ([f64; N], [f64; N]) {
        let mut total = [0.0; N];
        let mut coarse_total = [0.0; N];
        let mut panel = |rule: &GaussLegendre, a: f64, b: f64| {
            let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
            let mut acc = [0.0; N];
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let u = mid + half * x;
                let jac = u.cosh() / scale;
                let vals = h(u.sinh() / scale);
                for (s, v) in acc.iter_mut().zip(vals) {
                    *s += w * half * jac * v;
                }
            }
            acc
        };
        for p in 0..self.max_panels {
            let a = p as f64 * self.panel_width;
            let b = a + self.panel_width;
            let fine = panel(&self.rule, a, b);
            let coarse = panel(&self.check, a, b);
            let mut negligible = p >= 2;
            let mut all_zero = true;
            for i in 0..N {
                total[i] += fine[i];
                coarse_total[i] += coarse[i];
                negligible &= fine[i].abs() <= 1e-16 * total[i].abs();
                all_zero &= total[i] == 0.0;
            }
            if negligible || (all_zero && p >= 8) {
                break;
            }
        }
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = (total[i] - coarse_total[i]).abs();
        }
        (total, err)
    }

    /// Integral value; fails when the low/high order estimates disagree
    /// beyond the configured relative tolerance.
    pub fn integrate(&self, scale: f64, h: impl FnMut(f64) -> f64) -> Result<f64> {
        let (value, err) = self.estimate(scale, h);
        let tol = self.tolerance * value.abs().max(f64::MIN_POSITIVE);
        if err > tol || !value.is_finite() {
            return Err(Error::Quadrature {
                estimate: err / value.abs().max(f64::MIN_POSITIVE),
                tolerance: self.tolerance,
            });
        }
        Ok(value)
    }
}

/// Uniform periodic grid `θ_j = 2πj/n`.
pub fn periodic_grid(n: usize) -> impl Iterator<Item = f64> + Clone {
    let step = 2.0 * PI / n as f64;
    (0..n).map(move |j| j as f64 * step)
}

/// Trapezoidal rule on a uniform periodic grid of `n` points over `[0, 2π)`.
pub fn periodic_trapezoid(n: usize, f: impl FnMut(f64) -> f64) -> f64 {
    let step = 2.0 * PI / n as f64;
    periodic_grid(n).map(f).sum::<f64>() * step
}
