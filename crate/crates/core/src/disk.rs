//! Exact negative spectrum of the Robin Laplacian outside a disk.
//!
//! The exterior of the disk of radius `R` splits into angular fibers
//! `n = 0, 1, 2, …`. Fiber `n` has at most one negative eigenvalue `-k²`, with
//! radial profile `K_n(k r)`; the Robin condition `f'(R) = α f(R)` reduces to
//!
//! ```text
//! x K_{n-1}(x) / K_n(x) + n + αR = 0,   x = kR,
//! ```
//!
//! with `K_{-1} = K_1`. The left side tends to `n + αR` as `x → 0⁺` and to
//! `+∞` as `x → ∞`, so fiber `n` carries a negative eigenvalue iff `αR < -n`.
//! All ratios are formed from scaled Bessel values.

use crate::error::{require_negative, require_positive, Error, Result};
use crate::roots::positive_crossing;
use crate::specfun::{k01_scaled_unchecked, k_prev_ratio_unchecked};

/// Default cap on the number of fibers enumerated by [`disk_spectrum_full`].
pub const DEFAULT_FIBER_CAP: usize = 64;

/// A negative eigenvalue `-k²` together with its decay rate `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskEigen {
    pub wavenumber: f64,
    pub eigenvalue: f64,
}

impl DiskEigen {
    fn from_wavenumber(k: f64) -> Self {
        Self {
            wavenumber: k,
            eigenvalue: -k * k,
        }
    }
}

/// Ratio `K_{n-1}(x)/K_n(x)` with the convention `K_{-1} = K_1`.
fn fiber_ratio(n: usize, x: f64) -> f64 {
    if n == 0 {
        let (k0, k1) = k01_scaled_unchecked(x);
        k1 / k0
    } else {
        k_prev_ratio_unchecked(n, x)
    }
}

/// Left side of the fiber-`n` boundary equation in the variable `x = kR`.
pub fn fiber_equation(n: usize, radius: f64, alpha: f64, x: f64) -> f64 {
    x * fiber_ratio(n, x) + n as f64 + alpha * radius
}

fn fiber_equation_derivative(n: usize, x: f64) -> f64 {
    // (x q)' = 2n q - x + x q², q = K_{n-1}/K_n
    let q = fiber_ratio(n, x);
    2.0 * n as f64 * q - x + x * q * q
}

fn solve_fiber(n: usize, radius: f64, alpha: f64) -> Result<f64> {
    let x0 = (alpha * radius + n as f64).abs().max(1e-8);
    let x = positive_crossing(
        "fiber boundary condition",
        x0,
        |x| fiber_equation(n, radius, alpha, x),
        |x| fiber_equation_derivative(n, x),
    )?;
    Ok(x / radius)
}

/// Ground state of the disk exterior: `ξ > 0` with `ξK₁(ξR) + αK₀(ξR) = 0`, `λ₁ = -ξ²`.
pub fn lambda1_disk(radius: f64, alpha: f64) -> Result<DiskEigen> {
    require_positive("radius", radius)?;
    require_negative("alpha", alpha)?;
    solve_fiber(0, radius, alpha).map(DiskEigen::from_wavenumber)
}

/// Second eigenvalue `λ₂ = -ω²` (double), present iff `α < -1/R`.
pub fn lambda2_disk(radius: f64, alpha: f64) -> Result<Option<DiskEigen>> {
    require_positive("radius", radius)?;
    if !alpha.is_finite() {
        return Err(Error::Domain {
            arg: "alpha",
            value: alpha,
            expected: "finite",
        });
    }
    fiber_lowest_unchecked(radius, alpha, 1)
}

/// `α⋆ = -1/R`.
pub fn critical_coupling_disk(radius: f64) -> Result<f64> {
    require_positive("radius", radius)?;
    Ok(-1.0 / radius)
}

/// The negative eigenvalue of fiber `n`, if any.
pub fn fiber_lowest(radius: f64, alpha: f64, n: usize) -> Result<Option<DiskEigen>> {
    require_positive("radius", radius)?;
    require_negative("alpha", alpha)?;
    fiber_lowest_unchecked(radius, alpha, n)
}

fn fiber_lowest_unchecked(radius: f64, alpha: f64, n: usize) -> Result<Option<DiskEigen>> {
    if alpha * radius + n as f64 >= 0.0 {
        return Ok(None);
    }
    solve_fiber(n, radius, alpha).map(|k| Some(DiskEigen::from_wavenumber(k)))
}

/// `|ξK₁(ξR) + αK₀(ξR)| / (|α| K₀(ξR))`.
pub fn lambda1_residual(radius: f64, alpha: f64, xi: f64) -> f64 {
    let x = xi * radius;
    let (k0, k1) = k01_scaled_unchecked(x);
    (xi * k1 + alpha * k0).abs() / (alpha.abs() * k0)
}

/// `|ωR K₀(ωR)/K₁(ωR) + αR + 1|`.
pub fn lambda2_residual(radius: f64, alpha: f64, omega: f64) -> f64 {
    fiber_equation(1, radius, alpha, omega * radius).abs()
}

/// Full negative spectrum of the exterior of a disk.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskSpectrum {
    pub radius: f64,
    pub alpha: f64,
    pub xi: f64,
    pub omega: Option<f64>,
    pub n_star: usize,
    /// `(n, λ)` for `0 ≤ n ≤ n_star`.
    pub fiber_values: Vec<(usize, f64)>,
}

impl DiskSpectrum {
    pub fn lambda1(&self) -> f64 {
        -self.xi * self.xi
    }

    pub fn lambda2(&self) -> Option<f64> {
        self.omega.map(|w| -w * w)
    }

    pub fn critical_coupling(&self) -> f64 {
        -1.0 / self.radius
    }

    /// `N_α = 2 n_star + 1`.
    pub fn negative_count(&self) -> usize {
        2 * self.n_star + 1
    }

    /// Negative eigenvalues repeated with multiplicity, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.negative_count());
        for &(n, lambda) in &self.fiber_values {
            out.push(lambda);
            if n > 0 {
                out.push(lambda);
            }
        }
        out
    }
}

/// Enumerate fibers until the first without a negative eigenvalue.
pub fn disk_spectrum_full(radius: f64, alpha: f64) -> Result<DiskSpectrum> {
    disk_spectrum_with_cap(radius, alpha, DEFAULT_FIBER_CAP)
}

pub fn disk_spectrum_with_cap(radius: f64, alpha: f64, cap: usize) -> Result<DiskSpectrum> {
    let ground = lambda1_disk(radius, alpha)?;
    let mut fiber_values = vec![(0, ground.eigenvalue)];
    let mut omega = None;
    let mut n = 1;
    loop {
        let Some(e) = fiber_lowest_unchecked(radius, alpha, n)? else {
            break;
        };
        if n > cap {
            // smallest n with n + αR ≥ 0, minus one
            let n_star = (-alpha * radius).ceil() as usize - 1;
            return Err(Error::FiberCap { cap, n_star });
        }
        if n == 1 {
            omega = Some(e.wavenumber);
        }
        fiber_values.push((n, e.eigenvalue));
        n += 1;
    }
    Ok(DiskSpectrum {
        radius,
        alpha,
        xi: ground.wavenumber,
        omega,
        n_star: n - 1,
        fiber_values,
    })
}
