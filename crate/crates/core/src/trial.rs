//! Explicit trial functions giving upper bounds on the second exterior
//! eigenvalue.
//!
//! Two constructions are evaluated numerically:
//!
//! * the monotonicity bound for a star-shaped, centrally symmetric domain
//!   containing the disk of radius `R` about the origin. The trial function
//!   `u(r, θ) = K₁(ωr) c(θ)`, `c ∈ {cos, sin}`, satisfies `-Δu = -ω² u`, so
//!   its Rayleigh quotient is `-ω²` plus a boundary term over `∂Ω`;
//! * the isoelastic bound for a convex domain with `E(∂Ω) = π/R`, built in
//!   parallel coordinates `(s, t)` from the disk profiles
//!   `f(t) = K₀(ξ(t+R))` and `g(t) = K₁(ω(t+R))`.
//!
//! Internally every Bessel profile is multiplied by `e^{ωR}` (or `e^{ξR}`) so
//! that nothing underflows for strong coupling; reported norms and boundary
//! terms are scaled back.

use std::f64::consts::PI;
use std::fmt;

use crate::disk::{disk_spectrum_full, lambda2_disk};
use crate::error::{require_positive, Error, Result};
use crate::fem::Discretization;
use crate::geometry::DomainShape;
use crate::quadrature::{periodic_grid, SemiInfinite};
use crate::specfun::k01_scaled_unchecked;

/// Relative tolerance on each semi-infinite integral's self-estimate.
const QUAD_TOL: f64 = 1e-10;
/// Relative tolerance for `E(∂Ω) = π/R`.
const ELASTIC_MATCH_TOL: f64 = 1e-9;

/// Angular factor of the monotonicity trial function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Cos,
    Sin,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Cos => "cos",
            Branch::Sin => "sin",
        }
    }

    /// `(c(θ), c'(θ))`.
    fn eval(self, theta: f64) -> (f64, f64) {
        let (s, c) = theta.sin_cos();
        match self {
            Branch::Cos => (c, -s),
            Branch::Sin => (s, c),
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Geometric hypotheses of the two constructions, as evaluated on a shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HypothesisFlags {
    pub star_shaped: bool,
    pub centrally_symmetric: bool,
    /// Contains the comparison disk centred at the origin.
    pub contains_disk: bool,
    pub convex: bool,
    /// `E(∂Ω) = π/R` for the comparison radius.
    pub elastic_match: bool,
    /// `α < -1/R`.
    pub below_critical: bool,
}

impl HypothesisFlags {
    pub fn evaluate(shape: &DomainShape, radius: f64, alpha: f64) -> Self {
        let summary = shape.summarize();
        let target = PI / radius;
        Self {
            // every admissible radial function is positive
            star_shaped: true,
            centrally_symmetric: summary.centrally_symmetric,
            contains_disk: shape.contains_disk(radius),
            convex: summary.convex,
            elastic_match: (summary.elastic_energy - target).abs() <= ELASTIC_MATCH_TOL * target,
            below_critical: alpha < -1.0 / radius,
        }
    }

    /// Failed flags among those the monotonicity bound relies on.
    pub fn monotonicity_failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.star_shaped {
            out.push("star-shaped");
        }
        if !self.centrally_symmetric {
            out.push("centrally-symmetric");
        }
        if !self.contains_disk {
            out.push("contains-disk");
        }
        if !self.below_critical {
            out.push("below-critical");
        }
        out
    }

    /// Failed flags among those the isoelastic bound relies on.
    pub fn isoelastic_failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.convex {
            out.push("convex");
        }
        if !self.elastic_match {
            out.push("elastic-match");
        }
        if !self.below_critical {
            out.push("below-critical");
        }
        out
    }

    /// Compact `name=0|1` list, `;`-separated.
    pub fn encode(&self) -> String {
        let b = |v: bool| if v { 1 } else { 0 };
        format!(
            "star={};sym={};incl={};convex={};elastic={};subcrit={}",
            b(self.star_shaped),
            b(self.centrally_symmetric),
            b(self.contains_disk),
            b(self.convex),
            b(self.elastic_match),
            b(self.below_critical)
        )
    }
}

/// What the orthogonality residuals were measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundStateSource {
    /// A finite-element ground state of the exterior problem.
    Fem,
    /// The disk ground state `K₀(ξr)` restricted to the exterior. The
    /// residuals then only confirm that the integrands are odd under
    /// `θ ↦ θ + π`, not orthogonality to the true ground state.
    SymmetryAnalytic,
    /// Closed-form quantities of the construction itself.
    Exact,
}

impl GroundStateSource {
    pub fn name(self) -> &'static str {
        match self {
            GroundStateSource::Fem => "fem",
            GroundStateSource::SymmetryAnalytic => "symmetry-analytic",
            GroundStateSource::Exact => "exact",
        }
    }
}

/// Normalized inner products in `L²`, between gradients, and between traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalityResiduals {
    pub l2: f64,
    pub gradient: f64,
    pub trace: f64,
    pub source: GroundStateSource,
}

impl OrthogonalityResiduals {
    pub fn max(&self) -> f64 {
        self.l2.max(self.gradient).max(self.trace)
    }
}

/// A finite-element ground state handed to [`monotonicity_bound_with_ground_state`].
#[derive(Debug, Clone)]
pub struct FemGroundState {
    pub disc: Discretization,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialBoundReport {
    pub alpha: f64,
    pub disk_radius: f64,
    pub omega: f64,
    pub lambda2_disk: f64,
    pub gamma_omega: f64,
    pub branch: Branch,
    /// `∮ u(-∂_ν u + αu) dσ`.
    pub boundary_term: f64,
    /// The boundary term with the `γ_Ω` contribution dropped.
    pub estimate_radial: f64,
    /// The above with `|Γ'|` replaced by `ρ`.
    pub estimate_disk: f64,
    pub trial_norm_sq: f64,
    pub upper_bound: f64,
    pub orthogonality: OrthogonalityResiduals,
    pub hypotheses: HypothesisFlags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsoelasticReport {
    pub alpha: f64,
    /// `π / E(∂Ω)`.
    pub radius: f64,
    pub perimeter: f64,
    pub rayleigh_u: f64,
    pub rayleigh_v: f64,
    /// `R[v]` with the curvature term replaced by its concavity bound.
    pub rayleigh_v_surrogate: f64,
    pub lambda1_disk: f64,
    pub lambda2_disk: f64,
    /// `∮∫ κ²/(1+tκ) g² dt ds`.
    pub kappa_term: f64,
    /// `(L/R) ∫ g²/(R+t) dt`.
    pub kappa_surrogate: f64,
    pub jensen_margin: f64,
    pub orthogonality: OrthogonalityResiduals,
    pub hypotheses: HypothesisFlags,
}

/// Lower bounds on the critical coupling, each present only when its
/// hypotheses hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalCouplingBounds {
    /// `-1/min ρ`, for centrally symmetric shapes.
    pub from_inscribed: Option<f64>,
    /// `-E/π`, for convex shapes.
    pub from_elastic: Option<f64>,
    /// `-1/inradius`, for convex centrally symmetric shapes.
    pub from_inradius: Option<f64>,
}

/// `(e^{ωR}K₁(ωr), e^{ωR}·ωK₁'(ωr))`.
fn k1_profile(omega: f64, shift: f64, r: f64) -> (f64, f64) {
    let x = omega * r;
    let (k0s, k1s) = k01_scaled_unchecked(x);
    let e = (-omega * (r - shift)).exp();
    (k1s * e, -omega * (k0s + k1s / x) * e)
}

/// `(e^{ξR}K₀(ξr), e^{ξR}·ξK₀'(ξr))`.
fn k0_profile(xi: f64, shift: f64, r: f64) -> (f64, f64) {
    let (k0s, k1s) = k01_scaled_unchecked(xi * r);
    let e = (-xi * (r - shift)).exp();
    (k0s * e, -xi * k1s * e)
}

fn gamma_scaled(shape: &DomainShape, omega: f64, shift: f64) -> f64 {
    let n = shape.n_samples();
    let h = 2.0 * PI / n as f64;
    periodic_grid(n)
        .map(|theta| {
            let (rho, drho, _) = shape.rho_derivatives(theta);
            let (j, _) = k1_profile(omega, shift, rho);
            let (s, c) = theta.sin_cos();
            drho / rho * j * j * s * c
        })
        .sum::<f64>()
        * h
}

/// `γ_Ω = ∮ (ρ'/ρ) K₁(ωρ)² sin θ cos θ dθ` on the shape's sample grid.
pub fn gamma_omega(shape: &DomainShape, omega: f64) -> Result<f64> {
    require_positive("omega", omega)?;
    let shift = shape.min_rho();
    Ok(gamma_scaled(shape, omega, shift) * (-2.0 * omega * shift).exp())
}

/// `g(r) = -ωK₁'(ωr) + αK₁(ωr)` with `ω` the second disk wavenumber.
pub fn g_profile(radius: f64, alpha: f64, r_grid: &[f64]) -> Result<Vec<f64>> {
    let omega = second_wavenumber(radius, alpha)?;
    r_grid
        .iter()
        .map(|&r| {
            if !(r >= radius) {
                return Err(Error::Domain {
                    arg: "r",
                    value: r,
                    expected: ">= radius",
                });
            }
            let (j, dj) = k1_profile(omega, 0.0, r);
            Ok(-dj + alpha * j)
        })
        .collect()
}

fn second_wavenumber(radius: f64, alpha: f64) -> Result<f64> {
    match lambda2_disk(radius, alpha)? {
        Some(e) => Ok(e.wavenumber),
        None => Err(Error::Hypothesis {
            failed: vec!["below-critical"],
        }),
    }
}

struct BoundaryTerms {
    exact: f64,
    estimate_radial: f64,
    estimate_disk: f64,
}

/// Scaled by `e^{2ωR}`.
fn boundary_terms(shape: &DomainShape, radius: f64, alpha: f64, omega: f64, branch: Branch) -> BoundaryTerms {
    let n = shape.n_samples();
    let h = 2.0 * PI / n as f64;
    let (mut exact, mut est1, mut est2) = (0.0, 0.0, 0.0);
    for theta in periodic_grid(n) {
        let (rho, drho, _) = shape.rho_derivatives(theta);
        let speed = rho.hypot(drho);
        let (j, dj) = k1_profile(omega, radius, rho);
        let (c, dc) = branch.eval(theta);
        exact += -rho * j * dj * c * c + drho / rho * j * j * c * dc + alpha * j * j * c * c * speed;
        est1 += j * (-rho * dj + alpha * speed * j) * c * c;
        est2 += j * rho * (-dj + alpha * j) * c * c;
    }
    BoundaryTerms {
        exact: exact * h,
        estimate_radial: est1 * h,
        estimate_disk: est2 * h,
    }
}

fn check_hypotheses(failed: Vec<&'static str>) -> Result<()> {
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Hypothesis { failed })
    }
}

/// Boundary term and branch of the monotonicity trial function.
pub fn monotonicity_boundary_term(shape: &DomainShape, radius: f64, alpha: f64) -> Result<(f64, Branch)> {
    require_positive("radius", radius)?;
    check_hypotheses(HypothesisFlags::evaluate(shape, radius, alpha).monotonicity_failures())?;
    let omega = second_wavenumber(radius, alpha)?;
    let branch = choose_branch(shape, omega, radius);
    let bt = boundary_terms(shape, radius, alpha, omega, branch);
    Ok((bt.exact * (-2.0 * omega * radius).exp(), branch))
}

fn choose_branch(shape: &DomainShape, omega: f64, radius: f64) -> Branch {
    if gamma_scaled(shape, omega, radius) >= 0.0 {
        Branch::Cos
    } else {
        Branch::Sin
    }
}

/// Full monotonicity report; orthogonality against the disk ground state.
pub fn monotonicity_bound(shape: &DomainShape, radius: f64, alpha: f64) -> Result<TrialBoundReport> {
    require_positive("radius", radius)?;
    check_hypotheses(HypothesisFlags::evaluate(shape, radius, alpha).monotonicity_failures())?;
    monotonicity_bound_exploratory(shape, radius, alpha, None)
}

/// Full monotonicity report; orthogonality against a finite-element ground state.
pub fn monotonicity_bound_with_ground_state(
    shape: &DomainShape,
    radius: f64,
    alpha: f64,
    ground: FemGroundState,
) -> Result<TrialBoundReport> {
    require_positive("radius", radius)?;
    check_hypotheses(HypothesisFlags::evaluate(shape, radius, alpha).monotonicity_failures())?;
    monotonicity_bound_exploratory(shape, radius, alpha, Some(ground))
}

/// The monotonicity construction without enforcing the geometric hypotheses;
/// only `α < -1/R` is required. The flags in the report record what failed.
pub fn monotonicity_bound_exploratory(
    shape: &DomainShape,
    radius: f64,
    alpha: f64,
    ground: Option<FemGroundState>,
) -> Result<TrialBoundReport> {
    require_positive("radius", radius)?;
    let hypotheses = HypothesisFlags::evaluate(shape, radius, alpha);
    let omega = second_wavenumber(radius, alpha)?;
    let spectrum = disk_spectrum_full(radius, alpha)?;
    let xi = spectrum.xi;
    let branch = choose_branch(shape, omega, radius);
    let bt = boundary_terms(shape, radius, alpha, omega, branch);

    let n = shape.n_samples();
    let h = 2.0 * PI / n as f64;
    let quad = SemiInfinite::default();
    // radial parts: J²r, J'²r, J²/r, JΨr, J'Ψ'r, Ψ²r, Ψ'²r
    let mut acc = [0.0; 9];
    let mut trace = [0.0; 3];
    let mut err_norm = 0.0;
    for theta in periodic_grid(n) {
        let (rho, drho, _) = shape.rho_derivatives(theta);
        let speed = rho.hypot(drho);
        let (c, dc) = branch.eval(theta);
        let (radial, err) = quad.estimate_many(omega, |t| {
            let r = rho + t;
            let (j, dj) = k1_profile(omega, radius, r);
            let (p, dp) = k0_profile(xi, radius, r);
            [j * j * r, dj * dj * r, j * j / r, j * p * r, dj * dp * r, p * p * r, dp * dp * r]
        });
        acc[0] += c * c * radial[0];
        acc[1] += c * c * radial[1] + dc * dc * radial[2];
        acc[2] += c * radial[3];
        acc[3] += c * radial[4];
        acc[4] += radial[5];
        acc[5] += radial[6];
        err_norm += c * c * err[0];
        let (j, _) = k1_profile(omega, radius, rho);
        let (p, _) = k0_profile(xi, radius, rho);
        trace[0] += c * j * p * speed;
        trace[1] += c * c * j * j * speed;
        trace[2] += p * p * speed;
    }
    let norm_scaled = acc[0] * h;
    if err_norm * h > QUAD_TOL * norm_scaled {
        return Err(Error::Quadrature {
            estimate: err_norm * h / norm_scaled,
            tolerance: QUAD_TOL,
        });
    }

    let orthogonality = match ground {
        Some(g) => fem_orthogonality(shape, omega, branch, &g),
        None => OrthogonalityResiduals {
            l2: acc[2].abs() / (acc[0] * acc[4]).sqrt(),
            gradient: acc[3].abs() / (acc[1] * acc[5]).sqrt(),
            trace: trace[0].abs() / (trace[1] * trace[2]).sqrt(),
            source: GroundStateSource::SymmetryAnalytic,
        },
    };

    let unscale = (-2.0 * omega * radius).exp();
    let lambda2 = -omega * omega;
    Ok(TrialBoundReport {
        alpha,
        disk_radius: radius,
        omega,
        lambda2_disk: lambda2,
        gamma_omega: gamma_scaled(shape, omega, radius) * unscale,
        branch,
        boundary_term: bt.exact * unscale,
        estimate_radial: bt.estimate_radial * unscale,
        estimate_disk: bt.estimate_disk * unscale,
        trial_norm_sq: norm_scaled * unscale,
        upper_bound: lambda2 + bt.exact / norm_scaled,
        orthogonality,
        hypotheses,
    })
}

fn fem_orthogonality(shape: &DomainShape, omega: f64, branch: Branch, g: &FemGroundState) -> OrthogonalityResiduals {
    let shift = shape.min_rho();
    let u = g.disc.grid.interpolate(shape, |r, theta| {
        k1_profile(omega, shift, r).0 * branch.eval(theta).0
    });
    let psi = &g.vector;
    let normalized = |m: &crate::fem::CsrMatrix| {
        m.bilinear(&u, psi).abs() / (m.bilinear(&u, &u) * m.bilinear(psi, psi)).sqrt()
    };
    OrthogonalityResiduals {
        l2: normalized(&g.disc.mass),
        gradient: normalized(&g.disc.stiffness),
        trace: normalized(&g.disc.boundary),
        source: GroundStateSource::Fem,
    }
}

/// Rayleigh quotients of the parallel-coordinate trial functions for a convex
/// domain compared with the disk of equal elastic energy.
pub fn isoelastic_rayleigh(shape: &DomainShape, alpha: f64) -> Result<IsoelasticReport> {
    let energy = shape.elastic_energy();
    let radius = PI / energy;
    let hypotheses = HypothesisFlags::evaluate(shape, radius, alpha);
    check_hypotheses(hypotheses.isoelastic_failures())?;
    let spectrum = disk_spectrum_full(radius, alpha)?;
    let (xi, omega) = (spectrum.xi, second_wavenumber(radius, alpha)?);

    let n = shape.n_samples();
    let h = 2.0 * PI / n as f64;
    let mut kappa = Vec::with_capacity(n);
    let mut weight = Vec::with_capacity(n);
    for theta in periodic_grid(n) {
        kappa.push(shape.curvature(theta));
        weight.push(shape.speed(theta) * h);
    }
    let perimeter: f64 = weight.iter().sum();
    let curvature_mean = |t: f64| -> f64 {
        kappa
            .iter()
            .zip(&weight)
            .map(|(&k, &w)| w * k * k / (1.0 + t * k))
            .sum()
    };

    // f = e^{ξR}K₀(ξ(t+R)), g = e^{ωR}K₁(ω(t+R))
    let quad = SemiInfinite::default();
    let (v, err) = quad.estimate_many(omega, |t| {
        let r = t + radius;
        let w = perimeter + 2.0 * PI * t;
        let (f, df) = k0_profile(xi, radius, r);
        let (g, dg) = k1_profile(omega, radius, r);
        [
            f * f * w,
            df * df * w,
            g * g * w,
            dg * dg * w,
            g * g * curvature_mean(t),
            g * g / r,
            f * g,
            f * g * t,
            df * dg,
            df * dg * t,
        ]
    });
    for i in 0..6 {
        if err[i] > QUAD_TOL * v[i].abs() {
            return Err(Error::Quadrature {
                estimate: err[i] / v[i].abs(),
                tolerance: QUAD_TOL,
            });
        }
    }
    let [norm_u, grad_u, norm_v, grad_v_radial, kappa_term, inv_r, fg, fg_t, dfdg, dfdg_t] = v;
    let (f0, _) = k0_profile(xi, radius, radius);
    let (g0, _) = k1_profile(omega, radius, radius);
    let kappa_surrogate = perimeter / radius * inv_r;
    let rayleigh_u = (grad_u + alpha * perimeter * f0 * f0) / norm_u;
    let boundary_v = alpha * perimeter * g0 * g0;
    let rayleigh_v = (grad_v_radial + kappa_term + boundary_v) / norm_v;
    let rayleigh_v_surrogate = (grad_v_radial + kappa_surrogate + boundary_v) / norm_v;

    let jensen_margin = jensen_grid(radius)
        .map(|t| 1.0 / (radius * (radius + t)) - curvature_mean(t) / perimeter)
        .fold(f64::INFINITY, f64::min);

    // ∮ (τ₁ - iτ₂) ds and ∮ κ(τ₁ - iτ₂) ds on the arclength tables
    let table = shape.arclength_tables(n)?;
    let ds = table.perimeter / n as f64;
    let (mut t0, mut t1) = ([0.0; 2], [0.0; 2]);
    for (tau, &k) in table.tangent.iter().zip(&table.kappa) {
        t0[0] += tau[0] * ds;
        t0[1] -= tau[1] * ds;
        t1[0] += k * tau[0] * ds;
        t1[1] -= k * tau[1] * ds;
    }
    let combo = |a: f64, b: f64| ((a * t0[0] + b * t1[0]).powi(2) + (a * t0[1] + b * t1[1]).powi(2)).sqrt();
    let orthogonality = OrthogonalityResiduals {
        l2: combo(fg, fg_t) / (norm_u * norm_v).sqrt(),
        gradient: combo(dfdg, dfdg_t) / (grad_u * (grad_v_radial + kappa_term)).sqrt(),
        trace: t0[0].hypot(t0[1]) / table.perimeter,
        source: GroundStateSource::Exact,
    };

    Ok(IsoelasticReport {
        alpha,
        radius,
        perimeter,
        rayleigh_u,
        rayleigh_v,
        rayleigh_v_surrogate,
        lambda1_disk: spectrum.lambda1(),
        lambda2_disk: -omega * omega,
        kappa_term: kappa_term * (-2.0 * omega * radius).exp(),
        kappa_surrogate: kappa_surrogate * (-2.0 * omega * radius).exp(),
        jensen_margin,
        orthogonality,
        hypotheses,
    })
}

/// `t = 0` and 240 geometrically spaced points in `[10⁻³R, 10³R]`.
fn jensen_grid(radius: f64) -> impl Iterator<Item = f64> {
    std::iter::once(0.0).chain((0..240).map(move |k| radius * 10f64.powf(-3.0 + 6.0 * k as f64 / 239.0)))
}

pub fn critical_coupling_bounds(shape: &DomainShape) -> CriticalCouplingBounds {
    let summary = shape.summarize();
    let symmetric = summary.centrally_symmetric;
    CriticalCouplingBounds {
        from_inscribed: symmetric.then(|| -1.0 / summary.min_rho),
        from_elastic: summary.convex.then(|| -summary.elastic_energy / PI),
        from_inradius: (summary.convex && symmetric).then(|| -1.0 / shape.inradius_centered()),
    }
}
