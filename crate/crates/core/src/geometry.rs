//! Strictly star-shaped boundaries `r = ρ(θ)` given by a finite radial
//! Fourier series, and the geometric functionals used by the eigenvalue
//! bounds: perimeter, area, curvature, elastic energy.
//!
//! Curvature follows the convention in which strictly convex domains have
//! `κ > 0`. All boundary integrals use the trapezoidal rule on the uniform
//! `θ` grid, which is spectrally accurate for these periodic integrands.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{require_positive, Error, Result};
use crate::quadrature::{periodic_grid, periodic_trapezoid};

pub const DEFAULT_SAMPLES: usize = 1024;
pub const CONVEXITY_TOL: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Radial Fourier description `ρ(θ) = a0 + Σ a_k cos kθ + b_k sin kθ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainShape {
    a0: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
    n_samples: usize,
}

/// Matching rule between a shape and a comparison disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    Area,
    Perimeter,
    Elastic,
}

impl Constraint {
    pub fn name(self) -> &'static str {
        match self {
            Constraint::Area => "area",
            Constraint::Perimeter => "perimeter",
            Constraint::Elastic => "elastic",
        }
    }
}

impl std::str::FromStr for Constraint {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "area" => Ok(Constraint::Area),
            "perimeter" => Ok(Constraint::Perimeter),
            "elastic" => Ok(Constraint::Elastic),
            other => Err(format!("unknown constraint `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometrySummary {
    pub perimeter: f64,
    pub area: f64,
    pub elastic_energy: f64,
    pub total_curvature: f64,
    pub min_rho: f64,
    pub max_rho: f64,
    pub min_curvature: f64,
    pub max_curvature: f64,
    pub convex: bool,
    pub centrally_symmetric: bool,
}

impl GeometrySummary {
    /// Gage: `E ≥ πL/(2A)`; vacuous (true) for non-convex shapes.
    pub fn gage_holds(&self) -> bool {
        !self.convex || self.elastic_energy >= PI * self.perimeter / (2.0 * self.area) * (1.0 - 1e-12)
    }

    /// `E² A ≥ π³`.
    pub fn bh_holds(&self) -> bool {
        self.elastic_energy.powi(2) * self.area >= PI.powi(3) * (1.0 - 1e-12)
    }

    pub fn matched_radius(&self, constraint: Constraint) -> f64 {
        match constraint {
            Constraint::Area => (self.area / PI).sqrt(),
            Constraint::Perimeter => self.perimeter / (2.0 * PI),
            Constraint::Elastic => PI / self.elastic_energy,
        }
    }
}

/// Boundary resampled at uniform arclength, traversed clockwise.
#[derive(Debug, Clone)]
pub struct ArclengthTable {
    pub perimeter: f64,
    pub s: Vec<f64>,
    pub theta: Vec<f64>,
    pub kappa: Vec<f64>,
    /// Unit tangent; the outer normal is `(-τ₂, τ₁)` and `dτ/ds = -κν`.
    pub tangent: Vec<[f64; 2]>,
}

impl DomainShape {
    pub fn new(a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        Self::with_samples(a0, cos, sin, DEFAULT_SAMPLES)
    }

    pub fn with_samples(a0: f64, mut cos: Vec<f64>, mut sin: Vec<f64>, n_samples: usize) -> Result<Self> {
        require_positive("a0", a0)?;
        if !n_samples.is_power_of_two() || n_samples < 16 {
            return Err(Error::InvalidShape(format!(
                "n_samples must be a power of two >= 16, got {n_samples}"
            )));
        }
        let k = cos.len().max(sin.len());
        cos.resize(k, 0.0);
        sin.resize(k, 0.0);
        if cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err(Error::InvalidShape("non-finite coefficient".into()));
        }
        let shape = Self {
            a0,
            cos,
            sin,
            n_samples,
        };
        let min = shape.min_rho();
        if min <= 0.0 {
            return Err(Error::InvalidShape(format!("min rho = {min} is not positive")));
        }
        Ok(shape)
    }

    /// Disk of radius `r` centred at the origin.
    pub fn disk(r: f64) -> Result<Self> {
        Self::new(r, vec![], vec![])
    }

    /// `ρ = 1 + ε cos(kθ)`.
    pub fn cos_mode(k: usize, eps: f64) -> Result<Self> {
        let mut cos = vec![0.0; k.max(1)];
        if k == 0 {
            return Self::new(1.0 + eps, vec![], vec![]);
        }
        cos[k - 1] = eps;
        Self::new(1.0, cos, vec![])
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    pub fn n_modes(&self) -> usize {
        self.cos.len()
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn with_n_samples(&self, n_samples: usize) -> Result<Self> {
        Self::with_samples(self.a0, self.cos.clone(), self.sin.clone(), n_samples)
    }

    pub fn is_disk(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|&c| c.abs() <= SYMMETRY_TOL * self.a0)
    }

    /// Odd-index coefficients vanish, i.e. `ρ(θ + π) = ρ(θ)`.
    pub fn is_centrally_symmetric(&self) -> bool {
        let tol = SYMMETRY_TOL;
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .filter(|(i, _)| (i + 1) % 2 == 1)
            .all(|(_, (a, b))| a.abs() <= tol && b.abs() <= tol)
    }

    /// `(ρ, ρ', ρ'')` at `θ`.
    pub fn rho_derivatives(&self, theta: f64) -> (f64, f64, f64) {
        let mut r = self.a0;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for (i, (&a, &b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let k = (i + 1) as f64;
            let (s, c) = (k * theta).sin_cos();
            r += a * c + b * s;
            d1 += k * (b * c - a * s);
            d2 -= k * k * (a * c + b * s);
        }
        (r, d1, d2)
    }

    pub fn rho(&self, theta: f64) -> f64 {
        self.rho_derivatives(theta).0
    }

    /// `|Γ'(θ)| = √(ρ² + ρ'²)`.
    pub fn speed(&self, theta: f64) -> f64 {
        let (r, d, _) = self.rho_derivatives(theta);
        r.hypot(d)
    }

    /// Signed curvature `(ρ² + 2ρ'² − ρρ'')/(ρ² + ρ'²)^{3/2}`.
    pub fn curvature(&self, theta: f64) -> f64 {
        let (r, d1, d2) = self.rho_derivatives(theta);
        let q = r * r + d1 * d1;
        (r * r + 2.0 * d1 * d1 - r * d2) / (q * q.sqrt())
    }

    /// Boundary point `ρ(θ)(cos θ, sin θ)`.
    pub fn point(&self, theta: f64) -> [f64; 2] {
        let r = self.rho(theta);
        let (s, c) = theta.sin_cos();
        [r * c, r * s]
    }

    /// Counter-clockwise tangent `Γ'(θ)`.
    pub fn tangent_ccw(&self, theta: f64) -> [f64; 2] {
        let (r, d, _) = self.rho_derivatives(theta);
        let (s, c) = theta.sin_cos();
        [d * c - r * s, d * s + r * c]
    }

    /// Outer unit normal at `Γ(θ)`.
    pub fn outer_normal(&self, theta: f64) -> [f64; 2] {
        let (r, d, _) = self.rho_derivatives(theta);
        let (s, c) = theta.sin_cos();
        let g = r.hypot(d);
        [(r * c + d * s) / g, (r * s - d * c) / g]
    }

    fn extremum_rho(&self, sign: f64) -> f64 {
        if self.is_disk() {
            return self.a0;
        }
        let n = (64 * (self.n_modes() + 1)).max(4096);
        let (best_theta, _) = periodic_grid(n)
            .map(|t| (t, sign * self.rho(t)))
            .fold((0.0, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
        let mut theta = best_theta;
        let mut best = sign * self.rho(theta);
        let h = 2.0 * PI / n as f64;
        for _ in 0..30 {
            let (_, d1, d2) = self.rho_derivatives(theta);
            if d2 * sign <= 0.0 {
                break;
            }
            let step = d1 / d2;
            let cand = theta - step;
            if (cand - best_theta).abs() > h {
                break;
            }
            let v = sign * self.rho(cand);
            if v <= best {
                best = v;
            }
            theta = cand;
            if step.abs() < 1e-15 {
                break;
            }
        }
        sign * best
    }

    /// `min_θ ρ(θ)`: distance from the origin to the boundary.
    pub fn min_rho(&self) -> f64 {
        self.extremum_rho(1.0)
    }

    pub fn max_rho(&self) -> f64 {
        self.extremum_rho(-1.0)
    }

    /// Dilation by `c > 0` about the origin.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        require_positive("scale", c)?;
        Self::with_samples(
            self.a0 * c,
            self.cos.iter().map(|a| a * c).collect(),
            self.sin.iter().map(|b| b * c).collect(),
            self.n_samples,
        )
    }

    /// Rotation by `phi` counter-clockwise: `ρ̃(θ) = ρ(θ − φ)`.
    pub fn rotated(&self, phi: f64) -> Self {
        let mut cos = Vec::with_capacity(self.cos.len());
        let mut sin = Vec::with_capacity(self.sin.len());
        for (i, (&a, &b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let (s, c) = ((i + 1) as f64 * phi).sin_cos();
            cos.push(a * c - b * s);
            sin.push(a * s + b * c);
        }
        Self { cos, sin, ..self.clone() }
    }

    pub fn perimeter(&self) -> f64 {
        periodic_trapezoid(self.n_samples, |t| self.speed(t))
    }

    pub fn area(&self) -> f64 {
        0.5 * periodic_trapezoid(self.n_samples, |t| self.rho(t).powi(2))
    }

    pub fn elastic_energy(&self) -> f64 {
        0.5 * periodic_trapezoid(self.n_samples, |t| self.curvature(t).powi(2) * self.speed(t))
    }

    pub fn summarize(&self) -> GeometrySummary {
        let n = self.n_samples;
        let step = 2.0 * PI / n as f64;
        let mut perimeter = 0.0;
        let mut area = 0.0;
        let mut elastic = 0.0;
        let mut total_curvature = 0.0;
        let mut min_k = f64::INFINITY;
        let mut max_k = f64::NEG_INFINITY;
        for theta in periodic_grid(n) {
            let (r, d1, d2) = self.rho_derivatives(theta);
            let q = r * r + d1 * d1;
            let g = q.sqrt();
            let k = (r * r + 2.0 * d1 * d1 - r * d2) / (q * g);
            perimeter += g;
            area += r * r;
            elastic += k * k * g;
            total_curvature += k * g;
            min_k = min_k.min(k);
            max_k = max_k.max(k);
        }
        GeometrySummary {
            perimeter: perimeter * step,
            area: 0.5 * area * step,
            elastic_energy: 0.5 * elastic * step,
            total_curvature: total_curvature * step,
            min_rho: self.min_rho(),
            max_rho: self.max_rho(),
            min_curvature: min_k,
            max_curvature: max_k,
            convex: min_k >= -CONVEXITY_TOL,
            centrally_symmetric: self.is_centrally_symmetric(),
        }
    }

    /// Whether the closed disk of radius `r` about the origin lies in the closure of Ω.
    pub fn contains_disk(&self, r: f64) -> bool {
        r > 0.0 && self.min_rho() >= r * (1.0 - 4.0 * f64::EPSILON)
    }

    /// Distance from the origin to the boundary; the in-radius for convex,
    /// centrally symmetric shapes.
    pub fn inradius_centered(&self) -> f64 {
        self.min_rho()
    }

    pub fn matched_disk_radius(&self, constraint: Constraint) -> f64 {
        match constraint {
            Constraint::Area => (self.area() / PI).sqrt(),
            Constraint::Perimeter => self.perimeter() / (2.0 * PI),
            Constraint::Elastic => PI / self.elastic_energy(),
        }
    }

    /// Dilate so that `matched_disk_radius(constraint) == target_radius`.
    pub fn normalize(&self, constraint: Constraint, target_radius: f64) -> Result<Self> {
        require_positive("target_radius", target_radius)?;
        // every matched radius is homogeneous of degree one under dilation
        let c = target_radius / self.matched_disk_radius(constraint);
        self.scaled(c)
    }

    /// Dilate so that the centred in-radius equals `target_radius`.
    pub fn normalize_inradius(&self, target_radius: f64) -> Result<Self> {
        require_positive("target_radius", target_radius)?;
        self.scaled(target_radius / self.min_rho())
    }

    /// Uniform arclength resampling at `m ≥ 64` nodes, clockwise from `θ = 0`.
    ///
    /// The cumulative arclength `s(θ)` is integrated spectrally from the
    /// Fourier series of `|Γ'|` and inverted by Newton's method.
    pub fn arclength_tables(&self, m: usize) -> Result<ArclengthTable> {
        if m < 64 {
            return Err(Error::Domain {
                arg: "m",
                value: m as f64,
                expected: ">= 64",
            });
        }
        let n = self.n_samples;
        let mut buf: Vec<Complex<f64>> = periodic_grid(n).map(|t| Complex::new(self.speed(t), 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let c0 = buf[0].re / n as f64;
        // speed(θ) ≈ c0 + Σ p_k cos kθ + q_k sin kθ
        let modes: Vec<(f64, f64)> = (1..n / 2)
            .map(|k| (2.0 * buf[k].re / n as f64, -2.0 * buf[k].im / n as f64))
            .collect();
        let perimeter = 2.0 * PI * c0;
        let s_ccw = |theta: f64| {
            let mut s = c0 * theta;
            for (i, &(p, q)) in modes.iter().enumerate() {
                let k = (i + 1) as f64;
                if p.abs() < 1e-18 && q.abs() < 1e-18 {
                    continue;
                }
                let (sn, cs) = (k * theta).sin_cos();
                s += (p * sn - q * (cs - 1.0)) / k;
            }
            s
        };

        let mut table = ArclengthTable {
            perimeter,
            s: Vec::with_capacity(m),
            theta: Vec::with_capacity(m),
            kappa: Vec::with_capacity(m),
            tangent: Vec::with_capacity(m),
        };
        for j in 0..m {
            let s = perimeter * j as f64 / m as f64;
            let target = perimeter - s;
            let mut theta = 2.0 * PI * target / perimeter;
            if j > 0 {
                for _ in 0..50 {
                    let step = (s_ccw(theta) - target) / self.speed(theta);
                    theta -= step;
                    if step.abs() < 1e-15 {
                        break;
                    }
                }
            } else {
                theta = 0.0;
            }
            let tc = self.tangent_ccw(theta);
            let g = tc[0].hypot(tc[1]);
            table.s.push(s);
            table.theta.push(theta);
            table.kappa.push(self.curvature(theta));
            table.tangent.push([-tc[0] / g, -tc[1] / g]);
        }
        Ok(table)
    }

    /// Plain-text shape file: `K n_samples`, then `a0`, then `K` lines `a_k b_k`.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n_modes(), self.n_samples);
        let _ = writeln!(out, "{:e}", self.a0);
        for (a, b) in self.cos.iter().zip(&self.sin) {
            let _ = writeln!(out, "{a:e} {b:e}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, message: String| Error::Parse { line, message };

        let (ln, header) = lines.next().ok_or_else(|| err(1, "missing header `K n_samples`".into()))?;
        let mut parts = header.split_whitespace();
        let k: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| err(ln, format!("expected mode count, got `{header}`")))?;
        let n_samples: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| err(ln, format!("expected n_samples, got `{header}`")))?;
        if parts.next().is_some() {
            return Err(err(ln, "trailing fields in header".into()));
        }

        let (ln, a0_line) = lines.next().ok_or_else(|| err(ln + 1, "missing a0".into()))?;
        let a0: f64 = a0_line
            .parse()
            .map_err(|_| err(ln, format!("expected a0, got `{a0_line}`")))?;

        let mut cos = Vec::with_capacity(k);
        let mut sin = Vec::with_capacity(k);
        let mut last = ln;
        for idx in 0..k {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| err(last + 1, format!("missing coefficient line {} of {k}", idx + 1)))?;
            last = ln;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|p| p.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err(ln, format!("expected `a_k b_k`, got `{line}`")))?;
            if vals.len() != 2 {
                return Err(err(ln, format!("expected 2 values, got {}", vals.len())));
            }
            cos.push(vals[0]);
            sin.push(vals[1]);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(err(ln, "unexpected trailing content".into()));
        }
        Self::with_samples(a0, cos, sin, n_samples).map_err(|e| match e {
            Error::InvalidShape(m) => err(1, m),
            other => other,
        })
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_file_string())
    }
}
