//! Negative eigenvalues of the Robin Laplacian on a truncated exterior
//! domain, by bilinear finite elements on the mapped tensor grid.

pub mod assemble;
pub mod eigs;
pub mod sparse;

use std::fmt;

pub use assemble::{assemble, Discretization, TensorGrid};
pub use eigs::{solve_lowest, EigenPairs, SolverOptions};
pub use sparse::{BandCholesky, CsrMatrix};

use crate::disk::{lambda1_disk, lambda2_disk};
use crate::error::{require_negative, Error, Result};
use crate::geometry::{Constraint, DomainShape};

/// Indicator level above which the truncation depth is considered too small.
pub const TRUNCATION_WARN: f64 = 1e-6;
/// Relative gap below which neighbouring eigenvalues form a cluster.
pub const CLUSTER_TOL: f64 = 1e-5;

/// Tensor grid: `n_theta` angular cells, `n_t` radial cells on `[0, T]`,
/// radial steps growing geometrically by `grading`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshSpec {
    pub n_theta: usize,
    pub n_t: usize,
    pub depth: f64,
    pub grading: f64,
}

impl MeshSpec {
    pub fn new(n_theta: usize, n_t: usize, depth: f64, grading: f64) -> Result<Self> {
        let m = Self {
            n_theta,
            n_t,
            depth,
            grading,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 64 || !self.n_theta.is_multiple_of(2) {
            return Err(Error::InvalidMesh(format!(
                "n_theta must be even and at least 64, got {}",
                self.n_theta
            )));
        }
        if self.n_t < 32 {
            return Err(Error::InvalidMesh(format!("n_t must be at least 32, got {}", self.n_t)));
        }
        if !(self.depth.is_finite() && self.depth > 0.0) {
            return Err(Error::InvalidMesh(format!("depth must be positive, got {}", self.depth)));
        }
        if !(1.0..=1.3).contains(&self.grading) {
            return Err(Error::InvalidMesh(format!(
                "grading must lie in [1, 1.3], got {}",
                self.grading
            )));
        }
        Ok(())
    }

    /// Size of the first radial step.
    pub fn first_step(&self) -> f64 {
        let g = self.grading;
        if g == 1.0 {
            self.depth / self.n_t as f64
        } else {
            self.depth * (g - 1.0) / (g.powi(self.n_t as i32) - 1.0)
        }
    }

    /// `0 = t_0 < t_1 < … < t_{n_t} = T`.
    pub fn radial_nodes(&self) -> Vec<f64> {
        let g = self.grading;
        let n = self.n_t;
        let mut t: Vec<f64> = if g == 1.0 {
            (0..=n).map(|j| self.depth * j as f64 / n as f64).collect()
        } else {
            let denom = g.powi(n as i32) - 1.0;
            (0..=n).map(|j| self.depth * (g.powi(j as i32) - 1.0) / denom).collect()
        };
        t[n] = self.depth;
        t
    }

    /// Halve every cell. With grading `√g` the old nodes are kept, so the
    /// discrete spaces are nested.
    pub fn refined(&self) -> Self {
        Self {
            n_theta: 2 * self.n_theta,
            n_t: 2 * self.n_t,
            depth: self.depth,
            grading: self.grading.sqrt(),
        }
    }

    /// Same cell counts and grading at a different depth.
    pub fn with_depth(&self, depth: f64) -> Self {
        Self { depth, ..*self }
    }

    /// Default mesh (256 × 128, grading 1.05) with depth `40/ω` past the
    /// outermost boundary point, `ω` taken from the area-matched disk
    /// (the ground-state rate `ξ` when that disk has no second eigenvalue).
    pub fn default_for(shape: &DomainShape, alpha: f64) -> Result<Self> {
        require_negative("alpha", alpha)?;
        let r_ref = shape.matched_disk_radius(Constraint::Area);
        let rate = match lambda2_disk(r_ref, alpha)? {
            Some(e) => e.wavenumber,
            None => lambda1_disk(r_ref, alpha)?.wavenumber,
        };
        let depth = shape.max_rho() - shape.min_rho() + r_ref + 40.0 / rate;
        Self::new(256, 128, depth, 1.05)
    }
}

impl fmt::Display for MeshSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} T={} grading={}",
            self.n_theta, self.n_t, self.depth, self.grading
        )
    }
}

/// Negative eigenvalues of the truncated problem.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Nondecreasing, all negative.
    pub eigenvalues: Vec<f64>,
    pub n_converged: usize,
    pub residual_norms: Vec<f64>,
    pub mesh: MeshSpec,
    /// Largest `M`-weighted mass fraction of an eigenvector in `t > 0.9 T`.
    pub truncation_indicator: f64,
    /// Index groups of eigenvalues agreeing within [`CLUSTER_TOL`].
    pub clusters: Vec<Vec<usize>>,
    /// `M`-orthonormal eigenvectors in dof order of [`TensorGrid`].
    pub vectors: Vec<Vec<f64>>,
    pub grid: TensorGrid,
    pub shift: f64,
    pub iterations: usize,
}

impl EigenResult {
    pub fn lambda1(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn lambda2(&self) -> Option<f64> {
        self.eigenvalues.get(1).copied()
    }

    pub fn truncation_warning(&self) -> bool {
        self.truncation_indicator > TRUNCATION_WARN
    }
}

fn clusters(values: &[f64]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(c) if (v - values[c[0]]).abs() <= CLUSTER_TOL * v.abs() => c.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

fn outer_shell_fraction(disc: &Discretization, v: &[f64]) -> f64 {
    let grid = &disc.grid;
    let cut = 0.9 * grid.t[grid.t.len() - 1];
    let mut outer = vec![0.0; v.len()];
    for i in 0..grid.n_theta() {
        for j in 0..grid.n_rings() {
            if grid.t[j] > cut {
                let d = grid.dof(i, j);
                outer[d] = v[d];
            }
        }
    }
    let total = disc.mass.bilinear(v, v);
    (disc.mass.bilinear(&outer, &outer) / total).max(0.0)
}

/// Solve an assembled problem for at most `k` negative eigenvalues.
pub fn solve_discretization(
    disc: &Discretization,
    mesh: MeshSpec,
    k: usize,
    opts: &SolverOptions,
) -> Result<EigenResult> {
    require_negative("alpha", disc.alpha)?;
    let a = disc.robin_matrix();
    let shift = -disc.alpha * disc.alpha - 1.0;
    let opts = SolverOptions {
        negative_only: true,
        ..opts.clone()
    };
    let pairs = solve_lowest(&a, &disc.mass, k, shift, &opts)?;
    let n_neg = pairs.values.iter().take_while(|&&v| v < 0.0).count();
    let vectors: Vec<Vec<f64>> = pairs.vectors.into_iter().take(n_neg).collect();
    let truncation_indicator = vectors
        .iter()
        .map(|v| outer_shell_fraction(disc, v))
        .fold(0.0, f64::max);
    let eigenvalues = pairs.values[..n_neg].to_vec();
    Ok(EigenResult {
        clusters: clusters(&eigenvalues),
        n_converged: n_neg,
        residual_norms: pairs.residuals[..n_neg].to_vec(),
        eigenvalues,
        mesh,
        truncation_indicator,
        vectors,
        grid: disc.grid.clone(),
        shift: pairs.shift,
        iterations: pairs.iterations,
    })
}

/// Assemble and solve for at most `k` negative eigenvalues outside `shape`.
pub fn eig_exterior(shape: &DomainShape, alpha: f64, mesh: &MeshSpec, k: usize) -> Result<EigenResult> {
    eig_exterior_with(shape, alpha, mesh, k, &SolverOptions::default())
}

pub fn eig_exterior_with(
    shape: &DomainShape,
    alpha: f64,
    mesh: &MeshSpec,
    k: usize,
    opts: &SolverOptions,
) -> Result<EigenResult> {
    require_negative("alpha", alpha)?;
    let disc = assemble(shape, alpha, mesh)?;
    solve_discretization(&disc, *mesh, k, opts)
}

/// One row of a refinement study.
#[derive(Debug, Clone)]
pub struct StudyLevel {
    pub mesh: MeshSpec,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub levels: Vec<StudyLevel>,
    /// Observed order per eigenvalue index from the last three levels.
    pub orders: Vec<f64>,
    /// Richardson extrapolation per eigenvalue index.
    pub extrapolated: Vec<f64>,
}

/// Observed order and Richardson limit from three values on meshes refined
/// by a factor of two.
pub fn richardson(coarse: f64, mid: f64, fine: f64) -> (f64, f64) {
    let ratio = (coarse - mid) / (mid - fine);
    let order = ratio.abs().log2();
    let factor = 2f64.powf(order) - 1.0;
    (order, fine + (fine - mid) / factor)
}

/// Solve on every mesh of a doubling ladder and extrapolate.
pub fn convergence_study(
    shape: &DomainShape,
    alpha: f64,
    ladder: &[MeshSpec],
    k: usize,
) -> Result<ConvergenceStudy> {
    if ladder.len() < 3 {
        return Err(Error::InvalidMesh(format!(
            "a convergence study needs at least 3 meshes, got {}",
            ladder.len()
        )));
    }
    let levels = ladder
        .iter()
        .map(|mesh| {
            eig_exterior(shape, alpha, mesh, k).map(|r| StudyLevel {
                mesh: *mesh,
                eigenvalues: r.eigenvalues,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = levels.iter().map(|l| l.eigenvalues.len()).min().unwrap_or(0);
    let last = &levels[levels.len() - 3..];
    let (orders, extrapolated) = (0..n)
        .map(|i| richardson(last[0].eigenvalues[i], last[1].eigenvalues[i], last[2].eigenvalues[i]))
        .unzip();
    Ok(ConvergenceStudy {
        levels,
        orders,
        extrapolated,
    })
}

/// `base`, `base.refined()`, … with `levels` entries.
pub fn doubling_ladder(base: MeshSpec, levels: usize) -> Vec<MeshSpec> {
    std::iter::successors(Some(base), |m| Some(m.refined()))
        .take(levels)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_validation() {
        assert!(MeshSpec::new(64, 32, 10.0, 1.0).is_ok());
        assert!(MeshSpec::new(63, 32, 10.0, 1.0).is_err());
        assert!(MeshSpec::new(62, 32, 10.0, 1.0).is_err());
        assert!(MeshSpec::new(64, 31, 10.0, 1.0).is_err());
        assert!(MeshSpec::new(64, 32, 0.0, 1.0).is_err());
        assert!(MeshSpec::new(64, 32, 10.0, 1.31).is_err());
        assert!(MeshSpec::new(64, 32, 10.0, 0.99).is_err());
    }

    #[test]
    fn radial_nodes_are_graded() {
        let m = MeshSpec::new(64, 40, 12.0, 1.1).unwrap();
        let t = m.radial_nodes();
        assert_eq!(t.len(), 41);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[40], 12.0);
        assert!((t[1] - m.first_step()).abs() < 1e-15);
        for w in t.windows(3) {
            let ratio = (w[2] - w[1]) / (w[1] - w[0]);
            assert!((ratio - 1.1).abs() < 1e-9);
        }
    }

    #[test]
    fn refinement_is_nested() {
        let m = MeshSpec::new(64, 32, 8.0, 1.08).unwrap();
        let coarse = m.radial_nodes();
        let fine = m.refined().radial_nodes();
        for (j, &t) in coarse.iter().enumerate() {
            assert!((fine[2 * j] - t).abs() < 1e-12 * 8.0);
        }
    }

    #[test]
    fn clusters_group_close_values() {
        let c = clusters(&[-4.0, -1.0, -1.0 + 1e-7, -0.5]);
        assert_eq!(c, vec![vec![0], vec![1, 2], vec![3]]);
    }

    #[test]
    fn richardson_recovers_quadratic_limit() {
        let f = |h: f64| 2.0 + 3.0 * h * h;
        let (p, lim) = richardson(f(0.4), f(0.2), f(0.1));
        assert!((p - 2.0).abs() < 1e-12);
        assert!((lim - 2.0).abs() < 1e-12);
    }
}
