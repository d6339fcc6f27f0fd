//! Bilinear finite elements on the tensor grid `(θ, t)` mapped to the
//! exterior by `x(θ, t) = (ρ(θ) + t)(cos θ, sin θ)`.
//!
//! With `r = ρ + t` the map has Jacobian determinant `r` and
//! `|∇u|² = u_t² + (u_θ − ρ' u_t)² / r²`, so every element integral is
//! evaluated with the exact metric at 3×3 Gauss points. The outer ring
//! `t = T` carries a homogeneous Dirichlet condition and is eliminated.

use std::f64::consts::PI;

use super::sparse::CsrMatrix;
use super::MeshSpec;
use crate::error::Result;
use crate::geometry::DomainShape;

const GAUSS3_NODES: [f64; 3] = [0.112_701_665_379_258_3, 0.5, 0.887_298_334_620_741_7];
const GAUSS3_WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

/// Node layout of the tensor grid and its degree-of-freedom numbering.
///
/// Angular indices are interleaved (`0, 1, n-1, 2, n-2, …`) so that the
/// periodic neighbours stay close and the band stays `O(n_t)` wide.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid {
    pub theta: Vec<f64>,
    /// `t_0 = 0 < … < t_{n_t} = T`; the last ring is Dirichlet.
    pub t: Vec<f64>,
    slot: Vec<usize>,
}

impl TensorGrid {
    pub fn new(mesh: &MeshSpec) -> Self {
        let n = mesh.n_theta;
        let theta = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
        let slot = (0..n)
            .map(|i| {
                if i == 0 {
                    0
                } else if i <= n / 2 {
                    2 * i - 1
                } else {
                    2 * (n - i)
                }
            })
            .collect();
        Self {
            theta,
            t: mesh.radial_nodes(),
            slot,
        }
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    /// Number of free rings (excluding the Dirichlet ring).
    pub fn n_rings(&self) -> usize {
        self.t.len() - 1
    }

    pub fn n_dofs(&self) -> usize {
        self.n_theta() * self.n_rings()
    }

    pub fn dof(&self, i: usize, j: usize) -> usize {
        self.slot[i] * self.n_rings() + j
    }

    /// Polar coordinates `(r, θ)` of node `(i, j)`.
    pub fn node_polar(&self, shape: &DomainShape, i: usize, j: usize) -> (f64, f64) {
        let th = self.theta[i];
        (shape.rho(th) + self.t[j], th)
    }

    /// Evaluate `f(r, θ)` at every free node, in dof order.
    pub fn interpolate(&self, shape: &DomainShape, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n_dofs()];
        for i in 0..self.n_theta() {
            let rho = shape.rho(self.theta[i]);
            for j in 0..self.n_rings() {
                out[self.dof(i, j)] = f(rho + self.t[j], self.theta[i]);
            }
        }
        out
    }
}

/// Assembled matrices: `a(u,u) = uᵀ(K + αB)u`, `‖u‖² = uᵀMu`.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub grid: TensorGrid,
    pub alpha: f64,
    /// `∫ ∇u·∇v`.
    pub stiffness: CsrMatrix,
    /// `∮ u v dσ` on the inner boundary (not yet multiplied by `α`).
    pub boundary: CsrMatrix,
    /// `∫ u v`.
    pub mass: CsrMatrix,
}

impl Discretization {
    /// `K + αB`.
    pub fn robin_matrix(&self) -> CsrMatrix {
        self.stiffness.axpy(self.alpha, &self.boundary)
    }
}

fn pattern(grid: &TensorGrid) -> Vec<Vec<usize>> {
    let (n, m) = (grid.n_theta(), grid.n_rings());
    let mut rows = vec![Vec::new(); grid.n_dofs()];
    for i in 0..n {
        for j in 0..m {
            let row = &mut rows[grid.dof(i, j)];
            for di in [n - 1, 0, 1] {
                let ii = (i + di) % n;
                for jj in j.saturating_sub(1)..(j + 2).min(m) {
                    row.push(grid.dof(ii, jj));
                }
            }
            row.sort_unstable();
            row.dedup();
        }
    }
    rows
}

/// Assemble stiffness, boundary and mass matrices.
pub fn assemble(shape: &DomainShape, alpha: f64, mesh: &MeshSpec) -> Result<Discretization> {
    mesh.validate()?;
    let grid = TensorGrid::new(mesh);
    let (n, m) = (grid.n_theta(), grid.n_rings());
    let rows = pattern(&grid);
    let mut stiffness = CsrMatrix::from_pattern(rows.clone());
    let mut boundary = CsrMatrix::from_pattern(rows.clone());
    let mut mass = CsrMatrix::from_pattern(rows);

    let dtheta = 2.0 * PI / n as f64;
    // ρ, ρ' at the angular Gauss points of each column of elements
    let mut rho_q = vec![[(0.0, 0.0); 3]; n];
    for (i, q) in rho_q.iter_mut().enumerate() {
        for (a, &xi) in GAUSS3_NODES.iter().enumerate() {
            let (r, d, _) = shape.rho_derivatives(grid.theta[i] + xi * dtheta);
            q[a] = (r, d);
        }
    }

    for i in 0..n {
        let ip = (i + 1) % n;
        for j in 0..m {
            let h = grid.t[j + 1] - grid.t[j];
            // local nodes: (i,j), (i+1,j), (i,j+1), (i+1,j+1)
            let mut ke = [[0.0; 4]; 4];
            let mut me = [[0.0; 4]; 4];
            for (a, &xi) in GAUSS3_NODES.iter().enumerate() {
                let (rho, drho) = rho_q[i][a];
                for (b, &eta) in GAUSS3_NODES.iter().enumerate() {
                    let w = GAUSS3_WEIGHTS[a] * GAUSS3_WEIGHTS[b] * dtheta * h;
                    let r = rho + grid.t[j] + eta * h;
                    let nval = [(1.0 - xi) * (1.0 - eta), xi * (1.0 - eta), (1.0 - xi) * eta, xi * eta];
                    let dxi = [-(1.0 - eta), 1.0 - eta, -eta, eta];
                    let deta = [-(1.0 - xi), -xi, 1.0 - xi, xi];
                    let mut ut = [0.0; 4];
                    let mut ang = [0.0; 4];
                    for p in 0..4 {
                        ut[p] = deta[p] / h;
                        ang[p] = dxi[p] / dtheta - drho * ut[p];
                    }
                    for p in 0..4 {
                        for q in 0..4 {
                            ke[p][q] += w * (ut[p] * ut[q] * r + ang[p] * ang[q] / r);
                            me[p][q] += w * nval[p] * nval[q] * r;
                        }
                    }
                }
            }
            let nodes = [(i, j), (ip, j), (i, j + 1), (ip, j + 1)];
            for (p, &(pi, pj)) in nodes.iter().enumerate() {
                if pj >= m {
                    continue;
                }
                let row = grid.dof(pi, pj);
                for (q, &(qi, qj)) in nodes.iter().enumerate() {
                    if qj >= m {
                        continue;
                    }
                    let col = grid.dof(qi, qj);
                    stiffness.add(row, col, ke[p][q]);
                    mass.add(row, col, me[p][q]);
                }
            }
        }

        // inner boundary edge t = 0, line element √(ρ² + ρ'²) dθ
        let mut be = [[0.0; 2]; 2];
        for (a, &xi) in GAUSS3_NODES.iter().enumerate() {
            let (rho, drho) = rho_q[i][a];
            let w = GAUSS3_WEIGHTS[a] * dtheta * rho.hypot(drho);
            let nval = [1.0 - xi, xi];
            for p in 0..2 {
                for q in 0..2 {
                    be[p][q] += w * nval[p] * nval[q];
                }
            }
        }
        let edge = [grid.dof(i, 0), grid.dof(ip, 0)];
        for p in 0..2 {
            for q in 0..2 {
                boundary.add(edge[p], edge[q], be[p][q]);
            }
        }
    }

    Ok(Discretization {
        grid,
        alpha,
        stiffness,
        boundary,
        mass,
    })
}
