//! Lowest eigenpairs of the pencil `A u = λ M u` by shift-invert block
//! subspace iteration with Rayleigh–Ritz projection.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::{BandCholesky, CsrMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Block size; at least `k + 3` is always used.
    pub block: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub max_shift_retries: usize,
    /// Move the shift up towards the converging `λ₁` once it has settled.
    pub adaptive_shift: bool,
    /// Only negative Ritz values need to converge; a nonnegative one only
    /// has to settle within `1e-6·|λ₁|`.
    pub negative_only: bool,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            block: 0,
            tol: 1e-10,
            max_iter: 3000,
            max_shift_retries: 30,
            adaptive_shift: true,
            negative_only: false,
            seed: 0x5eed_0fea_u64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Ascending.
    pub values: Vec<f64>,
    /// `M`-orthonormal eigenvectors.
    pub vectors: Vec<Vec<f64>>,
    /// `‖A u − λ M u‖₂ / ‖u‖_M`.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub shift: f64,
}

/// Column-major block of `p` vectors of length `n`, stored row-major by node.
struct Block {
    n: usize,
    p: usize,
    data: Vec<f64>,
}

impl Block {
    fn column(&self, c: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.data[i * self.p + c]).collect()
    }

    fn apply(&self, a: &CsrMatrix) -> Block {
        let mut out = vec![0.0; self.n * self.p];
        for i in 0..self.n {
            let dst = &mut out[i * self.p..(i + 1) * self.p];
            for (j, v) in a.row(i) {
                for (d, s) in dst.iter_mut().zip(&self.data[j * self.p..(j + 1) * self.p]) {
                    *d += v * s;
                }
            }
        }
        Block {
            n: self.n,
            p: self.p,
            data: out,
        }
    }

    /// `selfᵀ other` as a `p × p` matrix.
    fn gram(&self, other: &Block) -> DMatrix<f64> {
        let p = self.p;
        let mut g = DMatrix::zeros(p, p);
        for i in 0..self.n {
            let x = &self.data[i * p..(i + 1) * p];
            let y = &other.data[i * p..(i + 1) * p];
            for a in 0..p {
                for b in 0..p {
                    g[(a, b)] += x[a] * y[b];
                }
            }
        }
        g
    }

    fn times(&self, q: &DMatrix<f64>) -> Block {
        let p = self.p;
        let mut out = vec![0.0; self.n * p];
        for i in 0..self.n {
            let x = &self.data[i * p..(i + 1) * p];
            let dst = &mut out[i * p..(i + 1) * p];
            for (b, d) in dst.iter_mut().enumerate() {
                *d = (0..p).map(|a| x[a] * q[(a, b)]).sum();
            }
        }
        Block {
            n: self.n,
            p,
            data: out,
        }
    }
}

/// Rayleigh–Ritz on span(Y): returns ascending Ritz values and the
/// coefficient matrix whose columns make `Y Q` `M`-orthonormal.
fn rayleigh_ritz(a_hat: DMatrix<f64>, m_hat: DMatrix<f64>) -> Option<(Vec<f64>, DMatrix<f64>)> {
    let m_sym = (&m_hat + m_hat.transpose()) * 0.5;
    let a_sym = (&a_hat + a_hat.transpose()) * 0.5;
    let chol = m_sym.cholesky()?;
    let l = chol.l();
    let l_inv = l.clone().try_inverse()?;
    let c = &l_inv * a_sym * l_inv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let v = DMatrix::from_fn(order.len(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    let q = l_inv.transpose() * v;
    Some((values, q))
}

fn factor_with_retries(
    a: &CsrMatrix,
    m: &CsrMatrix,
    mut shift: f64,
    retries: usize,
) -> Result<(BandCholesky, f64)> {
    let mut last = None;
    for _ in 0..=retries {
        match BandCholesky::factor_shifted(a, m, shift) {
            Ok(f) => return Ok((f, shift)),
            Err(e) => {
                last = Some(e);
                shift = if shift < 0.0 { shift * 1.5 } else { -1.0 - shift };
            }
        }
    }
    Err(last.expect("at least one attempt"))
}

/// The `k` lowest eigenpairs of `A u = λ M u`, starting from shift `shift`
/// (which must lie below the spectrum; it is pushed down by ×1.5 on failure).
pub fn solve_lowest(
    a: &CsrMatrix,
    m: &CsrMatrix,
    k: usize,
    shift: f64,
    opts: &SolverOptions,
) -> Result<EigenPairs> {
    assert!(k >= 1, "need at least one eigenpair");
    let n = a.dim();
    let p = opts.block.max(k + 3).min(n);
    let (mut factor, mut shift) = factor_with_retries(a, m, shift, opts.max_shift_retries)?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x = Block {
        n,
        p,
        data: (0..n * p).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    };
    let mut prev: Vec<f64> = vec![f64::NAN; p];
    let mut shifted = !opts.adaptive_shift;

    for it in 1..=opts.max_iter {
        let mx = x.apply(m);
        let mut y = Block {
            n,
            p,
            data: mx.data.clone(),
        };
        factor.solve_many(&mut y.data, p);
        let my = y.apply(m);
        let m_hat = y.gram(&my);
        // Yᵀ A Y = Yᵀ M X + σ Yᵀ M Y because (A − σM) Y = M X
        let a_hat = y.gram(&mx) + &m_hat * shift;
        let (values, q) = rayleigh_ritz(a_hat, m_hat).ok_or(Error::NoConvergence {
            what: "Rayleigh-Ritz projection",
            iterations: it,
        })?;
        x = y.times(&q);

        let converged = it > 2
            && (0..k).all(|i| {
                let change = (values[i] - prev[i]).abs();
                if opts.negative_only && values[i] >= 0.0 {
                    change <= 1e-6 * values[0].abs()
                } else {
                    change <= opts.tol * values[i].abs().max(1e-300)
                }
            });
        let settled = it > 4 && (values[0] - prev[0]).abs() <= 1e-4 * values[0].abs();
        prev = values;

        if converged {
            let vectors: Vec<Vec<f64>> = (0..k).map(|c| x.column(c)).collect();
            let residuals = vectors
                .iter()
                .zip(&prev)
                .map(|(v, &lam)| {
                    let av = a.mul(v);
                    let mv = m.mul(v);
                    let r2: f64 = av.iter().zip(&mv).map(|(x, y)| (x - lam * y).powi(2)).sum();
                    r2.sqrt() / m.bilinear(v, v).sqrt()
                })
                .collect();
            return Ok(EigenPairs {
                values: prev[..k].to_vec(),
                vectors,
                residuals,
                iterations: it,
                shift,
            });
        }

        if !shifted && settled {
            shifted = true;
            let lam1 = prev[0];
            let spread = (prev[k.min(p - 1)] - lam1).abs();
            let candidate = lam1 - 0.05 * lam1.abs() - 0.05 * spread;
            if candidate > shift {
                if let Ok(f) = BandCholesky::factor_shifted(a, m, candidate) {
                    factor = f;
                    shift = candidate;
                }
            }
        }
    }
    Err(Error::NoConvergence {
        what: "subspace iteration",
        iterations: opts.max_iter,
    })
}
