//! Compressed sparse row storage and a banded Cholesky factorization.

use std::io::Write;

use crate::error::{Error, Result};

/// Square CSR matrix with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the given sorted, deduplicated row patterns.
    pub fn from_pattern(rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        for r in rows {
            debug_assert!(r.windows(2).all(|w| w[0] < w[1]));
            cols.extend(r);
            row_ptr.push(cols.len());
        }
        let values = vec![0.0; cols.len()];
        Self {
            n,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn add(&mut self, row: usize, col: usize, v: f64) {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        let off = self.cols[range.clone()]
            .iter()
            .position(|&c| c == col)
            .unwrap_or_else(|| panic!("({row}, {col}) outside the sparsity pattern"));
        self.values[range.start + off] += v;
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        self.cols[range.clone()]
            .iter()
            .position(|&c| c == col)
            .map_or(0.0, |off| self.values[range.start + off])
    }

    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        self.cols[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    /// `self + c·other`; both must share the same pattern.
    pub fn axpy(&self, c: f64, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.cols, other.cols, "patterns differ");
        let mut out = self.clone();
        for (v, o) in out.values.iter_mut().zip(&other.values) {
            *v += c * o;
        }
        out
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n).map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<f64>()).sum()
    }

    pub fn sum_all(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    /// Coordinate dump: one `row col value` triplet per line, 0-based.
    pub fn write_triplets(&self, mut w: impl Write) -> std::io::Result<()> {
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                writeln!(w, "{i} {j} {v:.17e}")?;
            }
        }
        Ok(())
    }
}

/// Lower Cholesky factor of a symmetric positive definite band matrix.
///
/// Row `i` stores columns `i-b ..= i` contiguously.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    b: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    /// Factor `A − shift·M` where `A` and `M` share a sparsity pattern.
    pub fn factor_shifted(a: &CsrMatrix, m: &CsrMatrix, shift: f64) -> Result<Self> {
        let n = a.dim();
        let b = a.bandwidth();
        let w = b + 1;
        let mut l = vec![0.0; n * w];
        for i in 0..n {
            for ((j, va), (_, vm)) in a.row(i).zip(m.row(i)) {
                if j <= i {
                    l[i * w + j + b - i] = va - shift * vm;
                }
            }
        }
        for i in 0..n {
            let start_i = i.saturating_sub(b);
            for j in start_i..=i {
                let k0 = start_i.max(j.saturating_sub(b));
                let (ri, rj) = (i * w + b - i, j * w + b - j);
                let dot: f64 = l[ri + k0..ri + j]
                    .iter()
                    .zip(&l[rj + k0..rj + j])
                    .map(|(x, y)| x * y)
                    .sum();
                let v = l[ri + j] - dot;
                if i == j {
                    if v <= 0.0 || !v.is_finite() {
                        return Err(Error::Factorization { shift, pivot: i });
                    }
                    l[ri + i] = v.sqrt();
                } else {
                    l[ri + j] = v / l[rj + j];
                }
            }
        }
        Ok(Self { n, b, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve in place for `p` right-hand sides stored row-major (`x[i*p + c]`).
    pub fn solve_many(&self, x: &mut [f64], p: usize) {
        let (n, b, w) = (self.n, self.b, self.b + 1);
        assert_eq!(x.len(), n * p);
        let mut acc = vec![0.0; p];
        for i in 0..n {
            let start = i.saturating_sub(b);
            acc.iter_mut().for_each(|a| *a = 0.0);
            let row = &self.l[i * w + b - i..];
            for k in start..i {
                let lik = row[k];
                let xk = &x[k * p..k * p + p];
                for (a, &v) in acc.iter_mut().zip(xk) {
                    *a += lik * v;
                }
            }
            let d = row[i];
            for (c, a) in acc.iter().enumerate() {
                x[i * p + c] = (x[i * p + c] - a) / d;
            }
        }
        for i in (0..n).rev() {
            let start = i.saturating_sub(b);
            let row = &self.l[i * w + b - i..];
            let d = row[i];
            for c in 0..p {
                x[i * p + c] /= d;
            }
            let (head, tail) = x.split_at_mut(i * p);
            let xi = &tail[..p];
            for k in start..i {
                let lik = row[k];
                for (t, &v) in head[k * p..k * p + p].iter_mut().zip(xi) {
                    *t -= lik * v;
                }
            }
        }
    }

    pub fn solve(&self, x: &mut [f64]) {
        self.solve_many(x, 1);
    }
}
