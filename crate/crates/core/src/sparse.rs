//! Symmetric sparse matrices in compressed-row form.
//!
//! Both triangles are stored; column indices within a row are sorted.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymCsr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SymCsr {
    /// Builds a matrix with the pattern of `entries` (both `(i, j)` and
    /// `(j, i)` are added) and zero values.
    pub fn from_pattern(n: usize, entries: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (i, j) in entries {
            pairs.push((i, j));
            if i != j {
                pairs.push((j, i));
            }
        }
        for i in 0..n {
            pairs.push((i, i));
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _) in &pairs {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let cols: Vec<usize> = pairs.iter().map(|&(_, j)| j).collect();
        let values = vec![0.0; cols.len()];
        Self {
            n,
            row_ptr,
            cols,
            values,
        }
    }

    /// Sums symmetric triplets; `(i, j, v)` contributes `v` to both `(i, j)`
    /// and `(j, i)` when `i != j`.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut m = Self::from_pattern(n, triplets.iter().map(|&(i, j, _)| (i, j)));
        for &(i, j, v) in triplets {
            m.add(i, j, v);
            if i != j {
                m.add(j, i, v);
            }
        }
        m
    }

    /// Dense row-major input; only the upper triangle is read.
    pub fn from_dense(n: usize, dense: &[f64]) -> Self {
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in i..n {
                let v = dense[i * n + j];
                if v != 0.0 || i == j {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, &triplets)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.values[r])
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_ptr[i];
        self.cols[start..self.row_ptr[i + 1]]
            .binary_search(&j)
            .ok()
            .map(|p| start + p)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |p| self.values[p])
    }

    /// Adds to a single stored entry (not mirrored). Panics if `(i, j)` is
    /// outside the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let p = self.position(i, j).expect("entry outside sparsity pattern");
        self.values[p] += v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn same_pattern(&self, other: &SymCsr) -> bool {
        self.n == other.n && self.row_ptr == other.row_ptr && self.cols == other.cols
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (c, v) = self.row(i);
            *yi = c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum();
        }
    }

    /// `xᵀ M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| {
                let (c, v) = self.row(i);
                x[i] * c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum::<f64>()
            })
            .sum()
    }

    /// `alpha * self + beta * other` on the union of both patterns.
    pub fn linear_combination(&self, alpha: f64, other: &SymCsr, beta: f64) -> Result<SymCsr> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("{} vs {}", self.n, other.n)));
        }
        if self.same_pattern(other) {
            let values = self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| alpha * a + beta * b)
                .collect();
            return Ok(SymCsr {
                values,
                ..self.clone()
            });
        }
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut cols = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.n {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let ja = ca.get(p).copied().unwrap_or(usize::MAX);
                let jb = cb.get(q).copied().unwrap_or(usize::MAX);
                if ja < jb {
                    cols.push(ja);
                    values.push(alpha * va[p]);
                    p += 1;
                } else if jb < ja {
                    cols.push(jb);
                    values.push(beta * vb[q]);
                    q += 1;
                } else {
                    cols.push(ja);
                    values.push(alpha * va[p] + beta * vb[q]);
                    p += 1;
                    q += 1;
                }
            }
            row_ptr[i + 1] = cols.len();
        }
        Ok(SymCsr {
            n: self.n,
            row_ptr,
            cols,
            values,
        })
    }

    /// Entries `(i, j, v)` with `i <= j`, row by row.
    pub fn upper_triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter()
                .zip(v)
                .filter(move |(&j, _)| j >= i)
                .map(move |(&j, &x)| (i, j, x))
        })
    }

    /// Dense row-major copy; meant for small systems and tests.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                d[i * self.n + j] = x;
            }
        }
        d
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| {
            let (c, v) = self.row(i);
            c.iter()
                .zip(v)
                .all(|(&j, &x)| libm::fabs(x - self.get(j, i)) <= tol * (1.0 + libm::fabs(x)))
        })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
