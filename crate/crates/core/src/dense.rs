//! Dense symmetric eigensolvers: Householder tridiagonalization followed by
//! the implicit QL iteration (the EISPACK `tred2`/`tql2` pair), plus the
//! Cholesky reduction of `A u = λ B u` to standard form.

#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Eigenvalues in ascending order; eigenvectors (if requested) are
/// `B`-orthonormal columns stored one vector per entry.
#[derive(Debug, Clone)]
pub struct DenseEigen {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Vec<f64>>>,
}

/// Row-major square matrix.
struct Square {
    n: usize,
    a: Vec<f64>,
}

impl Square {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }
}

/// Lower Cholesky factor of a row-major SPD matrix.
fn cholesky(n: usize, b: &[f64]) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut s = b[j * n + j];
        for k in 0..j {
            s -= l[j * n + k] * l[j * n + k];
        }
        if s <= 0.0 || !s.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let d = libm::sqrt(s);
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = b[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Ok(l)
}

/// Solves `L x = b` in place.
fn forward(n: usize, l: &[f64], x: &mut [f64]) {
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[i * n + k] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
}

/// Solves `Lᵀ x = b` in place.
fn backward(n: usize, l: &[f64], x: &mut [f64]) {
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
}

/// All eigenpairs of the dense pencil `(A, B)` given row-major, `B` SPD.
pub fn dense_generalized_eigen(
    n: usize,
    a: &[f64],
    b: &[f64],
    want_vectors: bool,
) -> Result<DenseEigen> {
    if a.len() != n * n || b.len() != n * n {
        return Err(Error::Dimension(alloc::format!(
            "expected {n}x{n} matrices"
        )));
    }
    let l = cholesky(n, b)?;
    // X = L⁻¹ A, column by column (A symmetric, so rows of A are its columns)
    let mut x = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.copy_from_slice(&a[j * n..(j + 1) * n]);
        forward(n, &l, &mut col);
        for i in 0..n {
            x[i * n + j] = col[i];
        }
    }
    // C = L⁻¹ Xᵀ
    let mut c = Square {
        n,
        a: vec![0.0; n * n],
    };
    for j in 0..n {
        col.copy_from_slice(&x[j * n..(j + 1) * n]);
        forward(n, &l, &mut col);
        for i in 0..n {
            *c.at_mut(i, j) = col[i];
        }
    }
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (c.at(i, j) + c.at(j, i));
            *c.at_mut(i, j) = s;
            *c.at_mut(j, i) = s;
        }
    }
    let (values, vecs) = symmetric_eigen(c, want_vectors);
    let vectors = vecs.map(|v| {
        (0..n)
            .map(|k| {
                let mut y: Vec<f64> = (0..n).map(|i| v.at(i, k)).collect();
                backward(n, &l, &mut y);
                y
            })
            .collect()
    });
    Ok(DenseEigen { values, vectors })
}

/// Eigen-decomposition of a symmetric tridiagonal matrix; eigenvectors are
/// returned as columns of a row-major `n x n` matrix.
#[cfg(test)]
pub(crate) fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut v = Square {
        n,
        a: vec![0.0; n * n],
    };
    for i in 0..n {
        *v.at_mut(i, i) = 1.0;
    }
    let mut d = diag.to_vec();
    // tql2 expects the sub-diagonal in e[1..n]
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(&off[..n.saturating_sub(1)]);
    tql2(&mut d, &mut e, Some(&mut v));
    sort_pairs(&mut d, Some(&mut v));
    (d, v.a)
}

/// Eigenpairs of a row-major symmetric matrix; eigenvectors are the columns
/// of the returned row-major matrix.
pub(crate) fn symmetric_eigen_rowmajor(n: usize, a: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let (vals, v) = symmetric_eigen(Square { n, a }, true);
    (vals, v.map(|v| v.a).unwrap_or_default())
}

fn symmetric_eigen(mut v: Square, want_vectors: bool) -> (Vec<f64>, Option<Square>) {
    let n = v.n;
    if n == 0 {
        return (Vec::new(), want_vectors.then_some(v));
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e, want_vectors);
    if want_vectors {
        tql2(&mut d, &mut e, Some(&mut v));
        sort_pairs(&mut d, Some(&mut v));
        (d, Some(v))
    } else {
        tql2(&mut d, &mut e, None);
        sort_pairs(&mut d, None);
        (d, None)
    }
}

fn sort_pairs(d: &mut [f64], mut v: Option<&mut Square>) {
    let n = d.len();
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in i + 1..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            if let Some(v) = v.as_deref_mut() {
                for r in 0..n {
                    v.a.swap(r * n + i, r * n + k);
                }
            }
        }
    }
}

/// Householder reduction to tridiagonal form. On exit `d` holds the
/// diagonal, `e[1..]` the sub-diagonal, and `v` the accumulated transform
/// when `accumulate` is set.
fn tred2(v: &mut Square, d: &mut [f64], e: &mut [f64], accumulate: bool) {
    let n = v.n;
    for j in 0..n {
        d[j] = v.at(n - 1, j);
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += libm::fabs(d[k]);
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v.at(i - 1, j);
                *v.at_mut(i, j) = 0.0;
                *v.at_mut(j, i) = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                *v.at_mut(j, i) = f;
                g = e[j] + v.at(j, j) * f;
                for k in j + 1..i {
                    let vkj = v.at(k, j);
                    g += vkj * d[k];
                    e[k] += vkj * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    *v.at_mut(k, j) -= f * e[k] + g * d[k];
                }
                d[j] = v.at(i - 1, j);
                *v.at_mut(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for (j, dj) in d.iter_mut().enumerate() {
            *dj = v.at(j, j);
        }
        e[0] = 0.0;
        return;
    }
    for i in 0..n - 1 {
        let vii = v.at(i, i);
        *v.at_mut(n - 1, i) = vii;
        *v.at_mut(i, i) = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v.at(k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v.at(k, i + 1) * v.at(k, j);
                }
                for k in 0..=i {
                    *v.at_mut(k, j) -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            *v.at_mut(k, i + 1) = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v.at(n - 1, j);
        *v.at_mut(n - 1, j) = 0.0;
    }
    *v.at_mut(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iteration on the tridiagonal `(d, e)`, with `e[1..]` the
/// sub-diagonal. Eigenvectors are accumulated into `v` when given.
fn tql2(d: &mut [f64], e: &mut [f64], mut v: Option<&mut Square>) {
    let n = d.len();
    if n == 0 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(libm::fabs(d[l]) + libm::fabs(e[l]));
        let mut m = l;
        while m < n - 1 && libm::fabs(e[m]) > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..n {
                            let vk1 = v.at(k, i + 1);
                            let vk = v.at(k, i);
                            *v.at_mut(k, i + 1) = s * vk + c * vk1;
                            *v.at_mut(k, i) = c * vk - s * vk1;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if libm::fabs(e[l]) <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}
