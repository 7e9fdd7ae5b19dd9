//! Lowest eigenpairs of `A u = λ B u` and exact eigenvalue counts.
//!
//! Counting uses the inertia of an `L D Lᵀ` factorization of `A - E B`: the
//! number of negative pivots equals the number of eigenvalues below `E`.
//! Eigenpairs come from a shift-invert Lanczos process in the `B` inner
//! product with full reorthogonalization. A result is only returned once
//! every pair meets the residual tolerance *and* the inertia count just
//! above the largest returned eigenvalue agrees with the number of pairs
//! found, so missed copies of multiple eigenvalues are detected and hunted
//! down with fresh start vectors.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::dense::{dense_generalized_eigen, symmetric_eigen_rowmajor};
use crate::ldl::{LdlFactor, SymbolicLdl};
use crate::sparse::{axpy, dot, norm, SymCsr};
use crate::{Error, Result};

/// Systems up to this size are solved densely under [`EigenMethod::Auto`].
pub const DENSE_LIMIT: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    Auto,
    Dense,
    ShiftInvertLanczos,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Bound on `‖A u - λ B u‖ / ‖B u‖` for every returned pair.
    pub tolerance: f64,
    /// Seed of the start vectors.
    pub seed: u64,
    pub method: EigenMethod,
    /// Largest Krylov basis before giving up.
    pub max_basis: usize,
    /// Shift of the Lanczos operator; by default one below the spectrum is
    /// located with inertia checks.
    pub shift: Option<f64>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            seed: 0,
            method: EigenMethod::Auto,
            max_basis: 320,
            shift: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SpectralResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `B`-orthonormal.
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// Inertia counts `(E, #eigenvalues < E)` established while certifying.
    pub count_thresholds: Vec<(f64, usize)>,
}

impl SpectralResult {
    /// Number of returned eigenvalues strictly below `e`.
    pub fn returned_below(&self, e: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l < e).count()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Reusable inertia evaluation for one pencil: the ordering and elimination
/// tree are computed once, each shift costs one numeric factorization.
pub struct InertiaCounter<'a> {
    a: &'a SymCsr,
    b: &'a SymCsr,
    symbolic: Arc<SymbolicLdl>,
    a_diag: Vec<f64>,
    b_diag: Vec<f64>,
}

impl<'a> InertiaCounter<'a> {
    /// Orders the factorization by nested dissection of the matrix graph.
    pub fn new(a: &'a SymCsr, b: &'a SymCsr) -> Result<Self> {
        Self::build(a, b, None)
    }

    /// For pencils whose unknowns are criss-cross grid nodes: orders the
    /// factorization by grid-line separators, given each unknown's key.
    pub fn with_grid_keys(a: &'a SymCsr, b: &'a SymCsr, keys: &[[i64; 2]]) -> Result<Self> {
        if keys.len() != a.dim() {
            return Err(Error::Dimension(format!(
                "{} keys for dimension {}",
                keys.len(),
                a.dim()
            )));
        }
        Self::build(a, b, Some(keys))
    }

    fn build(a: &'a SymCsr, b: &'a SymCsr, keys: Option<&[[i64; 2]]>) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::Dimension(format!(
                "A is {0}x{0}, B is {1}x{1}",
                a.dim(),
                b.dim()
            )));
        }
        let b_diag = b.diagonal();
        if b_diag.iter().any(|&d| d.is_nan() || d <= 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let pattern = a.linear_combination(1.0, b, 1.0)?;
        Ok(Self {
            a,
            b,
            symbolic: match keys {
                Some(k) => SymbolicLdl::analyze_grid(&pattern, k),
                None => SymbolicLdl::analyze(&pattern),
            },
            a_diag: a.diagonal(),
            b_diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Typical eigenvalue magnitude, `max A_ii / B_ii`.
    pub fn eigenvalue_scale(&self) -> f64 {
        self.a_diag
            .iter()
            .zip(&self.b_diag)
            .map(|(a, b)| libm::fabs(*a) / b)
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE)
    }

    /// `L D Lᵀ` of `A - shift·B`.
    pub fn factor(&self, shift: f64) -> Result<LdlFactor> {
        let m = self.a.linear_combination(1.0, self.b, -shift)?;
        let scale: Vec<f64> = self
            .a_diag
            .iter()
            .zip(&self.b_diag)
            .map(|(a, b)| libm::fabs(*a) + libm::fabs(shift) * b)
            .collect();
        self.symbolic
            .factor(&m, &scale)
            .map_err(|p| Error::NearEigenvalue {
                shift,
                pivot_index: p.index,
                pivot_ratio: p.ratio,
            })
    }

    /// Number of eigenvalues strictly below `e`. Fails with
    /// [`Error::NearEigenvalue`] when `e` is numerically an eigenvalue.
    pub fn count_below(&self, e: f64) -> Result<usize> {
        Ok(self.factor(e)?.inertia().negative)
    }

    /// Like [`count_below`](Self::count_below) but, when `e` is numerically
    /// an eigenvalue, retries at `e - δ` with `δ = 10 ε s`, `100 ε s`, …
    /// where `s` is [`eigenvalue_scale`](Self::eigenvalue_scale). Returns the
    /// count and the abscissa finally used.
    pub fn count_below_perturbed(&self, e: f64) -> Result<(usize, f64)> {
        let mut delta = 10.0 * f64::EPSILON * self.eigenvalue_scale();
        let mut at = e;
        for _ in 0..12 {
            match self.count_below(at) {
                Ok(c) => return Ok((c, at)),
                Err(Error::NearEigenvalue { .. }) => {
                    at = e - delta;
                    delta *= 10.0;
                }
                Err(other) => return Err(other),
            }
        }
        self.count_below(at).map(|c| (c, at))
    }
}

/// Number of generalized eigenvalues of `(A, B)` strictly below `e`.
pub fn count_below(a: &SymCsr, b: &SymCsr, e: f64) -> Result<usize> {
    InertiaCounter::new(a, b)?.count_below(e)
}

/// `uᵀ A u / uᵀ B u`.
pub fn rayleigh_quotient(a: &SymCsr, b: &SymCsr, u: &[f64]) -> Result<f64> {
    if u.len() != a.dim() || u.len() != b.dim() {
        return Err(Error::Dimension(format!(
            "vector of length {} for dimension {}",
            u.len(),
            a.dim()
        )));
    }
    let den = b.quadratic_form(u);
    if den == 0.0 || u.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(a.quadratic_form(u) / den)
}

/// `‖A u - λ B u‖ / ‖B u‖`.
pub fn residual(a: &SymCsr, b: &SymCsr, lambda: f64, u: &[f64]) -> f64 {
    let au = a.mul_vec(u);
    let bu = b.mul_vec(u);
    let r: f64 = au
        .iter()
        .zip(&bu)
        .map(|(x, y)| (x - lambda * y) * (x - lambda * y))
        .sum();
    libm::sqrt(r) / norm(&bu).max(f64::MIN_POSITIVE)
}

/// The `k` smallest eigenpairs of `A u = λ B u`.
pub fn lowest_eigenpairs(
    a: &SymCsr,
    b: &SymCsr,
    k: usize,
    options: &EigenOptions,
) -> Result<SpectralResult> {
    lowest_eigenpairs_with(&InertiaCounter::new(a, b)?, k, options)
}

/// As [`lowest_eigenpairs`], reusing the factorization layout of `counter`.
pub fn lowest_eigenpairs_with(
    counter: &InertiaCounter<'_>,
    k: usize,
    options: &EigenOptions,
) -> Result<SpectralResult> {
    let n = counter.dim();
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k < {n}, got k = {k}"
        )));
    }
    if options.tolerance.is_nan() || options.tolerance <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            options.tolerance
        )));
    }
    let dense = match options.method {
        EigenMethod::Dense => true,
        EigenMethod::ShiftInvertLanczos => false,
        EigenMethod::Auto => n <= DENSE_LIMIT,
    };
    if dense {
        dense_lowest(counter, k, options)
    } else {
        Lanczos::new(counter, k, options)?.run()
    }
}

fn dense_lowest(
    counter: &InertiaCounter<'_>,
    k: usize,
    options: &EigenOptions,
) -> Result<SpectralResult> {
    let (a, b) = (counter.a, counter.b);
    let n = a.dim();
    let eig = dense_generalized_eigen(n, &a.to_dense(), &b.to_dense(), true)?;
    let all = eig.values.clone();
    let vectors = eig.vectors.unwrap_or_default();
    let mut out = SpectralResult::default();
    for (lambda, mut u) in eig.values.into_iter().zip(vectors).take(k) {
        let s = libm::sqrt(b.quadratic_form(&u));
        u.iter_mut().for_each(|x| *x /= s);
        out.residuals.push(residual(a, b, lambda, &u));
        out.eigenvalues.push(lambda);
        out.eigenvectors.push(u);
    }
    if out.max_residual() > options.tolerance {
        return Err(Error::NoConvergence {
            requested: k,
            residuals: out.residuals,
        });
    }
    let (e, c) = certify(counter, out.eigenvalues[k - 1], options.tolerance)?;
    out.count_thresholds.push((e, c));
    if c != all.iter().filter(|&&l| l < e).count() {
        return Err(Error::NoConvergence {
            requested: k,
            residuals: out.residuals,
        });
    }
    Ok(out)
}

/// Abscissa just above `top` that is safely away from every eigenvalue, and
/// the inertia count there.
fn certify(counter: &InertiaCounter<'_>, top: f64, tol: f64) -> Result<(f64, usize)> {
    let mut eps = 1e-6 * libm::fabs(top) + 10.0 * tol;
    for _ in 0..8 {
        let e = top + eps;
        match counter.count_below(e) {
            Ok(c) => return Ok((e, c)),
            Err(Error::NearEigenvalue { .. }) => eps *= 3.0,
            Err(other) => return Err(other),
        }
    }
    counter
        .count_below_perturbed(top + eps)
        .map(|(c, at)| (at, c))
}

/// Shift-invert Arnoldi in the `B` inner product. The operator
/// `(A - σB)⁻¹B` is `B`-self-adjoint, so the projected matrix is symmetric
/// and only its upper triangle is kept.
struct Lanczos<'c, 'a> {
    counter: &'c InertiaCounter<'a>,
    k: usize,
    options: EigenOptions,
    factor: LdlFactor,
    shift: f64,
    rng: ChaCha8Rng,
    /// `B`-orthonormal basis.
    basis: Vec<Vec<f64>>,
    /// `projected[j][i] = qᵢᵀ B Op q_j` for `i <= j`.
    projected: Vec<Vec<f64>>,
}

/// `(eigenvalue, eigenvector, residual)`.
type ConvergedPair = (f64, Vec<f64>, f64);

struct Ritz {
    lambda: f64,
    coeffs: Vec<f64>,
}

impl<'c, 'a> Lanczos<'c, 'a> {
    fn new(counter: &'c InertiaCounter<'a>, k: usize, options: &EigenOptions) -> Result<Self> {
        let (shift, factor) = match options.shift {
            Some(s) => (s, counter.factor(s)?),
            None => Self::shift_below_spectrum(counter)?,
        };
        Ok(Self {
            counter,
            k,
            options: *options,
            factor,
            shift,
            rng: ChaCha8Rng::seed_from_u64(options.seed),
            basis: Vec::new(),
            projected: Vec::new(),
        })
    }

    /// A shift with no eigenvalue below it, close to the bottom of the
    /// spectrum relative to its spread.
    fn shift_below_spectrum(counter: &InertiaCounter<'_>) -> Result<(f64, LdlFactor)> {
        let min_ratio = counter
            .a_diag
            .iter()
            .zip(&counter.b_diag)
            .map(|(a, b)| libm::fabs(*a) / b)
            .fold(f64::INFINITY, f64::min);
        let scale = if min_ratio > 0.0 && min_ratio.is_finite() {
            min_ratio
        } else {
            1.0
        };
        let mut shift = -1e-4 * scale;
        for _ in 0..64 {
            match counter.factor(shift) {
                Ok(f) if f.inertia().negative == 0 => return Ok((shift, f)),
                Ok(_) | Err(Error::NearEigenvalue { .. }) => shift = 2.0 * shift - scale,
                Err(e) => return Err(e),
            }
        }
        Err(Error::InvalidParameter(
            "could not place a shift below the spectrum".into(),
        ))
    }

    fn n(&self) -> usize {
        self.counter.dim()
    }

    fn random_vector(&mut self) -> Vec<f64> {
        (0..self.n())
            .map(|_| (self.rng.next_u64() >> 11) as f64 * (2.0 / (1u64 << 53) as f64) - 1.0)
            .collect()
    }

    /// Removes the span of the basis from `w` (two classical Gram-Schmidt
    /// passes in the `B` inner product) and returns the coefficients.
    fn orthogonalize(&self, w: &mut [f64]) -> Vec<f64> {
        let mut coeffs = vec![0.0; self.basis.len()];
        let mut bw = vec![0.0; w.len()];
        for _ in 0..2 {
            self.counter.b.mul_vec_into(w, &mut bw);
            let h: Vec<f64> = self.basis.iter().map(|q| dot(q, &bw)).collect();
            for ((q, c), h) in self.basis.iter().zip(coeffs.iter_mut()).zip(h) {
                *c += h;
                axpy(-h, q, w);
            }
        }
        coeffs
    }

    fn b_norm(&self, w: &[f64]) -> f64 {
        libm::sqrt(self.counter.b.quadratic_form(w).max(0.0))
    }

    /// Appends a fresh direction `Op r` with random `r`, orthogonal to the
    /// basis. Returns `false` if nothing new is reachable.
    fn inject_start(&mut self) -> bool {
        for _ in 0..4 {
            let r = self.random_vector();
            let mut w = self.factor.solve(&self.counter.b.mul_vec(&r));
            let before = self.b_norm(&w);
            self.orthogonalize(&mut w);
            let after = self.b_norm(&w);
            if after > 1e-8 * before && after > 0.0 {
                w.iter_mut().for_each(|x| *x /= after);
                self.basis.push(w);
                return true;
            }
        }
        false
    }

    /// Applies the operator to the oldest basis vector not yet processed and
    /// extends the basis. Returns `false` when nothing new is reachable.
    fn step(&mut self) -> bool {
        let j = self.projected.len();
        let bq = self.counter.b.mul_vec(&self.basis[j]);
        let mut w = self.factor.solve(&bq);
        let raw = self.b_norm(&w);
        let coeffs = self.orthogonalize(&mut w);
        self.projected.push(coeffs);
        if self.basis.len() >= self.n() {
            return false;
        }
        let beta = self.b_norm(&w);
        if beta <= 1e-10 * raw {
            // invariant subspace: continue from a fresh direction
            return self.inject_start();
        }
        w.iter_mut().for_each(|x| *x /= beta);
        self.basis.push(w);
        true
    }

    /// Ritz pairs of the columns processed so far, ascending in `λ`.
    fn ritz(&self) -> Vec<Ritz> {
        let m = self.projected.len();
        let mut h = vec![0.0; m * m];
        for (j, col) in self.projected.iter().enumerate() {
            for (i, &v) in col.iter().enumerate().take(j + 1) {
                h[i * m + j] = v;
                h[j * m + i] = v;
            }
        }
        let (theta, s) = symmetric_eigen_rowmajor(m, h);
        let mut out: Vec<Ritz> = theta
            .iter()
            .enumerate()
            .filter(|(_, &t)| t > 0.0)
            .map(|(c, &t)| Ritz {
                lambda: self.shift + 1.0 / t,
                coeffs: (0..m).map(|r| s[r * m + c]).collect(),
            })
            .collect();
        out.sort_by(|x, y| x.lambda.total_cmp(&y.lambda));
        out
    }

    fn ritz_vector(&self, r: &Ritz) -> Vec<f64> {
        let mut u = vec![0.0; self.n()];
        for (q, &c) in self.basis.iter().zip(&r.coeffs) {
            axpy(c, q, &mut u);
        }
        let s = self.b_norm(&u);
        if s > 0.0 {
            u.iter_mut().for_each(|x| *x /= s);
        }
        u
    }

    /// Explicit residuals of the leading Ritz pairs, stopping at the first
    /// one above tolerance.
    fn converged_prefix(&self, ritz: &[Ritz], count: usize) -> (Vec<ConvergedPair>, Vec<f64>) {
        let mut pairs = Vec::new();
        let mut residuals = Vec::new();
        for r in ritz.iter().take(count) {
            let u = self.ritz_vector(r);
            let res = residual(self.counter.a, self.counter.b, r.lambda, &u);
            residuals.push(res);
            if res > self.options.tolerance {
                break;
            }
            pairs.push((r.lambda, u, res));
        }
        (pairs, residuals)
    }

    fn run(mut self) -> Result<SpectralResult> {
        let k = self.k;
        let budget = self.options.max_basis.min(self.n()).max(k + 1);
        if !self.inject_start() {
            return Err(Error::ZeroVector);
        }
        let mut certified: Option<(f64, usize)> = None;
        let mut last_residuals = Vec::new();
        let mut next_check = k + 4;
        loop {
            let grown = self.step();
            let m = self.projected.len();
            let full = !grown || self.basis.len() >= budget;
            if !full && m < next_check {
                continue;
            }
            next_check = m + 5.max(m / 8);
            let fail = |residuals: Vec<f64>| {
                Err(Error::NoConvergence {
                    requested: k,
                    residuals,
                })
            };

            let ritz = self.ritz();
            // pairs that have to converge: the k lowest, or once a count is
            // known, every Ritz value below the counting abscissa
            let wanted = match certified {
                None => k,
                Some((e, _)) => ritz.iter().filter(|r| r.lambda < e).count().max(k),
            };
            if ritz.len() < wanted {
                if full {
                    return fail(last_residuals);
                }
                continue;
            }
            let (pairs, residuals) = self.converged_prefix(&ritz, wanted);
            last_residuals = residuals;
            if pairs.len() < wanted {
                if full {
                    return fail(last_residuals);
                }
                continue;
            }
            let (e, count) = match certified {
                Some(c) => c,
                None => {
                    let c = certify(self.counter, pairs[k - 1].0, self.options.tolerance)?;
                    certified = Some(c);
                    c
                }
            };
            let below = ritz.iter().filter(|r| r.lambda < e).count();
            if below == count && pairs.len() >= count {
                let mut out = SpectralResult::default();
                for (lambda, u, res) in pairs.into_iter().take(k) {
                    out.eigenvalues.push(lambda);
                    out.eigenvectors.push(u);
                    out.residuals.push(res);
                }
                out.count_thresholds.push((e, count));
                return Ok(out);
            }
            if below > count {
                // Ritz values bound eigenvalues from above; more of them
                // below `e` than eigenvalues means lost orthogonality
                return fail(last_residuals);
            }
            if below < count {
                // eigenvalues below e that the Krylov space has not seen,
                // typically the second copy of a multiple eigenvalue
                if full || !self.inject_start() {
                    return fail(last_residuals);
                }
                next_check = self.projected.len() + 6;
                continue;
            }
            if full {
                return fail(last_residuals);
            }
        }
    }
}
