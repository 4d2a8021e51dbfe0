//! Dense complex matrices under the trace inner product.
//!
//! Everything downstream stores operators as dense matrices, so this module
//! is deliberately small: products, adjoints, spectral norms and numeric
//! ranks, and a Gram–Schmidt step used by the span-closure engine.
//!
//! Norms and ranks are decided by a full singular value decomposition.
//! Two exact short-circuits run first (the zero matrix, and matrices with at
//! most one nonzero per row and column, whose singular values are the moduli
//! of the entries); both return the same values the SVD would, without the
//! floating-point noise.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            let row: Vec<String> = (0..self.cols.min(8))
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:.3}{:+.3}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        ComplexMatrix {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from row-major data; rejects non-finite entries.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(ComplexMatrix { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Matrix product. Rows of `self` with few nonzeros are skipped entrywise,
    /// which makes products of shift-like operators cost `O(n²)` instead of
    /// `O(n³)`; fully dense inputs fall through to the usual triple loop.
    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        let zero = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            let arow = &self.entries[i * self.cols..(i + 1) * self.cols];
            let orow = &mut out.entries[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in arow.iter().enumerate() {
                if a == zero {
                    continue;
                }
                let brow = &other.entries[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow.iter()) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &ComplexMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, c: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| c * z).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Trace inner product `⟨A, B⟩ = tr(A*B) = Σ conj(a_ij) b_ij`.
    pub fn inner(&self, other: &ComplexMatrix) -> Result<Complex64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(&a, &b)| a.conj() * b)
            .sum())
    }

    /// Frobenius norm, the norm of the trace inner product.
    pub fn frobenius(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        let zero = Complex64::new(0.0, 0.0);
        self.entries.iter().all(|&z| z == zero)
    }

    /// Difference `A − B` restricted to the listed columns, built without
    /// materializing the full-size difference.
    pub fn column_difference(a: &ComplexMatrix, b: &ComplexMatrix, cols: &[usize]) -> ComplexMatrix {
        debug_assert_eq!(a.rows, b.rows);
        debug_assert_eq!(a.cols, b.cols);
        if cols.is_empty() {
            return ComplexMatrix::zeros(1, 1);
        }
        let mut out = ComplexMatrix::zeros(a.rows, cols.len());
        for (jj, &j) in cols.iter().enumerate() {
            for i in 0..a.rows {
                out.set(i, jj, a.get(i, j) - b.get(i, j));
            }
        }
        out
    }

    /// Keeps only the listed columns (in the given order).
    pub fn select_columns(&self, cols: &[usize]) -> ComplexMatrix {
        if cols.is_empty() {
            // An empty guard band: a 1x1 zero stands in for the empty map so
            // norms of restrictions are still defined (and vanish).
            return ComplexMatrix::zeros(1, 1);
        }
        let mut out = ComplexMatrix::zeros(self.rows, cols.len());
        for (jj, &j) in cols.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, jj, self.get(i, j));
            }
        }
        out
    }

    /// Principal submatrix on the listed indices.
    pub fn principal_submatrix(&self, idx: &[usize]) -> ComplexMatrix {
        assert!(!idx.is_empty());
        let mut out = ComplexMatrix::zeros(idx.len(), idx.len());
        for (ii, &i) in idx.iter().enumerate() {
            for (jj, &j) in idx.iter().enumerate() {
                out.set(ii, jj, self.get(i, j));
            }
        }
        out
    }

    pub fn direct_sum(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        out
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    /// Column map of a generalized permutation matrix: for each column its
    /// unique nonzero `(row, value)`, or `None` for a zero column. Returns
    /// `None` if any row or column carries two nonzeros.
    pub fn column_map(&self) -> Option<Vec<Option<(usize, Complex64)>>> {
        let zero = Complex64::new(0.0, 0.0);
        let mut col_hit: Vec<Option<(usize, Complex64)>> = vec![None; self.cols];
        let mut row_used = vec![false; self.rows];
        for (i, used) in row_used.iter_mut().enumerate() {
            for (j, hit) in col_hit.iter_mut().enumerate() {
                let v = self.get(i, j);
                if v != zero {
                    if hit.is_some() || *used {
                        return None;
                    }
                    *hit = Some((i, v));
                    *used = true;
                }
            }
        }
        Some(col_hit)
    }
}

/// Residual thresholds used by every verification in the crate.
///
/// `eq_tol` bounds the spectral-norm residual below which two operators are
/// declared equal; `rank_tol` is the singular-value cutoff for numeric rank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eq_tol: f64,
    pub rank_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eq_tol: 1e-10,
            rank_tol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(eq_tol: f64, rank_tol: f64) -> Result<Self> {
        if eq_tol <= 0.0 || !eq_tol.is_finite() {
            return Err(Error::InvalidTolerance(format!("eqTol = {eq_tol}")));
        }
        if rank_tol <= 0.0 || !rank_tol.is_finite() {
            return Err(Error::InvalidTolerance(format!("rankTol = {rank_tol}")));
        }
        Ok(Tolerance { eq_tol, rank_tol })
    }
}

/// Spectral norm and numeric rank of a matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormRank {
    pub spec_norm: f64,
    pub rank: usize,
}

/// Singular values, descending. Exact for the zero matrix and for
/// generalized permutations; SVD otherwise.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if a.is_zero() {
        return Ok(vec![0.0; a.rows().min(a.cols())]);
    }
    if let Some(map) = a.column_map() {
        let mut sv: Vec<f64> = map
            .iter()
            .flatten()
            .map(|&(_, v)| v.norm())
            .collect();
        sv.resize(a.rows().min(a.cols()), 0.0);
        sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
        return Ok(sv);
    }
    let svd = a
        .to_nalgebra()
        .try_svd(false, false, f64::EPSILON * 16.0, 1024)
        .ok_or(Error::SvdFailed)?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(sv)
}

/// Largest singular value.
pub fn spec_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Spectral norm together with the count of singular values above `rank_tol`.
pub fn norm_rank(a: &ComplexMatrix, tol: &Tolerance) -> Result<NormRank> {
    let sv = singular_values(a)?;
    Ok(NormRank {
        spec_norm: sv.first().copied().unwrap_or(0.0),
        rank: sv.iter().filter(|&&s| s > tol.rank_tol).count(),
    })
}

/// Outcome of a Gram–Schmidt step.
#[derive(Debug, Clone, Copy)]
pub struct ExtendOutcome {
    pub added: bool,
    /// Trace-norm of the component of the candidate orthogonal to the span.
    pub residual: f64,
}

/// One Gram–Schmidt step against a pairwise orthonormal basis (under the
/// trace inner product). The candidate is appended, normalized, when its
/// orthogonal component exceeds `rank_tol`. Projection coefficients are
/// removed twice; the second pass cleans up the cancellation error that a
/// single classical pass leaves behind.
pub fn orthonormal_extend(
    basis: &mut Vec<ComplexMatrix>,
    m: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<ExtendOutcome> {
    if let Some(first) = basis.first() {
        if first.rows() != m.rows() || first.cols() != m.cols() {
            return Err(Error::DimensionMismatch(format!(
                "candidate {}x{} vs basis ambient {}x{}",
                m.rows(),
                m.cols(),
                first.rows(),
                first.cols()
            )));
        }
    }
    let mut r = m.clone();
    for _ in 0..2 {
        for b in basis.iter() {
            let c = b.inner(&r)?;
            if c != Complex64::new(0.0, 0.0) {
                r = r.sub(&b.scale(c))?;
            }
        }
    }
    let residual = r.frobenius();
    if residual > tol.rank_tol {
        basis.push(r.scale(Complex64::new(1.0 / residual, 0.0)));
        Ok(ExtendOutcome {
            added: true,
            residual,
        })
    } else {
        Ok(ExtendOutcome {
            added: false,
            residual,
        })
    }
}
