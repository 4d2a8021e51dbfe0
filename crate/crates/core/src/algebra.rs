//! Span-closure engine for the *-algebra generated by a finite matrix set,
//! with membership tests and the decomposition checks built on it.
//!
//! The closure is non-unital: it starts from words of length one (the
//! generators and their adjoints) and repeatedly orthonormalizes pairwise
//! products until one full pass adds nothing above the rank tolerance. Span
//! growth in a finite-dimensional ambient space is monotone, so a stationary
//! pass certifies closure under multiplication.

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Tolerance};
use crate::ops::{self, Operator};
use crate::spaces::{self, IndexSet, SemigroupElement};
use num_complex::Complex64;

/// Orthonormal basis (trace inner product) of a *-closed, product-closed
/// subspace of matrices.
#[derive(Debug, Clone)]
pub struct AlgebraBasis {
    pub ambient_dim: usize,
    pub basis: Vec<ComplexMatrix>,
    pub converged: bool,
    pub iterations: usize,
}

impl AlgebraBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Smallest subspace containing the generators and their adjoints that is
/// closed under products, computed as an orthonormal basis. When the
/// closure would pass `max_dim` the partial basis comes back with
/// `converged = false`; suites treat that as a failed check.
pub fn generate(gens: &[Operator], max_dim: usize, tol: &Tolerance) -> Result<AlgebraBasis> {
    let first = gens
        .first()
        .ok_or_else(|| Error::MalformedIndices("no generators".into()))?;
    let n = first.matrix.rows();
    if !first.matrix.is_square()
        || gens.iter().any(|g| g.matrix.rows() != n || !g.matrix.is_square())
    {
        return Err(Error::DimensionMismatch(
            "generators must be square and share one ambient dimension".into(),
        ));
    }
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for g in gens {
        linalg::orthonormal_extend(&mut basis, &g.matrix, tol)?;
        linalg::orthonormal_extend(&mut basis, &g.matrix.adjoint(), tol)?;
    }
    let mut iterations = 0;
    loop {
        iterations += 1;
        let snapshot = basis.clone();
        let mut grew = false;
        for a in &snapshot {
            for b in &snapshot {
                let prod = a.mul(b)?;
                let out = linalg::orthonormal_extend(&mut basis, &prod, tol)?;
                if out.added && basis.len() > max_dim {
                    basis.pop();
                    return Ok(AlgebraBasis {
                        ambient_dim: n,
                        basis,
                        converged: false,
                        iterations,
                    });
                }
                grew |= out.added;
            }
        }
        if !grew {
            break;
        }
    }
    Ok(AlgebraBasis {
        ambient_dim: n,
        basis,
        converged: true,
        iterations,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct Membership {
    pub member: bool,
    /// Trace-norm of the component orthogonal to the span.
    pub residual: f64,
}

/// Distance from the span: the candidate minus its projection onto the
/// basis. Membership is relative to the candidate's own size.
pub fn contains(ab: &AlgebraBasis, a: &ComplexMatrix, tol: &Tolerance) -> Result<Membership> {
    if a.rows() != ab.ambient_dim || a.cols() != ab.ambient_dim {
        return Err(Error::DimensionMismatch(format!(
            "candidate {}x{} vs ambient {}",
            a.rows(),
            a.cols(),
            ab.ambient_dim
        )));
    }
    let mut r = a.clone();
    for _ in 0..2 {
        for b in &ab.basis {
            let c = b.inner(&r)?;
            if c != Complex64::new(0.0, 0.0) {
                r = r.sub(&b.scale(c))?;
            }
        }
    }
    let residual = r.frobenius();
    Ok(Membership {
        member: residual <= tol.rank_tol * a.frobenius().max(1.0),
        residual,
    })
}

/// Orthonormal span of `{T_r (1 − T_u T_u*) T_t* : r ∈ rs, u ∈ us, t ∈ ts}`
/// over the truncated cone.
pub fn commutator_ideal_span(
    set: &IndexSet,
    rs: &[SemigroupElement],
    us: &[SemigroupElement],
    ts: &[SemigroupElement],
    tol: &Tolerance,
) -> Result<AlgebraBasis> {
    let mut basis = Vec::new();
    for r in rs {
        for u in us {
            for t in ts {
                let e = ideal_element(set, r, u, t)?;
                linalg::orthonormal_extend(&mut basis, &e.matrix, tol)?;
            }
        }
    }
    Ok(AlgebraBasis {
        ambient_dim: set.len(),
        basis,
        converged: true,
        iterations: 1,
    })
}

/// The spanning element `T_r (1 − T_u T_u*) T_t*`.
pub fn ideal_element(
    set: &IndexSet,
    r: &SemigroupElement,
    u: &SemigroupElement,
    t: &SemigroupElement,
) -> Result<Operator> {
    let tr = ops::toeplitz_shift(set, r)?;
    let tu = ops::toeplitz_shift(set, u)?;
    let tt = ops::toeplitz_shift(set, t)?;
    let id = Operator::identity_on(tr.basis.clone());
    let gap = id.sub(&tu.compose(&tu.adjoint())?)?;
    tr.compose(&gap)?.compose(&tt.adjoint())
}

/// One case of the ideal-invariance computation `T_s* · T_r(1 − T_uT_u*)T_t*`.
#[derive(Debug, Clone)]
pub struct IdealCase {
    pub description: &'static str,
    /// Guarded residual between the product and its closed form.
    pub closed_form_residual: f64,
    /// Distance of the closed form from the span (trace norm).
    pub span_residual: f64,
}

/// Verifies the case analysis for left multiplication by `T_s*` on a
/// spanning element of the commutator ideal: the product reduces to another
/// spanning element (`r ≥ s`), to a gap element with shifted indices
/// (`r < s < r + u`), or to zero.
pub fn ideal_case_check(
    set: &IndexSet,
    span: &AlgebraBasis,
    s: &SemigroupElement,
    r: &SemigroupElement,
    u: &SemigroupElement,
    t: &SemigroupElement,
    tol: &Tolerance,
) -> Result<IdealCase> {
    let ts = ops::toeplitz_shift(set, s)?;
    let x = ideal_element(set, r, u, t)?;
    let product = ts.adjoint().compose(&x)?;
    if let Some(rs) = r.checked_sub(s) {
        let closed = ideal_element(set, &rs, u, t)?;
        Ok(IdealCase {
            description: "r >= s: T_{r-s}(1 - T_u T_u*) T_t*",
            closed_form_residual: ops::guarded_residual(&product, &closed)?,
            span_residual: contains(span, &closed.matrix, tol)?.residual,
        })
    } else {
        let sr = s.checked_sub(r).expect("r < s in this branch");
        match u.checked_sub(&sr) {
            Some(gap) if !gap.is_zero() => {
                // (1 − T_{u−(s−r)} T_{u−(s−r)}*) T_{s−r+t}*
                let closed = ideal_element(set, &SemigroupElement::zero(), &gap, &sr.add(t))?;
                Ok(IdealCase {
                    description: "r < s < r+u: (1 - T_{u-(s-r)} T_{u-(s-r)}*) T_{s-r+t}*",
                    closed_form_residual: ops::guarded_residual(&product, &closed)?,
                    span_residual: contains(span, &closed.matrix, tol)?.residual,
                })
            }
            _ => {
                let zero = Operator::zero_on(product.basis.clone());
                Ok(IdealCase {
                    description: "s - r >= u: product vanishes",
                    closed_form_residual: ops::guarded_residual(&product, &zero)?,
                    span_residual: 0.0,
                })
            }
        }
    }
}

/// Joint report for the interval-shift decomposition over `Γ = ℤ`.
#[derive(Debug, Clone)]
pub struct JkDecomposition {
    /// Max residual of `J^s_t = K^s_t + ε_s ⊗ ε̄_{s−t}` over `t ≤ s`, and of
    /// `J^s_t = 0` past `s`.
    pub corner_residual: f64,
    /// Max residual of the matrix-unit words
    /// `ε_r ⊗ ε̄_t = (J^s_{s−r})* J^s_s (J^s_s)* J^s_{s−t}`.
    pub matrix_unit_residual: f64,
    /// Dimension of `C*(J^s_1)` against the square of the interval size.
    pub full_algebra_dim: usize,
    pub expected_dim: usize,
}

pub fn jk_decomposition_check(
    set: &IndexSet,
    s: &SemigroupElement,
    tol: &Tolerance,
) -> Result<JkDecomposition> {
    let mut corner = 0.0f64;
    let interval = set.interval(s, true)?;
    let j_basis = ops::truncated_j(set, s, &SemigroupElement::zero())?.basis;
    for t in &interval {
        let j = ops::truncated_j(set, s, t)?;
        let k = ops::truncated_k(set, s, t)?;
        let k_emb = ops::embed_into(&k, &j_basis)?;
        let diff = j.sub(&k_emb)?;
        let s_idx = j_basis
            .index_of_label(s)
            .ok_or_else(|| Error::MissingIndex(s.to_string()))?;
        let src = s
            .checked_sub(t)
            .and_then(|x| j_basis.index_of_label(&x))
            .ok_or_else(|| Error::MissingIndex(format!("{s} - {t}")))?;
        let unit = ops::matrix_unit(&j_basis, s_idx, src)?;
        corner = corner.max(ops::residual(&diff, &unit)?);
    }
    // Anything past s is zero.
    if s.add(&SemigroupElement::from_int(1)) <= set.cutoff() {
        let beyond = ops::truncated_j(set, s, &s.add(&SemigroupElement::from_int(1)))?;
        corner = corner.max(beyond.norm()?);
    }

    // Matrix units from shift words.
    let js = ops::truncated_j(set, s, s)?;
    let mut unit_res = 0.0f64;
    for r in &interval {
        for t in &interval {
            let jr = ops::truncated_j(set, s, &s.checked_sub(r).unwrap())?;
            let jt = ops::truncated_j(set, s, &s.checked_sub(t).unwrap())?;
            let word = jr
                .adjoint()
                .compose(&js)?
                .compose(&js.adjoint())?
                .compose(&jt)?;
            let i = j_basis.index_of_label(r).unwrap();
            let j = j_basis.index_of_label(t).unwrap();
            let unit = ops::matrix_unit(&j_basis, i, j)?;
            unit_res = unit_res.max(ops::residual(&word, &unit)?);
        }
    }

    // For Γ = ℤ the single shift generates the full matrix algebra.
    let j1 = ops::truncated_j(set, s, &SemigroupElement::from_int(1))?;
    let dim = interval.len();
    let ab = generate(&[j1], dim * dim + 8, tol)?;
    Ok(JkDecomposition {
        corner_residual: corner,
        matrix_unit_residual: unit_res,
        full_algebra_dim: if ab.converged { ab.dim() } else { 0 },
        expected_dim: dim * dim,
    })
}

/// Numeric rank of `K^s_t` on deeper and deeper windows into the group
/// lattice spanned by the generators. Dense groups keep producing new
/// interval points, so the rank grows without bound; `Γ = ℤ` stabilizes.
pub fn rank_growth_k(
    gens: &[SemigroupElement],
    s: &SemigroupElement,
    t: &SemigroupElement,
    depths: &[i64],
    tol: &Tolerance,
) -> Result<Vec<usize>> {
    if *t >= *s {
        return Err(Error::MalformedIndices(format!(
            "need t < s, got t = {t}, s = {s}"
        )));
    }
    let mut ranks = Vec::with_capacity(depths.len());
    for &d in depths {
        let labels = spaces::lattice_window(gens, *s, d)?;
        if labels.is_empty() {
            ranks.push(0);
            continue;
        }
        let n = labels.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (j, r) in labels.iter().enumerate() {
            if let Ok(i) = labels.binary_search(&r.add(t)) {
                m.set(i, j, Complex64::new(1.0, 0.0));
            }
        }
        ranks.push(linalg::norm_rank(&m, tol)?.rank);
    }
    Ok(ranks)
}
