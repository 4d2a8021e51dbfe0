//! Concrete operator families: Toeplitz isometries, truncated shifts on
//! intervals, grid shifts, matrix units, and the partial-isometry predicates.
//!
//! Every operator tracks a *shift budget*: the distance by which it can move
//! a basis label toward a truncation boundary. Identities between operators
//! with budgets `g_A`, `g_B` are asserted on the guard band of
//! `max(g_A, g_B)`: the labels far enough from the cutoff that the
//! truncated composition agrees with the infinite one. Budgets add under
//! products and take maxima under sums; the adjoint swaps the forward budget
//! with the budget its own adjoint would carry (a shift that only moves
//! labels *down* is exact, but its adjoint moves them up into the boundary).

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Tolerance};
use crate::spaces::{IndexSet, SemigroupElement};
use num_complex::Complex64;
use rand::Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Labels of the model space an operator acts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Basis {
    /// Span of `{ε_r : r ∈ labels}` inside `ℓ²(Γ⁺)` truncated at `cutoff`.
    Semigroup {
        labels: Vec<SemigroupElement>,
        cutoff: SemigroupElement,
    },
    /// Span of `{ε_{k,l} : (k,l) ∈ labels}` inside `ℓ²(ℕ×ℕ)` with both
    /// coordinates at most `n`.
    Grid {
        n: usize,
        labels: Vec<(usize, usize)>,
    },
    /// An abstract finite-dimensional space with no truncation structure.
    Plain { dim: usize },
}

impl Basis {
    pub fn semigroup(labels: Vec<SemigroupElement>, cutoff: SemigroupElement) -> Arc<Basis> {
        Arc::new(Basis::Semigroup { labels, cutoff })
    }

    pub fn full_grid(n: usize) -> Arc<Basis> {
        let mut labels = Vec::with_capacity((n + 1) * (n + 1));
        for k in 0..=n {
            for l in 0..=n {
                labels.push((k, l));
            }
        }
        Arc::new(Basis::Grid { n, labels })
    }

    pub fn from_set(set: &IndexSet) -> Arc<Basis> {
        Basis::semigroup(set.elements().to_vec(), set.cutoff())
    }

    pub fn plain(dim: usize) -> Arc<Basis> {
        Arc::new(Basis::Plain { dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            Basis::Semigroup { labels, .. } => labels.len(),
            Basis::Grid { labels, .. } => labels.len(),
            Basis::Plain { dim } => *dim,
        }
    }

    pub fn semigroup_labels(&self) -> Option<&[SemigroupElement]> {
        match self {
            Basis::Semigroup { labels, .. } => Some(labels),
            _ => None,
        }
    }

    pub fn grid_labels(&self) -> Option<&[(usize, usize)]> {
        match self {
            Basis::Grid { labels, .. } => Some(labels),
            _ => None,
        }
    }

    pub fn index_of_label(&self, x: &SemigroupElement) -> Option<usize> {
        self.semigroup_labels()
            .and_then(|ls| ls.binary_search(x).ok())
    }

    pub fn index_of_grid(&self, kl: (usize, usize)) -> Option<usize> {
        self.grid_labels()
            .and_then(|ls| ls.iter().position(|&p| p == kl))
    }

    /// Indices of labels whose distance to every clipping boundary exceeds
    /// the budget.
    pub fn guard_indices(&self, budget: &Budget) -> Vec<usize> {
        match (self, budget) {
            (Basis::Semigroup { labels, cutoff }, Budget::Element(g)) => labels
                .iter()
                .enumerate()
                .filter(|(_, r)| r.add(g) <= *cutoff)
                .map(|(i, _)| i)
                .collect(),
            (Basis::Grid { n, labels }, Budget::Steps(g)) => labels
                .iter()
                .enumerate()
                .filter(|(_, (k, l))| k + g <= *n && l + g <= *n)
                .map(|(i, _)| i)
                .collect(),
            (Basis::Plain { dim }, _) => (0..*dim).collect(),
            _ => panic!("budget kind does not match basis kind"),
        }
    }
}

/// Translation distance toward a clipping boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Element(SemigroupElement),
    Steps(usize),
}

impl Budget {
    pub fn zero_like(basis: &Basis) -> Budget {
        match basis {
            Basis::Semigroup { .. } => Budget::Element(SemigroupElement::zero()),
            _ => Budget::Steps(0),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Budget::Element(e) => e.is_zero(),
            Budget::Steps(s) => *s == 0,
        }
    }

    pub fn plus(&self, other: &Budget) -> Budget {
        match (self, other) {
            (Budget::Element(a), Budget::Element(b)) => Budget::Element(a.add(b)),
            (Budget::Steps(a), Budget::Steps(b)) => Budget::Steps(a + b),
            _ => panic!("cannot combine budgets of different kinds"),
        }
    }

    pub fn max(&self, other: &Budget) -> Budget {
        match (self, other) {
            (Budget::Element(a), Budget::Element(b)) => Budget::Element((*a).max(*b)),
            (Budget::Steps(a), Budget::Steps(b)) => Budget::Steps((*a).max(*b)),
            _ => panic!("cannot combine budgets of different kinds"),
        }
    }
}

/// A matrix together with the basis it acts on and its shift budgets.
#[derive(Debug, Clone)]
pub struct Operator {
    pub matrix: ComplexMatrix,
    pub basis: Arc<Basis>,
    /// Guard budget of the operator as stored.
    pub budget: Budget,
    /// Guard budget its adjoint carries.
    pub adjoint_budget: Budget,
}

impl Operator {
    pub fn new(matrix: ComplexMatrix, basis: Arc<Basis>, budget: Budget) -> Result<Self> {
        let adjoint_budget = budget;
        Self::with_budgets(matrix, basis, budget, adjoint_budget)
    }

    pub fn with_budgets(
        matrix: ComplexMatrix,
        basis: Arc<Basis>,
        budget: Budget,
        adjoint_budget: Budget,
    ) -> Result<Self> {
        if matrix.rows() != basis.dim() || matrix.cols() != basis.dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix {}x{} on basis of size {}",
                matrix.rows(),
                matrix.cols(),
                basis.dim()
            )));
        }
        Ok(Operator {
            matrix,
            basis,
            budget,
            adjoint_budget,
        })
    }

    pub fn identity_on(basis: Arc<Basis>) -> Operator {
        let n = basis.dim();
        Operator {
            matrix: ComplexMatrix::identity(n),
            budget: Budget::zero_like(&basis),
            adjoint_budget: Budget::zero_like(&basis),
            basis,
        }
    }

    pub fn zero_on(basis: Arc<Basis>) -> Operator {
        let n = basis.dim();
        Operator {
            matrix: ComplexMatrix::zeros(n, n),
            budget: Budget::zero_like(&basis),
            adjoint_budget: Budget::zero_like(&basis),
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn check_same_basis(&self, other: &Operator) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || same_space(&self.basis, &other.basis) {
            Ok(())
        } else {
            Err(Error::BasisMismatch(format!(
                "dims {} and {}",
                self.dim(),
                other.dim()
            )))
        }
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        self.check_same_basis(other)?;
        Ok(Operator {
            matrix: self.matrix.mul(&other.matrix)?,
            basis: self.basis.clone(),
            budget: self.budget.plus(&other.budget),
            adjoint_budget: self.adjoint_budget.plus(&other.adjoint_budget),
        })
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_basis(other)?;
        Ok(Operator {
            matrix: self.matrix.add(&other.matrix)?,
            basis: self.basis.clone(),
            budget: self.budget.max(&other.budget),
            adjoint_budget: self.adjoint_budget.max(&other.adjoint_budget),
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same_basis(other)?;
        Ok(Operator {
            matrix: self.matrix.sub(&other.matrix)?,
            basis: self.basis.clone(),
            budget: self.budget.max(&other.budget),
            adjoint_budget: self.adjoint_budget.max(&other.adjoint_budget),
        })
    }

    pub fn scale(&self, c: Complex64) -> Operator {
        Operator {
            matrix: self.matrix.scale(c),
            basis: self.basis.clone(),
            budget: self.budget,
            adjoint_budget: self.adjoint_budget,
        }
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            matrix: self.matrix.adjoint(),
            basis: self.basis.clone(),
            budget: self.adjoint_budget,
            adjoint_budget: self.budget,
        }
    }

    /// Spectral norm of the restriction to the guard band of this operator's
    /// own budget. An empty guard band is an error: a norm over no labels
    /// would certify nothing.
    pub fn guarded_norm(&self) -> Result<f64> {
        let idx = self.basis.guard_indices(&self.budget);
        if idx.is_empty() {
            return Err(Error::InsufficientTruncation {
                budget: format!("{:?}", self.budget),
                size: self.dim(),
            });
        }
        linalg::spec_norm(&self.matrix.select_columns(&idx))
    }

    pub fn norm(&self) -> Result<f64> {
        linalg::spec_norm(&self.matrix)
    }
}

/// Same span of labels; truncation cutoffs may differ (a compression keeps
/// its parent's cutoff while an interval operator records its own).
fn same_space(a: &Basis, b: &Basis) -> bool {
    match (a, b) {
        (Basis::Semigroup { labels: la, .. }, Basis::Semigroup { labels: lb, .. }) => la == lb,
        (Basis::Grid { n: na, labels: la }, Basis::Grid { n: nb, labels: lb }) => {
            na == nb && la == lb
        }
        (Basis::Plain { dim: da }, Basis::Plain { dim: db }) => da == db,
        _ => false,
    }
}

/// Guard indices valid for both operands at the combined budget.
fn common_guard(a: &Operator, b: &Operator) -> Vec<usize> {
    let budget = a.budget.max(&b.budget);
    if Arc::ptr_eq(&a.basis, &b.basis) || *a.basis == *b.basis {
        return a.basis.guard_indices(&budget);
    }
    let ga = a.basis.guard_indices(&budget);
    let gb = b.basis.guard_indices(&budget);
    ga.into_iter().filter(|i| gb.binary_search(i).is_ok()).collect()
}

/// `‖(A − B)·R‖` where `R` includes the guard band of the combined budget.
/// Errors when the band is empty rather than reporting a vacuous zero.
pub fn guarded_residual(a: &Operator, b: &Operator) -> Result<f64> {
    a.check_same_basis(b)?;
    let idx = common_guard(a, b);
    if idx.is_empty() {
        return Err(Error::InsufficientTruncation {
            budget: format!("{:?}", a.budget.max(&b.budget)),
            size: a.dim(),
        });
    }
    // Exact agreement on the guard band needs no allocation; only a genuine
    // mismatch pays for the spectral norm.
    let rows = a.matrix.rows();
    let equal = idx
        .iter()
        .all(|&j| (0..rows).all(|i| a.matrix.get(i, j) == b.matrix.get(i, j)));
    if equal {
        return Ok(0.0);
    }
    linalg::spec_norm(&ComplexMatrix::column_difference(&a.matrix, &b.matrix, &idx))
}

/// Unguarded residual `‖A − B‖`, for identities between exact operators.
pub fn residual(a: &Operator, b: &Operator) -> Result<f64> {
    a.check_same_basis(b)?;
    linalg::spec_norm(&a.matrix.sub(&b.matrix)?)
}

/// Number of guard-band labels the comparison of `a` and `b` would use.
pub fn guard_size(a: &Operator, b: &Operator) -> usize {
    common_guard(a, b).len()
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

/// Toeplitz shift `T_s : ε_r ↦ ε_{r+s}` on the truncated cone. The
/// truncation equals the finite shift on the retained interval, so it is an
/// exact partial isometry; comparisons against the infinite isometry carry
/// budget `s`.
pub fn toeplitz_shift(set: &IndexSet, s: &SemigroupElement) -> Result<Operator> {
    if *s > set.cutoff() {
        return Err(Error::OutsideTruncation(
            s.to_string(),
            set.cutoff().to_string(),
        ));
    }
    let basis = Basis::from_set(set);
    let n = set.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (j, r) in set.elements().iter().enumerate() {
        if let Some(i) = set.position(&r.add(s)) {
            m.set(i, j, one());
        }
    }
    Operator::with_budgets(
        m,
        basis,
        Budget::Element(*s),
        Budget::Element(SemigroupElement::zero()),
    )
}

/// Truncated shift `J^s_t` on `ℓ²([0,s])`: `ε_r ↦ ε_{r+t}` when `r+t ≤ s`.
/// A genuinely finite operator; budget zero.
pub fn truncated_j(
    set: &IndexSet,
    s: &SemigroupElement,
    t: &SemigroupElement,
) -> Result<Operator> {
    interval_shift(set, s, t, true)
}

/// Truncated shift `K^s_t` on `ℓ²([0,s))`: `ε_r ↦ ε_{r+t}` when `r+t < s`.
pub fn truncated_k(
    set: &IndexSet,
    s: &SemigroupElement,
    t: &SemigroupElement,
) -> Result<Operator> {
    interval_shift(set, s, t, false)
}

fn interval_shift(
    set: &IndexSet,
    s: &SemigroupElement,
    t: &SemigroupElement,
    closed: bool,
) -> Result<Operator> {
    let labels = set.interval(s, closed)?;
    if labels.is_empty() {
        return Err(Error::MalformedIndices(format!(
            "interval [0,{s}{}] is empty",
            if closed { "" } else { ")" }
        )));
    }
    let n = labels.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (j, r) in labels.iter().enumerate() {
        if let Ok(i) = labels.binary_search(&r.add(t)) {
            m.set(i, j, one());
        }
    }
    let basis = Basis::semigroup(labels, *s);
    let zero = Budget::Element(SemigroupElement::zero());
    Operator::with_budgets(m, basis, zero, zero)
}

/// Diagonal projection `1_s`: the characteristic function of `{r : r ≥ s}`.
pub fn indicator_projection(set: &IndexSet, s: &SemigroupElement) -> Result<Operator> {
    if *s > set.cutoff() {
        return Err(Error::OutsideTruncation(
            s.to_string(),
            set.cutoff().to_string(),
        ));
    }
    let n = set.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, r) in set.elements().iter().enumerate() {
        if r >= s {
            m.set(i, i, one());
        }
    }
    let zero = Budget::Element(SemigroupElement::zero());
    Operator::with_budgets(m, Basis::from_set(set), zero, zero)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    /// `ε_{k,l} ↦ ε_{k+p, l−p}`: the diagonal shift implementing the
    /// forward-translation system.
    Tau,
    /// `ε_{k,l} ↦ ε_{k, l−p}`: the column shift implementing the
    /// backward-translation system. Exact: it only moves labels down.
    Sigma,
}

/// Shift of the square grid `{(k,l) : 0 ≤ k,l ≤ N}`.
pub fn grid_shift(n: usize, mode: GridMode, power: usize) -> Result<Operator> {
    let basis = Basis::full_grid(n);
    let dim = basis.dim();
    let mut m = ComplexMatrix::zeros(dim, dim);
    let labels = basis.grid_labels().unwrap().to_vec();
    let pos = |kl: (usize, usize)| -> usize { kl.0 * (n + 1) + kl.1 };
    for (j, &(k, l)) in labels.iter().enumerate() {
        let target = match mode {
            GridMode::Tau => {
                if l >= power && k + power <= n {
                    Some((k + power, l - power))
                } else {
                    None
                }
            }
            GridMode::Sigma => {
                if l >= power {
                    Some((k, l - power))
                } else {
                    None
                }
            }
        };
        if let Some(kl) = target {
            m.set(pos(kl), j, one());
        }
    }
    let (budget, adjoint_budget) = match mode {
        GridMode::Tau => (Budget::Steps(power), Budget::Steps(power)),
        GridMode::Sigma => (Budget::Steps(0), Budget::Steps(power)),
    };
    Operator::with_budgets(m, basis, budget, adjoint_budget)
}

/// Rank-one matrix unit `e_i ⊗ ē_j` on the given basis: maps `ε_j ↦ ε_i`.
pub fn matrix_unit(basis: &Arc<Basis>, i: usize, j: usize) -> Result<Operator> {
    let n = basis.dim();
    if i >= n || j >= n {
        return Err(Error::MalformedIndices(format!(
            "matrix unit ({i},{j}) on dimension {n}"
        )));
    }
    let mut m = ComplexMatrix::zeros(n, n);
    m.set(i, j, one());
    let zero = Budget::zero_like(basis);
    Operator::with_budgets(m, basis.clone(), zero, zero)
}

/// Block-diagonal direct sum. Restricted to exact summands; the result lives
/// on an abstract basis with no truncation structure.
pub fn direct_sum(parts: &[Operator]) -> Result<Operator> {
    let first = parts
        .first()
        .ok_or_else(|| Error::MalformedIndices("empty direct sum".into()))?;
    if parts
        .iter()
        .any(|p| !p.budget.is_zero() || !p.adjoint_budget.is_zero())
    {
        return Err(Error::BasisMismatch(
            "direct sums require exact (budget-zero) summands".into(),
        ));
    }
    let mut m = first.matrix.clone();
    for p in &parts[1..] {
        m = m.direct_sum(&p.matrix);
    }
    let basis = Basis::plain(m.rows());
    Operator::with_budgets(m, basis, Budget::Steps(0), Budget::Steps(0))
}

/// Compression `PAP`. When `P` is a diagonal 0/1 projection the result is
/// restricted to the labels in its range; otherwise it keeps the full basis.
pub fn compress(p: &Operator, a: &Operator, tol: &Tolerance) -> Result<Operator> {
    p.check_same_basis(a)?;
    let p2 = p.matrix.mul(&p.matrix)?;
    let idem = linalg::spec_norm(&p2.sub(&p.matrix)?)?;
    let sa = linalg::spec_norm(&p.matrix.sub(&p.matrix.adjoint())?)?;
    if idem > tol.eq_tol || sa > tol.eq_tol {
        return Err(Error::NotAProjection(idem.max(sa)));
    }
    let diag_range = diagonal_01_range(&p.matrix);
    let pap = p.matrix.mul(&a.matrix)?.mul(&p.matrix)?;
    let budget = p.budget.plus(&a.budget).plus(&p.budget);
    let adjoint_budget = p
        .adjoint_budget
        .plus(&a.adjoint_budget)
        .plus(&p.adjoint_budget);
    match diag_range {
        Some(keep) if keep.len() < p.dim() && !keep.is_empty() => {
            let sub = pap.principal_submatrix(&keep);
            let basis = match &*p.basis {
                Basis::Semigroup { labels, cutoff } => Basis::semigroup(
                    keep.iter().map(|&i| labels[i]).collect(),
                    *cutoff,
                ),
                Basis::Grid { n, labels } => Arc::new(Basis::Grid {
                    n: *n,
                    labels: keep.iter().map(|&i| labels[i]).collect(),
                }),
                Basis::Plain { .. } => Basis::plain(keep.len()),
            };
            Operator::with_budgets(sub, basis, budget, adjoint_budget)
        }
        _ => Operator::with_budgets(pap, p.basis.clone(), budget, adjoint_budget),
    }
}

fn diagonal_01_range(m: &ComplexMatrix) -> Option<Vec<usize>> {
    let zero = Complex64::new(0.0, 0.0);
    let mut keep = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m.get(i, j);
            if i != j && v != zero {
                return None;
            }
            if i == j {
                if v == one() {
                    keep.push(i);
                } else if v != zero {
                    return None;
                }
            }
        }
    }
    Some(keep)
}

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct PiCheck {
    pub ok: bool,
    /// `‖AA*A − A‖`.
    pub residual: f64,
}

/// The partial-isometry test `VV*V = V`.
pub fn is_partial_isometry(a: &Operator, tol: &Tolerance) -> Result<PiCheck> {
    if !a.matrix.is_square() {
        return Err(Error::DimensionMismatch("not square".into()));
    }
    let vvs = a.matrix.mul(&a.matrix.adjoint())?;
    let res = linalg::spec_norm(&vvs.mul(&a.matrix)?.sub(&a.matrix)?)?;
    Ok(PiCheck {
        ok: res <= tol.eq_tol,
        residual: res,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ProductPiCheck {
    pub product_is_pi: bool,
    /// `‖[S*S, TT*]‖`.
    pub comm_norm: f64,
    /// `‖(ST)(ST)*(ST) − ST‖`.
    pub product_residual: f64,
    /// Whether the two verdicts coincide.
    pub agree: bool,
}

/// Decides whether `ST` is a partial isometry both directly (via the `VV*V`
/// test) and through the commutation of `S*S` with `TT*`; the two verdicts
/// must agree.
pub fn product_pi_criterion(s: &Operator, t: &Operator, tol: &Tolerance) -> Result<ProductPiCheck> {
    let sp = is_partial_isometry(s, tol)?;
    if !sp.ok {
        return Err(Error::NotAPartialIsometry(sp.residual));
    }
    let tp = is_partial_isometry(t, tol)?;
    if !tp.ok {
        return Err(Error::NotAPartialIsometry(tp.residual));
    }
    let st = s.compose(t)?;
    let direct = is_partial_isometry(&st, tol)?;
    let ss = s.adjoint().compose(s)?;
    let tt = t.compose(&t.adjoint())?;
    let comm = residual(&ss.compose(&tt)?, &tt.compose(&ss)?)?;
    let by_commutation = comm <= tol.eq_tol;
    Ok(ProductPiCheck {
        product_is_pi: direct.ok,
        comm_norm: comm,
        product_residual: direct.residual,
        agree: direct.ok == by_commutation,
    })
}

/// Residual summary for a candidate partial-isometric representation
/// `s ↦ V_s`: multiplicativity, commutation of initial/range projections,
/// and the lattice formulas for products of projections of the same kind.
#[derive(Debug, Clone)]
pub struct RepCheckReport {
    pub multiplicativity: f64,
    pub projection_commutators: f64,
    pub join_initial: f64,
    pub join_range: f64,
    pub pairs_checked: usize,
}

impl RepCheckReport {
    pub fn max_residual(&self) -> f64 {
        self.multiplicativity
            .max(self.projection_commutators)
            .max(self.join_initial)
            .max(self.join_range)
    }
}

pub fn semigroup_rep_check(
    v: &BTreeMap<SemigroupElement, Operator>,
    _tol: &Tolerance,
) -> Result<RepCheckReport> {
    let keys: Vec<SemigroupElement> = v.keys().copied().collect();
    if keys.is_empty() {
        return Err(Error::MissingIndex("empty representation".into()));
    }
    let mut report = RepCheckReport {
        multiplicativity: 0.0,
        projection_commutators: 0.0,
        join_initial: 0.0,
        join_range: 0.0,
        pairs_checked: 0,
    };
    let initial = |s: &SemigroupElement| -> Result<Operator> {
        let vs = &v[s];
        vs.adjoint().compose(vs)
    };
    let range = |s: &SemigroupElement| -> Result<Operator> {
        let vs = &v[s];
        vs.compose(&vs.adjoint())
    };
    for s in &keys {
        for t in &keys {
            // Multiplicativity is testable only when the sum index was
            // supplied; the caller controls how much of the semigroup the
            // map covers.
            if let Some(vsum) = v.get(&s.add(t)) {
                let prod = v[s].compose(&v[t])?;
                report.multiplicativity = report
                    .multiplicativity
                    .max(guarded_residual(&prod, vsum)?);
            }
            let join = (*s).max(*t);
            for (p, q, slot) in [
                (initial(s)?, range(t)?, 0usize),
                (range(s)?, range(t)?, 1),
                (initial(s)?, initial(t)?, 2),
            ] {
                let comm = guarded_residual(&p.compose(&q)?, &q.compose(&p)?)?;
                report.projection_commutators = report.projection_commutators.max(comm);
                if slot == 1 {
                    let lhs = p.compose(&q)?;
                    report.join_range = report
                        .join_range
                        .max(guarded_residual(&lhs, &range(&join)?)?);
                }
                if slot == 2 {
                    let lhs = p.compose(&q)?;
                    report.join_initial = report
                        .join_initial
                        .max(guarded_residual(&lhs, &initial(&join)?)?);
                }
            }
            report.pairs_checked += 1;
        }
    }
    Ok(report)
}

/// Embeds an operator living on a subset of semigroup labels into a larger
/// semigroup basis, filling the new rows and columns with zeros.
pub fn embed_into(op: &Operator, target: &Arc<Basis>) -> Result<Operator> {
    let small = op
        .basis
        .semigroup_labels()
        .ok_or_else(|| Error::BasisMismatch("embedding needs semigroup labels".into()))?;
    let n = target.dim();
    let mut m = ComplexMatrix::zeros(n, n);
    for (jj, lj) in small.iter().enumerate() {
        let j = target
            .index_of_label(lj)
            .ok_or_else(|| Error::MissingIndex(lj.to_string()))?;
        for (ii, li) in small.iter().enumerate() {
            let v = op.matrix.get(ii, jj);
            if v != Complex64::new(0.0, 0.0) {
                let i = target
                    .index_of_label(li)
                    .ok_or_else(|| Error::MissingIndex(li.to_string()))?;
                m.set(i, j, v);
            }
        }
    }
    Operator::with_budgets(
        m,
        target.clone(),
        op.budget,
        op.adjoint_budget,
    )
}

/// Random partial isometry: Gaussian matrix, SVD, singular values snapped to
/// 0 or 1 with probability ½ each.
pub fn random_partial_isometry(dim: usize, rng: &mut impl Rng) -> Operator {
    use nalgebra::DMatrix;
    use rand_distr::{Distribution, StandardNormal};
    let normal = StandardNormal;
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(normal.sample(rng), normal.sample(rng))
    });
    let svd = g.svd(true, true);
    let u = svd.u.expect("svd with u");
    let vt = svd.v_t.expect("svd with v_t");
    let snapped: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|_| if rng.gen_bool(0.5) { 1.0 } else { 0.0 })
        .collect();
    let d = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(snapped[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let m = &u * d * &vt;
    let matrix = ComplexMatrix::from_fn(dim, dim, |i, j| m[(i, j)]);
    Operator::with_budgets(matrix, Basis::plain(dim), Budget::Steps(0), Budget::Steps(0)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{self, integer_set};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn int(n: u64) -> SemigroupElement {
        SemigroupElement::from_int(n)
    }

    #[test]
    fn toeplitz_unit_shift_is_subdiagonal() {
        let set = integer_set(3);
        let t = toeplitz_shift(&set, &int(1)).unwrap();
        for j in 0..4 {
            for i in 0..4 {
                let want = if i == j + 1 { 1.0 } else { 0.0 };
                assert_eq!(t.matrix.get(i, j).re, want);
            }
        }
    }

    #[test]
    fn toeplitz_zero_shift_is_identity() {
        let set = integer_set(5);
        let t = toeplitz_shift(&set, &int(0)).unwrap();
        assert!(t.matrix == ComplexMatrix::identity(6));
    }

    #[test]
    fn toeplitz_on_numerical_semigroup() {
        // gens {2,3}, cutoff 7, s = 2: ε_0↦ε_2, ε_2↦ε_4, ε_3↦ε_5, ε_5↦ε_7, ε_7↦0.
        let set = spaces::enumerate(&[int(2), int(3)], int(7)).unwrap();
        let t = toeplitz_shift(&set, &int(2)).unwrap();
        let map = t.matrix.column_map().unwrap();
        let labels = set.elements();
        let at = |v: u64| labels.iter().position(|x| *x == int(v)).unwrap();
        assert_eq!(map[at(0)].unwrap().0, at(2));
        assert_eq!(map[at(2)].unwrap().0, at(4));
        assert_eq!(map[at(3)].unwrap().0, at(5));
        assert_eq!(map[at(5)].unwrap().0, at(7));
        assert!(map[at(7)].is_none());
    }

    #[test]
    fn toeplitz_rejects_shift_past_cutoff() {
        let set = integer_set(3);
        assert!(toeplitz_shift(&set, &int(4)).is_err());
    }

    #[test]
    fn truncated_j_matches_classic_shift() {
        let set = integer_set(8);
        let j = truncated_j(&set, &int(2), &int(1)).unwrap();
        assert_eq!(j.dim(), 3);
        let pi = is_partial_isometry(&j, &Tolerance::default()).unwrap();
        assert!(pi.ok && pi.residual == 0.0);
        // subdiagonal ones
        assert_eq!(j.matrix.get(1, 0).re, 1.0);
        assert_eq!(j.matrix.get(2, 1).re, 1.0);
    }

    #[test]
    fn truncated_j_vanishes_past_s() {
        let set = integer_set(8);
        let j = truncated_j(&set, &int(2), &int(3)).unwrap();
        assert!(j.matrix.is_zero());
    }

    #[test]
    fn truncated_j_at_s_is_rank_one() {
        let set = integer_set(8);
        let j = truncated_j(&set, &int(2), &int(2)).unwrap();
        let nr = linalg::norm_rank(&j.matrix, &Tolerance::default()).unwrap();
        assert_eq!(nr.rank, 1);
        assert_eq!(j.matrix.get(2, 0).re, 1.0); // ε_0 ↦ ε_2
    }

    #[test]
    fn truncated_k_vanishes_at_s() {
        let set = integer_set(8);
        let k = truncated_k(&set, &int(2), &int(2)).unwrap();
        assert!(k.matrix.is_zero());
    }

    #[test]
    fn truncated_k_interior_shift() {
        let set = integer_set(8);
        let k = truncated_k(&set, &int(3), &int(1)).unwrap();
        assert_eq!(k.dim(), 3);
        assert_eq!(k.matrix.get(1, 0).re, 1.0);
        assert_eq!(k.matrix.get(2, 1).re, 1.0);
        let k0 = truncated_k(&set, &int(3), &int(0)).unwrap();
        assert!(k0.matrix == ComplexMatrix::identity(3));
    }

    #[test]
    fn indicator_products_take_maxima() {
        let set = integer_set(6);
        let p0 = indicator_projection(&set, &int(0)).unwrap();
        assert!(p0.matrix == ComplexMatrix::identity(7));
        let p2 = indicator_projection(&set, &int(2)).unwrap();
        let p5 = indicator_projection(&set, &int(5)).unwrap();
        let prod = p2.compose(&p5).unwrap();
        assert_eq!(residual(&prod, &p5).unwrap(), 0.0);
    }

    #[test]
    fn indicator_small_example() {
        let set = integer_set(3);
        let p = indicator_projection(&set, &int(2)).unwrap();
        let want = [0.0, 0.0, 1.0, 1.0];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(p.matrix.get(i, i).re, *w);
        }
    }

    #[test]
    fn grid_tau_moves_along_antidiagonal() {
        let v = grid_shift(2, GridMode::Tau, 1).unwrap();
        let b = v.basis.clone();
        let from = b.index_of_grid((0, 1)).unwrap();
        let to = b.index_of_grid((1, 0)).unwrap();
        assert_eq!(v.matrix.get(to, from).re, 1.0);
        let dead = b.index_of_grid((0, 0)).unwrap();
        for i in 0..v.dim() {
            assert_eq!(v.matrix.get(i, dead).re, 0.0);
        }
    }

    #[test]
    fn grid_sigma_adjoint_raises_second_index() {
        let v = grid_shift(3, GridMode::Sigma, 1).unwrap();
        let vs = v.adjoint();
        let b = v.basis.clone();
        let from = b.index_of_grid((1, 1)).unwrap();
        let to = b.index_of_grid((1, 2)).unwrap();
        assert_eq!(vs.matrix.get(to, from).re, 1.0);
    }

    #[test]
    fn grid_power_zero_is_identity() {
        let v = grid_shift(2, GridMode::Tau, 0).unwrap();
        assert!(v.matrix == ComplexMatrix::identity(9));
    }

    #[test]
    fn grid_tau_powers_compose_exactly() {
        let n = 6;
        let v1 = grid_shift(n, GridMode::Tau, 1).unwrap();
        let mut acc = Operator::identity_on(v1.basis.clone());
        for p in 1..=4 {
            acc = acc.compose(&v1).unwrap();
            let direct = grid_shift(n, GridMode::Tau, p).unwrap();
            assert_eq!(residual(&acc, &direct).unwrap(), 0.0);
        }
    }

    #[test]
    fn families_are_partial_isometries() {
        let tol = Tolerance::default();
        let set = integer_set(10);
        for s in [0u64, 1, 3, 7] {
            let t = toeplitz_shift(&set, &int(s)).unwrap();
            let c = is_partial_isometry(&t, &tol).unwrap();
            assert!(c.ok && c.residual <= 1e-13);
        }
        for t in 0..=5 {
            let j = truncated_j(&set, &int(4), &int(t)).unwrap();
            assert!(is_partial_isometry(&j, &tol).unwrap().residual <= 1e-13);
            let k = truncated_k(&set, &int(4), &int(t)).unwrap();
            assert!(is_partial_isometry(&k, &tol).unwrap().residual <= 1e-13);
        }
        for p in 0..=3 {
            let g = grid_shift(5, GridMode::Sigma, p).unwrap();
            assert!(is_partial_isometry(&g, &tol).unwrap().residual <= 1e-13);
            let g = grid_shift(5, GridMode::Tau, p).unwrap();
            assert!(is_partial_isometry(&g, &tol).unwrap().residual <= 1e-13);
        }
    }

    #[test]
    fn contraction_is_not_partial_isometry() {
        let basis = Basis::plain(2);
        let m = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                Complex64::new(0.5, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let a = Operator::with_budgets(m, basis, Budget::Steps(0), Budget::Steps(0)).unwrap();
        let c = is_partial_isometry(&a, &Tolerance::default()).unwrap();
        assert!(!c.ok);
    }

    #[test]
    fn product_criterion_on_powers() {
        let set = integer_set(6);
        let j = truncated_j(&set, &int(3), &int(1)).unwrap();
        let out = product_pi_criterion(&j, &j, &Tolerance::default()).unwrap();
        assert!(out.product_is_pi);
        assert!(out.comm_norm <= 1e-13);
        assert!(out.agree);
    }

    #[test]
    fn product_criterion_counterexample() {
        // P projects on span{e1}, Q on span{(e1+e2)/√2}; QP is not a partial
        // isometry and the projections do not commute.
        let basis = Basis::plain(2);
        let p = {
            let mut m = ComplexMatrix::zeros(2, 2);
            m.set(0, 0, one());
            Operator::with_budgets(m, basis.clone(), Budget::Steps(0), Budget::Steps(0)).unwrap()
        };
        let q = {
            let h = Complex64::new(0.5, 0.0);
            let m = ComplexMatrix::from_fn(2, 2, |_, _| h);
            Operator::with_budgets(m, basis, Budget::Steps(0), Budget::Steps(0)).unwrap()
        };
        let out = product_pi_criterion(&q, &p, &Tolerance::default()).unwrap();
        assert!(!out.product_is_pi);
        assert!(out.comm_norm > 1e-3);
        assert!(out.agree);
    }

    #[test]
    fn product_criterion_rejects_non_pi_inputs() {
        let basis = Basis::plain(2);
        let m = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                Complex64::new(0.5, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let a = Operator::with_budgets(m, basis.clone(), Budget::Steps(0), Budget::Steps(0)).unwrap();
        let b = Operator::identity_on(basis);
        assert!(product_pi_criterion(&a, &b, &Tolerance::default()).is_err());
    }

    #[test]
    fn random_pairs_verdicts_agree() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let dim = 2 + (rng.gen::<u64>() % 11) as usize;
            let s = random_partial_isometry(dim, &mut rng);
            let t = random_partial_isometry(dim, &mut rng);
            let check = is_partial_isometry(&s, &tol).unwrap();
            assert!(check.ok, "generator produced residual {}", check.residual);
            let out = product_pi_criterion(&s, &t, &tol).unwrap();
            assert!(
                out.agree,
                "verdicts split: direct {} comm {}",
                out.product_residual, out.comm_norm
            );
        }
    }

    #[test]
    fn rep_check_on_truncated_j_family() {
        let set = integer_set(6);
        let s0 = int(4);
        let mut v = BTreeMap::new();
        for t in 0..=6u64 {
            v.insert(int(t), truncated_j(&set, &s0, &int(t)).unwrap());
        }
        let report = semigroup_rep_check(&v, &Tolerance::default()).unwrap();
        assert_eq!(report.max_residual(), 0.0);
    }

    #[test]
    fn rep_check_grid_tau_powers() {
        let n = 16;
        let mut v = BTreeMap::new();
        for p in 0..=4usize {
            v.insert(int(p as u64), grid_shift(n, GridMode::Tau, p).unwrap());
        }
        let report = semigroup_rep_check(&v, &Tolerance::default()).unwrap();
        assert!(report.max_residual() <= 1e-12);
    }

    #[test]
    fn rep_check_toeplitz_join_formula() {
        let set = integer_set(9);
        let mut v = BTreeMap::new();
        for s in 0..=4u64 {
            v.insert(int(s), toeplitz_shift(&set, &int(s)).unwrap());
        }
        let report = semigroup_rep_check(&v, &Tolerance::default()).unwrap();
        assert!(report.join_range <= 1e-13);
        assert!(report.max_residual() <= 1e-13);
    }

    #[test]
    fn j_minus_k_is_corner_matrix_unit() {
        // J^s_t − (K^s_t embedded) = ε_s ⊗ ε̄_{s−t} for t ≤ s, zero above.
        let set = integer_set(10);
        let s = int(5);
        for t in 0..=5u64 {
            let j = truncated_j(&set, &s, &int(t)).unwrap();
            let k = truncated_k(&set, &s, &int(t)).unwrap();
            let k_emb = embed_into(&k, &j.basis).unwrap();
            let diff = j.sub(&k_emb).unwrap();
            let s_idx = j.basis.index_of_label(&s).unwrap();
            let src = j.basis.index_of_label(&int(5 - t)).unwrap();
            let unit = matrix_unit(&j.basis, s_idx, src).unwrap();
            assert_eq!(residual(&diff, &unit).unwrap(), 0.0);
        }
        let j = truncated_j(&set, &s, &int(7)).unwrap();
        assert!(j.matrix.is_zero());
    }

    #[test]
    fn compress_toeplitz_corner_is_truncated_k() {
        // (1 − T_sT_s*) T_t (1 − T_sT_s*) agrees with K^s_t on [0, s).
        let set = integer_set(12);
        let s = int(4);
        let tol = Tolerance::default();
        let ts = toeplitz_shift(&set, &s).unwrap();
        let id = Operator::identity_on(ts.basis.clone());
        let p = id.sub(&ts.compose(&ts.adjoint()).unwrap()).unwrap();
        for t in 0..=5u64 {
            let tt = toeplitz_shift(&set, &int(t)).unwrap();
            let corner = compress(&p, &tt, &tol).unwrap();
            let k = truncated_k(&set, &s, &int(t)).unwrap();
            assert_eq!(corner.basis.semigroup_labels(), k.basis.semigroup_labels());
            // The displayed corner identity holds on every interval label.
            assert_eq!(residual(&corner, &k).unwrap(), 0.0);
        }
    }

    #[test]
    fn compress_rejects_non_projection() {
        let set = integer_set(4);
        let t = toeplitz_shift(&set, &int(1)).unwrap();
        let a = toeplitz_shift(&set, &int(2)).unwrap();
        assert!(matches!(
            compress(&t, &a, &Tolerance::default()),
            Err(Error::NotAProjection(_))
        ));
    }

    #[test]
    fn direct_sum_of_truncated_shifts_is_power_pi() {
        let set = integer_set(4);
        let j1 = truncated_j(&set, &int(1), &int(1)).unwrap();
        let j2 = truncated_j(&set, &int(2), &int(1)).unwrap();
        let d = direct_sum(&[j1, j2]).unwrap();
        assert_eq!(d.dim(), 5);
        let tol = Tolerance::default();
        let mut power = d.clone();
        for _ in 0..4 {
            assert!(is_partial_isometry(&power, &tol).unwrap().ok);
            power = power.compose(&d).unwrap();
        }
    }

    #[test]
    fn matrix_unit_diagonal_is_projection() {
        let basis = Basis::plain(3);
        let e = matrix_unit(&basis, 1, 1).unwrap();
        let sq = e.compose(&e).unwrap();
        assert_eq!(residual(&sq, &e).unwrap(), 0.0);
    }
}
