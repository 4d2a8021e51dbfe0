//! Symbolic model of the algebra generated by a single power partial
//! isometry: canonical normal forms, the spanning families used in the
//! kernel analysis of the forward-shift system, evaluation homomorphisms
//! onto concrete truncations, and the symbol maps onto Laurent polynomials.
//!
//! Every word in the generator `v` and its adjoint reduces to one canonical
//! monomial `M(s,m,t) = v*^s v^m v*^m v^t` with `m ≥ max(s,t)`. The monomial
//! acts on the quarter-plane grid as the partial translation
//! `(k,l) ↦ (k+d, l−d)` with `d = t−s`, defined on `{k ≥ m−t, l ≥ t}`;
//! composing two such translations is again one, which is what makes the
//! normal form closed under multiplication. Rewriting therefore terminates
//! in a single fold over the word, and soundness is validated against
//! evaluation in the grid representation rather than assumed.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Tolerance};
use crate::ops::{Basis, Budget, Operator};
use crate::spaces::SemigroupElement;
use num_complex::Complex64;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    V,
    VStar,
}

/// A finite word over `{v, v*}`; the empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn adjoint(&self) -> Word {
        Word(
            self.0
                .iter()
                .rev()
                .map(|l| match l {
                    Letter::V => Letter::VStar,
                    Letter::VStar => Letter::V,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Canonical monomial key `(s, m, t)` with `m ≥ max(s, t)`.
pub type Triple = (u32, u32, u32);

fn to_abd((s, m, t): Triple) -> (i64, i64, i64) {
    (m as i64 - t as i64, t as i64, t as i64 - s as i64)
}

fn from_abd(a: i64, b: i64, d: i64) -> Triple {
    debug_assert!(a >= 0 && b >= 0 && b - d >= 0 && a + d >= 0);
    ((b - d) as u32, (a + b) as u32, b as u32)
}

/// Product of canonical monomials (`x` applied after `y`): the composition
/// of the two partial translations of the quarter plane.
pub fn mono_mul(x: Triple, y: Triple) -> Triple {
    let (ax, bx, dx) = to_abd(x);
    let (ay, by, dy) = to_abd(y);
    let az = ay.max(ax - dy);
    let bz = by.max(bx + dy);
    from_abd(az, bz, dx + dy)
}

pub fn mono_adjoint((s, m, t): Triple) -> Triple {
    (t, m, s)
}

const MONO_ONE: Triple = (0, 0, 0);
const MONO_V: Triple = (0, 1, 1);
const MONO_VSTAR: Triple = (1, 1, 0);

/// Finite linear combination of canonical monomials.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormalForm {
    terms: BTreeMap<Triple, Complex64>,
}

impl NormalForm {
    pub fn zero() -> Self {
        NormalForm::default()
    }

    pub fn one() -> Self {
        NormalForm::monomial(MONO_ONE)
    }

    pub fn monomial(key: Triple) -> Self {
        let (s, m, t) = key;
        assert!(m >= s.max(t), "triple ({s},{m},{t}) violates m >= max(s,t)");
        let mut terms = BTreeMap::new();
        terms.insert(key, Complex64::new(1.0, 0.0));
        NormalForm { terms }
    }

    pub fn terms(&self) -> &BTreeMap<Triple, Complex64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, key: Triple, c: Complex64) {
        let entry = self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.re == 0.0 && entry.im == 0.0 {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &NormalForm) -> NormalForm {
        let mut out = self.clone();
        for (&k, &c) in &other.terms {
            out.insert(k, c);
        }
        out
    }

    pub fn sub(&self, other: &NormalForm) -> NormalForm {
        let mut out = self.clone();
        for (&k, &c) in &other.terms {
            out.insert(k, -c);
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> NormalForm {
        if c.re == 0.0 && c.im == 0.0 {
            return NormalForm::zero();
        }
        NormalForm {
            terms: self.terms.iter().map(|(&k, &v)| (k, c * v)).collect(),
        }
    }

    /// Serializes as `[[s, m, t, re, im], ...]`, sorted by triple.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(&(s, m, t), c)| {
                    serde_json::json!([s, m, t, c.re, c.im])
                })
                .collect(),
        )
    }

    pub fn from_json(v: &serde_json::Value) -> Result<NormalForm> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::MalformedIndices("normal form JSON must be an array".into()))?;
        let mut out = NormalForm::zero();
        for row in rows {
            let row = row
                .as_array()
                .filter(|r| r.len() == 5)
                .ok_or_else(|| Error::MalformedIndices("expected [s,m,t,re,im]".into()))?;
            let idx = |i: usize| -> Result<u32> {
                row[i]
                    .as_u64()
                    .map(|x| x as u32)
                    .ok_or_else(|| Error::MalformedIndices("triple entries must be naturals".into()))
            };
            let (s, m, t) = (idx(0)?, idx(1)?, idx(2)?);
            if m < s.max(t) {
                return Err(Error::MalformedIndices(format!(
                    "triple ({s},{m},{t}) violates m >= max(s,t)"
                )));
            }
            let re = row[3].as_f64().unwrap_or(f64::NAN);
            let im = row[4].as_f64().unwrap_or(f64::NAN);
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::NonFiniteEntry);
            }
            out.insert((s, m, t), Complex64::new(re, im));
        }
        Ok(out)
    }
}

/// Rewrites a word to its normal form by folding the monomial product over
/// the letters. Each letter is itself the monomial `v = M(0,1,1)` or
/// `v* = M(1,1,0)`, and the product of canonical monomials is canonical, so
/// the fold is the whole rewriting system; it terminates after `len` steps
/// by construction.
pub fn normalize(w: &Word) -> NormalForm {
    let mut acc = MONO_ONE;
    for l in &w.0 {
        let letter = match l {
            Letter::V => MONO_V,
            Letter::VStar => MONO_VSTAR,
        };
        acc = mono_mul(acc, letter);
    }
    NormalForm::monomial(acc)
}

pub fn nf_multiply(x: &NormalForm, y: &NormalForm) -> NormalForm {
    let mut out = NormalForm::zero();
    for (&kx, &cx) in &x.terms {
        for (&ky, &cy) in &y.terms {
            out.insert(mono_mul(kx, ky), cx * cy);
        }
    }
    out
}

pub fn nf_adjoint(x: &NormalForm) -> NormalForm {
    NormalForm {
        terms: x
            .terms
            .iter()
            .map(|(&k, &c)| (mono_adjoint(k), c.conj()))
            .collect(),
    }
}

/// The named spanning-family elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    /// `f^m_{i,j} = v^i v*^m v^m (1 − v v*) v*^j`
    F,
    /// `g^m_{i,j} = v*^i v^m v*^m (1 − v* v) v^j`
    G,
    /// Coisometric gap `q_n = v^n v*^n − v* v^{n−1} v*^{n−1} v`
    Q,
    /// Pre-image of the grid matrix unit: `f^m_{i,j} − f^{m+1}_{i,j}`
    E,
}

fn word(letters: &[(Letter, u32)]) -> Word {
    let mut w = Vec::new();
    for &(l, n) in letters {
        for _ in 0..n {
            w.push(l);
        }
    }
    Word(w)
}

/// `f^m_{i,j}` as a two-term normal form.
pub fn element_f(i: u32, j: u32, m: u32) -> NormalForm {
    use Letter::*;
    let head = normalize(&word(&[(V, i), (VStar, m), (V, m)]));
    let tail = normalize(&word(&[(VStar, j)]));
    let gap = NormalForm::one().sub(&normalize(&word(&[(V, 1), (VStar, 1)])));
    nf_multiply(&nf_multiply(&head, &gap), &tail)
}

/// `g^m_{i,j}` as a two-term normal form.
pub fn element_g(i: u32, j: u32, m: u32) -> NormalForm {
    use Letter::*;
    let head = normalize(&word(&[(VStar, i), (V, m), (VStar, m)]));
    let tail = normalize(&word(&[(V, j)]));
    let gap = NormalForm::one().sub(&normalize(&word(&[(VStar, 1), (V, 1)])));
    nf_multiply(&nf_multiply(&head, &gap), &tail)
}

/// `q_n`: the coisometric gap element, read through the translation
/// covariance dictionary `1_m ↦ v^m v*^m`.
pub fn element_q(n: u32) -> NormalForm {
    use Letter::*;
    if n == 0 {
        return NormalForm::one().sub(&normalize(&word(&[(VStar, 1), (V, 1)])));
    }
    let lead = normalize(&word(&[(V, n), (VStar, n)]));
    let conj = normalize(&word(&[(VStar, 1), (V, n - 1), (VStar, n - 1), (V, 1)]));
    lead.sub(&conj)
}

/// `e^m_{i,j}` via its pre-image `f^m_{i,j} − f^{m+1}_{i,j}`; needs
/// `i, j ≤ m`.
pub fn element_e(i: u32, j: u32, m: u32) -> Result<NormalForm> {
    if i > m || j > m {
        return Err(Error::MalformedIndices(format!(
            "matrix-unit element needs i,j <= m, got ({i},{j},{m})"
        )));
    }
    Ok(element_f(i, j, m).sub(&element_f(i, j, m + 1)))
}

pub fn element(kind: ElementKind, i: u32, j: u32, m: u32) -> Result<NormalForm> {
    match kind {
        ElementKind::F => Ok(element_f(i, j, m)),
        ElementKind::G => Ok(element_g(i, j, m)),
        ElementKind::Q => Ok(element_q(m)),
        ElementKind::E => element_e(i, j, m),
    }
}

/// Where to evaluate: which power partial isometry replaces `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assignment {
    /// Forward translation on the truncated half line.
    T,
    /// Backward translation on the truncated half line.
    TStar,
    /// Compression `P_n T P_n` with `P_n` the band projection onto the first
    /// `n+1` coordinates; exact once the truncation holds the band.
    Pn(usize),
    /// Compression `P_n T* P_n`.
    PnStar(usize),
    /// The faithful grid shift `ε_{k,l} ↦ ε_{k+1,l−1}`.
    Grid,
}

struct Model {
    basis: std::sync::Arc<Basis>,
    /// Column map of the generator image: `col ↦ row`.
    gen: Vec<Option<usize>>,
    /// Column map of the adjoint image.
    gen_star: Vec<Option<usize>>,
    /// Image of the empty word. The band compressions are not unital on the
    /// ambient truncation: their range algebra has the band projection as
    /// its unit, so that is where the unit monomial goes.
    unit: Vec<Option<usize>>,
}

fn build_model(assignment: Assignment, size: usize) -> Result<Model> {
    match assignment {
        Assignment::T | Assignment::TStar | Assignment::Pn(_) | Assignment::PnStar(_) => {
            if let Assignment::Pn(n) | Assignment::PnStar(n) = assignment {
                if size < n + 1 {
                    return Err(Error::InsufficientTruncation {
                        budget: format!("band {n}"),
                        size,
                    });
                }
            }
            let labels: Vec<SemigroupElement> =
                (0..=size as u64).map(SemigroupElement::from_int).collect();
            let basis = Basis::semigroup(labels, SemigroupElement::from_int(size as u64));
            let dim = size + 1;
            let up = |cap: usize| -> Vec<Option<usize>> {
                (0..dim).map(|r| (r < cap).then(|| r + 1)).collect()
            };
            let down = |cap: usize| -> Vec<Option<usize>> {
                (0..dim)
                    .map(|r| (r >= 1 && r <= cap).then(|| r - 1))
                    .collect()
            };
            let full: Vec<Option<usize>> = (0..dim).map(Some).collect();
            let band = |cap: usize| -> Vec<Option<usize>> {
                (0..dim).map(|r| (r <= cap).then_some(r)).collect()
            };
            let (gen, gen_star, unit) = match assignment {
                Assignment::T => (up(size), down(size), full),
                Assignment::TStar => (down(size), up(size), full),
                Assignment::Pn(n) => (up(n), down(n), band(n)),
                Assignment::PnStar(n) => (down(n), up(n), band(n)),
                Assignment::Grid => unreachable!(),
            };
            Ok(Model {
                basis,
                gen,
                gen_star,
                unit,
            })
        }
        Assignment::Grid => {
            let n = size;
            let basis = Basis::full_grid(n);
            let labels = basis.grid_labels().unwrap().to_vec();
            let pos = |k: usize, l: usize| k * (n + 1) + l;
            let gen = labels
                .iter()
                .map(|&(k, l)| (l >= 1 && k < n).then(|| pos(k + 1, l - 1)))
                .collect();
            let gen_star = labels
                .iter()
                .map(|&(k, l)| (k >= 1 && l < n).then(|| pos(k - 1, l + 1)))
                .collect();
            let unit = (0..labels.len()).map(Some).collect();
            Ok(Model {
                basis,
                gen,
                gen_star,
                unit,
            })
        }
    }
}

impl Model {
    fn apply(&self, map: &mut [Option<usize>], letter: Letter) {
        let table = match letter {
            Letter::V => &self.gen,
            Letter::VStar => &self.gen_star,
        };
        for slot in map.iter_mut() {
            *slot = slot.and_then(|r| table[r]);
        }
    }

    fn unit_map(&self) -> Vec<Option<usize>> {
        self.unit.clone()
    }
}

/// Guard budget of a monomial under an assignment: the peak displacement of
/// the letter walk toward a clipping boundary.
fn mono_budget(assignment: Assignment, (s, m, t): Triple) -> usize {
    let (_, m, t) = (s as usize, m as usize, t as usize);
    match assignment {
        Assignment::T => t,
        Assignment::TStar => m - t,
        Assignment::Grid => t.max(m - t),
        Assignment::Pn(_) | Assignment::PnStar(_) => 0,
    }
}

fn budget_for(assignment: Assignment, steps: usize) -> Budget {
    match assignment {
        Assignment::Grid => Budget::Steps(steps),
        _ => Budget::Element(SemigroupElement::from_int(steps as u64)),
    }
}

/// Letters of the canonical monomial, rightmost applied first.
fn mono_letters((s, m, t): Triple) -> Vec<Letter> {
    let mut w = Vec::with_capacity((s + 2 * m + t) as usize);
    for _ in 0..s {
        w.push(Letter::VStar);
    }
    for _ in 0..m {
        w.push(Letter::V);
    }
    for _ in 0..m {
        w.push(Letter::VStar);
    }
    for _ in 0..t {
        w.push(Letter::V);
    }
    w
}

fn scatter(
    model: &Model,
    terms: &[(Vec<Option<usize>>, Complex64)],
    budget: Budget,
    adjoint_budget: Budget,
) -> Result<Operator> {
    let dim = model.basis.dim();
    let mut matrix = ComplexMatrix::zeros(dim, dim);
    for (map, c) in terms {
        for (col, row) in map.iter().enumerate() {
            if let Some(r) = row {
                let cur = matrix.get(*r, col);
                matrix.set(*r, col, cur + *c);
            }
        }
    }
    Operator::with_budgets(matrix, model.basis.clone(), budget, adjoint_budget)
}

/// Homomorphic image of a normal form in the chosen truncation. The budget
/// of the result is the worst monomial walk; comparisons against other
/// truncated operators stay on the corresponding guard band.
pub fn evaluate(nf: &NormalForm, assignment: Assignment, size: usize) -> Result<Operator> {
    let model = build_model(assignment, size)?;
    let mut peak = 0usize;
    let mut adjoint_peak = 0usize;
    let mut terms = Vec::with_capacity(nf.terms.len());
    for (&key, &c) in &nf.terms {
        let mut map = model.unit_map();
        for l in mono_letters(key).iter().rev() {
            model.apply(&mut map, *l);
        }
        peak = peak.max(mono_budget(assignment, key));
        adjoint_peak = adjoint_peak.max(mono_budget(assignment, mono_adjoint(key)));
        terms.push((map, c));
    }
    let budget = budget_for(assignment, peak);
    if model.basis.guard_indices(&budget).is_empty() {
        return Err(Error::InsufficientTruncation {
            budget: format!("{peak}"),
            size,
        });
    }
    scatter(&model, &terms, budget, budget_for(assignment, adjoint_peak))
}

/// Image of a raw word (no rewriting), with the budget taken from the peak
/// of its own letter walk.
pub fn evaluate_word(w: &Word, assignment: Assignment, size: usize) -> Result<Operator> {
    let model = build_model(assignment, size)?;
    let mut map = model.unit_map();
    for l in w.0.iter().rev() {
        model.apply(&mut map, *l);
    }
    let peak = walk_peak(assignment, w);
    let budget = budget_for(assignment, peak);
    if model.basis.guard_indices(&budget).is_empty() {
        return Err(Error::InsufficientTruncation {
            budget: format!("{peak}"),
            size,
        });
    }
    let adjoint_budget = budget_for(assignment, walk_peak(assignment, &w.adjoint()));
    scatter(
        &model,
        &[(map, Complex64::new(1.0, 0.0))],
        budget,
        adjoint_budget,
    )
}

/// Peak displacement of the letter walk toward a clipping boundary, applied
/// rightmost-first. On the half line only one direction clips; on the grid
/// both coordinates do, with opposite letter orientations.
fn walk_peak(assignment: Assignment, w: &Word) -> usize {
    let mut disp = (0i64, 0i64);
    let mut peak = 0i64;
    for l in w.0.iter().rev() {
        let step: (i64, i64) = match (assignment, l) {
            (Assignment::T, Letter::V) => (1, 0),
            (Assignment::T, Letter::VStar) => (-1, 0),
            (Assignment::TStar, Letter::V) => (-1, 0),
            (Assignment::TStar, Letter::VStar) => (1, 0),
            (Assignment::Grid, Letter::V) => (1, -1),
            (Assignment::Grid, Letter::VStar) => (-1, 1),
            (Assignment::Pn(_) | Assignment::PnStar(_), _) => (0, 0),
        };
        disp.0 += step.0;
        disp.1 += step.1;
        peak = peak.max(disp.0).max(disp.1);
    }
    peak as usize
}

/// Finitely supported Laurent polynomial: the image of the symbol map.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaurentPoly {
    pub coeffs: BTreeMap<i64, Complex64>,
}

impl LaurentPoly {
    pub fn coeff(&self, d: i64) -> Complex64 {
        self.coeffs
            .get(&d)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn insert(&mut self, d: i64, c: Complex64) {
        let entry = self.coeffs.entry(d).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.re == 0.0 && entry.im == 0.0 {
            self.coeffs.remove(&d);
        }
    }

    /// Largest coefficient distance to another polynomial.
    pub fn distance(&self, other: &LaurentPoly) -> f64 {
        let mut degrees: std::collections::BTreeSet<i64> =
            self.coeffs.keys().copied().collect();
        degrees.extend(other.coeffs.keys());
        degrees
            .into_iter()
            .map(|d| (self.coeff(d) - other.coeff(d)).norm())
            .fold(0.0, f64::max)
    }
}

/// Symbol of a normal form: the monomial `M(s,m,t)` maps to `z^{t−s}` (the
/// middle projections evaluate to the constant one on the circle). The
/// starred variant composes with the degree flip `z ↦ z^{-1}`.
pub fn symbol(nf: &NormalForm, star: bool) -> LaurentPoly {
    let mut out = LaurentPoly::default();
    for (&(s, _, t), &c) in &nf.terms {
        let d = t as i64 - s as i64;
        out.insert(if star { -d } else { d }, c);
    }
    out
}

/// Recovers a symbol numerically from a truncated operator on integer
/// labels: the coefficient of `z^d` is the average of the entries on the
/// `d`-th diagonal band over the middle third of the truncation, where a
/// Toeplitz-plus-finite-rank operator is free of corner effects.
pub fn band_symbol(op: &Operator, max_degree: usize) -> Result<LaurentPoly> {
    let labels = op
        .basis
        .semigroup_labels()
        .ok_or_else(|| Error::BasisMismatch("band extraction needs half-line labels".into()))?;
    let n = labels.len();
    if n < 6 {
        return Err(Error::InsufficientTruncation {
            budget: "band extraction".into(),
            size: n,
        });
    }
    let lo = n / 3;
    let hi = 2 * n / 3;
    let mut out = LaurentPoly::default();
    for d in -(max_degree as i64)..=(max_degree as i64) {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut count = 0usize;
        for k in lo..hi {
            let r = k as i64 + d;
            if r >= 0 && (r as usize) < n {
                sum += op.matrix.get(r as usize, k);
                count += 1;
            }
        }
        if count > 0 {
            let avg = sum / count as f64;
            if avg.norm() > 0.0 {
                out.insert(d, avg);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct KernelFlags {
    pub in_ker_phi_t: bool,
    pub in_ker_phi_t_star: bool,
    /// Member of the intersection ideal.
    pub in_intersection: bool,
    pub residual_t: f64,
    pub residual_t_star: f64,
}

/// Kernel membership through guarded evaluation: an element lies in the
/// kernel of the forward (resp. backward) evaluation when its image
/// vanishes on the guard band of a truncation of the given size.
pub fn kernel_flags(nf: &NormalForm, guard_size: usize, tol: &Tolerance) -> Result<KernelFlags> {
    let at_t = evaluate(nf, Assignment::T, guard_size)?;
    let at_t_star = evaluate(nf, Assignment::TStar, guard_size)?;
    let rt = at_t.guarded_norm()?;
    let rts = at_t_star.guarded_norm()?;
    Ok(KernelFlags {
        in_ker_phi_t: rt <= tol.eq_tol,
        in_ker_phi_t_star: rts <= tol.eq_tol,
        in_intersection: rt <= tol.eq_tol && rts <= tol.eq_tol,
        residual_t: rt,
        residual_t_star: rts,
    })
}

/// Convenience used by the suites: random word of bounded length.
pub fn random_word(rng: &mut impl rand::Rng, max_len: usize) -> Word {
    let len = 1 + rng.gen_range(0..max_len);
    Word(
        (0..len)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Letter::V
                } else {
                    Letter::VStar
                }
            })
            .collect(),
    )
}
