//! Exact enumeration of truncated positive cones in `ℝ`.
//!
//! Elements live in the ring `ℚ + ℚ√2`, which covers both `Γ = ℤ` (second
//! coordinate zero) and the dense subgroup `ℤ + ℤ√2`. Ordering and equality
//! are decided by exact sign analysis on the rational coordinates; no
//! floating point enters any comparison.

use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

type Q = Ratio<i64>;

/// An element `a + b√2` of the ambient ordered group, kept exactly.
///
/// Public constructors only admit nonnegative values; ordering compares the
/// real values `a + b√2` exactly.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SemigroupElement {
    a: Q,
    b: Q,
}

/// Sign of `a + b√2`, decided on rationals: when the terms disagree in sign
/// the comparison reduces to `a²` against `2b²` (√2 being irrational, ties
/// force `a = b = 0`).
fn sign_of(a: Q, b: Q) -> Ordering {
    let za = a.cmp(&Q::zero());
    let zb = b.cmp(&Q::zero());
    match (za, zb) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less, Ordering::Less) => Ordering::Less,
        (Ordering::Greater, Ordering::Less) | (Ordering::Less, Ordering::Greater) => {
            // a + b√2 ⋛ 0  ⇔  sign(a)·(a² − 2b²) ⋛ 0 when signs differ
            let lhs = a * a;
            let rhs = b * b * Q::from_integer(2);
            match lhs.cmp(&rhs) {
                Ordering::Equal => Ordering::Equal, // only a = b = 0 reaches this
                c => {
                    if za == Ordering::Greater {
                        c
                    } else {
                        c.reverse()
                    }
                }
            }
        }
    }
}

impl SemigroupElement {
    /// Builds `a + b√2` from rational coordinates `(a_num/a_den, b_num/b_den)`.
    pub fn new(a_num: i64, a_den: i64, b_num: i64, b_den: i64) -> Result<Self> {
        if a_den == 0 || b_den == 0 {
            return Err(Error::MalformedIndices("zero denominator".into()));
        }
        let e = SemigroupElement {
            a: Ratio::new(a_num, a_den),
            b: Ratio::new(b_num, b_den),
        };
        if sign_of(e.a, e.b) == Ordering::Less {
            return Err(Error::MalformedIndices(format!(
                "negative semigroup element {e}"
            )));
        }
        Ok(e)
    }

    pub fn zero() -> Self {
        SemigroupElement {
            a: Q::zero(),
            b: Q::zero(),
        }
    }

    pub fn from_int(n: u64) -> Self {
        SemigroupElement {
            a: Q::from_integer(n as i64),
            b: Q::zero(),
        }
    }

    /// `√2` scaled by an integer.
    pub fn sqrt2_times(n: u64) -> Self {
        SemigroupElement {
            a: Q::zero(),
            b: Q::from_integer(n as i64),
        }
    }

    pub fn rational_part(&self) -> (i64, i64) {
        (*self.a.numer(), *self.a.denom())
    }

    pub fn sqrt2_part(&self) -> (i64, i64) {
        (*self.b.numer(), *self.b.denom())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// True when the value is a nonnegative integer (usable as a count).
    pub fn as_integer(&self) -> Option<u64> {
        if self.b.is_zero() && self.a.is_integer() && !self.a.is_negative() {
            Some(*self.a.numer() as u64)
        } else {
            None
        }
    }

    pub fn value(&self) -> f64 {
        let a = *self.a.numer() as f64 / *self.a.denom() as f64;
        let b = *self.b.numer() as f64 / *self.b.denom() as f64;
        a + b * std::f64::consts::SQRT_2
    }

    pub fn add(&self, other: &Self) -> Self {
        SemigroupElement {
            a: self.a + other.a,
            b: self.b + other.b,
        }
    }

    /// `self − other` when the difference stays in the cone.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let a = self.a - other.a;
        let b = self.b - other.b;
        if sign_of(a, b) == Ordering::Less {
            None
        } else {
            Some(SemigroupElement { a, b })
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for SemigroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SemigroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        sign_of(self.a - other.a, self.b - other.b)
    }
}

impl fmt::Display for SemigroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            return write!(f, "{}√2", self.b);
        }
        if self.b.is_negative() {
            write!(f, "{}-{}√2", self.a, -self.b)
        } else {
            write!(f, "{}+{}√2", self.a, self.b)
        }
    }
}

impl fmt::Debug for SemigroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A truncated positive cone: all `ℕ`-combinations of the generators with
/// value at most `cutoff`, sorted ascending, deduplicated exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    generators: Vec<SemigroupElement>,
    cutoff: SemigroupElement,
    elements: Vec<SemigroupElement>,
}

/// Enumerates the truncation by breadth-first closure: keep adding each
/// generator to every known element, pruning past the cutoff, until nothing
/// new appears. Coefficient vectors with equal value merge through the exact
/// `(a, b)` key.
pub fn enumerate(
    generators: &[SemigroupElement],
    cutoff: SemigroupElement,
) -> Result<IndexSet> {
    if generators.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    for g in generators {
        if g.is_zero() {
            return Err(Error::NonpositiveGenerator(g.to_string()));
        }
    }
    let mut known = std::collections::BTreeSet::new();
    known.insert(SemigroupElement::zero());
    let mut frontier = vec![SemigroupElement::zero()];
    while let Some(x) = frontier.pop() {
        for g in generators {
            let y = x.add(g);
            if y <= cutoff && known.insert(y) {
                frontier.push(y);
            }
        }
    }
    Ok(IndexSet {
        generators: generators.to_vec(),
        cutoff,
        elements: known.into_iter().collect(),
    })
}

/// Convenience: the set `{0, 1, ..., n}` for `Γ = ℤ`.
pub fn integer_set(n: u64) -> IndexSet {
    enumerate(&[SemigroupElement::from_int(1)], SemigroupElement::from_int(n)).unwrap()
}

impl IndexSet {
    pub fn elements(&self) -> &[SemigroupElement] {
        &self.elements
    }

    pub fn cutoff(&self) -> SemigroupElement {
        self.cutoff
    }

    pub fn generators(&self) -> &[SemigroupElement] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &SemigroupElement) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn position(&self, x: &SemigroupElement) -> Option<usize> {
        self.elements.binary_search(x).ok()
    }

    /// Members below `s`: the interval `[0, s)` (open) or `[0, s]` (closed).
    pub fn interval(&self, s: &SemigroupElement, closed: bool) -> Result<Vec<SemigroupElement>> {
        if *s > self.cutoff {
            return Err(Error::OutsideTruncation(s.to_string(), self.cutoff.to_string()));
        }
        Ok(self
            .elements
            .iter()
            .filter(|x| if closed { *x <= s } else { *x < s })
            .copied()
            .collect())
    }

    /// Labels `r` with `r + budget ≤ cutoff`: the subspace on which guarded
    /// identities are asserted.
    pub fn guard_band(&self, budget: &SemigroupElement) -> Vec<SemigroupElement> {
        self.elements
            .iter()
            .filter(|r| r.add(budget) <= self.cutoff)
            .copied()
            .collect()
    }
}

/// Window into the *group* lattice spanned by the generators: all
/// `ℤ`-combinations with coefficients bounded by `depth` whose value lands in
/// `[0, bound)`. For a dense group the window keeps filling in as `depth`
/// grows; for `Γ = ℤ` it stabilizes. This densifying enumeration backs the
/// compactness dichotomy checks; the `ℕ`-combination truncation of
/// [`enumerate`] cannot see new interval points past its own generators.
pub fn lattice_window(
    generators: &[SemigroupElement],
    bound: SemigroupElement,
    depth: i64,
) -> Result<Vec<SemigroupElement>> {
    if generators.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    if depth < 0 {
        return Err(Error::MalformedIndices(format!("negative depth {depth}")));
    }
    let mut out = std::collections::BTreeSet::new();
    let mut coeffs = vec![0i64; generators.len()];
    collect_window(generators, &bound, depth, 0, &mut coeffs, &mut out);
    Ok(out.into_iter().collect())
}

fn collect_window(
    gens: &[SemigroupElement],
    bound: &SemigroupElement,
    depth: i64,
    idx: usize,
    coeffs: &mut Vec<i64>,
    out: &mut std::collections::BTreeSet<SemigroupElement>,
) {
    if idx == gens.len() {
        let mut a = Q::zero();
        let mut b = Q::zero();
        for (c, g) in coeffs.iter().zip(gens.iter()) {
            let k = Q::from_integer(*c);
            a += k * g.a;
            b += k * g.b;
        }
        if sign_of(a, b) != Ordering::Less {
            let e = SemigroupElement { a, b };
            if e < *bound {
                out.insert(e);
            }
        }
        return;
    }
    for c in -depth..=depth {
        coeffs[idx] = c;
        collect_window(gens, bound, depth, idx + 1, coeffs, out);
    }
    coeffs[idx] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: u64) -> SemigroupElement {
        SemigroupElement::from_int(n)
    }

    fn sqrt2() -> SemigroupElement {
        SemigroupElement::sqrt2_times(1)
    }

    #[test]
    fn enumerate_integers() {
        let set = enumerate(&[int(1)], int(5)).unwrap();
        let want: Vec<_> = (0..=5).map(int).collect();
        assert_eq!(set.elements(), &want[..]);
    }

    #[test]
    fn enumerate_numerical_semigroup() {
        // Oracle: brute force over coefficient pairs n, m ≤ 4.
        let mut oracle = std::collections::BTreeSet::new();
        for n in 0u64..=4 {
            for m in 0u64..=4 {
                let v = 2 * n + 3 * m;
                if v <= 7 {
                    oracle.insert(int(v));
                }
            }
        }
        let oracle: Vec<_> = oracle.into_iter().collect();
        let set = enumerate(&[int(2), int(3)], int(7)).unwrap();
        assert_eq!(set.elements(), &oracle[..]);
        assert_eq!(
            set.elements(),
            &[int(0), int(2), int(3), int(4), int(5), int(6), int(7)]
        );
    }

    #[test]
    fn enumerate_dense_cutoff_three() {
        // Oracle: brute force over coefficient pairs with exact (a, b) dedup.
        let mut oracle = std::collections::BTreeSet::new();
        for n in 0i64..=3 {
            for m in 0i64..=3 {
                let e = SemigroupElement {
                    a: Q::from_integer(n),
                    b: Q::from_integer(m),
                };
                if e <= int(3) {
                    oracle.insert(e);
                }
            }
        }
        let oracle: Vec<_> = oracle.into_iter().collect();
        let set = enumerate(&[int(1), sqrt2()], int(3)).unwrap();
        assert_eq!(set.elements(), &oracle[..]);
        // 0, 1, √2, 2, 1+√2, 2√2, 3: everything of the form n + m√2 ≤ 3.
        assert_eq!(set.len(), 7);
        assert_eq!(set.elements()[2], sqrt2());
        assert_eq!(set.elements()[4], int(1).add(&sqrt2()));
    }

    #[test]
    fn enumerate_dense_wider_cutoff_matches_handlist() {
        // With cutoff 1+2√2 the enumeration is exactly the nine smallest
        // combinations, sorted by value.
        let cut = int(1).add(&SemigroupElement::sqrt2_times(2));
        let set = enumerate(&[int(1), sqrt2()], cut).unwrap();
        let want = vec![
            int(0),
            int(1),
            sqrt2(),
            int(2),
            int(1).add(&sqrt2()),
            SemigroupElement::sqrt2_times(2),
            int(3),
            int(2).add(&sqrt2()),
            int(1).add(&SemigroupElement::sqrt2_times(2)),
        ];
        assert_eq!(set.elements(), &want[..]);
    }

    #[test]
    fn enumerate_rejects_bad_generators() {
        assert!(matches!(enumerate(&[], int(3)), Err(Error::EmptyGenerators)));
        assert!(matches!(
            enumerate(&[SemigroupElement::zero()], int(3)),
            Err(Error::NonpositiveGenerator(_))
        ));
    }

    #[test]
    fn interval_closed_and_open() {
        let set = integer_set(5);
        assert_eq!(
            set.interval(&int(2), true).unwrap(),
            vec![int(0), int(1), int(2)]
        );
        assert_eq!(set.interval(&int(2), false).unwrap(), vec![int(0), int(1)]);
        assert!(set.interval(&int(9), true).is_err());
    }

    #[test]
    fn interval_dense_open() {
        let set = enumerate(&[int(1), sqrt2()], int(3)).unwrap();
        assert_eq!(
            set.interval(&int(2), false).unwrap(),
            vec![int(0), int(1), sqrt2()]
        );
    }

    #[test]
    fn guard_band_examples() {
        let set = integer_set(5);
        assert_eq!(
            set.guard_band(&int(2)),
            vec![int(0), int(1), int(2), int(3)]
        );
        assert_eq!(set.guard_band(&int(0)).len(), set.len());

        let dense = enumerate(&[int(1), sqrt2()], int(3)).unwrap();
        let banded = dense.guard_band(&int(1));
        for r in &banded {
            assert!(r.add(&int(1)) <= int(3));
        }
        assert_eq!(banded.len(), 4); // 0, 1, √2, 2
    }

    #[test]
    fn ordering_is_exact_near_collisions() {
        // 7/5 < √2 < 17/12, both classic convergents.
        let lo = SemigroupElement::new(7, 5, 0, 1).unwrap();
        let hi = SemigroupElement::new(17, 12, 0, 1).unwrap();
        assert!(lo < sqrt2());
        assert!(sqrt2() < hi);
        // 1 + √2 > 2√2 − ... equality only on identical coordinates
        assert_eq!(sqrt2().cmp(&sqrt2()), Ordering::Equal);
    }

    #[test]
    fn checked_sub_stays_in_cone() {
        let x = int(2);
        let y = sqrt2();
        let d = x.checked_sub(&y).unwrap(); // 2 − √2 ≈ 0.586
        assert!(d > SemigroupElement::zero());
        assert!(y.checked_sub(&x).is_none()); // √2 − 2 < 0
    }

    #[test]
    fn lattice_window_densifies_while_integers_stabilize() {
        let dense_gens = [int(1), sqrt2()];
        let mut last = 0;
        for depth in [4, 8, 16] {
            let w = lattice_window(&dense_gens, int(2), depth).unwrap();
            assert!(w.len() > last, "depth {depth} did not add points");
            last = w.len();
        }
        let int_gens = [int(1)];
        let a = lattice_window(&int_gens, int(2), 4).unwrap();
        let b = lattice_window(&int_gens, int(2), 16).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, vec![int(0), int(1)]);
    }

    #[test]
    fn integer_count_matches_cutoff() {
        for n in 0..10 {
            assert_eq!(integer_set(n).len() as u64, n + 1);
        }
    }
}
