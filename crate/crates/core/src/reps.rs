//! Covariant partial-isometric representations: building them from
//! projection families or from a semigroup of partial isometries, checking
//! both covariance formulations, and deciding faithfulness witnesses.

use crate::error::{Error, Result};
use crate::ops::{self, Basis, Budget, Operator};
use crate::linalg::{ComplexMatrix, Tolerance};
use crate::spaces::{IndexSet, SemigroupElement};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// A decreasing family of projections indexed by semigroup elements:
/// `r ≤ t` forces `P_r ≥ P_t`.
#[derive(Debug, Clone)]
pub struct ProjectionFamily {
    pub labels: Vec<SemigroupElement>,
    pub projections: BTreeMap<SemigroupElement, Operator>,
}

impl ProjectionFamily {
    pub fn new(projections: BTreeMap<SemigroupElement, Operator>) -> Self {
        ProjectionFamily {
            labels: projections.keys().copied().collect(),
            projections,
        }
    }
}

/// The representation a monotone projection family generates, together with
/// its faithfulness verdict.
#[derive(Debug, Clone)]
pub struct ProjectionRep {
    pub family: ProjectionFamily,
    pub faithful: bool,
    /// Smallest pairwise distance `‖P_r − P_t‖` over `r ≠ t`.
    pub min_separation: f64,
}

impl ProjectionRep {
    /// Image of the finite combination `Σ c_r 1_r`.
    pub fn apply(&self, combo: &[(SemigroupElement, Complex64)]) -> Result<Operator> {
        let mut acc: Option<Operator> = None;
        for (r, c) in combo {
            let p = self
                .family
                .projections
                .get(r)
                .ok_or_else(|| Error::MissingIndex(r.to_string()))?;
            let term = p.scale(*c);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        acc.ok_or_else(|| Error::MalformedIndices("empty combination".into()))
    }
}

/// Checks monotonicity (`P_r ≥ P_t` for `r ≤ t`, via `‖P_t P_r − P_t‖`),
/// then reports whether distinct labels carry distinct projections; the
/// representation is faithful exactly in that case.
pub fn rep_from_projections(fam: ProjectionFamily, tol: &Tolerance) -> Result<ProjectionRep> {
    for (r, p) in &fam.projections {
        let idem = ops::residual(&p.compose(p)?, p)?;
        let sa = ops::residual(&p.adjoint(), p)?;
        if idem > tol.eq_tol || sa > tol.eq_tol {
            return Err(Error::NotAProjection(idem.max(sa)));
        }
        let _ = r;
    }
    let labels = &fam.labels;
    for (i, r) in labels.iter().enumerate() {
        for t in &labels[i + 1..] {
            let pr = &fam.projections[r];
            let pt = &fam.projections[t];
            // r < t requires P_r ≥ P_t, i.e. P_t P_r = P_t.
            let res = ops::residual(&pt.compose(pr)?, pt)?;
            if res > tol.eq_tol {
                return Err(Error::NonMonotoneFamily(r.to_string(), t.to_string()));
            }
        }
    }
    let mut min_sep = f64::INFINITY;
    for (i, r) in labels.iter().enumerate() {
        for t in &labels[i + 1..] {
            let d = ops::residual(&fam.projections[r], &fam.projections[t])?;
            min_sep = min_sep.min(d);
        }
    }
    if labels.len() < 2 {
        min_sep = f64::INFINITY;
    }
    Ok(ProjectionRep {
        faithful: min_sep > tol.eq_tol,
        min_separation: min_sep,
        family: fam,
    })
}

/// Which translation action the covariance is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    /// Right translation on the whole cone: `τ_s(1_t) = 1_{s+t}`.
    Tau,
    /// Right translation on an interval `[0,s₀)` or `[0,s₀]`; indicators
    /// translated out of the interval vanish.
    TauInterval {
        endpoint: SemigroupElement,
        closed: bool,
    },
    /// Left translation on `ℕ`: `σ_s(1_t) = 1_{t−s}` for `t ≥ s`, constant
    /// one below.
    Sigma,
}

impl ActionKind {
    fn in_interval(&self, x: &SemigroupElement) -> bool {
        match self {
            ActionKind::TauInterval { endpoint, closed } => {
                if *closed {
                    x <= endpoint
                } else {
                    x < endpoint
                }
            }
            _ => true,
        }
    }

    /// Action on the indicator generator `1_t`: the new index, or `None`
    /// when the image is the zero function, or the constant one (σ below the
    /// shift), encoded as `Some(0)` since `1_0 = 1`.
    fn on_indicator(
        &self,
        s: &SemigroupElement,
        t: &SemigroupElement,
    ) -> Option<SemigroupElement> {
        match self {
            ActionKind::Tau => Some(s.add(t)),
            ActionKind::TauInterval { .. } => {
                let st = s.add(t);
                if self.in_interval(&st) {
                    Some(st)
                } else {
                    None
                }
            }
            ActionKind::Sigma => Some(t.checked_sub(s).unwrap_or_else(SemigroupElement::zero)),
        }
    }

    /// Image of the unit: `ᾱ_s(1)` as an indicator index, `None` if zero.
    fn unit_image(&self, s: &SemigroupElement) -> Option<SemigroupElement> {
        match self {
            ActionKind::Tau => Some(*s),
            ActionKind::TauInterval { .. } => {
                if self.in_interval(s) {
                    Some(*s)
                } else {
                    None
                }
            }
            ActionKind::Sigma => Some(SemigroupElement::zero()),
        }
    }
}

/// A candidate covariant pair `(π, V)` on one model space, with `π` recorded
/// through its values on the indicator generators.
#[derive(Debug, Clone)]
pub struct CovariantPair {
    pub action: ActionKind,
    pub pi_images: BTreeMap<SemigroupElement, Operator>,
    pub isometries: BTreeMap<SemigroupElement, Operator>,
}

impl CovariantPair {
    fn pi(&self, t: &SemigroupElement) -> Result<&Operator> {
        self.pi_images
            .get(t)
            .ok_or_else(|| Error::MissingIndex(format!("pi(1_{t})")))
    }

    fn v(&self, s: &SemigroupElement) -> Result<&Operator> {
        self.isometries
            .get(s)
            .ok_or_else(|| Error::MissingIndex(format!("V_{s}")))
    }

    fn zero_op(&self) -> Operator {
        let any = self.pi_images.values().next().expect("nonempty pair");
        Operator::zero_on(any.basis.clone())
    }
}

/// Builds `(π_V, V)` from a partial-isometric representation with
/// `π_V(1_r) = V_r V_r*`, after checking that `V_r` vanishes outside the
/// interval.
pub fn pi_from_v(
    v: BTreeMap<SemigroupElement, Operator>,
    action: ActionKind,
    tol: &Tolerance,
) -> Result<CovariantPair> {
    let mut pi_images = BTreeMap::new();
    for (r, vr) in &v {
        if !action.in_interval(r) && vr.norm()? > tol.eq_tol {
            return Err(Error::NonzeroOutsideInterval(r.to_string()));
        }
        pi_images.insert(*r, vr.compose(&vr.adjoint())?);
    }
    Ok(CovariantPair {
        action,
        pi_images,
        isometries: v,
    })
}

/// Residuals of the two covariance formulations, each over all available
/// `(s, t)` index pairs, on the guard band.
#[derive(Debug, Clone)]
pub struct CovarianceReport {
    /// Max residual of `π(α_s(1_t)) = V_s π(1_t) V_s*` and
    /// `[V_s*V_s, π(1_t)] = 0`.
    pub conjugation_residual: f64,
    /// Max residual of `π(α_s(1_t)) V_s = V_s π(1_t)` and
    /// `π(ᾱ_s(1)) = V_s V_s*`.
    pub intertwining_residual: f64,
    pub pairs_checked: usize,
}

impl CovarianceReport {
    pub fn conjugation_passes(&self, tol: &Tolerance) -> bool {
        self.conjugation_residual <= tol.eq_tol
    }

    pub fn intertwining_passes(&self, tol: &Tolerance) -> bool {
        self.intertwining_residual <= tol.eq_tol
    }

    /// The two formulations are equivalent; any split verdict is a bug in
    /// the pair under test (or a perturbation straddling the threshold).
    pub fn verdicts_agree(&self, tol: &Tolerance) -> bool {
        self.conjugation_passes(tol) == self.intertwining_passes(tol)
    }
}

pub fn check_covariance(pair: &CovariantPair, _tol: &Tolerance) -> Result<CovarianceReport> {
    let mut conj = 0.0f64;
    let mut intertwine = 0.0f64;
    let mut pairs = 0usize;
    let s_indices: Vec<SemigroupElement> = pair.isometries.keys().copied().collect();
    let t_indices: Vec<SemigroupElement> = pair.pi_images.keys().copied().collect();
    for s in &s_indices {
        let vs = pair.v(s)?;
        for t in &t_indices {
            let pit = pair.pi(t)?;
            let alpha = match pair.action.on_indicator(s, t) {
                Some(u) => match pair.pi_images.get(&u) {
                    Some(p) => p.clone(),
                    // Translated past every recorded index: skip the pair
                    // rather than guess at an unrepresented generator.
                    None => continue,
                },
                None => pair.zero_op(),
            };
            // π(α_s(1_t)) = V_s π(1_t) V_s*
            let rhs = vs.compose(pit)?.compose(&vs.adjoint())?;
            conj = conj.max(ops::guarded_residual(&alpha, &rhs)?);
            // V_s*V_s commutes with π(1_t)
            let init = vs.adjoint().compose(vs)?;
            conj = conj.max(ops::guarded_residual(
                &init.compose(pit)?,
                &pit.compose(&init)?,
            )?);
            // π(α_s(1_t)) V_s = V_s π(1_t)
            intertwine = intertwine.max(ops::guarded_residual(
                &alpha.compose(vs)?,
                &vs.compose(pit)?,
            )?);
            pairs += 1;
        }
        // π(ᾱ_s(1)) = V_s V_s*
        let unit = match pair.action.unit_image(s) {
            Some(u) => match pair.pi_images.get(&u) {
                Some(p) => p.clone(),
                None => continue,
            },
            None => pair.zero_op(),
        };
        let range = vs.compose(&vs.adjoint())?;
        intertwine = intertwine.max(ops::guarded_residual(&unit, &range)?);
    }
    Ok(CovarianceReport {
        conjugation_residual: conj,
        intertwining_residual: intertwine,
        pairs_checked: pairs,
    })
}

/// The translation representation induced from a diagonal representation
/// `π₀` of the indicator algebra on an inner space.
///
/// The model space is spanned by pairs `(r, slot)` with `r` in the truncated
/// cone and `slot` an inner basis vector surviving `π₀(1_r)`; on it,
/// `π(1_t)` acts diagonally by `π₀(1_{t+r})` in block `r` and `V_s` maps
/// block `r+s` down to block `r`.
pub fn induced_rep(
    pi0_diag: &BTreeMap<SemigroupElement, Vec<bool>>,
    set: &IndexSet,
    inner_dim: usize,
    max_index: &SemigroupElement,
) -> Result<CovariantPair> {
    if inner_dim == 0 {
        return Err(Error::MalformedIndices("inner dimension zero".into()));
    }
    for (r, mask) in pi0_diag {
        if mask.len() != inner_dim {
            return Err(Error::DimensionMismatch(format!(
                "mask at {r} has length {} expected {inner_dim}",
                mask.len()
            )));
        }
    }
    let surviving = |r: &SemigroupElement, slot: usize| -> bool {
        pi0_diag.get(r).map(|m| m[slot]).unwrap_or(false)
    };
    // Basis of the essential subspace, ordered by (r, slot).
    let mut labels: Vec<(SemigroupElement, usize)> = Vec::new();
    for r in set.elements() {
        for slot in 0..inner_dim {
            if surviving(r, slot) {
                labels.push((*r, slot));
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::MalformedIndices(
            "induced space is zero: no slot survives any block".into(),
        ));
    }
    let dim = labels.len();
    // The guard structure lives on the block index: a basis vector sits at
    // distance cutoff − r from the boundary regardless of its inner slot.
    let basis = Basis::semigroup(labels.iter().map(|(r, _)| *r).collect(), set.cutoff());
    let pos: BTreeMap<(SemigroupElement, usize), usize> = labels
        .iter()
        .enumerate()
        .map(|(i, &k)| (k, i))
        .collect();
    let zero = Budget::Element(SemigroupElement::zero());
    let mut pi_images = BTreeMap::new();
    let mut isometries = BTreeMap::new();
    for idx in set.elements() {
        if *idx > *max_index {
            break;
        }
        // π(1_t): block r scales by the π₀(1_{t+r}) diagonal. Blocks with
        // t + r past the cutoff fall outside the recorded masks; the budget
        // keeps comparisons off them.
        let mut pm = ComplexMatrix::zeros(dim, dim);
        for (i, (r, slot)) in labels.iter().enumerate() {
            let tr = idx.add(r);
            if tr <= set.cutoff() && surviving(&tr, *slot) {
                pm.set(i, i, Complex64::new(1.0, 0.0));
            }
        }
        pi_images.insert(
            *idx,
            Operator::with_budgets(pm, basis.clone(), Budget::Element(*idx), Budget::Element(*idx))?,
        );
        // V_s: ε_{(r+s, slot)} ↦ ε_{(r, slot)}. Moving blocks down loses
        // nothing; the adjoint climbs toward the cutoff.
        let mut vm = ComplexMatrix::zeros(dim, dim);
        for (j, (r, slot)) in labels.iter().enumerate() {
            if let Some(rs) = r.checked_sub(idx) {
                if let Some(&i) = pos.get(&(rs, *slot)) {
                    vm.set(i, j, Complex64::new(1.0, 0.0));
                }
            }
        }
        isometries.insert(
            *idx,
            Operator::with_budgets(vm, basis.clone(), zero, Budget::Element(*idx))?,
        );
    }
    Ok(CovariantPair {
        action: ActionKind::Tau,
        pi_images,
        isometries,
    })
}

/// Outcome of the concrete faithfulness criterion.
#[derive(Debug, Clone, Copy)]
pub struct Witness {
    pub min_norm: f64,
    pub ok: bool,
}

/// Smallest guarded norm of `(1 − V_r*V_r)(V_u V_u* − V_t V_t*)` over
/// `r` in `r_range` (nonzero) and `u < t` from `uv_range`. A faithful
/// system keeps every such product away from zero; an isometric system
/// kills the first factor.
pub fn faithfulness_witness(
    v: &BTreeMap<SemigroupElement, Operator>,
    r_range: &[SemigroupElement],
    uv_range: &[SemigroupElement],
    _tol: &Tolerance,
) -> Result<Witness> {
    let mut min_norm = f64::INFINITY;
    let tol = Tolerance::default();
    for r in r_range {
        if r.is_zero() {
            continue;
        }
        let vr = v
            .get(r)
            .ok_or_else(|| Error::MissingIndex(r.to_string()))?;
        let id = Operator::identity_on(vr.basis.clone());
        let gap = id.sub(&vr.adjoint().compose(vr)?)?;
        for (i, u) in uv_range.iter().enumerate() {
            for t in &uv_range[i + 1..] {
                let vu = v
                    .get(u)
                    .ok_or_else(|| Error::MissingIndex(u.to_string()))?;
                let vt = v
                    .get(t)
                    .ok_or_else(|| Error::MissingIndex(t.to_string()))?;
                let ranges = vu
                    .compose(&vu.adjoint())?
                    .sub(&vt.compose(&vt.adjoint())?)?;
                let prod = gap.compose(&ranges)?;
                min_norm = min_norm.min(prod.guarded_norm()?);
            }
        }
    }
    if min_norm == f64::INFINITY {
        return Err(Error::MalformedIndices(
            "witness ranges produced no (r, u < t) triple".into(),
        ));
    }
    Ok(Witness {
        min_norm,
        ok: min_norm > tol.eq_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{grid_shift, indicator_projection, toeplitz_shift, truncated_j, GridMode};
    use crate::spaces::integer_set;

    fn int(n: u64) -> SemigroupElement {
        SemigroupElement::from_int(n)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn indicator_family_is_faithful() {
        let set = integer_set(6);
        let mut m = BTreeMap::new();
        for s in 0..=6u64 {
            m.insert(int(s), indicator_projection(&set, &int(s)).unwrap());
        }
        let rep = rep_from_projections(ProjectionFamily::new(m), &tol()).unwrap();
        assert!(rep.faithful);
        assert!(rep.min_separation >= 1.0 - 1e-12);
    }

    #[test]
    fn constant_family_is_not_faithful() {
        let set = integer_set(4);
        let p = indicator_projection(&set, &int(2)).unwrap();
        let mut m = BTreeMap::new();
        for s in 0..=3u64 {
            m.insert(int(s), p.clone());
        }
        let rep = rep_from_projections(ProjectionFamily::new(m), &tol()).unwrap();
        assert!(!rep.faithful);
        assert_eq!(rep.min_separation, 0.0);
    }

    #[test]
    fn faithful_verdict_matches_pairwise_oracle() {
        // Oracle: exhaustive double loop over distinct labels.
        let set = integer_set(5);
        let mut m = BTreeMap::new();
        for s in 0..=5u64 {
            let idx = if s < 3 { s } else { 3 }; // collide past 3
            m.insert(int(s), indicator_projection(&set, &int(idx)).unwrap());
        }
        let fam = ProjectionFamily::new(m);
        let mut oracle_distinct = true;
        for r in &fam.labels {
            for t in &fam.labels {
                if r < t {
                    let d = ops::residual(&fam.projections[r], &fam.projections[t]).unwrap();
                    oracle_distinct &= d > 1e-10;
                }
            }
        }
        let rep = rep_from_projections(fam, &tol()).unwrap();
        assert_eq!(rep.faithful, oracle_distinct);
        assert!(!rep.faithful);
    }

    #[test]
    fn range_projections_of_truncated_shifts_are_monotone() {
        let set = integer_set(8);
        let s0 = int(5);
        let mut m = BTreeMap::new();
        for t in 0..=5u64 {
            let j = truncated_j(&set, &s0, &int(t)).unwrap();
            m.insert(int(t), j.compose(&j.adjoint()).unwrap());
        }
        let rep = rep_from_projections(ProjectionFamily::new(m), &tol()).unwrap();
        assert!(rep.faithful);
    }

    #[test]
    fn non_monotone_family_is_rejected() {
        let set = integer_set(4);
        let mut m = BTreeMap::new();
        // Reversed: P_0 small, P_1 big violates monotonicity.
        m.insert(int(0), indicator_projection(&set, &int(3)).unwrap());
        m.insert(int(1), indicator_projection(&set, &int(0)).unwrap());
        assert!(matches!(
            rep_from_projections(ProjectionFamily::new(m), &tol()),
            Err(Error::NonMonotoneFamily(_, _))
        ));
    }

    #[test]
    fn apply_builds_finite_combinations() {
        let set = integer_set(4);
        let mut m = BTreeMap::new();
        for s in 0..=2u64 {
            m.insert(int(s), indicator_projection(&set, &int(s)).unwrap());
        }
        let rep = rep_from_projections(ProjectionFamily::new(m), &tol()).unwrap();
        let combo = rep
            .apply(&[
                (int(0), Complex64::new(1.0, 0.0)),
                (int(1), Complex64::new(-1.0, 0.0)),
            ])
            .unwrap();
        // 1_0 − 1_1 is the rank-one projection on ε_0.
        assert_eq!(combo.matrix.get(0, 0).re, 1.0);
        assert_eq!(combo.matrix.get(1, 1).re, 0.0);
    }

    fn j_family(set: &IndexSet, s0: u64, up_to: u64) -> BTreeMap<SemigroupElement, Operator> {
        let mut v = BTreeMap::new();
        for t in 0..=up_to {
            v.insert(int(t), truncated_j(set, &int(s0), &int(t)).unwrap());
        }
        v
    }

    #[test]
    fn pi_from_v_on_interval_family() {
        let set = integer_set(8);
        let pair = pi_from_v(
            j_family(&set, 4, 6),
            ActionKind::TauInterval {
                endpoint: int(4),
                closed: true,
            },
            &tol(),
        )
        .unwrap();
        let report = check_covariance(&pair, &tol()).unwrap();
        assert_eq!(report.conjugation_residual, 0.0);
        assert_eq!(report.intertwining_residual, 0.0);
        assert!(report.verdicts_agree(&tol()));
    }

    #[test]
    fn pi_from_v_open_interval_family() {
        let set = integer_set(8);
        let mut v = BTreeMap::new();
        for t in 0..=5u64 {
            v.insert(int(t), crate::ops::truncated_k(&set, &int(4), &int(t)).unwrap());
        }
        let pair = pi_from_v(
            v,
            ActionKind::TauInterval {
                endpoint: int(4),
                closed: false,
            },
            &tol(),
        )
        .unwrap();
        let report = check_covariance(&pair, &tol()).unwrap();
        assert_eq!(report.conjugation_residual, 0.0);
        assert!(report.verdicts_agree(&tol()));
    }

    #[test]
    fn pi_from_v_degenerate_support_at_zero() {
        // V vanishes except at the identity: every nontrivial indicator
        // image collapses to zero.
        let set = integer_set(6);
        let basis = indicator_projection(&set, &int(0)).unwrap().basis;
        let mut v = BTreeMap::new();
        v.insert(int(0), Operator::identity_on(basis.clone()));
        for t in 1..=3u64 {
            v.insert(int(t), Operator::zero_on(basis.clone()));
        }
        let pair = pi_from_v(
            v,
            ActionKind::TauInterval {
                endpoint: int(0),
                closed: true,
            },
            &tol(),
        )
        .unwrap();
        for t in 1..=3u64 {
            assert!(pair.pi_images[&int(t)].matrix.is_zero());
        }
        let id = Operator::identity_on(basis);
        assert_eq!(ops::residual(&pair.pi_images[&int(0)], &id).unwrap(), 0.0);
    }

    #[test]
    fn pi_from_v_rejects_support_outside_interval() {
        let set = integer_set(8);
        // The full Toeplitz family does not vanish past the endpoint.
        let mut v = BTreeMap::new();
        for t in 0..=6u64 {
            v.insert(int(t), toeplitz_shift(&set, &int(t)).unwrap());
        }
        assert!(matches!(
            pi_from_v(
                v,
                ActionKind::TauInterval {
                    endpoint: int(3),
                    closed: true
                },
                &tol()
            ),
            Err(Error::NonzeroOutsideInterval(_))
        ));
    }

    #[test]
    fn toeplitz_pair_is_covariant() {
        let set = integer_set(10);
        let mut pi_images = BTreeMap::new();
        let mut isometries = BTreeMap::new();
        for s in 0..=10u64 {
            pi_images.insert(int(s), indicator_projection(&set, &int(s)).unwrap());
            if s <= 4 {
                isometries.insert(int(s), toeplitz_shift(&set, &int(s)).unwrap());
            }
        }
        let pair = CovariantPair {
            action: ActionKind::Tau,
            pi_images,
            isometries,
        };
        let report = check_covariance(&pair, &tol()).unwrap();
        assert!(report.conjugation_residual <= 1e-13, "{report:?}");
        assert!(report.intertwining_residual <= 1e-13);
        assert!(report.verdicts_agree(&tol()));
    }

    #[test]
    fn grid_pair_is_covariant() {
        let n = 16;
        let mut v = BTreeMap::new();
        for p in 0..=3usize {
            v.insert(int(p as u64), grid_shift(n, GridMode::Tau, p).unwrap());
        }
        let pair = pi_from_v(v, ActionKind::Tau, &tol()).unwrap();
        let report = check_covariance(&pair, &tol()).unwrap();
        assert!(report.conjugation_residual <= 1e-12);
        assert!(report.verdicts_agree(&tol()));
    }

    #[test]
    fn perturbed_pair_fails_both_formulations() {
        let set = integer_set(8);
        let mut pi_images = BTreeMap::new();
        let mut isometries = BTreeMap::new();
        for s in 0..=8u64 {
            pi_images.insert(int(s), indicator_projection(&set, &int(s)).unwrap());
            if s <= 3 {
                let t = toeplitz_shift(&set, &int(s)).unwrap();
                let bump = crate::ops::matrix_unit(&t.basis, 0, (s as usize + 1) % 5)
                    .unwrap()
                    .scale(Complex64::new(1e-3, 0.0));
                isometries.insert(int(s), if s == 2 { t.add(&bump).unwrap() } else { t });
            }
        }
        let pair = CovariantPair {
            action: ActionKind::Tau,
            pi_images,
            isometries,
        };
        let report = check_covariance(&pair, &tol()).unwrap();
        assert!(!report.conjugation_passes(&tol()));
        assert!(!report.intertwining_passes(&tol()));
        assert!(report.verdicts_agree(&tol()));
    }

    #[test]
    fn induced_rep_is_covariant_and_v0_is_identity() {
        let set = integer_set(8);
        // Faithful diagonal π₀: slot j survives 1_r exactly when r ≤ j.
        let inner = 4usize;
        let mut diag = BTreeMap::new();
        for r in set.elements() {
            let mask: Vec<bool> = (0..inner)
                .map(|j| *r <= int(j as u64))
                .collect();
            diag.insert(*r, mask);
        }
        let pair = induced_rep(&diag, &set, inner, &int(4)).unwrap();
        // Distinct indicators act distinctly: the induced representation
        // keeps the faithfulness of the diagonal inner representation on
        // the guarded block labels.
        for s in 0..=3u64 {
            let d = ops::residual(&pair.pi_images[&int(s)], &pair.pi_images[&int(s + 1)]).unwrap();
            assert!(d > 0.5, "indicators {s} and {} collide", s + 1);
        }
        let v0 = &pair.isometries[&int(0)];
        assert_eq!(
            ops::residual(v0, &Operator::identity_on(v0.basis.clone())).unwrap(),
            0.0
        );
        let report = check_covariance(&pair, &tol()).unwrap();
        assert!(report.conjugation_residual <= 1e-13, "{report:?}");
        assert!(report.verdicts_agree(&tol()));
    }

    #[test]
    fn grid_witness_is_one_and_isometries_fail() {
        let n = 16;
        let mut v = BTreeMap::new();
        for p in 0..=6usize {
            v.insert(int(p as u64), grid_shift(n, GridMode::Tau, p).unwrap());
        }
        let rs: Vec<SemigroupElement> = (1..=2u64).map(int).collect();
        let uvs: Vec<SemigroupElement> = (0..=3u64).map(int).collect();
        let w = faithfulness_witness(&v, &rs, &uvs, &tol()).unwrap();
        assert!(w.ok);
        assert!((w.min_norm - 1.0).abs() <= 1e-12);

        let set = integer_set(12);
        let mut tv = BTreeMap::new();
        for s in 0..=4u64 {
            tv.insert(int(s), toeplitz_shift(&set, &int(s)).unwrap());
        }
        let rs: Vec<SemigroupElement> = (1..=2u64).map(int).collect();
        let uvs: Vec<SemigroupElement> = (0..=2u64).map(int).collect();
        let w = faithfulness_witness(&tv, &rs, &uvs, &tol()).unwrap();
        assert!(!w.ok);
        assert_eq!(w.min_norm, 0.0);
    }

    #[test]
    fn interval_direct_sum_witness_is_faithful() {
        // ⊕_{r ∈ I} J^r acts on the direct sum of the interval spaces; the
        // block at r = u already witnesses every (v, u < t).
        let set = integer_set(8);
        let endpoint = 3u64;
        let blocks: Vec<u64> = (0..=endpoint).collect();
        let mut v: BTreeMap<SemigroupElement, Operator> = BTreeMap::new();
        for t in 0..=endpoint + 1 {
            let parts: Vec<Operator> = blocks
                .iter()
                .map(|&r| truncated_j(&set, &int(r), &int(t)).unwrap())
                .collect();
            v.insert(int(t), crate::ops::direct_sum(&parts).unwrap());
        }
        let rs: Vec<SemigroupElement> = (1..=2u64).map(int).collect();
        let uvs: Vec<SemigroupElement> = (0..=endpoint).map(int).collect();
        let w = faithfulness_witness(&v, &rs, &uvs, &tol()).unwrap();
        assert!(w.ok, "min norm {}", w.min_norm);
    }
}
