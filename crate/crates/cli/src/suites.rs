//! The named verification suites. Each suite turns a family of operator
//! identities into residual checks; a check passes when its residual stays
//! under its pinned threshold.

use crate::config::SuiteConfig;
use crate::report::CheckResult;
use num_complex::Complex64;
use picp_core::algebra;
use picp_core::linalg::{self, ComplexMatrix};
use picp_core::ops::{self, Basis, GridMode, Operator};
use picp_core::reps::{self, ActionKind};
use picp_core::sigma;
use picp_core::spaces::{self, SemigroupElement};
use picp_core::universal::{self, Assignment};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::Instant;

pub struct SuiteInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub paper_anchor: &'static str,
    run: fn(&SuiteConfig) -> Vec<CheckResult>,
}

/// Stable, sorted suite registry. Suite names are public API.
pub fn registry() -> &'static [SuiteInfo] {
    &[
        SuiteInfo {
            name: "automorphism",
            description: "band-compression images of the split family match their index reflections",
            paper_anchor: "α(e^n_{i,j}) = e^n_{n-i,n-j}",
            run: suite_automorphism,
        },
        SuiteInfo {
            name: "comideal",
            description: "commutator-ideal span reduces under left shifts as the case analysis dictates",
            paper_anchor: "C_Γ = span{T_r(1 - T_u T_u*) T_t*}",
            run: suite_comideal,
        },
        SuiteInfo {
            name: "commprojs",
            description: "initial/range projections of shift families commute and obey the lattice formulas",
            paper_anchor: "V_s*V_s V_t*V_t = V_{s∨t}*V_{s∨t}; all such projections commute",
            run: suite_commprojs,
        },
        SuiteInfo {
            name: "covariance",
            description: "the two covariance formulations agree on constructed pairs and perturbed negatives",
            paper_anchor: "π(α_s(a)) = V_s π(a) V_s* and [V_s*V_s, π(a)] = 0 ⇔ π(α_s(a))V_s = V_s π(a) and π(ᾱ_s(1)) = V_sV_s*",
            run: suite_covariance,
        },
        SuiteInfo {
            name: "csigman_symbol",
            description: "backward-shift model images keep a constant symbol and hit the matrix units",
            paper_anchor: "the backward-shift crossed product is {f ∈ C(ℕ∪{∞}, T(ℤ)) : ψ_T(f(n)) constant}",
            run: suite_csigman_symbol,
        },
        SuiteInfo {
            name: "dirsum",
            description: "generated *-algebra dimensions of truncated shifts and their direct sums",
            paper_anchor: "C*(⊕_{k≤n} J_k) ≅ ⊕_{k≤n} M_{k+1}(C)",
            run: suite_dirsum,
        },
        SuiteInfo {
            name: "faithfulness",
            description: "witness norms separate faithful systems from isometric ones; grid monomials independent",
            paper_anchor: "(1 - V_r*V_r)(V_u V_u* - V_t V_t*) ≠ 0 for r > 0, u < t",
            run: suite_faithfulness,
        },
        SuiteInfo {
            name: "jk_decomposition",
            description: "closed-interval shifts decompose into open-interval shifts plus a corner unit",
            paper_anchor: "J^s_t = K^s_t + ε_s ⊗ ε̄_{s-t}; C*(J^s) = C*(K^s) + K(ℓ²([0,s]))",
            run: suite_jk_decomposition,
        },
        SuiteInfo {
            name: "kerrs_rank",
            description: "interval-shift ranks grow with enumeration depth over dense groups, stabilize over ℤ",
            paper_anchor: "K^s_t is not compact when t < s and the group is dense in ℝ",
            run: suite_kerrs_rank,
        },
        SuiteInfo {
            name: "matrixunits",
            description: "shift words produce every matrix unit (reflected indexing, offset reported)",
            paper_anchor: "e_i ⊗ ē_j arises from (J_k*)^{j-1} J_k^k (J_k*)^k J_k^{i-1}",
            run: suite_matrixunits,
        },
        SuiteInfo {
            name: "normalform",
            description: "word rewriting is sound against the grid model and band-extracted symbols",
            paper_anchor: "every word in a power partial isometry reduces to v*^s v^m v*^m v^t",
            run: suite_normalform,
        },
        SuiteInfo {
            name: "partial_isometries",
            description: "every constructed shift family passes the VV*V test; powers compose",
            paper_anchor: "V is a partial isometry iff VV*V = V",
            run: suite_partial_isometries,
        },
        SuiteInfo {
            name: "pi_n",
            description: "band compressions send the gap family to matrix units with full-span differences",
            paper_anchor: "π_n(f^m_{i,j}) = T^i(1 - TT*)(T*)^j for i,j,m ≤ n, else 0",
            run: suite_pi_n,
        },
        SuiteInfo {
            name: "rform",
            description: "the two kernel spanning families share their consecutive differences",
            paper_anchor: "f^m_{i,j} - f^{m+1}_{i,j} = g^m_{m-i,m-j} - g^{m+1}_{m-i,m-j}",
            run: suite_rform,
        },
        SuiteInfo {
            name: "sigma",
            description: "gap chains and indicator images determine each other; faithfulness via gap separation",
            paper_anchor: "π(1_n) = (V*)^n V^n + Σ_k (V*)^k Q_{n-k} V^k; faithful iff Q_n ≠ Q_{n+1}",
            run: suite_sigma,
        },
        SuiteInfo {
            name: "tool_criterion",
            description: "product-of-partial-isometries criterion on seeded random pairs",
            paper_anchor: "ST is a partial isometry iff S*S commutes with TT*",
            run: suite_tool_criterion,
        },
    ]
}

pub fn suite_names() -> Vec<&'static str> {
    registry().iter().map(|s| s.name).collect()
}

pub fn run_suites(config: &SuiteConfig) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    for info in registry() {
        if config.suites.iter().any(|s| s == info.name) {
            checks.extend((info.run)(config));
        }
    }
    if config.inject_failure {
        checks.push(timed(
            "negative_control.injected",
            "deliberately broken identity (negative control)",
            0.0,
            || {
                let set = spaces::integer_set(6);
                let j = ops::truncated_j(&set, &int(2), &int(1)).unwrap();
                let bumped = j
                    .add(
                        &ops::matrix_unit(&j.basis, 0, 2)
                            .unwrap()
                            .scale(Complex64::new(1e-3, 0.0)),
                    )
                    .unwrap();
                ops::residual(&j, &bumped).unwrap()
            },
        ));
    }
    checks
}

fn int(n: u64) -> SemigroupElement {
    SemigroupElement::from_int(n)
}

fn timed(
    name: &str,
    anchor: &str,
    threshold: f64,
    f: impl FnOnce() -> f64,
) -> CheckResult {
    let start = Instant::now();
    let residual = f();
    CheckResult::new(
        name,
        anchor,
        residual,
        threshold,
        start.elapsed().as_millis() as u64,
    )
}

fn anchored(info_name: &str) -> &'static str {
    registry()
        .iter()
        .find(|s| s.name == info_name)
        .map(|s| s.paper_anchor)
        .unwrap_or("")
}

fn jk_op(k: u64) -> Operator {
    let set = spaces::integer_set(k + 1);
    ops::truncated_j(&set, &int(k), &int(1)).unwrap()
}

// ---------------------------------------------------------------------------

fn suite_dirsum(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("dirsum");
    let tol = cfg.tol;
    let mut out = Vec::new();
    for k in 1u64..=5 {
        out.push(timed(
            &format!("algebra.dim_jk_k{k}"),
            anchor,
            0.0,
            || {
                let want = ((k + 1) * (k + 1)) as usize;
                match algebra::generate(&[jk_op(k)], want + 8, &tol) {
                    Ok(ab) if ab.converged => (ab.dim() as f64 - want as f64).abs(),
                    _ => f64::INFINITY,
                }
            },
        ));
    }
    for n in 1u64..=4 {
        out.push(timed(
            &format!("algebra.dim_dirsum_n{n}"),
            anchor,
            0.0,
            || {
                let parts: Vec<Operator> = (1..=n).map(jk_op).collect();
                let d = ops::direct_sum(&parts).unwrap();
                let want: u64 = (1..=n).map(|k| (k + 1) * (k + 1)).sum();
                match algebra::generate(&[d], want as usize + 8, &tol) {
                    Ok(ab) if ab.converged => (ab.dim() as f64 - want as f64).abs(),
                    _ => f64::INFINITY,
                }
            },
        ));
    }
    out.push(timed("algebra.dirsum_nilpotent_word", anchor, 0.0, || {
        let mut worst = 0.0f64;
        for n in 2u64..=4 {
            let parts: Vec<Operator> = (1..=n).map(jk_op).collect();
            let d = ops::direct_sum(&parts).unwrap();
            let mut p = d.clone();
            for _ in 1..n {
                p = p.compose(&d).unwrap();
            }
            let lead: u64 = (1..n).map(|k| k + 1).sum();
            let unit = ops::matrix_unit(&d.basis, (lead + n) as usize, lead as usize).unwrap();
            worst = worst.max(ops::residual(&p, &unit).unwrap());
        }
        worst
    }));
    out.push(timed("algebra.generate_idempotent", anchor, 0.0, || {
        let ab = algebra::generate(&[jk_op(2)], 64, &tol).unwrap();
        let regenerated: Vec<Operator> = ab
            .basis
            .iter()
            .map(|m| {
                Operator::new(m.clone(), Basis::plain(m.rows()), ops::Budget::Steps(0)).unwrap()
            })
            .collect();
        let again = algebra::generate(&regenerated, 64, &tol).unwrap();
        (again.dim() as f64 - ab.dim() as f64).abs()
    }));
    out
}

fn suite_matrixunits(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("matrixunits");
    let _ = cfg;
    let mut reflected = Vec::new();
    let mut offsets = Vec::new();
    for k in 1u64..=5 {
        let j = jk_op(k);
        let dim = (k + 1) as usize;
        let mut jpow = vec![Operator::identity_on(j.basis.clone())];
        let mut jspow = vec![Operator::identity_on(j.basis.clone())];
        for p in 0..dim {
            jpow.push(jpow[p].compose(&j).unwrap());
            jspow.push(jspow[p].compose(&j.adjoint()).unwrap());
        }
        let mut worst_reflected = 0.0f64;
        let mut min_offset = f64::INFINITY;
        for i in 1..=dim {
            for jj in 1..=dim {
                let word = jspow[jj - 1]
                    .compose(&jpow[k as usize])
                    .unwrap()
                    .compose(&jspow[k as usize])
                    .unwrap()
                    .compose(&jpow[i - 1])
                    .unwrap();
                let mirrored = ops::matrix_unit(&j.basis, dim - jj, dim - i).unwrap();
                worst_reflected =
                    worst_reflected.max(ops::residual(&word, &mirrored).unwrap());
                let stated = ops::matrix_unit(&j.basis, i - 1, jj - 1).unwrap();
                if (i, jj) != (dim - jj + 1, dim - i + 1) {
                    min_offset = min_offset.min(ops::residual(&word, &stated).unwrap());
                }
            }
        }
        reflected.push((k, worst_reflected));
        offsets.push((k, min_offset));
    }
    let mut out = Vec::new();
    for (k, res) in reflected {
        out.push(timed(
            &format!("ops.matrix_unit_word_reflected_k{k}"),
            anchor,
            1e-13,
            || res,
        ));
    }
    // The as-stated 1-based display misses by a full index reflection; the
    // report shows the offset: a residual of at least one on every
    // non-fixed pair. Pass = the offset is present (residual of the check is
    // zero when the offset is detected).
    for (k, min_offset) in offsets {
        out.push(timed(
            &format!("ops.matrix_unit_word_stated_offset_k{k}"),
            anchor,
            0.5,
            move || if min_offset > 0.5 { 0.0 } else { 1.0 },
        ));
    }
    out
}

fn suite_tool_criterion(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("tool_criterion");
    let tol = cfg.tol;
    let seed = cfg.seed;
    let mut out = Vec::new();
    out.push(timed("ops.product_pi_random_pairs", anchor, 0.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        let mut disagreements = 0usize;
        for _ in 0..200 {
            let dim = 2 + (rng.gen::<u64>() % 11) as usize;
            let s = ops::random_partial_isometry(dim, &mut rng);
            let t = ops::random_partial_isometry(dim, &mut rng);
            match ops::product_pi_criterion(&s, &t, &tol) {
                Ok(o) if o.agree => {}
                _ => disagreements += 1,
            }
        }
        disagreements as f64
    }));
    out.push(timed("ops.product_pi_counterexample", anchor, 0.0, || {
        let basis = Basis::plain(2);
        let p = {
            let mut m = ComplexMatrix::zeros(2, 2);
            m.set(0, 0, Complex64::new(1.0, 0.0));
            Operator::new(m, basis.clone(), ops::Budget::Steps(0)).unwrap()
        };
        let q = {
            let m = ComplexMatrix::from_fn(2, 2, |_, _| Complex64::new(0.5, 0.0));
            Operator::new(m, basis, ops::Budget::Steps(0)).unwrap()
        };
        match ops::product_pi_criterion(&q, &p, &tol) {
            Ok(o) if !o.product_is_pi && o.agree => 0.0,
            _ => 1.0,
        }
    }));
    out
}

fn suite_commprojs(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("commprojs");
    let tol = cfg.tol;
    let cutoff = cfg.int_cutoff().clamp(8, 16);
    let grid_n = cfg.grid_n.clamp(12, 16);
    let set = spaces::integer_set(cutoff);
    let s0 = int(cutoff / 2 + 1);

    let mut families: Vec<(&str, BTreeMap<SemigroupElement, Operator>)> = Vec::new();
    let mut j_family = BTreeMap::new();
    let mut k_family = BTreeMap::new();
    for idx in 0..=(cutoff / 2 + 3) {
        j_family.insert(int(idx), ops::truncated_j(&set, &s0, &int(idx)).unwrap());
        k_family.insert(int(idx), ops::truncated_k(&set, &s0, &int(idx)).unwrap());
    }
    families.push(("interval_closed", j_family));
    families.push(("interval_open", k_family));
    let mut grid_tau = BTreeMap::new();
    let mut grid_sigma = BTreeMap::new();
    for p in 0..=3usize {
        grid_tau.insert(int(p as u64), ops::grid_shift(grid_n, GridMode::Tau, p).unwrap());
        grid_sigma.insert(
            int(p as u64),
            ops::grid_shift(grid_n, GridMode::Sigma, p).unwrap(),
        );
    }
    families.push(("grid_tau", grid_tau));
    families.push(("grid_sigma", grid_sigma));
    let mut toeplitz = BTreeMap::new();
    for s in 0..=4u64.min(cutoff / 3) {
        toeplitz.insert(int(s), ops::toeplitz_shift(&set, &int(s)).unwrap());
    }
    families.push(("toeplitz", toeplitz));

    let mut out = Vec::new();
    for (name, family) in families {
        let report = ops::semigroup_rep_check(&family, &tol).unwrap();
        out.push(timed(
            &format!("ops.rep_multiplicative_{name}"),
            anchor,
            1e-12,
            || report.multiplicativity,
        ));
        out.push(timed(
            &format!("ops.rep_commutators_{name}"),
            anchor,
            1e-12,
            || report.projection_commutators,
        ));
        out.push(timed(
            &format!("ops.rep_join_formulas_{name}"),
            anchor,
            1e-13,
            || report.join_initial.max(report.join_range),
        ));
    }
    out
}

fn suite_jk_decomposition(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("jk_decomposition");
    let tol = cfg.tol;
    let cutoff = cfg.int_cutoff().max(18);
    let set = spaces::integer_set(cutoff);
    let mut out = Vec::new();
    let s_max = 8u64.min(cutoff / 2);
    out.push(timed("algebra.jk_corner_identity", anchor, 0.0, || {
        let mut worst = 0.0f64;
        for s in 1..=s_max {
            let report = algebra::jk_decomposition_check(&set, &int(s), &tol).unwrap();
            worst = worst
                .max(report.corner_residual)
                .max(report.matrix_unit_residual)
                .max((report.full_algebra_dim as f64 - report.expected_dim as f64).abs());
        }
        worst
    }));
    out.push(timed("algebra.jk_compression_identity", anchor, 0.0, || {
        let mut worst = 0.0f64;
        for s in 1..=s_max {
            let ts = ops::toeplitz_shift(&set, &int(s)).unwrap();
            let id = Operator::identity_on(ts.basis.clone());
            let p = id.sub(&ts.compose(&ts.adjoint()).unwrap()).unwrap();
            for u in 0..=(s + 1) {
                let tu = ops::toeplitz_shift(&set, &int(u)).unwrap();
                let corner = ops::compress(&p, &tu, &tol).unwrap();
                let k = ops::truncated_k(&set, &int(s), &int(u)).unwrap();
                worst = worst.max(ops::residual(&corner, &k).unwrap());
            }
        }
        worst
    }));
    out
}

fn suite_kerrs_rank(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("kerrs_rank");
    let tol = cfg.tol;
    let mut out = Vec::new();
    out.push(timed("algebra.rank_growth_dense", anchor, 0.0, || {
        let dense = [int(1), SemigroupElement::sqrt2_times(1)];
        match algebra::rank_growth_k(&dense, &int(2), &int(1), &[4, 8, 16], &tol) {
            Ok(r) if r[0] < r[1] && r[1] < r[2] => 0.0,
            Ok(_) => 1.0,
            Err(_) => f64::INFINITY,
        }
    }));
    out.push(timed("algebra.rank_growth_integers_stable", anchor, 0.0, || {
        match algebra::rank_growth_k(&[int(1)], &int(2), &int(1), &[4, 8, 16], &tol) {
            Ok(r) if r[0] == r[1] && r[1] == r[2] => 0.0,
            Ok(_) => 1.0,
            Err(_) => f64::INFINITY,
        }
    }));
    // The configured generators run through the same probe so dense configs
    // are visible in the report.
    let gens = cfg.generators.clone();
    out.push(timed("algebra.rank_growth_configured", anchor, 0.0, move || {
        match algebra::rank_growth_k(&gens, &int(2), &int(1), &[4, 8, 16], &tol) {
            Ok(r) if r.windows(2).all(|w| w[0] <= w[1]) => 0.0,
            Ok(_) => 1.0,
            Err(_) => f64::INFINITY,
        }
    }));
    out
}

fn suite_covariance(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("covariance");
    let tol = cfg.tol;
    let cutoff = cfg.int_cutoff().clamp(10, 16);
    let set = spaces::integer_set(cutoff);
    let grid_n = cfg.grid_n.clamp(12, 16);

    let toeplitz_pair = {
        let mut pi_images = BTreeMap::new();
        let mut isometries = BTreeMap::new();
        for s in 0..=cutoff {
            pi_images.insert(int(s), ops::indicator_projection(&set, &int(s)).unwrap());
            if s <= 4 {
                isometries.insert(int(s), ops::toeplitz_shift(&set, &int(s)).unwrap());
            }
        }
        reps::CovariantPair {
            action: ActionKind::Tau,
            pi_images,
            isometries,
        }
    };

    let mut out = Vec::new();
    let positives: Vec<(&str, reps::CovariantPair)> = vec![
        ("toeplitz", toeplitz_pair.clone()),
        ("interval_closed", {
            let mut v = BTreeMap::new();
            for u in 0..=6u64 {
                v.insert(int(u), ops::truncated_j(&set, &int(4), &int(u)).unwrap());
            }
            reps::pi_from_v(
                v,
                ActionKind::TauInterval {
                    endpoint: int(4),
                    closed: true,
                },
                &tol,
            )
            .unwrap()
        }),
        ("interval_open", {
            let mut v = BTreeMap::new();
            for u in 0..=6u64 {
                v.insert(int(u), ops::truncated_k(&set, &int(4), &int(u)).unwrap());
            }
            reps::pi_from_v(
                v,
                ActionKind::TauInterval {
                    endpoint: int(4),
                    closed: false,
                },
                &tol,
            )
            .unwrap()
        }),
        ("grid", {
            let mut v = BTreeMap::new();
            for p in 0..=3usize {
                v.insert(int(p as u64), ops::grid_shift(grid_n, GridMode::Tau, p).unwrap());
            }
            reps::pi_from_v(v, ActionKind::Tau, &tol).unwrap()
        }),
        ("induced", {
            let inner = 4usize;
            let mut diag = BTreeMap::new();
            for r in set.elements() {
                diag.insert(
                    *r,
                    (0..inner)
                        .map(|j| *r <= int(j as u64 * 3))
                        .collect::<Vec<bool>>(),
                );
            }
            reps::induced_rep(&diag, &set, inner, &int(4)).unwrap()
        }),
    ];

    for (name, pair) in &positives {
        let report = reps::check_covariance(pair, &tol).unwrap();
        out.push(timed(
            &format!("reps.covariance_{name}"),
            anchor,
            tol.eq_tol,
            || {
                report
                    .conjugation_residual
                    .max(report.intertwining_residual)
            },
        ));
    }

    // V_0 = 1 in every covariant pair.
    out.push(timed("reps.v0_is_identity", anchor, 0.0, || {
        let mut worst = 0.0f64;
        for (_, pair) in &positives {
            if let Some(v0) = pair.isometries.get(&int(0)) {
                let id = Operator::identity_on(v0.basis.clone());
                worst = worst.max(ops::residual(v0, &id).unwrap());
            }
        }
        worst
    }));

    // Faithfulness verdict of a projection family matches the pairwise
    // oracle.
    out.push(timed("reps.projection_rep_faithful_oracle", anchor, 0.0, || {
        let mut m = BTreeMap::new();
        for s in 0..=cutoff.min(6) {
            let idx = if s < 3 { s } else { 3 };
            m.insert(int(s), ops::indicator_projection(&set, &int(idx)).unwrap());
        }
        let fam = reps::ProjectionFamily::new(m);
        let mut oracle = true;
        for r in &fam.labels {
            for t in &fam.labels {
                if r < t {
                    oracle &= ops::residual(&fam.projections[r], &fam.projections[t]).unwrap()
                        > tol.eq_tol;
                }
            }
        }
        let rep = reps::rep_from_projections(fam, &tol).unwrap();
        if rep.faithful == oracle {
            0.0
        } else {
            1.0
        }
    }));

    // Seeded perturbed negatives: the verdicts must stay paired.
    let seed = cfg.seed;
    out.push(timed("reps.covariance_negatives_agree", anchor, 0.0, move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(2);
        let mut bad = 0usize;
        for _ in 0..50 {
            let mut pair = toeplitz_pair.clone();
            let key = int(1 + rng.gen::<u64>() % 3);
            let a = 1 + (rng.gen::<u64>() % 5) as usize;
            let b = 1 + (rng.gen::<u64>() % 5) as usize;
            let bump = ops::matrix_unit(&pair.isometries[&key].basis.clone(), a, b)
                .unwrap()
                .scale(Complex64::new(1e-3, 0.0));
            let broken = pair.isometries[&key].add(&bump).unwrap();
            pair.isometries.insert(key, broken);
            let report = reps::check_covariance(&pair, &tol).unwrap();
            if !report.verdicts_agree(&tol) || report.conjugation_passes(&tol) {
                bad += 1;
            }
        }
        bad as f64
    }));
    out
}

fn suite_faithfulness(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("faithfulness");
    let tol = cfg.tol;
    let grid_n = cfg.grid_n.max(16);
    let mut out = Vec::new();

    out.push(timed("reps.witness_grid_system", anchor, 1e-12, || {
        let mut grid = BTreeMap::new();
        for p in 0..=3usize {
            grid.insert(int(p as u64), ops::grid_shift(grid_n, GridMode::Tau, p).unwrap());
        }
        let rs: Vec<SemigroupElement> = (1..=3u64).map(int).collect();
        let uvs: Vec<SemigroupElement> = (0..=3u64).map(int).collect();
        let w = reps::faithfulness_witness(&grid, &rs, &uvs, &tol).unwrap();
        (1.0 - w.min_norm).abs()
    }));
    out.push(timed("reps.witness_isometries_fail", anchor, 1e-12, || {
        let set = spaces::integer_set(cfg.int_cutoff().max(12));
        let mut v = BTreeMap::new();
        for s in 0..=4u64 {
            v.insert(int(s), ops::toeplitz_shift(&set, &int(s)).unwrap());
        }
        let rs: Vec<SemigroupElement> = (1..=2u64).map(int).collect();
        let uvs: Vec<SemigroupElement> = (0..=2u64).map(int).collect();
        let w = reps::faithfulness_witness(&v, &rs, &uvs, &tol).unwrap();
        w.min_norm
    }));
    out.push(timed("reps.witness_interval_direct_sum", anchor, 1e-12, || {
        let set = spaces::integer_set(8);
        let endpoint = 3u64;
        let blocks: Vec<u64> = (0..=endpoint).collect();
        let mut v: BTreeMap<SemigroupElement, Operator> = BTreeMap::new();
        for t in 0..=endpoint + 1 {
            let parts: Vec<Operator> = blocks
                .iter()
                .map(|&r| ops::truncated_j(&set, &int(r), &int(t)).unwrap())
                .collect();
            v.insert(int(t), ops::direct_sum(&parts).unwrap());
        }
        let rs: Vec<SemigroupElement> = (1..=2u64).map(int).collect();
        let uvs: Vec<SemigroupElement> = (0..=endpoint).map(int).collect();
        let w = reps::faithfulness_witness(&v, &rs, &uvs, &tol).unwrap();
        if w.ok {
            0.0
        } else {
            1.0
        }
    }));

    // Linear independence of the canonical monomials in the grid model:
    // full-rank Gram matrix certifies the evaluation is faithful on the
    // span. Rank deficiency would be flagged here.
    let grid_big = cfg.grid_n.max(24);
    out.push(timed("universal.grid_monomial_gram_rank", anchor, 0.0, move || {
        // The monomial images are partial permutations; pairwise trace
        // inner products reduce to matching their column maps.
        let mut maps = Vec::new();
        for s in 0u32..=4 {
            for t in 0u32..=4 {
                for m in s.max(t)..=6 {
                    let op = universal::evaluate(
                        &universal::NormalForm::monomial((s, m, t)),
                        Assignment::Grid,
                        grid_big,
                    )
                    .unwrap();
                    maps.push(op.matrix.column_map().expect("monomial image is a partial permutation"));
                }
            }
        }
        let n = maps.len();
        let mut gram = ComplexMatrix::zeros(n, n);
        for (a, va) in maps.iter().enumerate() {
            for (b, vb) in maps.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (ca, cb) in va.iter().zip(vb.iter()) {
                    if let (Some((ra, xa)), Some((rb, xb))) = (ca, cb) {
                        if ra == rb {
                            acc += xa.conj() * xb;
                        }
                    }
                }
                gram.set(a, b, acc);
            }
        }
        let rank = linalg::norm_rank(&gram, &tol).unwrap().rank;
        (n as f64) - (rank as f64)
    }));

    // Essentiality witness: the split difference fixes its grid point.
    out.push(timed("universal.essentiality_witness", anchor, 0.0, move || {
        let mut worst = 0.0f64;
        for i in 0u32..=3 {
            for j in 0u32..=3 {
                let diff = universal::element_f(i, i, i + j)
                    .sub(&universal::element_f(i, i, i + j + 1));
                let img = universal::evaluate(&diff, Assignment::Grid, grid_big).unwrap();
                let idx = img.basis.index_of_grid((i as usize, j as usize)).unwrap();
                let mut col_ok = 0.0f64;
                for r in 0..img.dim() {
                    let want = if r == idx { 1.0 } else { 0.0 };
                    col_ok = col_ok.max((img.matrix.get(r, idx) - Complex64::new(want, 0.0)).norm());
                }
                worst = worst.max(col_ok);
            }
        }
        worst
    }));
    out
}

fn suite_rform(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("rform");
    let grid_n = cfg.grid_n.max(24);
    let mut out = Vec::new();
    out.push(timed("universal.split_difference_identity", anchor, 1e-12, move || {
        let mut worst = 0.0f64;
        for m in 0u32..=8 {
            for i in 0..=m {
                for j in 0..=m {
                    let lhs = universal::element_f(i, j, m)
                        .sub(&universal::element_f(i, j, m + 1));
                    let rhs = universal::element_g(m - i, m - j, m)
                        .sub(&universal::element_g(m - i, m - j, m + 1));
                    if lhs != rhs {
                        return f64::INFINITY;
                    }
                    let le = universal::evaluate(&lhs, Assignment::Grid, grid_n).unwrap();
                    let re = universal::evaluate(&rhs, Assignment::Grid, grid_n).unwrap();
                    worst = worst.max(ops::guarded_residual(&le, &re).unwrap());
                }
            }
        }
        worst
    }));
    out.push(timed("universal.gf_product_formula", anchor, 1e-12, move || {
        let mut worst = 0.0f64;
        for (i, j, m, p, r, n) in [
            (0u32, 1u32, 1u32, 1u32, 0u32, 1u32),
            (1, 2, 2, 1, 1, 1),
            (2, 1, 2, 0, 0, 0),
            (1, 0, 1, 3, 2, 3),
            (2, 3, 4, 1, 1, 2),
            (3, 2, 3, 0, 4, 2),
        ] {
            let lhs = universal::nf_multiply(
                &universal::element_g(i, j, m),
                &universal::element_f(p, r, n),
            );
            let jp = j + p;
            let want = if r <= jp && i <= jp && m <= jp && n <= jp {
                universal::element_f(jp - i, r, jp)
                    .sub(&universal::element_f(jp - i, r, jp + 1))
            } else {
                universal::NormalForm::zero()
            };
            if lhs != want {
                return f64::INFINITY;
            }
            if !lhs.is_zero() {
                let le = universal::evaluate(&lhs, Assignment::Grid, grid_n).unwrap();
                let re = universal::evaluate(&want, Assignment::Grid, grid_n).unwrap();
                worst = worst.max(ops::guarded_residual(&le, &re).unwrap());
            }
        }
        worst
    }));
    out.push(timed("universal.split_lemma_reduction", anchor, 0.0, || {
        let vstar = universal::NormalForm::monomial((1, 1, 0));
        for m in 0u32..=5 {
            for i in 0..=5u32 {
                for j in 0..=3u32 {
                    let prod = universal::nf_multiply(&vstar, &universal::element_f(i, j, m));
                    let want = if i > 0 {
                        universal::element_f(i - 1, j, i.max(m))
                    } else {
                        universal::NormalForm::zero()
                    };
                    if prod != want {
                        return 1.0;
                    }
                }
            }
        }
        0.0
    }));
    out
}

fn suite_pi_n(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("pi_n");
    let tol = cfg.tol;
    let size = (cfg.int_cutoff().max(20)) as usize;
    let mut out = Vec::new();
    out.push(timed("universal.band_image_formula", anchor, 1e-13, move || {
        let set = spaces::integer_set(size as u64);
        let t1 = ops::toeplitz_shift(&set, &int(1)).unwrap();
        let id = Operator::identity_on(t1.basis.clone());
        let gap = id.sub(&t1.compose(&t1.adjoint()).unwrap()).unwrap();
        let mut worst = 0.0f64;
        for n in 0usize..=8 {
            for i in 0u32..=6 {
                for j in 0u32..=6 {
                    for m in 0u32..=6 {
                        let img = universal::evaluate(
                            &universal::element_f(i, j, m),
                            Assignment::Pn(n),
                            size,
                        )
                        .unwrap();
                        let in_band = i as usize <= n && j as usize <= n && m as usize <= n;
                        let expected = if in_band {
                            let mut acc = gap.clone();
                            for _ in 0..i {
                                acc = t1.compose(&acc).unwrap();
                            }
                            for _ in 0..j {
                                acc = acc.compose(&t1.adjoint()).unwrap();
                            }
                            acc
                        } else {
                            Operator::zero_on(t1.basis.clone())
                        };
                        worst = worst.max(ops::residual(&img, &expected).unwrap());
                    }
                }
            }
        }
        worst
    }));
    out.push(timed("universal.band_span_dimension", anchor, 0.0, move || {
        let mut worst = 0.0f64;
        for n in 0u32..=6 {
            let mut vecs = Vec::new();
            for i in 0..=n {
                for j in 0..=n {
                    let diff = universal::element_e(i, j, n).unwrap();
                    vecs.push(
                        universal::evaluate(&diff, Assignment::Pn(n as usize), size)
                            .unwrap()
                            .matrix,
                    );
                }
            }
            let dim = vecs.len();
            let mut gram = ComplexMatrix::zeros(dim, dim);
            for (a, va) in vecs.iter().enumerate() {
                for (b, vb) in vecs.iter().enumerate() {
                    gram.set(a, b, va.inner(vb).unwrap());
                }
            }
            let rank = linalg::norm_rank(&gram, &tol).unwrap().rank;
            worst = worst.max((rank as f64 - ((n + 1) * (n + 1)) as f64).abs());
        }
        worst
    }));
    out
}

fn suite_automorphism(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("automorphism");
    let size = (cfg.int_cutoff().max(20)) as usize;
    vec![timed("universal.reflection_automorphism", anchor, 0.0, move || {
        let mut worst = 0.0f64;
        for n in 0u32..=6 {
            for i in 0..=n {
                for j in 0..=n {
                    let lhs = universal::evaluate(
                        &universal::element_e(i, j, n).unwrap(),
                        Assignment::PnStar(n as usize),
                        size,
                    )
                    .unwrap();
                    let rhs = universal::evaluate(
                        &universal::element_e(n - i, n - j, n).unwrap(),
                        Assignment::Pn(n as usize),
                        size,
                    )
                    .unwrap();
                    worst = worst.max(ops::residual(&lhs, &rhs).unwrap());
                }
            }
        }
        worst
    })]
}

fn suite_normalform(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("normalform");
    let tol = cfg.tol;
    let grid_n = cfg.grid_n.max(24);
    let seed = cfg.seed;
    let mut out = Vec::new();
    out.push(timed("universal.rewrite_soundness", anchor, 1e-10, move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(3);
        let mut worst = 0.0f64;
        for _ in 0..500 {
            let w = universal::random_word(&mut rng, 12);
            let nf = universal::normalize(&w);
            let direct = universal::evaluate_word(&w, Assignment::Grid, grid_n).unwrap();
            let via_nf = universal::evaluate(&nf, Assignment::Grid, grid_n).unwrap();
            worst = worst.max(ops::guarded_residual(&direct, &via_nf).unwrap());
        }
        worst
    }));
    out.push(timed("universal.symbol_band_extraction", anchor, 1e-8, move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(4);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let w = universal::random_word(&mut rng, 10);
            let sym = universal::symbol(&universal::normalize(&w), false);
            let img = universal::evaluate_word(&w, Assignment::T, 48).unwrap();
            let extracted = universal::band_symbol(&img, 12).unwrap();
            worst = worst.max(sym.distance(&extracted));
        }
        worst
    }));
    out.push(timed("universal.normalform_json_fixture", anchor, 0.0, move || {
        // Fixture round trip: the serialized [[s,m,t,re,im], ...] encoding
        // reproduces the element and its grid image.
        let nf = universal::element_f(1, 0, 2)
            .add(&universal::NormalForm::monomial((0, 1, 1)).scale(Complex64::new(0.0, 2.0)));
        let back = match universal::NormalForm::from_json(&nf.to_json()) {
            Ok(b) => b,
            Err(_) => return 1.0,
        };
        if back != nf {
            return 1.0;
        }
        let a = universal::evaluate(&nf, Assignment::Grid, 12).unwrap();
        let b = universal::evaluate(&back, Assignment::Grid, 12).unwrap();
        ops::residual(&a, &b).unwrap()
    }));
    out.push(timed("universal.kernel_flags", anchor, 0.0, move || {
        let f = universal::element_f(1, 2, 3);
        let flags = universal::kernel_flags(&f, 32, &tol).unwrap();
        if !flags.in_ker_phi_t_star || flags.in_ker_phi_t {
            return 1.0;
        }
        let diff = universal::element_e(1, 2, 3).unwrap();
        let flags = universal::kernel_flags(&diff, 32, &tol).unwrap();
        if !flags.in_intersection {
            return 1.0;
        }
        let v = universal::NormalForm::monomial((0, 1, 1));
        let flags = universal::kernel_flags(&v, 32, &tol).unwrap();
        if flags.in_ker_phi_t || flags.in_ker_phi_t_star {
            return 1.0;
        }
        0.0
    }));
    out
}

fn suite_partial_isometries(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("partial_isometries");
    let tol = cfg.tol;
    let cutoff = cfg.int_cutoff();
    let grid_n = cfg.grid_n.min(16);
    let mut out = Vec::new();
    out.push(timed("ops.families_pass_vvv_test", anchor, 1e-13, move || {
        let set = spaces::integer_set(cutoff);
        let mut worst = 0.0f64;
        for s in 0..=cutoff.min(6) {
            let t = ops::toeplitz_shift(&set, &int(s)).unwrap();
            worst = worst.max(ops::is_partial_isometry(&t, &tol).unwrap().residual);
        }
        let s0 = int(cutoff / 2);
        for u in 0..=cutoff / 2 + 1 {
            let j = ops::truncated_j(&set, &s0, &int(u)).unwrap();
            worst = worst.max(ops::is_partial_isometry(&j, &tol).unwrap().residual);
            let k = ops::truncated_k(&set, &s0, &int(u)).unwrap();
            worst = worst.max(ops::is_partial_isometry(&k, &tol).unwrap().residual);
        }
        for p in 0..=3usize {
            for mode in [GridMode::Tau, GridMode::Sigma] {
                let g = ops::grid_shift(grid_n, mode, p).unwrap();
                worst = worst.max(ops::is_partial_isometry(&g, &tol).unwrap().residual);
            }
        }
        worst
    }));
    out.push(timed("ops.grid_power_law", anchor, 0.0, move || {
        let v1 = ops::grid_shift(grid_n, GridMode::Tau, 1).unwrap();
        let mut acc = Operator::identity_on(v1.basis.clone());
        let mut worst = 0.0f64;
        for p in 1..=4usize {
            acc = acc.compose(&v1).unwrap();
            let direct = ops::grid_shift(grid_n, GridMode::Tau, p).unwrap();
            worst = worst.max(ops::residual(&acc, &direct).unwrap());
        }
        worst
    }));
    out.push(timed("ops.indicator_is_range_projection", anchor, 1e-13, move || {
        let set = spaces::integer_set(cutoff);
        let mut worst = 0.0f64;
        for s in 0..=cutoff.min(5) {
            let t = ops::toeplitz_shift(&set, &int(s)).unwrap();
            let range = t.compose(&t.adjoint()).unwrap();
            let indicator = ops::indicator_projection(&set, &int(s)).unwrap();
            worst = worst.max(ops::guarded_residual(&indicator, &range).unwrap());
        }
        worst
    }));
    out.push(timed("ops.jk_difference_is_corner_unit", anchor, 0.0, move || {
        let set = spaces::integer_set(cutoff);
        let s = int(cutoff / 2);
        let j_basis = ops::truncated_j(&set, &s, &int(0)).unwrap().basis;
        let mut worst = 0.0f64;
        for u in 0..=cutoff / 2 {
            let j = ops::truncated_j(&set, &s, &int(u)).unwrap();
            let k = ops::truncated_k(&set, &s, &int(u)).unwrap();
            let k_emb = ops::embed_into(&k, &j_basis).unwrap();
            let diff = j.sub(&k_emb).unwrap();
            let s_idx = j_basis.index_of_label(&s).unwrap();
            let src = j_basis
                .index_of_label(&s.checked_sub(&int(u)).unwrap())
                .unwrap();
            let unit = ops::matrix_unit(&j_basis, s_idx, src).unwrap();
            worst = worst.max(ops::residual(&diff, &unit).unwrap());
        }
        worst
    }));
    out
}

fn suite_sigma(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("sigma");
    let tol = cfg.tol;
    let grid_n = cfg.grid_n.min(16);
    let max_n = 8usize.min(grid_n / 2);
    let sys = sigma::egsigma(grid_n, max_n).unwrap();
    let pis: Vec<Operator> = (0..=max_n)
        .map(|n| sigma::build_pi(&sys, n).unwrap())
        .collect();
    let mut out = Vec::new();
    {
        let sys = sys.clone();
        out.push(timed("sigma.system_invariants", anchor, 0.0, move || {
            sys.validate().unwrap()
        }));
    }
    {
        let sys = sys.clone();
        let pis = pis.clone();
        out.push(timed("sigma.roundtrip_extract_build", anchor, 1e-12, move || {
            let qs = sigma::extract_q(&pis, &sys.v).unwrap();
            let mut worst = 0.0f64;
            for (got, want) in qs.iter().zip(&sys.q) {
                worst = worst.max(ops::guarded_residual(got, want).unwrap());
            }
            worst
        }));
    }
    {
        let sys = sys.clone();
        let pis = pis.clone();
        out.push(timed("sigma.covariance", anchor, 1e-12, move || {
            sigma::covariance_check_sigma(&pis, &sys.v, 3)
                .unwrap()
                .max_residual()
        }));
    }
    {
        let sys = sys.clone();
        let pis = pis.clone();
        out.push(timed("sigma.gap_projection_form", anchor, 1e-13, move || {
            sigma::q_projection_identity(&sys, &pis).unwrap()
        }));
    }
    {
        let sys = sys.clone();
        out.push(timed("sigma.faithfulness_gaps", anchor, 1e-12, move || {
            let f = sigma::faithfulness_sigma(&sys, &tol).unwrap();
            if f.ok {
                (f.min_gap - 1.0).abs()
            } else {
                1.0
            }
        }));
    }
    // Monotone difference decomposition: P_n − P_{n+1} equals the displayed
    // sum of mutually orthogonal terms.
    out.push(timed("sigma.monotone_difference", anchor, 1e-12, move || {
        let mut worst = 0.0f64;
        let id = Operator::identity_on(sys.v.basis.clone());
        let gap = id.sub(&sys.v.adjoint().compose(&sys.v).unwrap()).unwrap();
        let mut vpow = vec![Operator::identity_on(sys.v.basis.clone())];
        for p in 0..max_n {
            vpow.push(vpow[p].compose(&sys.v).unwrap());
        }
        for n in 1..max_n {
            let diff = pis[n].sub(&pis[n + 1]).unwrap();
            let mut sum = vpow[n]
                .adjoint()
                .compose(&gap.sub(&sys.q[1]).unwrap())
                .unwrap()
                .compose(&vpow[n])
                .unwrap();
            #[allow(clippy::needless_range_loop)]
            for k in 0..n {
                let term = vpow[k]
                    .adjoint()
                    .compose(&sys.q[n - k].sub(&sys.q[n - k + 1]).unwrap())
                    .unwrap()
                    .compose(&vpow[k])
                    .unwrap();
                sum = sum.add(&term).unwrap();
            }
            worst = worst.max(ops::guarded_residual(&diff, &sum).unwrap());
        }
        worst
    }));
    out
}

fn suite_csigman_symbol(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("csigman_symbol");
    let tol = cfg.tol;
    let dim = 48usize;
    let mut out = Vec::new();
    out.push(timed("sigma.model_symbol_constancy", anchor, 0.0, move || {
        let mut worst = 0.0f64;
        for (i, j, m) in [(0usize, 0usize, 2usize), (2, 1, 3), (1, 3, 2), (0, 2, 4)] {
            let seq = sigma::model_image(i, j, m, 6, dim).unwrap();
            let sym = sigma::symbol_constancy(&seq, 8, &tol).unwrap();
            worst = worst.max(sym.max_deviation);
            // Tail degree must be i − j with unit coefficient.
            let want = Complex64::new(1.0, 0.0);
            worst = worst.max((sym.tail_symbol.coeff(i as i64 - j as i64) - want).norm());
        }
        worst
    }));
    out.push(timed("sigma.matrix_unit_combination", anchor, 0.0, move || {
        let mut worst = 0.0f64;
        for m in 0usize..=6 {
            for i in 0..=m {
                for j in 0..=m {
                    let got = sigma::matrix_unit_image(i, j, m, 8, 30).unwrap();
                    let want = sigma::expected_matrix_unit(i, j, m, 8, 30).unwrap();
                    let diff = got.sub(&want).unwrap();
                    for s in &diff.samples {
                        worst = worst.max(s.norm().unwrap());
                    }
                    worst = worst.max(diff.tail.norm().unwrap());
                }
            }
        }
        worst
    }));
    out.push(timed("sigma.symbol_degrees_span_window", anchor, 0.0, move || {
        // Quotient evidence: tails of the model images realize every degree
        // in a symmetric window, and symbol-zero images have vanishing tail
        // band.
        let mut seen = std::collections::BTreeSet::new();
        for i in 0usize..=3 {
            for j in 0usize..=3 {
                let seq = sigma::model_image(i, j, 1, 4, dim).unwrap();
                let sym = sigma::symbol_constancy(&seq, 8, &tol).unwrap();
                let d = i as i64 - j as i64;
                if (sym.tail_symbol.coeff(d) - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
                    return 1.0;
                }
                seen.insert(d);
            }
        }
        for d in -3i64..=3 {
            if !seen.contains(&d) {
                return 1.0;
            }
        }
        // Symbol-zero elements: matrix-unit images have empty tail bands.
        let unit = sigma::matrix_unit_image(1, 2, 3, 5, dim).unwrap();
        let sym = sigma::symbol_constancy(&unit, 8, &tol).unwrap();
        if sym.tail_symbol.is_zero() {
            0.0
        } else {
            1.0
        }
    }));
    out
}

fn suite_comideal(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let anchor = anchored("comideal");
    let tol = cfg.tol;
    let cutoff = cfg.int_cutoff().max(14);
    let set = spaces::integer_set(cutoff);
    let idx: Vec<SemigroupElement> = (0..=3u64).map(int).collect();
    let span = algebra::commutator_ideal_span(&set, &idx, &idx[1..], &idx, &tol).unwrap();
    let mut out = Vec::new();
    {
        let set = set.clone();
        let span = algebra::commutator_ideal_span(&set, &idx, &idx[1..], &idx, &tol).unwrap();
        out.push(timed("algebra.ideal_case_analysis", anchor, 1e-8, move || {
            let mut worst = 0.0f64;
            for (s, r, u, t) in [
                (1u64, 3u64, 2u64, 1u64), // r >= s
                (2, 1, 3, 1),             // r < s < r + u
                (3, 1, 2, 1),             // s - r >= u
                (2, 2, 1, 0),             // boundary r = s
                (4, 1, 3, 2),             // s - r = u exactly
            ] {
                let case = algebra::ideal_case_check(
                    &set,
                    &span,
                    &int(s),
                    &int(r),
                    &int(u),
                    &int(t),
                    &tol,
                )
                .unwrap();
                worst = worst.max(case.closed_form_residual).max(case.span_residual);
            }
            worst
        }));
    }
    out.push(timed("algebra.ideal_contains_gap", anchor, 0.0, move || {
        let gap = algebra::ideal_element(&set, &int(0), &int(2), &int(0)).unwrap();
        let m = algebra::contains(&span, &gap.matrix, &tol).unwrap();
        if m.member {
            0.0
        } else {
            m.residual
        }
    }));
    out
}
