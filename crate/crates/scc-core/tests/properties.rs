//! Property tests for the theorem-level invariants that are not already
//! covered by the acceptance suite.

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scc_core::empirical::{
    beta_from_cohort, irreducibility_contrast, singularity_contrast, theta_from_case_control,
    Design, StratifiedCounts,
};
use scc_core::engine::{avoidance_representation, Avoidance, Representation};
use scc_core::interaction::{
    compose_assignment, is_irreducible, is_singular, CausePartition, PartialAssignment,
};
use scc_core::trees::{enumerate_trees, LiteralTree};
use scc_core::{
    Assignment, Individual, Literal, LiteralSet, OutcomeTable, Population, WeightMode,
};

fn all_literal_sets(k: usize) -> Vec<LiteralSet> {
    let mut out = Vec::new();
    for code in 1..3usize.pow(k as u32) {
        let mut c = code;
        let mut lits = Vec::new();
        for var in 0..k {
            match c % 3 {
                0 => {}
                1 => lits.push(Literal::pos(var)),
                2 => lits.push(Literal::neg(var)),
                _ => unreachable!(),
            }
            c /= 3;
        }
        out.push(LiteralSet::new(lits).unwrap());
    }
    out
}

fn table_from_bits(k: usize, bits: u64) -> OutcomeTable {
    OutcomeTable::from_bits(k, bits).unwrap()
}

fn pop_from_bits(k: usize, tables: &[u64]) -> Population {
    let members = tables
        .iter()
        .enumerate()
        .map(|(i, &bits)| Individual {
            id: (i + 1).to_string(),
            weight: 1.0,
            table: table_from_bits(k, bits),
        })
        .collect();
    Population::new(members, WeightMode::Count).unwrap()
}

/// Marginalizes a table onto `keep` (ascending variable indices) by
/// universal quantification over the dropped variables.
fn restrict_universal(t: &OutcomeTable, keep: &[usize]) -> OutcomeTable {
    let k = t.k();
    let m = keep.len();
    let dropped: Vec<usize> = (0..k).filter(|v| !keep.contains(v)).collect();
    let mut outcomes = Vec::with_capacity(1 << m);
    for idx in 0..1usize << m {
        let mut all = true;
        for rest in 0..1usize << dropped.len() {
            let mut parts: Vec<(usize, bool)> = keep
                .iter()
                .enumerate()
                .map(|(j, &v)| (v, idx >> (m - 1 - j) & 1 == 1))
                .collect();
            for (j, &v) in dropped.iter().enumerate() {
                parts.push((v, rest >> j & 1 == 1));
            }
            if !t.get(&compose_assignment(k, &parts).unwrap()).unwrap() {
                all = false;
                break;
            }
        }
        outcomes.push(all);
    }
    OutcomeTable::new(m, outcomes).unwrap()
}

fn remap_to_positions(b: &LiteralSet, keep: &[usize]) -> LiteralSet {
    LiteralSet::new(
        b.literals()
            .iter()
            .map(|l| Literal {
                var: keep.iter().position(|&v| v == l.var).unwrap(),
                negated: l.negated,
            })
            .collect(),
    )
    .unwrap()
}

proptest! {
    // Minimality implies sufficiency.
    #[test]
    fn minimal_implies_sufficient(bits in 0u64..65536, code in 1usize..81) {
        let t = table_from_bits(4, bits);
        let sets = all_literal_sets(4);
        let b = &sets[code % sets.len()];
        if t.is_minimal_sufficient_cause(b).unwrap() {
            prop_assert!(t.is_sufficient_cause(b).unwrap());
        }
    }

    // Sufficiency survives restriction onto any variable set containing
    // the conjunction, marginalizing the rest by universal quantification.
    #[test]
    fn sufficiency_survives_restriction(bits in 0u64..256, code in 1usize..27) {
        let t = table_from_bits(3, bits);
        let sets = all_literal_sets(3);
        let b = &sets[code % sets.len()];
        if !t.is_sufficient_cause(b).unwrap() {
            return Ok(());
        }
        let need: Vec<usize> = b.vars();
        for keep_mask in 0..8usize {
            let keep: Vec<usize> = (0..3).filter(|v| keep_mask >> v & 1 == 1).collect();
            if !need.iter().all(|v| keep.contains(v)) {
                continue;
            }
            let restricted = restrict_universal(&t, &keep);
            let mapped = remap_to_positions(b, &keep);
            prop_assert!(
                restricted.is_sufficient_cause(&mapped).unwrap(),
                "restriction to {keep:?} lost sufficiency"
            );
        }
    }

    // Sufficiency over a population is monotone under shrinking it.
    #[test]
    fn sufficiency_monotone_in_population(
        tables in proptest::collection::vec(0u64..256, 1..4),
        code in 1usize..27,
        subset_mask in 1usize..8,
    ) {
        let pop = pop_from_bits(3, &tables);
        let sets = all_literal_sets(3);
        let b = &sets[code % sets.len()];
        let all_sufficient = pop
            .members()
            .iter()
            .all(|m| m.table.is_sufficient_cause(b).unwrap());
        if !all_sufficient {
            return Ok(());
        }
        let keep: Vec<String> = pop
            .members()
            .iter()
            .enumerate()
            .filter(|(i, _)| subset_mask >> (i % 3) & 1 == 1)
            .map(|(_, m)| m.id.clone())
            .collect();
        if keep.is_empty() {
            return Ok(());
        }
        let smaller = pop.subset(&keep).unwrap();
        prop_assert!(smaller
            .members()
            .iter()
            .all(|m| m.table.is_sufficient_cause(b).unwrap()));
    }

    // The canonical construction always verifies.
    #[test]
    fn canonical_always_verifies(
        k in 1usize..=4,
        tables in proptest::collection::vec(proptest::num::u64::ANY, 1..6),
    ) {
        let mask = (1u64 << (1 << k)) - 1;
        let bits: Vec<u64> = tables.iter().map(|b| b & mask).collect();
        let pop = pop_from_bits(k, &bits);
        let rep = Representation::canonical(&pop).unwrap();
        prop_assert!(rep.verify(&pop).unwrap());
    }

    // Case-control coefficients reproduce the input odds ratios.
    #[test]
    fn mobius_round_trip(counts in proptest::collection::vec(1u32..120, 16)) {
        let mut d = StratifiedCounts::new(
            3,
            vec!["A".into(), "B".into(), "C".into()],
            vec![],
            Design::CaseControl,
        )
        .unwrap();
        for idx in 0..8 {
            d.insert_cell("*".into(), idx, counts[idx] as f64, counts[idx + 8] as f64).unwrap();
        }
        let theta = theta_from_case_control(&d, "*", None).unwrap();
        let a0 = counts[0] as f64;
        let b0 = counts[8] as f64;
        for idx in 1..8usize {
            let r = (counts[idx] as f64 / counts[idx + 8] as f64) / (a0 / b0);
            // 1e-12 relative: the transform is exact in exact arithmetic
            prop_assert!((theta.reconstruct(idx) - r).abs() < 1e-12 * r.max(1.0));
        }
    }

    // The coefficient covariance is symmetric and positive semidefinite
    // within tolerance.
    #[test]
    #[allow(clippy::needless_range_loop)]
    fn theta_covariance_is_psd(
        counts in proptest::collection::vec(1u32..120, 16),
        probe in proptest::collection::vec(-1.0f64..1.0, 8),
    ) {
        let mut d = StratifiedCounts::new(
            3,
            vec!["A".into(), "B".into(), "C".into()],
            vec![],
            Design::CaseControl,
        )
        .unwrap();
        for idx in 0..8 {
            d.insert_cell("*".into(), idx, counts[idx] as f64, counts[idx + 8] as f64).unwrap();
        }
        let theta = theta_from_case_control(&d, "*", None).unwrap();
        let cov = theta.covariance();
        let mut scale = 0.0f64;
        for i in 0..8 {
            scale = scale.max(cov[i][i].abs());
            for j in 0..8 {
                prop_assert!((cov[i][j] - cov[j][i]).abs() < 1e-10);
            }
        }
        let mut quad = 0.0;
        for i in 0..8 {
            for j in 0..8 {
                quad += probe[i] * cov[i][j] * probe[j];
            }
        }
        prop_assert!(quad >= -1e-8 * scale.max(1.0), "quadratic form {quad} negative");
    }
}

#[test]
fn assignment_literal_correspondence_k_up_to_4() {
    for k in 0..=4usize {
        for i in 0..1usize << k {
            let c = Assignment::from_index(k, i).unwrap();
            let b = c.to_literals();
            for j in 0..1usize << k {
                let cj = Assignment::from_index(k, j).unwrap();
                assert_eq!(b.eval(&cj).unwrap(), i == j);
            }
        }
    }
}

#[test]
fn population_enlargement_preserves_irreducibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5cc0_0010);
    let mut preserved = 0usize;
    for _ in 0..500 {
        let k = rng.random_range(1..=3);
        let mask = (1u64 << (1 << k)) - 1;
        let base: Vec<u64> = (0..rng.random_range(1..=2))
            .map(|_| rng.random::<u64>() & mask)
            .collect();
        let pop = pop_from_bits(k, &base);
        let sets = all_literal_sets(k);
        let b = sets[rng.random_range(0..sets.len())].clone();
        let p = CausePartition::new(b, k).unwrap();
        if is_irreducible(&pop, &p).unwrap().is_none() {
            continue;
        }
        let mut extended = base.clone();
        extended.push(rng.random::<u64>() & mask);
        let bigger = pop_from_bits(k, &extended);
        assert!(
            is_irreducible(&bigger, &p).unwrap().is_some(),
            "adding individuals destroyed a witness"
        );
        preserved += 1;
    }
    assert!(preserved > 50, "too few irreducible cases sampled ({preserved})");
}

#[test]
fn canonical_representation_contains_witness_conjunct() {
    // With a witness (omega*, c2*) in hand, the canonical representation
    // holds a conjunct between b and b union the context literals whose
    // membership is 1 at omega*.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5cc0_0011);
    let mut found = 0usize;
    for _ in 0..500 {
        let k = rng.random_range(2..=3);
        let mask = (1u64 << (1 << k)) - 1;
        let tables: Vec<u64> = (0..rng.random_range(1..=3))
            .map(|_| rng.random::<u64>() & mask)
            .collect();
        let pop = pop_from_bits(k, &tables);
        let sets = all_literal_sets(k);
        let b = sets[rng.random_range(0..sets.len())].clone();
        let p = CausePartition::new(b.clone(), k).unwrap();
        let Some(w) = is_irreducible(&pop, &p).unwrap() else { continue };
        let omega = pop.members().iter().position(|m| m.id == w.id).unwrap();
        let bound = b.union(&w.context.to_literals()).unwrap();
        let rep = Representation::canonical(&pop).unwrap();
        let ok = rep.pairs().iter().any(|(membership, conjunct)| {
            membership[omega] && b.is_subset_of(conjunct) && conjunct.is_subset_of(&bound)
        });
        assert!(ok, "no canonical conjunct between b and b ∪ context with active membership");
        found += 1;
    }
    assert!(found > 50, "too few witnesses sampled ({found})");
}

/// Conditions of the representation-level singularity characterization
/// for one individual on one representation.
fn singularity_conditions_hold(
    rep: &Representation,
    pop: &Population,
    omega: usize,
    b: &LiteralSet,
) -> bool {
    let k = pop.k();
    // (i) every full-width superset of b contains an active conjunct
    for idx in 0..1usize << k {
        let full = Assignment::from_index(k, idx).unwrap().to_literals();
        if !b.is_subset_of(&full) {
            continue;
        }
        let hit = rep
            .pairs()
            .iter()
            .any(|(m, c)| m[omega] && c.is_subset_of(&full));
        if !hit {
            return false;
        }
    }
    // (ii) conjuncts not containing b are inactive for omega
    rep.pairs()
        .iter()
        .all(|(m, c)| b.is_subset_of(c) || !m[omega])
}

#[test]
fn representation_level_singularity_characterization_k2() {
    // Exhaustive at k=2 with one or two individuals: an individual is
    // singular exactly when conditions (i)/(ii) hold on the canonical
    // representation, and when singular they hold on every constructible
    // avoidance representation as well.
    for bits1 in 0..16u64 {
        for bits2 in bits1..16u64 {
            let pops = vec![
                pop_from_bits(2, &[bits1]),
                pop_from_bits(2, &[bits1, bits2]),
            ];
            for pop in pops {
                let canonical = Representation::canonical(&pop).unwrap();
                for b in all_literal_sets(2) {
                    let p = CausePartition::new(b.clone(), 2).unwrap();
                    let singular = is_singular(&pop, &p).unwrap();
                    let canonical_ok = (0..pop.len())
                        .any(|w| singularity_conditions_hold(&canonical, &pop, w, &b));
                    assert_eq!(
                        singular.is_some(),
                        canonical_ok,
                        "canonical-representation characterization, bits=({bits1:04b},{bits2:04b}) b={b}"
                    );
                    if let Some(w) = singular {
                        let omega = pop.members().iter().position(|m| m.id == w.id).unwrap();
                        for avoid_b in all_literal_sets(2) {
                            let ap = CausePartition::new(avoid_b, 2).unwrap();
                            if let Avoidance::Constructed(rep) =
                                avoidance_representation(&pop, &ap).unwrap()
                            {
                                assert!(
                                    singularity_conditions_hold(&rep, &pop, omega, &b),
                                    "avoidance representation violates the characterization"
                                );
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn cohort_contrasts_match_population_averages() {
    // Cohort data generated exactly from a population makes every
    // contrast the weighted average of the per-individual condition
    // values, so a positive estimate certifies a positive individual
    // value.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5cc0_0012);
    for _ in 0..300 {
        let k = rng.random_range(1..=3);
        let mask = (1u64 << (1 << k)) - 1;
        let n = rng.random_range(1..=4);
        let weights: Vec<u64> = (0..n).map(|_| rng.random_range(1..=5)).collect();
        let tables: Vec<OutcomeTable> = (0..n)
            .map(|_| OutcomeTable::from_bits(k, rng.random::<u64>() & mask).unwrap())
            .collect();
        let total: u64 = weights.iter().sum();

        let names: Vec<String> = (1..=k).map(|j| format!("E{j}")).collect();
        let mut d = StratifiedCounts::new(k, names, vec![], Design::Cohort).unwrap();
        for idx in 0..1usize << k {
            let events: u64 = weights
                .iter()
                .zip(&tables)
                .map(|(w, t)| w * u64::from(t.get_index(idx).unwrap()))
                .sum();
            d.insert_cell("*".into(), idx, events as f64, total as f64).unwrap();
        }

        let sets = all_literal_sets(k);
        let b = sets[rng.random_range(0..sets.len())].clone();
        let p = CausePartition::new(b.clone(), k).unwrap();
        let bplus_mask = rng.random_range(0..1usize << b.len());
        let bplus = b.subset_by_mask(bplus_mask);
        let trees = enumerate_trees(&bplus).unwrap();
        let tree = &trees[rng.random_range(0..trees.len())];
        let ctx = p.c2_assignment(rng.random_range(0..p.context_count())).unwrap();

        let r = irreducibility_contrast(&d, &b, &bplus, tree, &ctx, "*", None).unwrap();
        let average: f64 = weights
            .iter()
            .zip(&tables)
            .map(|(w, t)| {
                let v = raw_tree_value(t, &b, tree, &ctx);
                *w as f64 * v as f64
            })
            .sum::<f64>()
            / total as f64;
        assert!(
            (r.estimate - average).abs() < 1e-9,
            "contrast {} vs population average {average}",
            r.estimate
        );
        if r.estimate > 1e-9 {
            assert!(
                tables.iter().any(|t| raw_tree_value(t, &b, tree, &ctx) > 0),
                "positive contrast without a positive individual value"
            );
        }

        if b.len() == k {
            let r = singularity_contrast(&d, &b, &bplus, tree, "*", None).unwrap();
            let average: f64 = weights
                .iter()
                .zip(&tables)
                .map(|(w, t)| *w as f64 * raw_singular_value(t, &b, &bplus, tree) as f64)
                .sum::<f64>()
                / total as f64;
            assert!((r.estimate - average).abs() < 1e-9);
        }
    }
}

#[test]
fn ratio_and_mean_scale_contrasts_agree_in_sign() {
    // In cohort data the mean-scale contrast equals the reference-cell
    // mean times the ratio-scale contrast, so signs agree whenever the
    // reference mean is positive.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5cc0_0013);
    for _ in 0..200 {
        let k = rng.random_range(1..=3);
        let names: Vec<String> = (1..=k).map(|j| format!("E{j}")).collect();
        let mut d = StratifiedCounts::new(k, names, vec![], Design::Cohort).unwrap();
        let denom = 1000.0;
        let mut means = Vec::new();
        for idx in 0..1usize << k {
            let events = rng.random_range(1..=999) as f64;
            means.push(events / denom);
            d.insert_cell("*".into(), idx, events, denom).unwrap();
        }
        let beta = beta_from_cohort(&d, "*").unwrap();

        // Ratio-scale coefficients from the same means.
        let ratios: Vec<f64> = means.iter().map(|m| m / means[0]).collect();
        let theta_at = |set: usize| -> f64 {
            let mut total = 0.0;
            let mut sub = set;
            loop {
                let sign = if (set.count_ones() - sub.count_ones()).is_multiple_of(2) { 1.0 } else { -1.0 };
                total += sign * ratios[sub];
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & set;
            }
            total
        };

        let b = LiteralSet::new((0..k).map(Literal::pos).collect()).unwrap();
        for bplus_mask in 0..1usize << k {
            let bplus = b.subset_by_mask(bplus_mask);
            for tree in enumerate_trees(&bplus).unwrap() {
                let mi = scc_core::trees::m_irred(&b, &bplus, &tree).unwrap();
                let mean_contrast = scc_core::empirical::linear_constraint_eval(&beta, &mi)
                    .unwrap()
                    .estimate;
                let ratio_contrast: f64 = (0..1usize << k)
                    .map(|mask| {
                        let mut idx = 0usize;
                        for (i, lit) in b.literals().iter().enumerate() {
                            if mask >> i & 1 == 1 {
                                idx |= 1 << (k - 1 - lit.var);
                            }
                        }
                        mi.get(mask) as f64 * theta_at(idx)
                    })
                    .sum();
                assert!(
                    (mean_contrast - means[0] * ratio_contrast).abs() < 1e-9,
                    "scales disagree: mean {mean_contrast} vs {} * {ratio_contrast}",
                    means[0]
                );
            }
        }
    }
}

fn raw_tree_value(
    t: &OutcomeTable,
    b: &LiteralSet,
    tree: &LiteralTree,
    c2: &PartialAssignment,
) -> i64 {
    let at = |zeroed: &[Literal]| -> i64 {
        let mut parts: Vec<(usize, bool)> = b
            .literals()
            .iter()
            .map(|l| {
                if zeroed.contains(l) {
                    (l.var, l.negated)
                } else {
                    (l.var, !l.negated)
                }
            })
            .collect();
        parts.extend_from_slice(c2.pairs());
        i64::from(t.get(&compose_assignment(t.k(), &parts).unwrap()).unwrap())
    };
    let mut v = at(&[]);
    for lit in b.literals() {
        v -= at(&[*lit]);
    }
    for (a, bl) in tree.edge_literals() {
        v += at(&[a, bl]);
    }
    v
}

fn raw_singular_value(t: &OutcomeTable, b: &LiteralSet, bplus: &LiteralSet, tree: &LiteralTree) -> i64 {
    let at = |zeroed: &[Literal]| -> i64 {
        let parts: Vec<(usize, bool)> = b
            .literals()
            .iter()
            .map(|l| {
                if zeroed.contains(l) {
                    (l.var, l.negated)
                } else {
                    (l.var, !l.negated)
                }
            })
            .collect();
        i64::from(t.get(&compose_assignment(t.k(), &parts).unwrap()).unwrap())
    };
    let mut v = at(&[]);
    for lit in bplus.literals() {
        v -= at(&[*lit]);
    }
    let bprime: Vec<Literal> = b
        .literals()
        .iter()
        .copied()
        .filter(|l| !bplus.contains(l))
        .collect();
    for mask in 1..1usize << bprime.len() {
        let zeroed: Vec<Literal> = bprime
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, l)| *l)
            .collect();
        v -= at(&zeroed);
    }
    for (a, bl) in tree.edge_literals() {
        v += at(&[a, bl]);
    }
    v
}
