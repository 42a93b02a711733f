//! Exhaustive checks of the group gate on every basis word for small widths.

use std::collections::BTreeSet;

use qgnm_core::blackbox::{ConcreteGroup, GateIO, GroupKind, GroupOracle, Label, Labeling};
use qgnm_core::fixtures::{build_fixture_oracle, sample_labeling, FamilyRequest};

fn small_oracles() -> Vec<(String, GroupOracle)> {
    let mut out = Vec::new();
    for order in 2..=64 {
        out.push((
            format!("Z{order}"),
            GroupOracle::new(ConcreteGroup::cyclic(order).unwrap()),
        ));
    }
    out.push((
        "Z10 seeded".into(),
        GroupOracle::new(
            ConcreteGroup::new(GroupKind::Cyclic { order: 10 }, 6, Labeling::Seeded(3)).unwrap(),
        ),
    ));
    out.push((
        "S3".into(),
        GroupOracle::new(ConcreteGroup::symmetric(3).unwrap()),
    ));
    out.push((
        "S4".into(),
        GroupOracle::new(ConcreteGroup::symmetric(4).unwrap()),
    ));
    for (p, w) in [(3, 4), (5, 5), (7, 6)] {
        out.push((
            format!("Z{p}xZ{p}"),
            GroupOracle::new(
                ConcreteGroup::new(
                    GroupKind::DirectProduct { p },
                    w,
                    Labeling::Seeded(p as u64),
                )
                .unwrap(),
            ),
        ));
    }
    for n in [4, 6] {
        for (i, fam) in [FamilyRequest::F1, FamilyRequest::F0(None)]
            .into_iter()
            .enumerate()
        {
            let lab = sample_labeling(n, fam, 10 + i as u64).unwrap();
            out.push((
                format!("fixture n={n} #{i}"),
                build_fixture_oracle(&lab).unwrap(),
            ));
        }
    }
    out
}

fn all_words(width: u8) -> impl Iterator<Item = GateIO> {
    let labels: Vec<Label> = Label::all(width).collect();
    let mut words = Vec::with_capacity(4 * labels.len() * labels.len());
    for c in [false, true] {
        for b in [false, true] {
            for &x in &labels {
                for &y in &labels {
                    words.push(GateIO::new(c, b, x, y));
                }
            }
        }
    }
    words.into_iter()
}

#[test]
fn gate_is_a_permutation_of_basis_words() {
    for (name, oracle) in small_oracles() {
        let mut seen = BTreeSet::new();
        let mut total = 0usize;
        for w in all_words(oracle.width()) {
            assert!(
                seen.insert(oracle.gate_permutation(w)),
                "{name}: collision at {w:?}"
            );
            total += 1;
        }
        assert_eq!(seen.len(), total, "{name}");
    }
}

#[test]
fn gate_preserves_control_and_left_and_flips_error_only_on_invalid() {
    for (name, oracle) in small_oracles() {
        for w in all_words(oracle.width()) {
            let out = oracle.gate_permutation(w);
            assert_eq!(out.control, w.control, "{name}");
            assert_eq!(out.left, w.left, "{name}");
            let valid = oracle.is_valid(w.left) && oracle.is_valid(w.right);
            if valid {
                assert_eq!(out.error, w.error, "{name}");
                assert!(oracle.is_valid(out.right), "{name}: product left the group");
            } else {
                assert_eq!(out.error, !w.error, "{name}");
                assert_eq!(
                    out.right, w.right,
                    "{name}: invalid input must pass through"
                );
            }
        }
    }
}

#[test]
fn opposite_control_undoes_the_gate() {
    for (name, oracle) in small_oracles() {
        for w in all_words(oracle.width()) {
            let once = oracle.gate_permutation(w);
            let valid = oracle.is_valid(w.left) && oracle.is_valid(w.right);
            let undo = if valid {
                GateIO {
                    control: !w.control,
                    ..once
                }
            } else {
                once
            };
            let back = oracle.gate_permutation(undo);
            assert_eq!(back.right, w.right, "{name}: {w:?}");
            assert_eq!(back.error, w.error, "{name}: {w:?}");
        }
    }
}

#[test]
fn derived_operations_match_group_arithmetic() {
    for (name, oracle) in small_oracles() {
        let g = oracle.group();
        let id = g.label_of(g.identity_element());
        for x in oracle.valid_labels() {
            assert_eq!(oracle.identity_of(x).unwrap(), id, "{name}");
            let xi = oracle.inverse(x).unwrap();
            assert_eq!(oracle.multiply(x, xi).unwrap(), id, "{name}");
            for y in oracle.valid_labels().step_by(3) {
                let ex = g.element_of(x).unwrap();
                let ey = g.element_of(y).unwrap();
                assert_eq!(
                    oracle.multiply(x, y).unwrap(),
                    g.label_of(g.mul(ey, ex)),
                    "{name}"
                );
            }
        }
        let bad: Vec<Label> = Label::all(oracle.width())
            .filter(|l| !oracle.is_valid(*l))
            .collect();
        for b in bad {
            assert!(oracle.inverse(b).is_err(), "{name}");
            assert!(oracle.multiply(b, id).is_err(), "{name}");
        }
    }
}

#[test]
fn right_cosets_partition_the_group() {
    for (name, oracle) in small_oracles() {
        let gens: Vec<Label> = oracle.valid_labels().skip(1).take(1).collect();
        if gens.is_empty() {
            continue;
        }
        let h = oracle.enumerate_subgroup(&gens).unwrap();
        let mut covered = BTreeSet::new();
        for g in oracle.valid_labels() {
            let coset = oracle.right_coset(&h, g).unwrap();
            assert_eq!(coset.len(), h.len(), "{name}");
            if coset.is_disjoint(&covered) {
                covered.extend(coset);
            } else {
                assert!(coset.is_subset(&covered), "{name}: overlapping cosets");
            }
        }
        assert_eq!(covered.len(), oracle.valid_labels().count(), "{name}");
        assert_eq!(
            oracle.valid_labels().count() % h.len(),
            0,
            "{name}: Lagrange"
        );
    }
}

#[test]
fn enumerate_z6_by_two_costs_four_calls() {
    let oracle = GroupOracle::new(ConcreteGroup::cyclic(6).unwrap()).with_query_log();
    let two = Label::new(2, 3).unwrap();
    let h = oracle.enumerate_subgroup(&[two]).unwrap();
    let bits: Vec<u16> = h.iter().map(|l| l.bits()).collect();
    assert_eq!(bits, [0, 2, 4]);
    let log = oracle.query_log();
    assert_eq!(log.count, 4);
    assert_eq!(log.transcript.unwrap().len(), 4);
}
