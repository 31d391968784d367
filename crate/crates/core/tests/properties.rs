mod common;

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use proptest::prelude::*;

use shiftca::conditions::{self, Status};
use shiftca::intlinalg::{cokernel, kernel, smith, IntMatrix};
use shiftca::invariants::{ck_oracle, k_groups};
use shiftca::pastsets::RelationMonoid;
use shiftca::presentations::{Alphabet, LabeledGraph, Presentation, Word};
use shiftca::repcheck::build_truncation;
use shiftca::tower::build_tower;

use common::*;

fn small_graph() -> impl Strategy<Value = LabeledGraph> {
    (1usize..=4, 1usize..=3)
        .prop_flat_map(|(n, s)| (Just(n), Just(s), proptest::collection::vec(proptest::bool::weighted(0.3), n * n * s)))
        .prop_filter_map("graph without infinite paths", |(n, s, bits)| {
            let edges: Vec<_> = bits
                .iter()
                .enumerate()
                .filter(|(_, &on)| on)
                .map(|(i, _)| (i / (n * s), (i / s) % n, i % s))
                .collect();
            graph(n, s, &edges)
        })
}

fn no_zero_row_matrix(max_n: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
    (1..=max_n)
        .prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(0u8..=1, n), n))
        .prop_filter("zero row", |m| m.iter().all(|r| r.contains(&1)))
}

fn int_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-12i64..=12, c), r))
}

fn is_unimodular(m: &IntMatrix) -> bool {
    m.determinant().magnitude() == &BigUint::one()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smith_recomposes(rows in int_matrix()) {
        let m = IntMatrix::from_rows(&rows);
        let s = smith(&m);
        prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.d.clone());
        prop_assert!(is_unimodular(&s.u) && is_unimodular(&s.v));
        let diag = s.diagonal();
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    prop_assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            prop_assert!(w[0] >= BigInt::zero());
            if !w[0].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero());
            } else {
                prop_assert!(w[1].is_zero());
            }
        }
    }

    #[test]
    fn kernel_is_free_and_ranks_add_up(rows in int_matrix()) {
        let m = IntMatrix::from_rows(&rows);
        let rank = smith(&m).rank();
        let ker = kernel(&m);
        prop_assert!(ker.torsion.is_empty());
        prop_assert_eq!(ker.free_rank + rank, m.cols());
        prop_assert_eq!(cokernel(&m).free_rank + rank, m.rows());
    }

    #[test]
    fn refinement_is_a_function_of_classes(g in small_graph()) {
        let Ok(t) = build_tower(&g, 4) else { return Ok(()) };
        for l in 0..t.top_level() {
            for row in t.matrix_i(l).unwrap().to_i64_rows().unwrap() {
                prop_assert_eq!(row.iter().sum::<i64>(), 1);
            }
            for x in 0..t.tsets().len() {
                for y in 0..t.tsets().len() {
                    if t.class_of(l + 1, x).unwrap() == t.class_of(l + 1, y).unwrap() {
                        prop_assert_eq!(t.class_of(l, x).unwrap(), t.class_of(l, y).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn classes_match_brute_force_pasts(g in small_graph()) {
        let Ok(t) = build_tower(&g, 3) else { return Ok(()) };
        let monoid = RelationMonoid::explore(&g, 100_000).unwrap();
        let points: Vec<_> = t.tsets().iter().map(|s| monoid.witness_point(s).unwrap()).collect();
        for l in 0..=t.top_level().min(3) {
            let pasts: Vec<_> = points.iter().map(|(p, c)| brute_past(&g, p.symbols(), c.symbols(), l)).collect();
            for x in 0..points.len() {
                for y in 0..points.len() {
                    let same = t.class_of(l, x).unwrap() == t.class_of(l, y).unwrap();
                    prop_assert_eq!(same, pasts[x] == pasts[y]);
                }
            }
        }
    }

    #[test]
    fn diagrams_commute(g in small_graph()) {
        let Ok(mut t) = build_tower(&g, 8) else { return Ok(()) };
        t.extend_to(t.top_level().max(4));
        prop_assert!(t.check_diagrams().unwrap().all_hold());
    }

    #[test]
    fn k_groups_match_oracle(m in no_zero_row_matrix(4)) {
        let p = sft(m);
        let tower = k_groups(&build_tower(p.graph(), 64).unwrap()).unwrap();
        let oracle = ck_oracle(&p).unwrap();
        prop_assert!(tower.exact);
        prop_assert_eq!(tower.k0, oracle.k0);
        prop_assert_eq!(tower.k1, oracle.k1);
    }

    #[test]
    fn presentation_independence(m in no_zero_row_matrix(3)) {
        let n = m.len();
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let forbidden: Vec<Word> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] == 0)
            .map(|(i, j)| word(&[i, j]))
            .collect();
        let a = sft(m.clone());
        let b = Presentation::forbidden_words(Alphabet::new(names).unwrap(), forbidden).unwrap();
        let ta = build_tower(a.graph(), 64).unwrap();
        let tb = build_tower(b.graph(), 64).unwrap();
        prop_assert_eq!(ta.stabilized_at(), tb.stabilized_at());
        let l0 = ta.stabilized_at().unwrap();
        prop_assert_eq!(ta.m(l0).unwrap(), tb.m(l0).unwrap());
        prop_assert_eq!(k_groups(&ta).unwrap(), k_groups(&tb).unwrap());
        let verdicts = |t| {
            [conditions::condition_i(t), conditions::condition_star(t), conditions::aperiodic_past(t), conditions::irreducible_past(t)]
                .map(|v| v.unwrap().status)
        };
        prop_assert_eq!(verdicts(&ta), verdicts(&tb));
    }

    #[test]
    fn verdicts_are_stable_past_l0(g in small_graph()) {
        let Ok(mut t) = build_tower(&g, 16) else { return Ok(()) };
        let Some(l0) = t.stabilized_at() else { return Ok(()) };
        t.extend_to(l0 + 2);
        let at = |l| {
            [
                conditions::condition_i_at(&t, l).unwrap().status,
                conditions::condition_star_at(&t, l).unwrap().status,
                conditions::aperiodic_past_at(&t, l).unwrap().status,
                conditions::irreducible_past_at(&t, l).unwrap().status,
            ]
        };
        let base = at(l0);
        prop_assert_eq!(at(l0 + 1), base);
        prop_assert!(!base[2..].contains(&Status::Inconclusive));
    }

    #[test]
    fn ideal_lattice_is_a_lattice(g in small_graph()) {
        let Ok(t) = build_tower(&g, 16) else { return Ok(()) };
        if t.stabilized_at().is_none() {
            return Ok(());
        }
        let Ok(lattice) = conditions::ideal_lattice(&t) else { return Ok(()) };
        let m = t.m(lattice.level).unwrap();
        let sets: BTreeSet<BTreeSet<usize>> =
            lattice.elements.iter().map(|e| e.iter().copied().collect()).collect();
        prop_assert_eq!(sets.len(), lattice.elements.len());
        prop_assert!(sets.contains(&BTreeSet::new()));
        prop_assert!(sets.contains(&(0..m).collect()));
        for a in &sets {
            for b in &sets {
                prop_assert!(sets.contains(&a.union(b).copied().collect()));
                prop_assert!(sets.contains(&a.intersection(b).copied().collect()));
            }
        }
    }

    #[test]
    fn truncated_operators_compose(g in small_graph(), depth in 1usize..=4) {
        let r = build_truncation(&g, depth).unwrap();
        let words: Vec<Word> = r.basis().iter().filter(|w| w.len() <= 2).cloned().collect();
        for u in &words {
            for v in &words {
                let uv = Word::new([u.symbols(), v.symbols()].concat());
                prop_assert_eq!(r.op(u).after(&r.op(v)), r.op(&uv));
            }
        }
    }
}
