use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::{One, Zero};
use proptest::prelude::*;

use pso_core::engine::{triple_constants, CreationWord, FockEngine, FockVector};
use pso_core::exact::{exact_kernel, exact_rank, psd_certificate, rat, ExactMatrix, PsdVerdict, Rational};
use pso_core::fock::word_weight;
use pso_core::graded::Generator;
use pso_core::gz::{self, GZPattern, GzRow, TopRow};
use pso_core::QSqrt2;

fn small() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| Rational::new(a.into(), b.into()))
}

fn q2() -> impl Strategy<Value = QSqrt2> {
    (small(), small()).prop_map(|(a, b)| QSqrt2::new(a, b))
}

fn matrix(max: usize) -> impl Strategy<Value = ExactMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-3i64..=3, c), r)
            .prop_map(|rows| ExactMatrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(rat).collect()).collect()).unwrap())
    })
}

fn mode(n: i64) -> impl Strategy<Value = i64> {
    (1..=n, any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m })
}

fn word(n: i64, max_len: usize) -> impl Strategy<Value = CreationWord> {
    proptest::collection::vec(mode(n), 0..=max_len).prop_map(|m| CreationWord::new(m).unwrap())
}

fn generator(n: i64) -> impl Strategy<Value = Generator> {
    (mode(n), any::<bool>()).prop_map(|(m, plus)| if plus { Generator::plus(m) } else { Generator::minus(m) })
}

/// `⟦⟦x, y⟧, z⟧` from the defining triple relations.
fn relation_oracle(x: Generator, y: Generator, z: Generator) -> BTreeMap<Generator, Rational> {
    let fermi = |g: Generator| g.mode < 0;
    let idx = |g: Generator| g.mode.abs();
    let s = |g: Generator| g.sign.value();
    let d = |a: Generator, b: Generator| i64::from(idx(a) == idx(b));
    let mut out: BTreeMap<Generator, Rational> = BTreeMap::new();
    let mut add = |c: i64, g: Generator| {
        if c != 0 {
            *out.entry(g).or_insert_with(Rational::zero) += rat(c);
        }
    };
    match (fermi(x), fermi(y), fermi(z)) {
        (true, true, true) => {
            add((s(z) - s(y)).abs() * d(y, z), x);
            add(-(s(z) - s(x)).abs() * d(x, z), y);
        }
        (false, false, false) => {
            add((s(z) - s(x)) * d(x, z), y);
            add((s(z) - s(y)) * d(y, z), x);
        }
        (true, true, false) | (false, false, true) => {}
        // ⟦f, b⟧ = ⟦b, f⟧, so both orders share one relation.
        (true, false, true) => add((s(z) - s(x)).abs() * d(x, z), y),
        (false, true, true) => add((s(z) - s(y)).abs() * d(y, z), x),
        (true, false, false) => add((s(z) - s(y)) * d(y, z), x),
        (false, true, false) => add((s(z) - s(x)) * d(x, z), y),
    }
    out.retain(|_, c| !c.is_zero());
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q2_field_axioms(a in q2(), b in q2(), c in q2()) {
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        if !a.is_zero() {
            prop_assert_eq!(a.clone() * a.q2_inv().unwrap(), QSqrt2::one());
        } else {
            prop_assert!(a.q2_inv().is_err());
        }
        prop_assert_eq!(a.norm(), (a.clone() * a.conjugate()).a);
    }

    #[test]
    fn rank_nullity(m in matrix(5)) {
        let kernel = exact_kernel(&m);
        prop_assert_eq!(exact_rank(&m) + kernel.len(), m.cols());
        for v in &kernel {
            prop_assert!(m.mul_vector(v).unwrap().iter().all(Zero::is_zero));
        }
        prop_assert_eq!(exact_rank(&m), exact_rank(&m.transpose()));
    }

    #[test]
    fn gram_products_are_psd(m in matrix(4)) {
        let g = m.transpose().mul_matrix(&m).unwrap();
        prop_assert!(psd_certificate(&g).unwrap().is_psd());
    }

    #[test]
    fn psd_matches_two_by_two_minors(a in -4i64..=4, b in -4i64..=4, c in -4i64..=4) {
        let m = ExactMatrix::from_i64(&[&[a, b], &[b, c]]);
        let expected = a >= 0 && c >= 0 && a * c - b * b >= 0;
        match psd_certificate(&m).unwrap() {
            PsdVerdict::PositiveSemidefinite => prop_assert!(expected),
            PsdVerdict::Witness { vector, value } => {
                prop_assert!(!expected);
                prop_assert!(value < Rational::zero());
                prop_assert_eq!(m.quadratic_form(&vector).unwrap(), value);
            }
        }
    }

    #[test]
    fn triple_constants_follow_relations(x in generator(3), y in generator(3), z in generator(3)) {
        let got: BTreeMap<Generator, Rational> = triple_constants(x, y, z)
            .unwrap()
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        prop_assert_eq!(got, relation_oracle(x, y, z));
    }

    #[test]
    fn inner_product_is_symmetric(w1 in word(2, 3), w2 in word(2, 3), p in 1i64..=3) {
        let e = FockEngine::new(2, rat(p)).unwrap();
        let (v1, v2) = (FockVector::word(w1.clone()), FockVector::word(w2.clone()));
        prop_assert_eq!(e.inner_product(&v1, &v2).unwrap(), e.inner_product(&v2, &v1).unwrap());
        let g = e.gram_matrix(&[w1, w2]).unwrap();
        prop_assert!(g.is_symmetric());
    }

    #[test]
    fn annihilator_is_adjoint(w1 in word(2, 2), w2 in word(2, 3), i in mode(2), p in 1i64..=3) {
        let e = FockEngine::new(2, rat(p)).unwrap();
        let (v1, v2) = (FockVector::word(w1), FockVector::word(w2));
        let lhs = e.inner_product(&e.apply(Generator::plus(i), &v1).unwrap(), &v2).unwrap();
        let rhs = e.inner_product(&v1, &e.apply(Generator::minus(i), &v2).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cartan_acts_by_weight(w in word(2, 4), i in mode(2), p in 1i64..=4) {
        let pr = rat(p);
        let e = FockEngine::new(2, pr.clone()).unwrap();
        let v = FockVector::word(w.clone());
        let h = e.pair_apply(Generator::plus(i), Generator::minus(i), &v).unwrap().scale(&Rational::new(1.into(), 2.into()));
        let weight = word_weight(&w, 2, &pr).unwrap();
        prop_assert_eq!(h, v.scale(&weight.get(i)));
    }

    #[test]
    fn enumeration_matches_box_filter(neg in proptest::collection::vec(0i64..=2, 1..=2), pos in proptest::collection::vec(0i64..=2, 1..=2)) {
        let n = neg.len().min(pos.len());
        let mut neg: Vec<i64> = neg[..n].to_vec();
        neg.sort_unstable();
        let mut pos: Vec<i64> = pos[..n].to_vec();
        pos.sort_unstable_by(|a, b| b.cmp(a));
        let Ok(top) = TopRow::new(&neg, &pos) else { return Ok(()) };
        prop_assume!(top.satisfies_condition_one());
        let enumerated: std::collections::BTreeSet<String> =
            gz::enumerate_patterns(&top).iter().map(|p| serde_json::to_string(p).unwrap()).collect();
        let bound = top.total();
        prop_assume!(bound <= 4);
        let mut boxed = std::collections::BTreeSet::new();
        let mut rows: Vec<Vec<Vec<i64>>> = vec![vec![]];
        for r in 1..2 * n {
            let len = r;
            let mut next = Vec::new();
            for prefix in &rows {
                for row in (0..len).map(|_| 0..=bound).multi_cartesian_product() {
                    let mut p = prefix.clone();
                    p.push(row);
                    next.push(p);
                }
            }
            rows = next;
        }
        for mut body in rows {
            body.push(top.row().display_values());
            if let Ok(p) = GZPattern::from_display(n, &body) {
                if gz::validate_finite(&p).passed() {
                    boxed.insert(serde_json::to_string(&p).unwrap());
                }
            }
        }
        prop_assert_eq!(enumerated, boxed);
    }

    #[test]
    fn tensor_branch_adds_one_box(neg in proptest::collection::vec(0i64..=3, 2), pos in proptest::collection::vec(0i64..=3, 2)) {
        let mut neg = neg;
        neg.sort_unstable();
        let mut pos = pos;
        pos.sort_unstable_by(|a, b| b.cmp(a));
        let Ok(top) = TopRow::new(&neg, &pos) else { return Ok(()) };
        prop_assume!(top.satisfies_condition_one());
        let branches = gz::tensor_branch(&top);
        prop_assert!(!branches.is_empty());
        for b in &branches {
            prop_assert_eq!(b.total(), top.total() + 1);
            prop_assert!(b.satisfies_condition_one());
        }
        let unique: std::collections::BTreeSet<String> = branches.iter().map(ToString::to_string).collect();
        prop_assert_eq!(unique.len(), branches.len());
    }

    #[test]
    fn phi_round_trips(nu in proptest::collection::vec(0i64..=2, 0..=2), extra in 0usize..=2) {
        let mut nu = nu;
        nu.sort_unstable_by(|a, b| b.cmp(a));
        let n = nu.len().max(1) + extra;
        let row = GzRow::stable(2 * n, &nu).unwrap();
        let vals = row.display_values();
        let top = TopRow::new(&vals[..n], &vals[n..]).unwrap();
        for pat in gz::enumerate_patterns(&top) {
            let inf = gz::phi_to_infinite(&pat).unwrap();
            prop_assert_eq!(&gz::phi_from_infinite(&inf, 2 * n).unwrap(), &pat);
            let ext = gz::phi_extend(&pat).unwrap();
            prop_assert_eq!(&gz::phi_to_infinite(&ext).unwrap(), &inf);
            prop_assert_eq!(gz::phi_from_infinite(&inf, 2 * n + 2).unwrap(), ext);
        }
    }
}

#[test]
fn relation_oracle_matches_small_sample() {
    let got = triple_constants(Generator::plus(-1), Generator::plus(1), Generator::minus(-1)).unwrap();
    assert_eq!(got, vec![(Generator::plus(1), rat(2))]);
    assert_eq!(relation_oracle(Generator::plus(-1), Generator::plus(1), Generator::minus(-1)).len(), 1);
}
