use std::sync::Arc;

use proptest::prelude::*;
use qmeasure::linalg::{dot, unit_vec, SMat};
use qmeasure::qnum::RatQ;
use qmeasure::rootdata::{build_cartan, CartanDatum, WeylWord};
use qmeasure::uqmod::{dual_module, irrep, weyl_dimension, Gen, MatrixCoefficient, UqModule};

fn group(s: char, n: usize) -> Arc<CartanDatum> {
    Arc::new(build_cartan(s, n).unwrap())
}

fn inventory() -> Vec<(Arc<CartanDatum>, Vec<i64>)> {
    let a1 = group('A', 1);
    let a2 = group('A', 2);
    let b2 = group('B', 2);
    let a3 = group('A', 3);
    vec![
        (a1.clone(), vec![1]),
        (a1, vec![3]),
        (a2.clone(), vec![1, 0]),
        (a2.clone(), vec![0, 1]),
        (a2, vec![1, 1]),
        (b2.clone(), vec![1, 0]),
        (b2.clone(), vec![0, 1]),
        (b2, vec![0, 2]),
        (a3, vec![0, 1, 0]),
    ]
}

#[test]
fn irreducibles_satisfy_the_relations() {
    for (cd, lambda) in inventory() {
        let m = irrep(&cd, &lambda).unwrap();
        assert_eq!(m.dim() as u64, weyl_dimension(&cd, &lambda), "{}", m.label);
        m.check_relations().unwrap_or_else(|e| panic!("{}: {e}", m.label));
        m.check_star().unwrap_or_else(|e| panic!("{}: {e}", m.label));
        let d = dual_module(&m);
        d.check_relations().unwrap();
        d.check_star().unwrap();
        for a in 0..m.dim() {
            assert!(m.gram.get(a, a).eval(2.0).unwrap() > 0.0, "{} Gram diagonal", m.label);
        }
    }
}

#[test]
fn braid_action_is_word_independent() {
    let a2 = group('A', 2);
    let m = irrep(&a2, &[1, 1]).unwrap();
    assert_eq!(m.braid_apply(&WeylWord(vec![1, 2, 1])), m.braid_apply(&WeylWord(vec![2, 1, 2])));
    let b2 = group('B', 2);
    let m = irrep(&b2, &[1, 1]).unwrap();
    assert_eq!(m.braid_apply(&WeylWord(vec![1, 2, 1, 2])), m.braid_apply(&WeylWord(vec![2, 1, 2, 1])));
}

#[test]
fn braid_action_moves_extremal_weights() {
    for (cd, lambda) in inventory() {
        let m = irrep(&cd, &lambda).unwrap();
        let hw = unit_vec(m.dim(), m.hw_index);
        for w in cd.weyl_group() {
            let v = m.braid_apply(&w).apply(&hw);
            assert_eq!(m.weight_of(&v).unwrap(), cd.weyl_apply(&w, &lambda), "{} w = {:?}", m.label, w.0);
        }
    }
}

// Test-side images of generators under S and under x -> S(x)^*, built
// directly from the module matrices of M.

fn antipode_matrix(m: &UqModule, g: Gen) -> SMat {
    match g {
        Gen::E(i) => m.e[i].mul(&m.k_matrix(i, -1)).scale(&RatQ::from(-1)),
        Gen::F(i) => m.k_matrix(i, 1).mul(&m.f[i]).scale(&RatQ::from(-1)),
        Gen::K(i) => m.k_matrix(i, -1),
        Gen::KInv(i) => m.k_matrix(i, 1),
    }
}

fn antipode_star_matrix(m: &UqModule, g: Gen) -> SMat {
    let qd = RatQ::q_pow(m.cd.d[gen_node(g)]);
    let qdinv = qd.inv().unwrap();
    match g {
        // S(E)^* = -(K^{-1})^* E^* = -q_i^{-1} K^{-1} F K
        Gen::E(i) => m.k_matrix(i, -1).mul(&m.f[i]).mul(&m.k_matrix(i, 1)).scale(&-qdinv),
        // S(F)^* = -F^* K^* = -q_i K^{-1} E K
        Gen::F(i) => m.k_matrix(i, -1).mul(&m.e[i]).mul(&m.k_matrix(i, 1)).scale(&-qd),
        Gen::K(i) => m.k_matrix(i, -1),
        Gen::KInv(i) => m.k_matrix(i, 1),
    }
}

fn gen_node(g: Gen) -> usize {
    match g {
        Gen::E(i) | Gen::F(i) | Gen::K(i) | Gen::KInv(i) => i,
    }
}

fn gens(rank: usize) -> impl Strategy<Value = Vec<Gen>> {
    prop::collection::vec(
        (0..rank, 0..4u8).prop_map(|(i, k)| match k {
            0 => Gen::E(i),
            1 => Gen::F(i),
            2 => Gen::K(i),
            _ => Gen::KInv(i),
        }),
        0..5,
    )
}

/// `<l, A(g_1) ... A(g_n) v>` for a per-generator matrix map `A`.
fn pair_through(m: &UqModule, c: &MatrixCoefficient, word: &[Gen], a: impl Fn(&UqModule, Gen) -> SMat) -> RatQ {
    let v = word.iter().rev().fold(c.v.clone(), |acc, g| a(m, *g).apply(&acc));
    dot(&c.l, &v)
}

fn check_structure(cd: &Arc<CartanDatum>, lambda: &[i64], word: &[Gen], a: usize, b: usize) -> Result<(), TestCaseError> {
    let m = irrep(cd, lambda).unwrap();
    let (a, b) = (a % m.dim(), b % m.dim());
    let c = MatrixCoefficient::basis(m.clone(), a, b).unwrap();
    // S(x) for x = g_1 ... g_n is S(g_n) ... S(g_1)
    let rev: Vec<Gen> = word.iter().rev().copied().collect();
    prop_assert_eq!(c.antipode().eval_word(word), pair_through(&m, &c, &rev, antipode_matrix));
    // S(x)^* = S(g_1)^* ... S(g_n)^*; q is real so conjugation is trivial
    prop_assert_eq!(c.star().eval_word(word), pair_through(&m, &c, word, antipode_star_matrix));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn coefficient_structure_a2(word in gens(2), a in 0usize..8, b in 0usize..8) {
        check_structure(&group('A', 2), &[1, 1], &word, a, b)?;
    }

    #[test]
    fn coefficient_structure_b2(word in gens(2), a in 0usize..5, b in 0usize..5) {
        check_structure(&group('B', 2), &[1, 0], &word, a, b)?;
    }

    #[test]
    fn coefficient_structure_a1(word in gens(1), a in 0usize..4, b in 0usize..4) {
        check_structure(&group('A', 1), &[3], &word, a, b)?;
    }
}
