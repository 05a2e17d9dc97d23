use std::sync::Arc;

use proptest::prelude::*;
use qmeasure::cqsu2::{pi_su2, Cgen, NfTensor, NormalFormElem};
use qmeasure::haar::haar_trace;
use qmeasure::qnum::{rq, QParams, RatQ};
use qmeasure::repwt::Factor;
use qmeasure::rootdata::build_cartan;

const GENS: [Cgen; 4] = [Cgen::C11, Cgen::C12, Cgen::C21, Cgen::C22];

fn word() -> impl Strategy<Value = Vec<Cgen>> {
    prop::collection::vec((0usize..4).prop_map(|i| GENS[i]), 0..4)
}

/// Short integer combinations of generator words.
fn element() -> impl Strategy<Value = NormalFormElem> {
    prop::collection::vec((word(), -3i64..=3), 1..3).prop_map(|terms| {
        terms
            .iter()
            .fold(NormalFormElem::zero(), |acc, (w, c)| acc.add(&NormalFormElem::from_word(w).scale(&rq(*c))))
    })
}

fn one_scaled(c: RatQ) -> NormalFormElem {
    NormalFormElem::scalar(c)
}

fn mono_haar(m: &qmeasure::cqsu2::Mono) -> RatQ {
    NormalFormElem::monomial(*m, RatQ::one()).haar()
}

fn mono_counit(m: &qmeasure::cqsu2::Mono) -> RatQ {
    NormalFormElem::monomial(*m, RatQ::one()).counit()
}

#[test]
fn defining_relations() {
    let g = |x| NormalFormElem::gen(x);
    let q = RatQ::q_pow(1);
    let (a, b, c, d) = (g(Cgen::C11), g(Cgen::C12), g(Cgen::C21), g(Cgen::C22));
    let qi = q.inv().unwrap();
    assert_eq!(b.mul(&a), a.mul(&b).scale(&q));
    assert_eq!(c.mul(&a), a.mul(&c).scale(&q));
    assert_eq!(b.mul(&c), c.mul(&b));
    // quantum determinant, both orders
    assert_eq!(a.mul(&d).sub(&b.mul(&c).scale(&qi)), NormalFormElem::one());
    assert_eq!(d.mul(&a).sub(&b.mul(&c).scale(&q)), NormalFormElem::one());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn associative(a in element(), b in element(), c in element()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn coproduct_is_multiplicative(a in element(), b in element()) {
        prop_assert_eq!(a.mul(&b).coproduct(), a.coproduct().mul(&b.coproduct()));
    }

    #[test]
    fn coassociative(a in element()) {
        let d = a.coproduct();
        prop_assert_eq!(d.coproduct_leg(true), d.coproduct_leg(false));
    }

    #[test]
    fn counit_and_antipode(a in element()) {
        let d = a.coproduct();
        prop_assert_eq!(d.apply_left(mono_counit), a.clone());
        prop_assert_eq!(d.apply_right(mono_counit), a.clone());
        let eps = one_scaled(a.counit());
        prop_assert_eq!(d.contract(|x| x.antipode(), |x| x.clone()), eps.clone());
        prop_assert_eq!(d.contract(|x| x.clone(), |x| x.antipode()), eps);
    }

    #[test]
    fn star_is_an_antilinear_anti_involution(a in element(), b in element()) {
        prop_assert_eq!(a.star().star(), a.clone());
        prop_assert_eq!(a.mul(&b).star(), b.star().mul(&a.star()));
        prop_assert_eq!(a.star().coproduct(), a.coproduct().star_legs());
        // S(S(a*)*) = a
        prop_assert_eq!(a.star().antipode().star().antipode(), a);
    }

    #[test]
    fn haar_is_invariant(a in element()) {
        let d = a.coproduct();
        let h = one_scaled(a.haar());
        prop_assert_eq!(d.apply_right(mono_haar), h.clone());
        prop_assert_eq!(d.apply_left(mono_haar), h);
    }

    #[test]
    fn haar_is_faithful(a in element()) {
        let h = a.star().mul(&a).haar().eval(2.0).unwrap();
        if a.is_zero() {
            prop_assert_eq!(h, 0.0);
        } else {
            prop_assert!(h > 0.0, "H(a* a) = {h}");
        }
    }

    #[test]
    fn pi_is_a_star_representation(a in element(), b in element()) {
        prop_assert_eq!(pi_su2(&a.mul(&b), 1), pi_su2(&a, 1).compose(&pi_su2(&b, 1)));
        prop_assert_eq!(pi_su2(&a.star(), 1), pi_su2(&a, 1).adjoint());
    }
}

/// Haar values through the weighted trace on the rank-one representation
/// agree with the closed form on combinations, not just on monomials.
#[test]
fn trace_formula_on_combinations() {
    let cd = Arc::new(build_cartan('A', 1).unwrap());
    let g = NormalFormElem::gen;
    let samples = [
        g(Cgen::C12).mul(&g(Cgen::C21)),
        g(Cgen::C11).mul(&g(Cgen::C22)).add(&g(Cgen::C22).mul(&g(Cgen::C11)).scale(&rq(3))),
        g(Cgen::C12).star().mul(&g(Cgen::C12)).pow(2),
        g(Cgen::C11).pow(2).mul(&g(Cgen::C22).pow(2)).sub(&NormalFormElem::one()),
    ];
    for a in samples {
        let r = haar_trace(&cd, &[Factor::Su2(a.clone())], &QParams::exact(2)).unwrap();
        assert_eq!(r.exact.unwrap(), a.haar(), "{a:?}");
    }
}

#[test]
fn tensor_identity_shapes() {
    assert_eq!(NormalFormElem::one().coproduct(), NfTensor::one());
    assert!(NormalFormElem::zero().coproduct().is_zero());
}
