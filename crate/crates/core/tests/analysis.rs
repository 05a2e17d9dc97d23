use std::sync::Arc;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qmeasure::cfunc::{c_function_product, c_function_trace, CFunctionQuery};
use qmeasure::haar::{haar_pair_projection, haar_schur_pair, haar_trace, haar_trace_word};
use qmeasure::qnum::{QParams, RatQ};
use qmeasure::qtrace::{covariance_check, qtr, s2_scaling, QuasiTraceContext};
use qmeasure::repwt::{make_context, product_operator, Factor};
use qmeasure::rootdata::{build_cartan, CartanDatum, WeylWord};
use qmeasure::uqmod::{irrep, Gen, MatrixCoefficient};

fn group(s: char, n: usize) -> Arc<CartanDatum> {
    Arc::new(build_cartan(s, n).unwrap())
}

fn coef(cd: &Arc<CartanDatum>, lambda: &[i64], a: usize, b: usize) -> MatrixCoefficient {
    let m = irrep(cd, lambda).unwrap();
    let n = m.dim();
    MatrixCoefficient::basis(m, a % n, b % n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The weighted trace over `pi_{w0}` against the invariant-projection
    /// oracle on the tensor product module.
    #[test]
    fn haar_pair_a2(a in 0usize..3, b in 0usize..3, c in 0usize..3, d in 0usize..3, dual in any::<bool>()) {
        let cd = group('A', 2);
        let x = coef(&cd, &[1, 0], a, b);
        let y = coef(&cd, if dual { &[0, 1] } else { &[1, 0] }, c, d);
        let want = haar_pair_projection(&x, &y).unwrap();
        let got = haar_trace(&cd, &[Factor::Coef(x.clone()), Factor::Coef(y.clone())], &QParams::exact(2)).unwrap();
        prop_assert_eq!(got.exact.unwrap(), want.clone());
        prop_assert_eq!(haar_schur_pair(&x, &y).unwrap(), want);
    }

    #[test]
    fn haar_pair_b2(a in 0usize..5, b in 0usize..5, c in 0usize..5, d in 0usize..5) {
        let cd = group('B', 2);
        let x = coef(&cd, &[1, 0], a, b);
        let y = coef(&cd, &[1, 0], c, d);
        let want = haar_pair_projection(&x, &y).unwrap();
        prop_assert_eq!(haar_schur_pair(&x, &y).unwrap(), want.clone());
        let got = haar_trace(&cd, &[Factor::Coef(x), Factor::Coef(y)], &QParams::exact(2)).unwrap();
        prop_assert_eq!(got.exact.unwrap(), want);
    }

    /// Covariance of the quasi-trace under the adjoint action, with the
    /// character at `q^{2(w rho - rho)}`.
    #[test]
    fn covariance_a2(a in 0usize..3, b in 0usize..3, w in 0usize..4) {
        let cd = group('A', 2);
        let words = [vec![1], vec![2, 1], vec![1, 2], vec![1, 2, 1]];
        let ctx = make_context(&cd, &WeylWord(words[w].clone()), None, QParams::exact(2)).unwrap();
        let two_rho = vec![2, 2];
        let l = product_operator(&ctx, &[Factor::A(two_rho.clone()), Factor::AStar(two_rho)]).unwrap();
        let q = QuasiTraceContext::new(ctx).unwrap();
        let c = coef(&cd, &[1, 0], a, b);
        let r = covariance_check(&q, &c, &l).unwrap();
        prop_assert!(r.passes(0.0), "{:?}", r.exact_residual);
    }

    /// The c-function trace agrees with the inversion-root product at
    /// integral points of the domain.
    #[test]
    fn cfunc_b2(l1 in 1i64..5, l2 in 1i64..5, w in 0usize..8) {
        let cd = group('B', 2);
        let word = cd.weyl_group()[w].clone();
        let lambda: Vec<C64> = [l1, l2].iter().map(|x| C64::new(0.0, -*x as f64)).collect();
        let query = CFunctionQuery { cd, word, lambda, params: QParams::exact(2) };
        let t = c_function_trace(&query).unwrap();
        let p = c_function_product(&query).unwrap();
        prop_assert_eq!(t.exact.unwrap(), p.exact.unwrap());
    }
}

#[test]
fn haar_is_word_independent_for_b2() {
    let cd = group('B', 2);
    let x = coef(&cd, &[0, 1], 1, 2);
    let y = coef(&cd, &[0, 1], 2, 1);
    let fs = [Factor::Coef(x), Factor::Coef(y)];
    let a = haar_trace_word(&cd, &WeylWord(vec![1, 2, 1, 2]), &fs, &QParams::exact(2)).unwrap();
    let b = haar_trace_word(&cd, &WeylWord(vec![2, 1, 2, 1]), &fs, &QParams::exact(2)).unwrap();
    assert_eq!(a.exact, b.exact);
    assert!(!a.exact.unwrap().is_zero());
}

/// `S^2` rescales coefficients by a power of `q` fixed by the weights.
#[test]
fn squared_antipode_on_a2() {
    let cd = group('A', 2);
    let m = irrep(&cd, &[1, 1]).unwrap();
    let words = [
        vec![Gen::E(0)],
        vec![Gen::F(1), Gen::E(0)],
        vec![Gen::E(0), Gen::E(1), Gen::F(0), Gen::F(1)],
        vec![Gen::K(0), Gen::F(0), Gen::E(1)],
    ];
    for a in 0..m.dim() {
        for b in 0..m.dim() {
            let c = MatrixCoefficient::basis(m.clone(), a, b).unwrap();
            let s2 = c.antipode().antipode();
            for w in &words {
                assert_eq!(s2.eval_word(w), &c.eval_word(w) * &s2_scaling(&c), "({a}, {b}) {w:?}");
            }
        }
    }
}

#[test]
fn float_haar_tracks_exact() {
    let cd = group('A', 2);
    let x = coef(&cd, &[1, 0], 0, 0);
    let y = coef(&cd, &[0, 1], 2, 2);
    let fs = [Factor::Coef(x), Factor::Coef(y)];
    let exact = haar_trace(&cd, &fs, &QParams::exact(2)).unwrap().exact.unwrap().eval(2.0).unwrap();
    let float = haar_trace(&cd, &fs, &QParams::float(2.0, 60)).unwrap();
    assert!((float.value.re - exact).abs() <= float.tail + 1e-10 * exact.abs(), "{float:?} vs {exact}");
}

#[test]
fn quasi_trace_normalisation_on_b2() {
    let cd = group('B', 2);
    let two_rho: Vec<i64> = cd.rho.iter().map(|x| 2 * x).collect();
    for w in cd.weyl_group().into_iter().filter(|w| !w.is_empty()) {
        let ctx = make_context(&cd, &w, None, QParams::exact(2)).unwrap();
        let l = product_operator(&ctx, &[Factor::A(two_rho.clone()), Factor::AStar(two_rho.clone())]).unwrap();
        let r = qtr(&QuasiTraceContext::new(ctx).unwrap(), &l).unwrap();
        assert_eq!(r.exact.unwrap(), RatQ::one(), "w = {:?}", w.0);
    }
}
