//! Quantum c-functions: the diagonal family `d_{lambda,w}`, its quasi-trace,
//! and the closed product over inversion roots.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde_json::json;
use thiserror::Error;

use crate::qnum::{Mode, QParams, RatQ};
use crate::qtrace::{qtr, QuasiTraceContext};
use crate::repwt::{make_context, RepContext, RepError, TensorOp};
use crate::rootdata::{CartanDatum, WeylWord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CfuncError {
    #[error("outside the trace-class domain: Re(i lambda, beta) = {re} <= 0 at beta = {beta:?}")]
    Domain { beta: Vec<i64>, re: f64 },
    #[error("pole: q^(i lambda, beta) = 1 at beta = {beta:?}")]
    Pole { beta: Vec<i64> },
    #[error("exact mode needs i lambda integral, got {0:?}")]
    NotIntegral(Vec<C64>),
    #[error(transparent)]
    Rep(#[from] RepError),
}

#[derive(Debug, Clone)]
pub struct CFunctionQuery {
    pub cd: Arc<CartanDatum>,
    pub word: WeylWord,
    /// Spectral parameter in fundamental-weight coordinates.
    pub lambda: Vec<C64>,
    pub params: QParams,
}

#[derive(Debug, Clone)]
pub struct CValue {
    pub exact: Option<RatQ>,
    pub value: C64,
    pub tail: f64,
}

impl CValue {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "value_re": self.value.re,
            "value_im": self.value.im,
            "exact": self.exact.as_ref().map(|x| x.to_string()),
            "tail_bound": self.tail,
        })
    }
}

fn times_i(l: &[C64]) -> Vec<C64> {
    l.iter().map(|z| z * C64::i()).collect()
}

/// `i lambda` as an integral weight, when it is one.
fn integral(l: &[C64]) -> Option<Vec<i64>> {
    l.iter()
        .map(|z| (z.im == 0.0 && z.re.fract() == 0.0).then_some(z.re as i64))
        .collect()
}

/// `d_{lambda,w}` at `t = 1`: `e_k -> prod_j q^{-(k_j + 1)(w_j lambda, alpha_{i_j})} e_k`.
pub fn d_operator(ctx: &RepContext, lambda: &[C64]) -> Result<TensorOp, CfuncError> {
    ctx.cd.check_rank(lambda).map_err(RepError::from)?;
    let roots = ctx.slot_roots();
    if ctx.params.mode == Mode::Exact {
        let l = integral(lambda).ok_or_else(|| CfuncError::NotIntegral(lambda.to_vec()))?;
        let exps: Vec<i64> = roots.iter().map(|b| ctx.cd.pair_root(&l, b)).collect();
        Ok(ctx.geometric_diagonal(&exps, vec![0; ctx.cd.rank]))
    } else {
        let exps: Vec<C64> = roots.iter().map(|b| ctx.cd.pair_root_complex(lambda, b)).collect();
        Ok(ctx.complex_geometric_diagonal(&exps, vec![0; ctx.cd.rank]))
    }
}

/// Checks `Re(i lambda, beta) > 0` over the inversion set.
pub fn check_domain(cd: &CartanDatum, w: &WeylWord, lambda: &[C64]) -> Result<(), CfuncError> {
    let il = times_i(lambda);
    for b in cd.inversion_set(w).map_err(RepError::from)? {
        let re = cd.pair_root_complex(&il, &b).re;
        if re <= 0.0 {
            return Err(CfuncError::Domain { beta: b, re });
        }
    }
    Ok(())
}

/// `qtr(d_{i lambda + 2 rho, w})` on `pi_{w,1}`.
pub fn c_function_trace(query: &CFunctionQuery) -> Result<CValue, CfuncError> {
    let cd = &query.cd;
    check_domain(cd, &query.word, &query.lambda)?;
    let ctx = make_context(cd, &query.word, None, query.params.clone())?;
    let mut shifted = times_i(&query.lambda);
    for (z, r) in shifted.iter_mut().zip(&cd.rho) {
        *z += 2.0 * *r as f64;
    }
    let d = d_operator(&ctx, &shifted)?;
    let r = qtr(&QuasiTraceContext::new(ctx)?, &d)?;
    Ok(CValue { exact: r.exact, value: r.value, tail: r.tail })
}

/// `prod (q^{(2 rho, beta)} - 1) / (q^{(i lambda, beta)} - 1)` over the
/// positive roots that `w` sends negative.
pub fn c_function_product(query: &CFunctionQuery) -> Result<CValue, CfuncError> {
    let cd = &query.cd;
    if !cd.is_reduced(&query.word) {
        return Err(RepError::from(crate::rootdata::RootError::NotReduced(query.word.letters().to_vec())).into());
    }
    let two_rho: Vec<i64> = cd.rho.iter().map(|x| 2 * x).collect();
    let roots: Vec<&Vec<i64>> = cd
        .pos_roots
        .iter()
        .filter(|b| cd.weyl_apply_root(&query.word, b).iter().any(|x| *x < 0))
        .collect();
    let q0 = query.params.q();
    let il = times_i(&query.lambda);
    let lq = q0.ln();
    let mut value = C64::new(1.0, 0.0);
    for b in &roots {
        let z = cd.pair_root_complex(&il, b);
        // q^z = 1 iff z lies in (2 pi i / ln q) Z
        let period = 2.0 * std::f64::consts::PI / lq;
        if z.re.abs() < 1e-14 && ((z.im / period) - (z.im / period).round()).abs() < 1e-14 {
            return Err(CfuncError::Pole { beta: (*b).clone() });
        }
        value *= (q0.powf(cd.pair_root(&two_rho, b) as f64) - 1.0) / ((z * lq).exp() - 1.0);
    }
    let exact = match (query.params.mode, integral(&il)) {
        (Mode::Exact, Some(l)) => Some(
            roots
                .iter()
                .map(|b| RatQ::q_pow_minus_one(cd.pair_root(&two_rho, b)) / RatQ::q_pow_minus_one(cd.pair_root(&l, b)))
                .product::<RatQ>(),
        ),
        (Mode::Exact, None) => return Err(CfuncError::NotIntegral(query.lambda.clone())),
        _ => None,
    };
    if let Some(e) = &exact {
        value = C64::new(e.eval(q0).map_err(RepError::from)?, 0.0);
    }
    Ok(CValue { exact, value, tail: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::build_cartan;

    fn query(s: char, n: usize, w: &[usize], il: &[i64], params: QParams) -> CFunctionQuery {
        // lambda = -i (i lambda)
        let lambda = il.iter().map(|x| C64::new(0.0, -*x as f64)).collect();
        CFunctionQuery { cd: Arc::new(build_cartan(s, n).unwrap()), word: WeylWord(w.to_vec()), lambda, params }
    }

    #[test]
    fn a1_examples() {
        let q = query('A', 1, &[1], &[2], QParams::exact(2));
        assert!(c_function_trace(&q).unwrap().exact.unwrap().is_one());
        assert!(c_function_product(&q).unwrap().exact.unwrap().is_one());
        let bad = query('A', 1, &[1], &[-2], QParams::exact(2));
        assert!(matches!(c_function_trace(&bad), Err(CfuncError::Domain { .. })));
        let pole = query('A', 1, &[1], &[0], QParams::exact(2));
        assert!(matches!(c_function_product(&pole), Err(CfuncError::Pole { .. })));
    }

    #[test]
    fn a2_longest_4rho() {
        let q = query('A', 2, &[1, 2, 1], &[4, 4], QParams::exact(2));
        let t = c_function_trace(&q).unwrap().exact.unwrap();
        let p = c_function_product(&q).unwrap().exact.unwrap();
        assert_eq!(t, p);
        let want = RatQ::q_pow_minus_one(2) * RatQ::q_pow_minus_one(2) * RatQ::q_pow_minus_one(4)
            / (RatQ::q_pow_minus_one(4) * RatQ::q_pow_minus_one(4) * RatQ::q_pow_minus_one(8));
        assert_eq!(t, want);
    }

    #[test]
    fn float_generic_point() {
        let cd = Arc::new(build_cartan('A', 2).unwrap());
        let lambda = vec![C64::new(0.7, -1.5), C64::new(-0.3, -2.2)];
        let mk = |mode| CFunctionQuery { cd: cd.clone(), word: WeylWord(vec![1, 2]), lambda: lambda.clone(), params: mode };
        let t = c_function_trace(&mk(QParams::float(2.0, 120))).unwrap();
        let p = c_function_product(&mk(QParams::float(2.0, 120))).unwrap();
        assert!((t.value - p.value).norm() <= 1e-10 * p.value.norm() + t.tail, "{t:?} {p:?}");
    }
}
