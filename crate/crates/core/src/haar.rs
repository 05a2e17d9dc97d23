//! The Haar state, from Schur orthogonality and from the trace formula
//! over the maximal cell.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde_json::json;

use crate::linalg::{dot, inverse_dense, nullspace, SMat};
use crate::qnum::{Mode, QParams, RatQ};
use crate::repwt::{make_context, product_operator, Factor, FloatOp, RepContext, RepError, TensorOp};
use crate::rootdata::{CartanDatum, WeylWord};
use crate::uqmod::{dual_highest_weight, dual_module, intertwiner, tensor_module, two_rho_pairing, weyl_dimension, MatrixCoefficient, UqModule};

#[derive(Debug, Clone)]
pub struct HaarResult {
    /// Closed form in exact mode.
    pub exact: Option<RatQ>,
    pub value: C64,
    pub tail: f64,
    pub word: WeylWord,
    pub trunc: usize,
    pub mode: Mode,
}

impl HaarResult {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "value_re": self.value.re,
            "value_im": self.value.im,
            "tail_bound": self.tail,
            "exact": self.exact.as_ref().map(|x| x.to_string()),
            "word": self.word.letters(),
            "trunc": self.trunc,
            "mode": self.mode,
        })
    }
}

/// `H(c) = delta_{Lambda,0} <l, v>`, with the delta read off the module.
pub fn haar_schur(c: &MatrixCoefficient) -> RatQ {
    if c.module.dim() == 1 && c.module.highest.iter().all(|x| *x == 0) {
        c.pairing()
    } else {
        RatQ::zero()
    }
}

fn irreducible(m: &UqModule) -> bool {
    m.dim() as u64 == weyl_dimension(&m.cd, &m.highest)
}

/// `sum_lambda dim L(Lambda)_lambda q^{(2 rho, lambda)}`.
pub fn quantum_dimension(m: &UqModule) -> RatQ {
    m.weights.iter().map(|w| RatQ::q_pow(two_rho_pairing(&m.cd, w))).sum()
}

/// `H(c c')` for coefficients of irreducible modules. The product is
/// nonzero only when `c'` lives on the dual `L(-w_0 Lambda)`; writing
/// `c' = c^{M*}_{xi, eta}` through the intertwiner, the value is
/// `<l, xi> <eta, q^{2 rho} v> / sum_lambda dim L(Lambda)_lambda q^{(2 rho, lambda)}`.
pub fn haar_schur_pair(c: &MatrixCoefficient, c2: &MatrixCoefficient) -> Result<RatQ, RepError> {
    let m = &c.module;
    if !irreducible(m) || !irreducible(&c2.module) {
        return Err(RepError::Unsupported("pair formula needs irreducible modules".into()));
    }
    if c2.module.highest != dual_highest_weight(&m.cd, &m.highest) {
        return Ok(RatQ::zero());
    }
    let dual = dual_module(m);
    let phi = intertwiner(&dual, &c2.module)?;
    let phi_inv = phi.inverse().ok_or_else(|| RepError::Unsupported("singular intertwiner".into()))?;
    let xi = phi.apply_left(&c2.l);
    let eta = phi_inv.apply(&c2.v);
    let twisted: Vec<RatQ> = c
        .v
        .iter()
        .zip(&m.weights)
        .map(|(x, w)| x * &RatQ::q_pow(two_rho_pairing(&m.cd, w)))
        .collect();
    Ok(dot(&c.l, &xi) * dot(&eta, &twisted) / quantum_dimension(m))
}

fn invariant_span(m: &UqModule, transpose: bool) -> Vec<Vec<RatQ>> {
    let n = m.dim();
    let zero: Vec<usize> = (0..n).filter(|&a| m.weights[a].iter().all(|x| *x == 0)).collect();
    if zero.is_empty() {
        return Vec::new();
    }
    let mut rows: Vec<Vec<RatQ>> = Vec::new();
    for g in m.e.iter().chain(&m.f) {
        let g: SMat = if transpose { g.transpose() } else { g.clone() };
        let dense = g.to_dense();
        for r in dense {
            let row: Vec<RatQ> = zero.iter().map(|&c| r[c].clone()).collect();
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    nullspace(&rows, zero.len())
        .into_iter()
        .map(|v| {
            let mut full = vec![RatQ::zero(); n];
            for (k, &a) in zero.iter().enumerate() {
                full[a] = v[k].clone();
            }
            full
        })
        .collect()
}

/// `H(c)` for a coefficient of any finite-dimensional module: the
/// projection onto the trivial isotypic part, built from the invariant
/// vectors and invariant covectors.
pub fn haar_projection(c: &MatrixCoefficient) -> Result<RatQ, RepError> {
    let s = invariant_span(&c.module, false);
    let sigma = invariant_span(&c.module, true);
    if s.is_empty() {
        return Ok(RatQ::zero());
    }
    let g: Vec<Vec<RatQ>> = sigma.iter().map(|x| s.iter().map(|y| dot(x, y)).collect()).collect();
    let ginv = inverse_dense(&g).ok_or_else(|| RepError::Unsupported("degenerate invariant pairing".into()))?;
    let ls: Vec<RatQ> = s.iter().map(|y| dot(&c.l, y)).collect();
    let sv: Vec<RatQ> = sigma.iter().map(|x| dot(x, &c.v)).collect();
    let mut acc = RatQ::zero();
    for (a, la) in ls.iter().enumerate() {
        for (b, vb) in sv.iter().enumerate() {
            acc += &(&(la * &ginv[a][b]) * vb);
        }
    }
    Ok(acc)
}

/// `H(c c')` through the tensor product module.
pub fn haar_pair_projection(c: &MatrixCoefficient, c2: &MatrixCoefficient) -> Result<RatQ, RepError> {
    let t = tensor_module(&c.module, &c2.module)?;
    let kron = |a: &[RatQ], b: &[RatQ]| -> Vec<RatQ> { a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect() };
    let prod = MatrixCoefficient { module: Arc::new(t), l: kron(&c.l, &c2.l), v: kron(&c.v, &c2.v) };
    haar_projection(&prod)
}

/// `prod_{beta > 0} (q^{(2 rho, beta)} - 1)`.
pub fn haar_prefactor(cd: &CartanDatum) -> RatQ {
    cd.pos_roots.iter().map(|b| RatQ::q_pow_minus_one(cd.pair_root(&two_rho(cd), b))).product()
}

fn two_rho(cd: &CartanDatum) -> Vec<i64> {
    cd.rho.iter().map(|x| 2 * x).collect()
}

/// Per-slot decay `x_j = q^{-2(w_j rho, alpha_{i_j})}` of `pi(a_rho a_rho^*)`.
pub fn balancing_exponents(ctx: &RepContext) -> Vec<i64> {
    ctx.slot_roots().iter().map(|b| 2 * ctx.cd.pair_root(&ctx.cd.rho, b)).collect()
}

/// Truncated traces of `D B` per torus monomial, with certified tails;
/// `D` is the diagonal with entries `prod_j x_j^{k_j + 1}`, `x_j = q^{-exps_j}`.
pub fn weighted_trace_float(ctx: &RepContext, exps: &[i64], b: &FloatOp) -> BTreeMap<Vec<i64>, (C64, f64)> {
    let q0 = ctx.params.q();
    let k = ctx.params.trunc.min(b.exact());
    let xs: Vec<f64> = exps.iter().map(|e| q0.powf(-*e as f64)).collect();
    let mut out: BTreeMap<Vec<i64>, (C64, f64)> = BTreeMap::new();
    for term in &b.terms {
        let mut prod = C64::new(1.0, 0.0);
        let mut abs_prod = 1.0;
        let mut padded = 1.0;
        for (j, slot) in term.slots.iter().enumerate() {
            let x = xs[j];
            let diag = slot.diagonal_entries();
            let mut a = C64::default();
            let mut p = x;
            for entry in diag.iter().take(k) {
                a += entry * p;
                p *= x;
            }
            let r = if x < 1.0 { slot.bound * x.powi(k as i32 + 1) / (1.0 - x) } else { f64::INFINITY };
            prod *= a;
            abs_prod *= a.norm();
            padded *= a.norm() + r;
        }
        let e = out.entry(term.torus.clone()).or_insert((C64::default(), 0.0));
        e.0 += term.coef * prod;
        e.1 += term.coef.norm() * (padded - abs_prod);
    }
    out
}

/// `H(c)` via the trace over `pi_{w_0, t}`, integrated over the torus.
pub fn haar_trace(cd: &Arc<CartanDatum>, factors: &[Factor], params: &QParams) -> Result<HaarResult, RepError> {
    haar_trace_word(cd, &cd.longest_element(), factors, params)
}

/// As [`haar_trace`] with a chosen reduced word for the longest element.
pub fn haar_trace_word(cd: &Arc<CartanDatum>, word: &WeylWord, factors: &[Factor], params: &QParams) -> Result<HaarResult, RepError> {
    if cd.length(word) != cd.pos_roots.len() {
        return Err(RepError::Unsupported(format!("{word} is not a reduced word of the longest element")));
    }
    let ctx = make_context(cd, word, None, params.clone())?;
    let pre = haar_prefactor(cd);
    let q0 = params.q();
    let b = product_operator(&ctx, factors)?;
    match b {
        TensorOp::Exact(b) => {
            let rho = cd.rho.clone();
            let d = product_operator(&ctx, &[Factor::A(rho.clone()), Factor::AStar(rho)])?;
            let d = d.exact().expect("exact context").clone();
            let value = &pre * &d.mul(&b).trace_invariant()?;
            Ok(HaarResult {
                value: C64::new(value.eval(q0)?, 0.0),
                exact: Some(value),
                tail: 0.0,
                word: word.clone(),
                trunc: params.trunc,
                mode: Mode::Exact,
            })
        }
        TensorOp::Float(b) => {
            let traces = weighted_trace_float(&ctx, &balancing_exponents(&ctx), &b.torus_constant_term());
            let (v, t) = traces.get(&vec![0; cd.rank]).copied().unwrap_or_default();
            let p = pre.eval(q0)?;
            Ok(HaarResult { exact: None, value: v * p, tail: t * p, word: word.clone(), trunc: params.trunc, mode: Mode::Float })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cqsu2::{haar_closed_form, Mono, NormalFormElem};
    use crate::rootdata::build_cartan;
    use crate::uqmod::build_fundamental;

    fn a1() -> Arc<CartanDatum> {
        Arc::new(build_cartan('A', 1).unwrap())
    }

    #[test]
    fn su2_examples() {
        let cd = a1();
        let nf = NormalFormElem::monomial(Mono::new(1, 0, 1, 1).unwrap(), RatQ::one());
        let h = haar_trace(&cd, &[Factor::Su2(nf)], &QParams::exact(2)).unwrap();
        assert_eq!(h.exact.unwrap(), haar_closed_form(1, 0, 1, 1).unwrap());
        let one = haar_trace(&cd, &[], &QParams::exact(2)).unwrap();
        assert!(one.exact.unwrap().is_one());
    }

    #[test]
    fn pair_formula_matches_projection() {
        let cd = a1();
        let m = build_fundamental(&cd, 1).unwrap();
        for (a, b, c, d) in [(0, 0, 1, 1), (1, 1, 0, 0), (0, 1, 1, 0), (0, 1, 0, 1)] {
            let x = MatrixCoefficient::basis(m.clone(), a, b).unwrap();
            let y = MatrixCoefficient::basis(m.clone(), c, d).unwrap();
            assert_eq!(haar_schur_pair(&x, &y).unwrap(), haar_pair_projection(&x, &y).unwrap());
        }
    }

    #[test]
    fn float_matches_exact() {
        let cd = a1();
        let m = build_fundamental(&cd, 1).unwrap();
        let x = MatrixCoefficient::basis(m.clone(), 0, 0).unwrap();
        let y = MatrixCoefficient::basis(m, 1, 1).unwrap();
        let fs = [Factor::Coef(x), Factor::Coef(y)];
        let e = haar_trace(&cd, &fs, &QParams::exact(2)).unwrap();
        let f = haar_trace(&cd, &fs, &QParams::float(2.0, 40)).unwrap();
        assert!((e.value - f.value).norm() <= f.tail + 1e-12, "{:?} {:?}", e.value, f);
    }
}
