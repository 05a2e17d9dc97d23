//! Quantum quasi-traces on the representations `pi_{w,t}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde_json::json;

use crate::cqsu2::{Cq2Error, ShiftKey, ShiftOp};
use crate::haar::balancing_exponents;
use crate::linalg::unit_vec;
use crate::qnum::RatQ;
use crate::repwt::{evaluate_coefficient, j_operator, tensor_concat, ExactOp, FloatOp, RepContext, RepError, TensorOp};
use crate::rootdata::{CartanDatum, WeylWord};
use crate::uqmod::{dual_module, MatrixCoefficient};

/// `prod_{beta in inversion set} (q^{(2 rho, beta)} - 1)`.
pub fn const_w(cd: &CartanDatum, w: &WeylWord) -> Result<RatQ, RepError> {
    let two_rho: Vec<i64> = cd.rho.iter().map(|x| 2 * x).collect();
    Ok(cd.inversion_set(w)?.iter().map(|b| RatQ::q_pow_minus_one(cd.pair_root(&two_rho, b))).product())
}

#[derive(Debug, Clone)]
pub struct QuasiTraceContext {
    pub rep: RepContext,
    /// `2(w_j rho, alpha_{i_j})`: the balancing diagonal is `q^{exp_j (k_j + 1)}`.
    pub balancing: Vec<i64>,
    pub const_w: RatQ,
    /// `2(w rho - rho)` in coroot coordinates.
    pub nu: Vec<i64>,
}

impl QuasiTraceContext {
    pub fn new(rep: RepContext) -> Result<Self, RepError> {
        let cd = rep.cd.clone();
        let nu = cd.root_to_coroot(&cd.two_rho_shift(&rep.word));
        Ok(QuasiTraceContext { balancing: balancing_exponents(&rep), const_w: const_w(&cd, &rep.word)?, nu, rep })
    }

    /// `chi_{q^nu}(c) = q^{(nu, mu)} <l, v>`.
    pub fn character(&self, c: &MatrixCoefficient) -> RatQ {
        let mu = c.v_weight();
        let e: i64 = self.nu.iter().zip(&mu).map(|(a, b)| a * b).sum();
        &c.pairing() * &RatQ::q_pow(e)
    }

    /// The inverse of `pi(a_rho a_rho^*)` as an exact unbounded diagonal.
    fn balancing_exact(&self) -> ExactOp {
        let ds = self.rep.ds();
        let slots: Vec<ShiftOp> = self
            .balancing
            .iter()
            .zip(&ds)
            .map(|(e, d)| ShiftOp::from_term(*d, ShiftKey::diagonal(*e), RatQ::q_pow(*e)))
            .collect();
        let refs: Vec<&ShiftOp> = slots.iter().collect();
        ExactOp::pure(ds, vec![0; self.rep.cd.rank], RatQ::one(), &refs)
    }
}

#[derive(Debug, Clone)]
pub struct QtrResult {
    pub exact: Option<RatQ>,
    pub value: C64,
    pub tail: f64,
    pub const_w: RatQ,
}

impl QtrResult {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "value": self.exact.as_ref().map(|x| x.to_string()),
            "value_re": self.value.re,
            "value_im": self.value.im,
            "tail_bound": self.tail,
            "exact": self.exact.is_some(),
            "const_w": self.const_w.to_string(),
        })
    }
}

/// `qtr(L) = const_w tr(L pi(a_rho a_rho^*)^{-1})`, reported at the context's
/// torus point (`t = 1` when symbolic).
pub fn qtr(ctx: &QuasiTraceContext, l: &TensorOp) -> Result<QtrResult, RepError> {
    let q0 = ctx.rep.params.q();
    match l {
        TensorOp::Exact(l) => {
            let by_torus = l.mul(&ctx.balancing_exact()).trace().map_err(|e| match e {
                RepError::Cq2(Cq2Error::NotTraceClass { .. }) => {
                    RepError::Unsupported("operator is not quantum trace class".into())
                }
                e => e,
            })?;
            let by_torus: BTreeMap<Vec<i64>, RatQ> = by_torus.into_iter().map(|(t, v)| (t, &v * &ctx.const_w)).collect();
            let mut value = C64::default();
            for (t, v) in &by_torus {
                value += crate::repwt::torus_at(t, ctx.rep.torus.as_deref()) * v.eval(q0)?;
            }
            let exact = if ctx.rep.torus.is_none() || by_torus.keys().all(|t| t.iter().all(|x| *x == 0)) {
                Some(by_torus.into_values().sum())
            } else {
                None
            };
            Ok(QtrResult { exact, value, tail: 0.0, const_w: ctx.const_w.clone() })
        }
        TensorOp::Float(l) => {
            let (value, tail) = balanced_trace_float(ctx, l)?;
            let c = ctx.const_w.eval(q0)?;
            Ok(QtrResult { exact: None, value: value * c, tail: tail * c, const_w: ctx.const_w.clone() })
        }
    }
}

/// Geometric envelope `|x_k| <= c r^k` fitted on the second half of the
/// corner.
fn envelope(diag: &[C64]) -> (f64, f64) {
    let n = diag.len();
    let start = n / 2;
    let abs: Vec<f64> = diag.iter().map(|z| z.norm()).collect();
    if abs[start..].iter().all(|x| *x == 0.0) {
        return (0.0, 0.0);
    }
    let mut r: f64 = 0.0;
    for k in start..n.saturating_sub(1) {
        if abs[k] > 0.0 {
            r = r.max(abs[k + 1] / abs[k]);
        } else if abs[k + 1] > 0.0 {
            return (f64::INFINITY, f64::INFINITY);
        }
    }
    let c = (start..n).filter(|&k| abs[k] > 0.0).map(|k| abs[k] / r.powi(k as i32)).fold(0.0, f64::max);
    (c, r)
}

/// Truncated `tr(L b^{-1})` with a fitted tail; rejects operators whose
/// diagonal does not decay faster than the balancing growth.
fn balanced_trace_float(ctx: &QuasiTraceContext, l: &FloatOp) -> Result<(C64, f64), RepError> {
    let q0 = ctx.rep.params.q();
    let k = ctx.rep.params.trunc.min(l.exact());
    let ys: Vec<f64> = ctx.balancing.iter().map(|e| q0.powf(*e as f64)).collect();
    let mut total = C64::default();
    let mut tail = 0.0;
    for term in &l.terms {
        let phase = crate::repwt::torus_at(&term.torus, ctx.rep.torus.as_deref());
        let mut prod = C64::new(1.0, 0.0);
        let mut abs_prod = 1.0;
        let mut padded = 1.0;
        for (j, slot) in term.slots.iter().enumerate() {
            let y = ys[j];
            let diag = slot.diagonal_entries();
            let weighted: Vec<C64> = diag.iter().take(k).enumerate().map(|(i, z)| z * y.powi(i as i32 + 1)).collect();
            let a: C64 = weighted.iter().sum();
            let (c, r) = envelope(&weighted);
            let r_tail = if r == 0.0 {
                0.0
            } else if r < 1.0 {
                c * r.powi(k as i32) / (1.0 - r)
            } else {
                return Err(RepError::Unsupported("operator is not quantum trace class".into()));
            };
            prod *= a;
            abs_prod *= a.norm();
            padded *= a.norm() + r_tail;
        }
        total += term.coef * phase * prod;
        tail += term.coef.norm() * (padded - abs_prod);
    }
    Ok((total, tail))
}

#[derive(Debug, Clone)]
pub struct CovarianceResult {
    pub lhs: QtrResult,
    pub rhs: C64,
    pub residual: C64,
    /// Exact residual when both sides are exact.
    pub exact_residual: Option<RatQ>,
    pub tail: f64,
}

impl CovarianceResult {
    pub fn passes(&self, tol: f64) -> bool {
        match &self.exact_residual {
            Some(r) => r.is_zero(),
            None => self.residual.norm() <= self.tail + tol,
        }
    }
}

/// `c . L = sum_a pi(c_{l, e_a}) L pi(S(c_{e_a^*, v}))`.
pub fn adjoint_action(ctx: &RepContext, c: &MatrixCoefficient, l: &TensorOp) -> Result<TensorOp, RepError> {
    let m = &c.module;
    let n = m.dim();
    let dual = Arc::new(dual_module(m));
    let mut acc: Option<TensorOp> = None;
    for a in 0..n {
        let left = MatrixCoefficient { module: m.clone(), l: c.l.clone(), v: unit_vec(n, a) };
        // S(c_{e_a^*, v}) = c^{M*}_{v, e_a}
        let right = MatrixCoefficient { module: dual.clone(), l: c.v.clone(), v: unit_vec(n, a) };
        let term = evaluate_coefficient(ctx, &left)?.mul(l)?.mul(&evaluate_coefficient(ctx, &right)?)?;
        acc = Some(match acc {
            None => term,
            Some(x) => x.add(&term)?,
        });
    }
    Ok(acc.expect("modules are nonzero"))
}

/// `qtr(c . L) - chi_{q^{2(w rho - rho)}}(c) qtr(L)`.
pub fn covariance_check(ctx: &QuasiTraceContext, c: &MatrixCoefficient, l: &TensorOp) -> Result<CovarianceResult, RepError> {
    let q0 = ctx.rep.params.q();
    let cl = adjoint_action(&ctx.rep, c, l)?;
    let lhs = qtr(ctx, &cl)?;
    let base = qtr(ctx, l)?;
    let chi = ctx.character(c);
    let rhs = base.value * chi.eval(q0)?;
    let exact_residual = match (&lhs.exact, &base.exact) {
        (Some(a), Some(b)) => Some(a - &(&chi * b)),
        _ => None,
    };
    let tail = lhs.tail + chi.eval(q0)?.abs() * base.tail;
    Ok(CovarianceResult { residual: lhs.value - rhs, lhs, rhs, exact_residual, tail })
}

/// `q^{(2 rho, mu - lambda)}`: the factor by which the squared antipode
/// scales `c_{l, v}`, `l` of weight `-mu` and `v` of weight `lambda`.
pub fn s2_scaling(c: &MatrixCoefficient) -> RatQ {
    let cd = &c.module.cd;
    let diff: Vec<i64> = c.l_weight().iter().zip(c.v_weight()).map(|(m, l)| m - l).collect();
    RatQ::q_pow(crate::uqmod::two_rho_pairing(cd, &diff))
}

#[derive(Debug, Clone)]
pub struct MultiplicativityResult {
    pub lhs: C64,
    pub rhs: C64,
    /// Both sides in closed form, in exact mode.
    pub exact: Option<(RatQ, RatQ)>,
    pub tail: f64,
}

impl MultiplicativityResult {
    pub fn holds(&self, tol: f64) -> bool {
        match &self.exact {
            Some((l, r)) => l == r,
            None => (self.lhs - self.rhs).norm() <= self.tail + tol * self.rhs.norm(),
        }
    }
}

/// Both sides of
/// `qtr_{ww'}((L J_{w, q^{2(w' rho - rho)}}) (x) L') = const_{ww'} / (const_w const_{w'}) qtr(L) qtr(L')`.
pub fn qtr_multiplicativity(a: &RepContext, b: &RepContext, l: &TensorOp, l2: &TensorOp) -> Result<MultiplicativityResult, RepError> {
    let (joined, _) = tensor_concat(a, b)?;
    let cd = &a.cd;
    let nu = cd.root_to_coroot(&cd.two_rho_shift(&b.word));
    let j = j_operator(a, &nu)?;
    let joint = match (l.mul(&j)?, l2) {
        (TensorOp::Exact(x), TensorOp::Exact(y)) => TensorOp::Exact(x.tensor(y)),
        (TensorOp::Float(x), TensorOp::Float(y)) => TensorOp::Float(x.tensor(y)),
        _ => return Err(RepError::ModeMismatch),
    };
    let qa = QuasiTraceContext::new(a.clone())?;
    let qb = QuasiTraceContext::new(b.clone())?;
    let qj = QuasiTraceContext::new(joined)?;
    let ratio = &qj.const_w / &(&qa.const_w * &qb.const_w);
    let lhs = qtr(&qj, &joint)?;
    let ra = qtr(&qa, l)?;
    let rb = qtr(&qb, l2)?;
    let r = ratio.eval(a.params.q())?;
    let rhs = ra.value * rb.value * r;
    let tail = lhs.tail + r * (ra.tail * (rb.value.norm() + rb.tail) + ra.value.norm() * rb.tail);
    let exact = match (lhs.exact, ra.exact, rb.exact) {
        (Some(x), Some(y), Some(z)) => Some((x, &(&ratio * &y) * &z)),
        _ => None,
    };
    Ok(MultiplicativityResult { lhs: lhs.value, rhs, exact, tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::QParams;
    use crate::repwt::{make_context, product_operator, Factor};
    use crate::rootdata::build_cartan;
    use crate::uqmod::build_fundamental;

    fn qctx(s: char, n: usize, w: &[usize], params: QParams) -> QuasiTraceContext {
        let cd = Arc::new(build_cartan(s, n).unwrap());
        QuasiTraceContext::new(make_context(&cd, &WeylWord(w.to_vec()), None, params).unwrap()).unwrap()
    }

    fn a2rho(q: &QuasiTraceContext) -> TensorOp {
        let two_rho: Vec<i64> = q.rep.cd.rho.iter().map(|x| 2 * x).collect();
        product_operator(&q.rep, &[Factor::A(two_rho.clone()), Factor::AStar(two_rho)]).unwrap()
    }

    #[test]
    fn const_examples() {
        let q = qctx('A', 2, &[1, 2, 1], QParams::exact(2));
        let want = RatQ::q_pow_minus_one(2) * RatQ::q_pow_minus_one(2) * RatQ::q_pow_minus_one(4);
        assert_eq!(q.const_w, want);
        assert!(qctx('A', 2, &[], QParams::exact(2)).const_w.is_one());
    }

    #[test]
    fn normalization_a1() {
        let q = qctx('A', 1, &[1], QParams::exact(2));
        assert!(qtr(&q, &a2rho(&q)).unwrap().exact.unwrap().is_one());
        let f = qctx('A', 1, &[1], QParams::float(2.0, 60));
        let r = qtr(&f, &a2rho(&f)).unwrap();
        assert!((r.value.re - 1.0).abs() <= r.tail + 1e-12);
        // the identity is not quantum trace class
        assert!(qtr(&q, &q.rep.identity()).is_err());
    }

    #[test]
    fn covariance_a1() {
        let q = qctx('A', 1, &[1], QParams::exact(2));
        let m = build_fundamental(&q.rep.cd, 1).unwrap();
        let l = a2rho(&q);
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let c = MatrixCoefficient::basis(m.clone(), a, b).unwrap();
            let r = covariance_check(&q, &c, &l).unwrap();
            assert!(r.passes(0.0), "{a}{b}: {:?}", r.exact_residual);
        }
    }

    #[test]
    fn multiplicativity_a2() {
        let cd = Arc::new(build_cartan('A', 2).unwrap());
        let a = make_context(&cd, &WeylWord(vec![1]), None, QParams::exact(2)).unwrap();
        let b = make_context(&cd, &WeylWord(vec![2]), None, QParams::exact(2)).unwrap();
        let l = a2rho(&QuasiTraceContext::new(a.clone()).unwrap());
        let l2 = a2rho(&QuasiTraceContext::new(b.clone()).unwrap());
        let r = qtr_multiplicativity(&a, &b, &l, &l2).unwrap();
        assert!(r.exact.is_some() && r.holds(0.0), "{:?}", r);
    }
}
