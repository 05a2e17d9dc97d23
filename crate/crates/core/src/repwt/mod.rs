//! The irreducible *-representations `pi_{w,t}` as tensor products of
//! `l^2(N)` blocks and a torus character, evaluated on matrix coefficients.

mod op;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::cqsu2::{pi_su2, pi_su2_float, sl2_coeff_to_nf, BandOp, Cq2Error, NormalFormElem, ShiftKey, ShiftOp};
use crate::qnum::{Mode, QParams, QnumError, RatQ};
use crate::rootdata::{CartanDatum, RootError, WeylWord};
use crate::uqmod::{MatrixCoefficient, ModuleError, UqModule};

pub use op::{torus_at, ExactOp, FloatOp, FloatTerm};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Cq2(#[from] Cq2Error),
    #[error(transparent)]
    Qnum(#[from] QnumError),
    #[error("coefficient and context use different root data")]
    DatumMismatch,
    #[error("lengths do not add: l({0}) != {1}")]
    LengthNotAdditive(String, usize),
    #[error("operands mix exact and float mode")]
    ModeMismatch,
    #[error("{0}")]
    Unsupported(String),
}

/// `pi_{w,t}` for a reduced word; the torus point is kept symbolic and
/// substituted only for reporting.
#[derive(Debug, Clone)]
pub struct RepContext {
    pub cd: Arc<CartanDatum>,
    pub word: WeylWord,
    /// Torus angles in turns, `t_i = exp(2 pi i angle_i)`; `None` is symbolic.
    pub torus: Option<Vec<f64>>,
    pub params: QParams,
    /// Extra rows kept beyond the truncation so products stay exact on it.
    pub pad: usize,
}

pub fn make_context(
    cd: &Arc<CartanDatum>,
    word: &WeylWord,
    torus: Option<Vec<f64>>,
    params: QParams,
) -> Result<RepContext, RepError> {
    if !cd.is_reduced(word) {
        return Err(RootError::NotReduced(word.letters().to_vec()).into());
    }
    if let Some(t) = &torus {
        cd.check_rank(t)?;
    }
    params.validate()?;
    Ok(RepContext { cd: cd.clone(), word: word.clone(), torus, params, pad: 24 })
}

impl RepContext {
    pub fn slots(&self) -> usize {
        self.word.len()
    }

    /// 0-based simple root of slot `j`.
    pub fn node(&self, j: usize) -> usize {
        self.word.letters()[j] - 1
    }

    pub fn ds(&self) -> Vec<i64> {
        (0..self.slots()).map(|j| self.cd.d[self.node(j)]).collect()
    }

    pub fn band_size(&self) -> usize {
        self.params.trunc + self.pad
    }

    pub fn is_exact(&self) -> bool {
        self.params.mode == Mode::Exact
    }

    /// `beta_j = w_j^{-1} alpha_{i_j}` for slot `j` (0-based).
    pub fn slot_roots(&self) -> Vec<Vec<i64>> {
        self.cd.inversion_set(&self.word).expect("context words are reduced")
    }

    pub fn identity(&self) -> TensorOp {
        if self.is_exact() {
            TensorOp::Exact(ExactOp::identity(self.ds(), self.cd.rank))
        } else {
            TensorOp::Float(FloatOp::identity(self.ds(), self.cd.rank, self.band_size()))
        }
    }

    /// Diagonal operator `e_k -> prod_j x_j^{k_j + 1} e_k` with `x_j = q^{-e_j}`,
    /// times `t^torus`.
    pub fn geometric_diagonal(&self, exps: &[i64], torus: Vec<i64>) -> TensorOp {
        if self.is_exact() {
            let slots: Vec<ShiftOp> = exps
                .iter()
                .zip(self.ds())
                .map(|(e, d)| ShiftOp::from_term(d, ShiftKey::diagonal(-e), RatQ::q_pow(-e)))
                .collect();
            let refs: Vec<&ShiftOp> = slots.iter().collect();
            TensorOp::Exact(ExactOp::pure(self.ds(), torus, RatQ::one(), &refs))
        } else {
            let exps: Vec<C64> = exps.iter().map(|e| C64::new(*e as f64, 0.0)).collect();
            self.complex_geometric_diagonal(&exps, torus)
        }
    }

    /// Float diagonal with complex exponents: `x_j = q^{-e_j}`.
    pub fn complex_geometric_diagonal(&self, exps: &[C64], torus: Vec<i64>) -> TensorOp {
        let n = self.band_size();
        let lq = self.params.q().ln();
        let slots = exps
            .iter()
            .map(|e| {
                let x = (-e * lq).exp();
                let v: Vec<C64> = (0..n).map(|k| x.powu(k as u32 + 1)).collect();
                let bound = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
                BandOp::diagonal(v, if x.norm() <= 1.0 { bound } else { f64::INFINITY })
            })
            .collect();
        TensorOp::Float(FloatOp {
            n,
            rank: self.cd.rank,
            ds: self.ds(),
            terms: vec![FloatTerm { torus, coef: C64::new(1.0, 0.0), slots }],
        })
    }
}

/// An operator in a representation space, exact or truncated.
#[derive(Debug, Clone)]
pub enum TensorOp {
    Exact(ExactOp),
    Float(FloatOp),
}

impl TensorOp {
    pub fn mul(&self, o: &Self) -> Result<Self, RepError> {
        match (self, o) {
            (TensorOp::Exact(a), TensorOp::Exact(b)) => Ok(TensorOp::Exact(a.mul(b))),
            (TensorOp::Float(a), TensorOp::Float(b)) => Ok(TensorOp::Float(a.mul(b))),
            _ => Err(RepError::ModeMismatch),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, RepError> {
        match (self, o) {
            (TensorOp::Exact(a), TensorOp::Exact(b)) => Ok(TensorOp::Exact(a.add(b))),
            (TensorOp::Float(a), TensorOp::Float(b)) => Ok(TensorOp::Float(a.add(b))),
            _ => Err(RepError::ModeMismatch),
        }
    }

    pub fn adjoint(&self) -> Self {
        match self {
            TensorOp::Exact(a) => TensorOp::Exact(a.adjoint()),
            TensorOp::Float(a) => TensorOp::Float(a.adjoint()),
        }
    }

    pub fn exact(&self) -> Option<&ExactOp> {
        match self {
            TensorOp::Exact(a) => Some(a),
            _ => None,
        }
    }

    pub fn float(&self) -> Option<&FloatOp> {
        match self {
            TensorOp::Float(a) => Some(a),
            _ => None,
        }
    }

    pub fn entry(&self, row: &[usize], col: &[usize], q0: f64, angles: Option<&[f64]>) -> Result<C64, RepError> {
        match self {
            TensorOp::Exact(a) => Ok(a.entry(row, col, q0, angles)?),
            TensorOp::Float(a) => Ok(a.entry(row, col, angles)),
        }
    }
}

/// `N_i(a, b)`: the restriction of `c_{e_a^*, e_b}` to the rank-one
/// subalgebra of node `i`, as an element of the algebra for `q_i = q^{d_i}`
/// with coefficients written in `q`.
pub fn transition_table(m: &UqModule, i: usize) -> Result<BTreeMap<usize, Vec<(usize, NormalFormElem)>>, RepError> {
    let d = m.cd.d[i];
    let mut acc: HashMap<(usize, usize), NormalFormElem> = HashMap::new();
    for chain in m.sl2_decompose(i) {
        for x in 0..=chain.len {
            for y in 0..=chain.len {
                let nf = sl2_coeff_to_nf(chain.len, x, y)?.dilate(d);
                for (a, ba) in chain.vectors[x].iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    for (b, bb) in chain.dual[y].iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                        let e = acc.entry((a, b)).or_default();
                        *e = e.add(&nf.scale(&(ba * bb)));
                    }
                }
            }
        }
    }
    let mut out: BTreeMap<usize, Vec<(usize, NormalFormElem)>> = BTreeMap::new();
    let mut keys: Vec<_> = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    keys.sort_by_key(|(k, _)| *k);
    for ((a, b), nf) in keys {
        out.entry(a).or_default().push((b, nf));
    }
    Ok(out)
}

enum SlotVal {
    Exact(ShiftOp),
    Float(BandOp),
}

/// `pi_{w,t}(c_{l,v})` through the iterated coproduct: a sum over chains
/// of basis indices `a_0, ..., a_n` of `l_{a_0} v_{a_n} t^{wt(a_n)}`
/// times the tensor of the rank-one slot factors `N_{i_j}(a_{j-1}, a_j)`.
pub fn evaluate_coefficient(ctx: &RepContext, c: &MatrixCoefficient) -> Result<TensorOp, RepError> {
    let m = &c.module;
    if m.cd.label() != ctx.cd.label() {
        return Err(RepError::DatumMismatch);
    }
    let n = ctx.slots();
    let rank = ctx.cd.rank;
    let ds = ctx.ds();
    let q0 = ctx.params.q();
    let size = ctx.band_size();

    let mut tables: HashMap<usize, BTreeMap<usize, Vec<(usize, NormalFormElem)>>> = HashMap::new();
    for j in 0..n {
        let i = ctx.node(j);
        if let std::collections::hash_map::Entry::Vacant(e) = tables.entry(i) {
            e.insert(transition_table(m, i)?);
        }
    }
    let mut ops: HashMap<(usize, usize, usize), SlotVal> = HashMap::new();
    for (&i, table) in &tables {
        for (&a, row) in table {
            for (b, nf) in row {
                let v = if ctx.is_exact() {
                    SlotVal::Exact(pi_su2(nf, m.cd.d[i]))
                } else {
                    SlotVal::Float(pi_su2_float(nf, m.cd.d[i], q0, size))
                };
                ops.insert((i, a, *b), v);
            }
        }
    }

    let mut exact = ExactOp::zero(ds.clone(), rank);
    let mut float = FloatOp::zero(ds.clone(), rank, size);
    // depth-first over chains, in a fixed order
    let mut stack: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    for (a0, la) in c.l.iter().enumerate() {
        if !la.is_zero() {
            stack.push((a0, Vec::new()));
        }
    }
    stack.reverse();
    while let Some((a, path)) = stack.pop() {
        let j = path.len();
        if j == n {
            let a0 = path.first().map(|p| p.0).unwrap_or(a);
            let coef = &c.l[a0] * &c.v[a];
            if coef.is_zero() {
                continue;
            }
            let torus = m.weights[a].clone();
            let slots: Vec<&SlotVal> = path
                .iter()
                .enumerate()
                .map(|(s, &(x, y))| &ops[&(ctx.node(s), x, y)])
                .collect();
            if ctx.is_exact() {
                let refs: Vec<&ShiftOp> = slots
                    .iter()
                    .map(|s| match s {
                        SlotVal::Exact(o) => o,
                        SlotVal::Float(_) => unreachable!(),
                    })
                    .collect();
                exact = exact.add(&ExactOp::pure(ds.clone(), torus, coef, &refs));
            } else {
                let bands: Vec<BandOp> = slots
                    .iter()
                    .map(|s| match s {
                        SlotVal::Float(o) => o.clone(),
                        SlotVal::Exact(_) => unreachable!(),
                    })
                    .collect();
                float.terms.push(FloatTerm { torus, coef: C64::new(coef.eval(q0)?, 0.0), slots: bands });
            }
            continue;
        }
        let i = ctx.node(j);
        if let Some(row) = tables[&i].get(&a) {
            for (b, _) in row.iter().rev() {
                let mut p = path.clone();
                p.push((a, *b));
                stack.push((*b, p));
            }
        }
    }
    Ok(if ctx.is_exact() { TensorOp::Exact(exact) } else { TensorOp::Float(float) })
}

/// Diagonal action of `a_{Lambda,w}` (or its adjoint):
/// `e_k -> prod_j q^{-(k_j + 1)(w_j Lambda, alpha_{i_j})} t^Lambda e_k`.
pub fn a_operator(ctx: &RepContext, lambda: &[i64], star: bool) -> Result<TensorOp, RepError> {
    ctx.cd.check_rank(lambda)?;
    if !ctx.cd.is_dominant(lambda) {
        return Err(RootError::NotDominant(lambda.to_vec()).into());
    }
    let exps: Vec<i64> = ctx.slot_roots().iter().map(|b| ctx.cd.pair_root(lambda, b)).collect();
    let torus = if star { lambda.iter().map(|x| -x).collect() } else { lambda.to_vec() };
    Ok(ctx.geometric_diagonal(&exps, torus))
}

/// `J_{w, t'}` at the real torus point `t' = q^nu`, `nu = sum_i m_i alpha_i^vee`:
/// `e_k -> prod_j q^{-(k_j + 1)(w_j nu, alpha_{i_j})} e_k`.
pub fn j_operator(ctx: &RepContext, nu_coroot: &[i64]) -> Result<TensorOp, RepError> {
    ctx.cd.check_rank(nu_coroot)?;
    let exps: Vec<i64> = ctx.slot_roots().iter().map(|b| coroot_pair(&ctx.cd, nu_coroot, b)).collect();
    Ok(ctx.geometric_diagonal(&exps, vec![0; ctx.cd.rank]))
}

/// `(nu, beta)` for `nu` in coroot coordinates and `beta` in root coordinates.
pub fn coroot_pair(cd: &CartanDatum, nu: &[i64], beta: &[i64]) -> i64 {
    (0..cd.rank).map(|i| nu[i] * (0..cd.rank).map(|k| cd.cartan[i][k] * beta[k]).sum::<i64>()).sum()
}

/// Identification of `V_w (x) V_{w'}` with `V_{ww'}`: the first `split`
/// slots come from `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConcatMap {
    pub split: usize,
}

impl ConcatMap {
    pub fn join(&self, left: &[usize], right: &[usize]) -> Vec<usize> {
        assert_eq!(left.len(), self.split);
        left.iter().chain(right).copied().collect()
    }

    pub fn split_index<'a>(&self, k: &'a [usize]) -> (&'a [usize], &'a [usize]) {
        k.split_at(self.split)
    }
}

/// Context for `(ww', (w')^{-1}(t) t')` on the concatenated word.
pub fn tensor_concat(a: &RepContext, b: &RepContext) -> Result<(RepContext, ConcatMap), RepError> {
    if a.cd.label() != b.cd.label() {
        return Err(RepError::DatumMismatch);
    }
    let word = a.word.concat(&b.word);
    let len = a.cd.length(&word);
    if len != a.slots() + b.slots() {
        return Err(RepError::LengthNotAdditive(word.to_string(), a.slots() + b.slots()));
    }
    let torus = match (&a.torus, &b.torus) {
        (Some(t), Some(t2)) => {
            // ((w')^{-1} t)_i = t^{w' omega_i}
            let cd = &a.cd;
            Some(
                (0..cd.rank)
                    .map(|i| {
                        let wo = cd.weyl_apply(&b.word, &crate::rootdata::unit(cd.rank, i));
                        wo.iter().zip(t).map(|(k, th)| *k as f64 * th).sum::<f64>() + t2[i]
                    })
                    .collect(),
            )
        }
        _ => None,
    };
    let mut ctx = a.clone();
    ctx.word = word;
    ctx.torus = torus;
    Ok((ctx, ConcatMap { split: a.slots() }))
}

/// `(mu, beta)` helper for weights in fundamental-weight coordinates.
pub fn weight_pair(cd: &CartanDatum, mu: &[i64], beta_root: &[i64]) -> i64 {
    cd.pair_root(mu, beta_root)
}

/// A factor of a product evaluated in a representation.
#[derive(Debug, Clone)]
pub enum Factor {
    Coef(MatrixCoefficient),
    /// An element of the rank-one algebra, read as coefficients of `L(omega_1)`.
    Su2(NormalFormElem),
    A(Vec<i64>),
    AStar(Vec<i64>),
}

pub fn factor_operator(ctx: &RepContext, f: &Factor) -> Result<TensorOp, RepError> {
    match f {
        Factor::Coef(c) => evaluate_coefficient(ctx, c),
        Factor::A(l) => a_operator(ctx, l, false),
        Factor::AStar(l) => a_operator(ctx, l, true),
        Factor::Su2(nf) => su2_operator(ctx, nf),
    }
}

/// Product of the factors in order; the empty product is the identity.
pub fn product_operator(ctx: &RepContext, fs: &[Factor]) -> Result<TensorOp, RepError> {
    let mut acc = ctx.identity();
    for f in fs {
        acc = acc.mul(&factor_operator(ctx, f)?)?;
    }
    Ok(acc)
}

fn su2_operator(ctx: &RepContext, nf: &NormalFormElem) -> Result<TensorOp, RepError> {
    if ctx.cd.label() != "A1" {
        return Err(RepError::Unsupported(format!("rank-one monomials need A1, got {}", ctx.cd.label())));
    }
    let m = crate::uqmod::build_fundamental(&ctx.cd, 1)?;
    let mut gens = Vec::new();
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        gens.push(evaluate_coefficient(ctx, &MatrixCoefficient::basis(m.clone(), a, b)?)?);
    }
    let q0 = ctx.params.q();
    let mut acc: Option<TensorOp> = None;
    for (mono, c) in nf.terms() {
        let mut op = ctx.identity();
        for g in mono.word() {
            op = op.mul(&gens[g as usize])?;
        }
        let op = match op {
            TensorOp::Exact(x) => TensorOp::Exact(x.scale(c)),
            TensorOp::Float(x) => TensorOp::Float(x.scale(C64::new(c.eval(q0)?, 0.0))),
        };
        acc = Some(match acc {
            None => op,
            Some(a) => a.add(&op)?,
        });
    }
    Ok(acc.unwrap_or_else(|| match ctx.identity() {
        TensorOp::Exact(x) => TensorOp::Exact(ExactOp::zero(x.ds, x.rank)),
        TensorOp::Float(x) => TensorOp::Float(FloatOp::zero(x.ds, x.rank, x.n)),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::build_cartan;
    use crate::uqmod::{a_coefficient, build_fundamental, MatrixCoefficient};

    fn ctx(s: char, n: usize, word: &[usize]) -> RepContext {
        let cd = Arc::new(build_cartan(s, n).unwrap());
        make_context(&cd, &WeylWord(word.to_vec()), None, QParams::exact(2)).unwrap()
    }

    #[test]
    fn a1_coefficients_match_generators() {
        let c = ctx('A', 1, &[1]);
        let m = build_fundamental(&c.cd, 1).unwrap();
        let coef = MatrixCoefficient::basis(m, 0, 1).unwrap();
        let op = evaluate_coefficient(&c, &coef).unwrap();
        let op = op.exact().unwrap();
        // pi(c12) t^{-1}
        let want = ExactOp::pure(c.ds(), vec![-1], RatQ::one(), &[&pi_su2(&NormalFormElem::gen(crate::cqsu2::Cgen::C12), 1)]);
        assert_eq!(*op, want);
    }

    #[test]
    fn a1_av2() {
        let c = ctx('A', 1, &[1]);
        let m = build_fundamental(&c.cd, 1).unwrap();
        let a = a_coefficient(&m, &c.word).unwrap();
        let op = evaluate_coefficient(&c, &a).unwrap();
        let want = a_operator(&c, &[1], false).unwrap();
        assert_eq!(op.exact(), want.exact());
    }

    #[test]
    fn empty_word_is_a_character() {
        let c = ctx('A', 2, &[]);
        let m = build_fundamental(&c.cd, 1).unwrap();
        let coef = MatrixCoefficient::basis(m, 1, 1).unwrap();
        let op = evaluate_coefficient(&c, &coef).unwrap();
        let tr = op.exact().unwrap().trace().unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr[&vec![-1, 1]], RatQ::one());
    }

    #[test]
    fn concat_checks_lengths() {
        let a = ctx('A', 2, &[1]);
        let b = ctx('A', 2, &[2]);
        let (c, map) = tensor_concat(&a, &b).unwrap();
        assert_eq!(c.word, WeylWord(vec![1, 2]));
        assert_eq!(map.join(&[3], &[4]), vec![3, 4]);
        assert!(matches!(tensor_concat(&a, &a), Err(RepError::LengthNotAdditive(..))));
    }
}

#[cfg(test)]
mod arbiter_tests {
    use super::*;
    use crate::rootdata::build_cartan;
    use crate::uqmod::{a_coefficient, irrep};

    #[test]
    fn a2_longest_rho() {
        let cd = Arc::new(build_cartan('A', 2).unwrap());
        let ctx = make_context(&cd, &WeylWord(vec![1, 2, 1]), None, QParams::exact(2)).unwrap();
        for lam in [vec![1, 0], vec![0, 1], vec![1, 1]] {
            let m = irrep(&cd, &lam).unwrap();
            let a = a_coefficient(&m, &ctx.word).unwrap();
            let got = evaluate_coefficient(&ctx, &a).unwrap();
            let want = a_operator(&ctx, &lam, false).unwrap();
            assert_eq!(got.exact(), want.exact(), "{lam:?}");
        }
    }
}
