//! Verification suites shared by the acceptance test and the `verify`
//! command. Each returns a [`SuiteReport`]; nothing panics on a failed check.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::cfunc::{c_function_product, c_function_trace, CFunctionQuery};
use crate::cqsu2::{haar_closed_form, Mono, NormalFormElem};
use crate::haar::{balancing_exponents, haar_schur_pair, haar_trace, haar_trace_word, weighted_trace_float};
use crate::qnum::{Mode, QParams, RatQ};
use crate::qtrace::{qtr, qtr_multiplicativity, QuasiTraceContext};
use crate::repwt::{evaluate_coefficient, make_context, product_operator, Factor, RepContext, RepError, TensorOp};
use crate::rootdata::{build_cartan, CartanDatum, WeylWord};
use crate::uqmod::{a_coefficient, build_fundamental, irrep, tensor_module, MatrixCoefficient, UqModule};

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
    pub max_residual: f64,
    pub elapsed: Duration,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport { name, checks: 0, failures: Vec::new(), max_residual: 0.0, elapsed: Duration::ZERO }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks > 0
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn residual(&mut self, r: f64) {
        if r.is_nan() || r > self.max_residual {
            self.max_residual = r;
        }
    }

    fn error(&mut self, e: impl std::fmt::Display) {
        self.checks += 1;
        self.failures.push(e.to_string());
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "suite": self.name,
            "passed": self.passed(),
            "checks": self.checks,
            "failures": self.failures,
            "max_residual": self.max_residual,
            "seconds": self.elapsed.as_secs_f64(),
        })
    }

    /// One line: `PASS name (checks, residual, time)`.
    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{status} {:<18} checks={:<5} max_residual={:.3e} time={:.2}s",
            self.name,
            self.checks,
            self.max_residual,
            self.elapsed.as_secs_f64()
        );
        if let Some(f) = self.failures.first() {
            s.push_str(&format!("  first failure: {f}"));
        }
        s
    }
}

/// Settings common to all suites; `q` is where float values are taken.
#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub q: f64,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { q: 2.0, seed: 7 }
    }
}

impl SuiteOptions {
    fn exact(&self) -> QParams {
        QParams { mode: Mode::Exact, ..QParams::float(self.q, 40) }
    }

    fn float(&self, trunc: usize) -> QParams {
        QParams::float(self.q, trunc)
    }
}

type SuiteFn = fn(&SuiteOptions) -> SuiteReport;

/// All suites, in acceptance order.
pub const SUITES: &[(&str, SuiteFn)] = &[
    ("su2-haar", su2_haar),
    ("normalization", normalization),
    ("vanishing", vanishing),
    ("schur-pair", schur_pair),
    ("av2", av2),
    ("normtr", normtr),
    ("cfunc", cfunc),
    ("multiplicativity", multiplicativity),
    ("properties", properties),
    ("word-independence", word_independence),
    ("cross-mode", cross_mode),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Option<SuiteReport> {
    SUITES.iter().find(|(n, _)| *n == name).map(|(_, f)| timed(*f, opts))
}

fn timed(f: SuiteFn, opts: &SuiteOptions) -> SuiteReport {
    let start = Instant::now();
    let mut r = f(opts);
    r.elapsed = start.elapsed();
    r
}

fn datum(s: char, n: usize) -> Arc<CartanDatum> {
    Arc::new(build_cartan(s, n).expect("inventory datum"))
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Family, m, p, r over the rank-one inventory with `m + p + r <= 6`.
pub fn su2_monomials(max_degree: u32) -> Vec<(u8, u32, u32, u32)> {
    let mut out = Vec::new();
    for fam in 1..=2u8 {
        for m in 0..=max_degree {
            if fam == 2 && m == 0 {
                continue;
            }
            for p in 0..=max_degree - m {
                for r in 0..=max_degree - m - p {
                    out.push((fam, m, p, r));
                }
            }
        }
    }
    out
}

fn su2_factor(fam: u8, m: u32, p: u32, r: u32) -> Factor {
    Factor::Su2(NormalFormElem::monomial(Mono::new(fam, m, p, r).expect("valid monomial"), RatQ::one()))
}

/// Haar trace on `C_q[SU_2]` equals the closed form on every monomial.
pub fn su2_haar(opts: &SuiteOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("su2-haar");
    let cd = datum('A', 1);
    for (fam, m, p, r) in su2_monomials(6) {
        let want = haar_closed_form(fam, m, p, r).expect("valid");
        match haar_trace(&cd, &[su2_factor(fam, m, p, r)], &opts.exact()) {
            Ok(h) => {
                let got = h.exact.expect("exact mode");
                rep.check(got == want, || format!("({fam},{m},{p},{r}): {got} != {want}"));
            }
            Err(e) => rep.error(format!("({fam},{m},{p},{r}): {e}")),
        }
    }
    rep
}

const NORMALIZATION_GROUPS: [(char, usize); 4] = [('A', 1), ('A', 2), ('B', 2), ('A', 3)];

/// `H(1) = 1`.
pub fn normalization(opts: &SuiteOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("normalization");
    for (s, n) in NORMALIZATION_GROUPS {
        match haar_trace(&datum(s, n), &[], &opts.exact()) {
            Ok(h) => {
                let v = h.exact.expect("exact mode");
                rep.check(v.is_one(), || format!("{s}{n}: H(1) = {v}"));
            }
            Err(e) => rep.error(format!("{s}{n}: {e}")),
        }
    }
    rep
}

fn basis_coefficients(m: &Arc<UqModule>) -> Vec<MatrixCoefficient> {
    let n = m.dim();
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| MatrixCoefficient::basis(m.clone(), a, b).expect("in range"))
        .collect()
}

/// The Haar trace kills coefficients of nontrivial irreducibles.
pub fn vanishing(opts: &SuiteOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("vanishing");
    let cd = datum('A', 2);
    for i in 1..=2 {
        let m = build_fundamental(&cd, i).expect("fundamental");
        for (k, c) in basis_coefficients(&m).into_iter().enumerate() {
            match haar_trace(&cd, &[Factor::Coef(c)], &opts.float(40)) {
                Ok(h) => {
                    rep.residual(h.value.norm());
                    rep.check(h.value.norm() <= h.tail + 1e-9, || format!("omega_{i} #{k}: |H| = {:e}, tail {:e}", h.value.norm(), h.tail));
                }
                Err(e) => rep.error(e),
            }
        }
    }
    rep
}

/// Pair formula against the trace formula on all products of two
/// coefficients of `L(omega_1)` for `A1`.
pub fn schur_pair(opts: &SuiteOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("schur-pair");
    let cd = datum('A', 1);
    let m = build_fundamental(&cd, 1).expect("fundamental");
    let cs = basis_coefficients(&m);
    let mut nonzero = 0;
    for x in &cs {
        for y in &cs {
            let res = haar_schur_pair(x, y).and_then(|want| {
                let h = haar_trace(&cd, &[Factor::Coef(x.clone()), Factor::Coef(y.clone())], &opts.float(60))?;
                Ok((want, h))
            });
            match res {
                Ok((want, h)) => {
                    let w = want.eval(opts.q).unwrap_or(f64::NAN);
                    if !want.is_zero() {
                        nonzero += 1;
                    }
                    let d = (h.value - C64::new(w, 0.0)).norm();
                    rep.residual(d);
                    rep.check(d <= 1e-9, || format!("pair: trace {} vs formula {w}", h.value));
                }
                Err(e) => rep.error(e),
            }
        }
    }
    rep.check(nonzero >= 4, || format!("only {nonzero} nonzero pairs"));
    rep
}

const AV2_WORDS: [&[usize]; 3] = [&[1], &[1, 2], &[1, 2, 1]];
const AV2_WEIGHTS: [[i64; 2]; 3] = [[1, 0], [0, 1], [1, 1]];

/// `pi(a_{Lambda,w})` from the coefficient matches the diagonal formula.
pub fn av2(opts: &SuiteOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("av2");
    let cd = datum('A', 2);
    for w in AV2_WORDS {
        let ctx = make_context(&cd, &WeylWord(w.to_vec()), None, opts.exact()).expect("reduced");
        for lam in AV2_WEIGHTS {
            let res = (|| -> Result<bool, RepError> {
                let m = irrep(&cd, &lam)?;
                let a = a_coefficient(&m, &ctx.word)?;
                Ok(evaluate_coefficient(&ctx, &a)?.exact() == crate::repwt::a_operator(&ctx, &lam, false)?.exact())
            })();
            match res {
                Ok(ok) => rep.check(ok, || format!("w = {w:?}, Lambda = {lam:?}")),
                Err(e) => rep.error(e),
            }
        }
    }
    rep
}

fn a2rho_op(ctx: &RepContext) -> Result<TensorOp, RepError> {
    let two_rho: Vec<i64> = ctx.cd.rho.iter().map(|x| 2 * x).collect();
    product_operator(ctx, &[Factor::A(two_rho.clone()), Factor::AStar(two_rho)])
}

/// `qtr(pi(a_{2 rho} a_{2 rho}^*)) = 1` across the Weyl groups of `A2`, `B2`.
pub fn normtr(opts: &SuiteOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("normtr");
    for (s, n) in [('A', 2), ('B', 2)] {
        let cd = datum(s, n);
        for w in cd.weyl_group() {
            let res = (|| -> Result<RatQ, RepError> {
                let ctx = make_context(&cd, &w, None, opts.exact())?;
                let l = a2rho_op(&ctx)?;
                let r = qtr(&QuasiTraceContext::new(ctx)?, &l)?;
                r.exact.ok_or_else(|| RepError::Unsupported("no closed form".into()))
            })();
            match res {
                Ok(v) => rep.check(v.is_one(), || format!("{s}{n} w = {w}: qtr = {v}")),
                Err(e) => rep.error(format!("{s}{n} w = {w}: {e}")),
            }
        }
    }
    rep
}

/// Integral samples `i lambda = 2 rho + mu` with `mu` dominant.
pub fn cfunc_integral_samples() -> Vec<[i64; 2]> {
    let mu = [[0, 0], [1, 0], [0, 1], [1, 1], [2, 0], [0, 2], [2, 1], [1, 2], [3, 0], [2, 2]];
    mu.iter().map(|m| [2 + m[0], 2 + m[1]]).collect()
}

/// Generic `lambda` with `Re(i lambda, beta) > 0` for every positive root.
pub fn cfunc_generic_samples(seed: u64, count: usize) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            // i lambda = x + i y with x strictly dominant
            (0..2)
                .map(|_| {
                    let il = C64::new(rng.gen_range(0.5..4.0), rng.gen_range(-3.0..3.0));
                    il * C64::new(0.0, -1.0)
                })
                .collect()
        })
        .collect()
}

fn il_to_lambda(il: &[i64]) -> Vec<C64> {
    il.iter().map(|x| C64::new(0.0, -*x as f64)).collect()
}

/// Trace against product, exactly on integral samples and in float on
/// generic ones, for every `w` in `W(A2)`.
pub fn cfunc(opts: &SuiteOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("cfunc");
    let cd = datum('A', 2);
    for w in cd.weyl_group() {
        for il in cfunc_integral_samples() {
            let q = CFunctionQuery { cd: cd.clone(), word: w.clone(), lambda: il_to_lambda(&il), params: opts.exact() };
            match (c_function_trace(&q), c_function_product(&q)) {
                (Ok(t), Ok(p)) => {
                    let (t, p) = (t.exact.expect("exact"), p.exact.expect("exact"));
                    rep.check(t == p, || format!("w = {w}, i lambda = {il:?}: {t} vs {p}"));
                }
                (Err(e), _) | (_, Err(e)) => rep.error(format!("w = {w}: {e}")),
            }
        }
        for lambda in cfunc_generic_samples(opts.seed, 20) {
            let q = CFunctionQuery { cd: cd.clone(), word: w.clone(), lambda: lambda.clone(), params: opts.float(160) };
            match (c_function_trace(&q), c_function_product(&q)) {
                (Ok(t), Ok(p)) => {
                    let d = rel(t.value, p.value);
                    rep.residual(d);
                    rep.check(d <= 1e-10 + t.tail / p.value.norm(), || format!("w = {w}, lambda = {lambda:?}: rel {d:e}"));
                }
                (Err(e), _) | (_, Err(e)) => rep.error(format!("w = {w}: {e}")),
            }
        }
    }
    rep
}

fn multiplicativity_case(cd: &Arc<CartanDatum>, params: &QParams) -> Result<crate::qtrace::MultiplicativityResult, RepError> {
    let a = make_context(cd, &WeylWord(vec![1]), None, params.clone())?;
    let b = make_context(cd, &WeylWord(vec![2]), None, params.clone())?;
    let l = a2rho_op(&a)?;
    let l2 = a2rho_op(&b)?;
    qtr_multiplicativity(&a, &b, &l, &l2)
}

/// Quasi-trace multiplicativity under concatenation, `(s1, s2)` in `A2`, `B2`.
pub fn multiplicativity(opts: &SuiteOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("multiplicativity");
    for (s, n) in [('A', 2), ('B', 2)] {
        match multiplicativity_case(&datum(s, n), &opts.exact()) {
            Ok(r) => {
                let ok = r.exact.is_some() && r.holds(0.0);
                rep.check(ok, || format!("{s}{n}: {:?}", r.exact));
            }
            Err(e) => rep.error(format!("{s}{n}: {e}")),
        }
    }
    rep
}

fn random_nf(rng: &mut ChaCha8Rng, terms: usize, max_degree: u32) -> NormalFormElem {
    let mut x = NormalFormElem::zero();
    for _ in 0..terms {
        let fam = rng.gen_range(1..=2u8);
        let m = rng.gen_range(if fam == 2 { 1 } else { 0 }..=max_degree);
        let rest = max_degree.saturating_sub(m);
        let p = rng.gen_range(0..=rest);
        let r = rng.gen_range(0..=rest - p);
        let c = RatQ::from(rng.gen_range(-3i64..=3)) * RatQ::q_pow(rng.gen_range(-2..=2));
        x.add_term(Mono::new(fam, m, p, r).expect("valid"), c);
    }
    x
}

fn nf_hopf_checks(rep: &mut SuiteReport, rng: &mut ChaCha8Rng) {
    let one = NormalFormElem::one();
    for _ in 0..12 {
        let a = random_nf(rng, 3, 2);
        let b = random_nf(rng, 3, 2);
        let c = random_nf(rng, 2, 2);
        rep.check(a.mul(&b).mul(&c) == a.mul(&b.mul(&c)), || format!("associativity on {a}, {b}, {c}"));
        let da = a.coproduct();
        rep.check(a.mul(&b).coproduct() == da.mul(&b.coproduct()), || format!("coproduct multiplicative on {a}, {b}"));
        rep.check(da.coproduct_leg(true) == da.coproduct_leg(false), || format!("coassociativity on {a}"));
        let counit = |m: &Mono| NormalFormElem::monomial(*m, RatQ::one()).counit();
        rep.check(da.apply_left(counit) == a && da.apply_right(counit) == a, || format!("counit on {a}"));
        let eps = one.scale(&a.counit());
        let s = |x: &NormalFormElem| x.antipode();
        let id = |x: &NormalFormElem| x.clone();
        rep.check(da.contract(s, id) == eps && da.contract(id, s) == eps, || format!("antipode on {a}"));
        rep.check(a.star().star() == a, || format!("star involutive on {a}"));
        rep.check(a.mul(&b).star() == b.star().mul(&a.star()), || format!("star antimultiplicative on {a}, {b}"));
        rep.check(a.star().coproduct() == da.star_legs(), || format!("star and coproduct on {a}"));
        rep.check(a.star().antipode().star().antipode() == a, || format!("S * S * = id on {a}"));
        // (id (x) H) Delta(a) = H(a) 1
        let h = |m: &Mono| NormalFormElem::monomial(*m, RatQ::one()).haar();
        rep.check(da.apply_right(h) == one.scale(&a.haar()), || format!("left invariance on {a}"));
        rep.check(da.apply_left(h) == one.scale(&a.haar()), || format!("right invariance on {a}"));
    }
}

fn module_inventory() -> Vec<Arc<UqModule>> {
    let mut out = Vec::new();
    for (s, n, ws) in [
        ('A', 1, vec![vec![1], vec![2]]),
        ('A', 2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]),
        ('B', 2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]),
        ('A', 3, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]),
    ] {
        let cd = datum(s, n);
        for w in ws {
            out.push(irrep(&cd, &w).expect("inventory module"));
        }
    }
    out
}

fn module_checks(rep: &mut SuiteReport) {
    for m in module_inventory() {
        let cd = m.cd.clone();
        rep.check(m.check_relations().is_ok(), || format!("{}: relations {:?}", m.label, m.check_relations()));
        rep.check(m.check_star().is_ok(), || format!("{}: star structure", m.label));
        let words = cd.weyl_group();
        let w0 = cd.longest_element();
        // T_w independent of the reduced word: w0 read backwards is also reduced
        let rev = WeylWord(w0.letters().iter().rev().copied().collect());
        if cd.is_reduced(&rev) && cd.weyl_apply(&rev, &cd.rho) == cd.weyl_apply(&w0, &cd.rho) {
            rep.check(m.braid_apply(&w0) == m.braid_apply(&rev), || format!("{}: T_w0 depends on the word", m.label));
        }
        for w in &words {
            let t = m.braid_apply(w);
            for a in 0..m.dim() {
                let img = t.apply(&crate::linalg::unit_vec(m.dim(), a));
                let want = cd.weyl_apply(w, &m.weights[a]);
                rep.check(m.weight_of(&img).map(|x| x == want).unwrap_or(false), || format!("{}: T_{w} on weight {:?}", m.label, m.weights[a]));
            }
        }
    }
}

fn random_coefficient(rng: &mut ChaCha8Rng, m: &Arc<UqModule>) -> MatrixCoefficient {
    let n = m.dim();
    MatrixCoefficient::basis(m.clone(), rng.gen_range(0..n), rng.gen_range(0..n)).expect("in range")
}

fn representation_checks(rep: &mut SuiteReport, rng: &mut ChaCha8Rng, params: &QParams) {
    for (s, n, w) in [('A', 1, vec![1]), ('A', 2, vec![1, 2]), ('A', 2, vec![2, 1]), ('B', 2, vec![1, 2])] {
        let cd = datum(s, n);
        let ctx = make_context(&cd, &WeylWord(w.clone()), None, params.clone()).expect("reduced");
        let ms: Vec<Arc<UqModule>> = (1..=cd.rank).map(|i| build_fundamental(&cd, i).expect("fundamental")).collect();
        for _ in 0..4 {
            let m1 = &ms[rng.gen_range(0..ms.len())];
            let m2 = &ms[rng.gen_range(0..ms.len())];
            let x = random_coefficient(rng, m1);
            let y = random_coefficient(rng, m2);
            let res = (|| -> Result<(bool, bool), RepError> {
                let px = evaluate_coefficient(&ctx, &x)?;
                let py = evaluate_coefficient(&ctx, &y)?;
                let t = Arc::new(tensor_module(m1, m2)?);
                let kron = |a: &[RatQ], b: &[RatQ]| -> Vec<RatQ> { a.iter().flat_map(|u| b.iter().map(move |v| u * v)).collect() };
                let xy = MatrixCoefficient { module: t, l: kron(&x.l, &y.l), v: kron(&x.v, &y.v) };
                let mult = px.mul(&py)?.exact() == evaluate_coefficient(&ctx, &xy)?.exact();
                let star = evaluate_coefficient(&ctx, &x.star())?.exact() == px.adjoint().exact();
                Ok((mult, star))
            })();
            match res {
                Ok((mult, star)) => {
                    rep.check(mult, || format!("{s}{n} w = {w:?}: pi(c c') != pi(c) pi(c')"));
                    rep.check(star, || format!("{s}{n} w = {w:?}: pi(c*) != pi(c)^*"));
                }
                Err(e) => rep.error(e),
            }
        }
    }
}

/// Hopf, star and representation identities on seeded random inventories.
pub fn properties(opts: &SuiteOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("properties");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    nf_hopf_checks(&mut rep, &mut rng);
    module_checks(&mut rep);
    representation_checks(&mut rep, &mut rng, &opts.exact());
    rep
}

fn word_independence_samples(cd: &Arc<CartanDatum>) -> Vec<Vec<Factor>> {
    let m1 = build_fundamental(cd, 1).expect("fundamental");
    let m2 = build_fundamental(cd, 2).expect("fundamental");
    let b = |m: &Arc<UqModule>, i, j| MatrixCoefficient::basis(m.clone(), i, j).expect("in range");
    vec![
        vec![Factor::Coef(b(&m1, 0, 0))],
        vec![Factor::Coef(b(&m1, 2, 2))],
        vec![Factor::Coef(b(&m2, 1, 1))],
        vec![Factor::Coef(b(&m1, 0, 1)), Factor::Coef(b(&m1, 0, 1).star())],
        vec![Factor::Coef(b(&m1, 1, 2)), Factor::Coef(b(&m2, 0, 1))],
    ]
}

/// Traces of `pi(a_rho a_rho^* c)` agree for the two reduced words of `w_0`
/// in `A2`, as Laurent polynomials in the torus.
pub fn word_independence(opts: &SuiteOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("word-independence");
    let cd = datum('A', 2);
    let words = [WeylWord(vec![1, 2, 1]), WeylWord(vec![2, 1, 2])];
    let ctxs: Vec<RepContext> = words.iter().map(|w| make_context(&cd, w, None, opts.float(30)).expect("reduced")).collect();
    for (k, fs) in word_independence_samples(&cd).iter().enumerate() {
        let res = (|| -> Result<Vec<_>, RepError> {
            ctxs.iter()
                .map(|ctx| {
                    let b = product_operator(ctx, fs)?;
                    Ok(weighted_trace_float(ctx, &balancing_exponents(ctx), b.float().expect("float mode")))
                })
                .collect()
        })();
        match res {
            Ok(tr) => {
                let keys: BTreeSet<&Vec<i64>> = tr[0].keys().chain(tr[1].keys()).collect();
                for key in keys {
                    let (a, ta) = tr[0].get(key).copied().unwrap_or_default();
                    let (b, tb) = tr[1].get(key).copied().unwrap_or_default();
                    let d = (a - b).norm();
                    rep.residual(d);
                    rep.check(d <= ta + tb + 1e-9, || format!("sample {k}, torus {key:?}: {a} vs {b}"));
                }
            }
            Err(e) => rep.error(e),
        }
    }
    rep
}

fn close(rep: &mut SuiteReport, what: &str, exact: &RatQ, float: C64, tail: f64, q: f64) {
    match exact.eval(q) {
        Ok(e) => {
            let e = C64::new(e, 0.0);
            let d = (float - e).norm();
            let r = d / e.norm().max(1e-300);
            rep.residual(if e.norm() > 0.0 { r } else { d });
            rep.check(d <= 1e-10 * e.norm() + tail + 1e-300, || format!("{what}: exact {e} vs float {float} (tail {tail:e})"));
        }
        Err(err) => rep.error(format!("{what}: {err}")),
    }
}

/// Float pipeline against the exact values of the other suites at `q`.
pub fn cross_mode(opts: &SuiteOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("cross-mode");
    let q = opts.q;
    let a1 = datum('A', 1);
    // Haar on the rank-one inventory
    for (fam, m, p, r) in su2_monomials(6) {
        let want = haar_closed_form(fam, m, p, r).expect("valid");
        match haar_trace(&a1, &[su2_factor(fam, m, p, r)], &opts.float(80)) {
            Ok(h) => close(&mut rep, &format!("H({fam},{m},{p},{r})"), &want, h.value, h.tail, q),
            Err(e) => rep.error(e),
        }
    }
    for (s, n) in NORMALIZATION_GROUPS {
        match haar_trace(&datum(s, n), &[], &opts.float(80)) {
            Ok(h) => close(&mut rep, &format!("H(1) {s}{n}"), &RatQ::one(), h.value, h.tail, q),
            Err(e) => rep.error(e),
        }
    }
    // Schur pair values, exact on one side
    let m = build_fundamental(&a1, 1).expect("fundamental");
    for x in basis_coefficients(&m) {
        for y in basis_coefficients(&m) {
            if let (Ok(want), Ok(h)) = (
                haar_schur_pair(&x, &y),
                haar_trace(&a1, &[Factor::Coef(x.clone()), Factor::Coef(y.clone())], &opts.float(80)),
            ) {
                close(&mut rep, "pair", &want, h.value, h.tail, q);
            } else {
                rep.error("pair evaluation failed");
            }
        }
    }
    // a-operators on a box of basis vectors
    let a2 = datum('A', 2);
    for w in AV2_WORDS {
        let ctx = make_context(&a2, &WeylWord(w.to_vec()), None, opts.float(12)).expect("reduced");
        for lam in AV2_WEIGHTS {
            let res = (|| -> Result<(TensorOp, TensorOp), RepError> {
                let a = a_coefficient(&irrep(&a2, &lam)?, &ctx.word)?;
                Ok((evaluate_coefficient(&ctx, &a)?, crate::repwt::a_operator(&ctx, &lam, false)?))
            })();
            match res {
                Ok((x, y)) => {
                    let n = w.len();
                    let mut worst: f64 = 0.0;
                    for idx in 0..4usize.pow(n as u32) {
                        let col: Vec<usize> = (0..n).map(|j| (idx / 4usize.pow(j as u32)) % 4).collect();
                        for row in [col.clone(), col.iter().map(|k| k + 1).collect()] {
                            let a = x.entry(&row, &col, q, None).unwrap_or(C64::new(f64::NAN, 0.0));
                            let b = y.entry(&row, &col, q, None).unwrap_or_default();
                            worst = worst.max((a - b).norm() / b.norm().max(1e-300).max(a.norm()).max(1e-300));
                        }
                    }
                    rep.residual(worst);
                    rep.check(worst <= 1e-10, || format!("a-operator w = {w:?} Lambda = {lam:?}: {worst:e}"));
                }
                Err(e) => rep.error(e),
            }
        }
    }
    // quantum trace normalization
    for (s, n) in [('A', 2), ('B', 2)] {
        let cd = datum(s, n);
        for w in cd.weyl_group() {
            let res = (|| -> Result<_, RepError> {
                let ctx = make_context(&cd, &w, None, opts.float(80))?;
                let l = a2rho_op(&ctx)?;
                qtr(&QuasiTraceContext::new(ctx)?, &l)
            })();
            match res {
                Ok(r) => close(&mut rep, &format!("qtr {s}{n} {w}"), &RatQ::one(), r.value, r.tail, q),
                Err(e) => rep.error(e),
            }
        }
    }
    // c-functions at the integral samples
    for w in a2.weyl_group() {
        for il in cfunc_integral_samples() {
            let mk = |params| CFunctionQuery { cd: a2.clone(), word: w.clone(), lambda: il_to_lambda(&il), params };
            match (c_function_product(&mk(opts.exact())), c_function_trace(&mk(opts.float(120)))) {
                (Ok(e), Ok(f)) => close(&mut rep, &format!("c w = {w} {il:?}"), &e.exact.expect("exact"), f.value, f.tail, q),
                (Err(e), _) | (_, Err(e)) => rep.error(e),
            }
        }
    }
    // multiplicativity
    for (s, n) in [('A', 2), ('B', 2)] {
        let cd = datum(s, n);
        match (multiplicativity_case(&cd, &opts.exact()), multiplicativity_case(&cd, &opts.float(80))) {
            (Ok(e), Ok(f)) => {
                let (l, r) = e.exact.expect("exact");
                close(&mut rep, &format!("mult lhs {s}{n}"), &l, f.lhs, f.tail, q);
                close(&mut rep, &format!("mult rhs {s}{n}"), &r, f.rhs, f.tail, q);
            }
            (Err(e), _) | (_, Err(e)) => rep.error(e),
        }
    }
    // Haar through the other reduced word
    if let Ok(h) = haar_trace_word(&a2, &WeylWord(vec![2, 1, 2]), &[], &opts.float(80)) {
        close(&mut rep, "H(1) via (2,1,2)", &RatQ::one(), h.value, h.tail, q);
    } else {
        rep.error("H(1) via (2,1,2) failed");
    }
    rep
}

/// Runs every suite in order.
pub fn run_all(opts: &SuiteOptions) -> Vec<SuiteReport> {
    SUITES.iter().map(|(_, f)| timed(*f, opts)).collect()
}
