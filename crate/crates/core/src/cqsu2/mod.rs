//! The Hopf *-algebra of functions on quantum SU(2): PBW normal form,
//! structure maps, the closed-form Haar state, and the `l^2(N)`
//! representation both as exact symbolic operators and as float band
//! matrices.

mod band;
mod shiftop;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde_json::json;
use thiserror::Error;

use crate::linalg::Vector;
use crate::qnum::{LaurentQ, RatQ};
use crate::rootdata::build_cartan;
use crate::uqmod::{irrep, tensor_module, Gen, Sl2Chain, UqModule};

pub use band::BandOp;
pub use shiftop::{compose_keys, geometric_sum, ShiftKey, ShiftOp};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Cq2Error {
    #[error("family must be 1 or 2, got {0}")]
    BadFamily(u8),
    #[error("family 2 monomials need m >= 1")]
    EmptyFamily2,
    #[error("chain index out of range: {0}")]
    BadIndex(String),
    #[error("operator is not trace class (slope {slope})")]
    NotTraceClass { slope: i64 },
}

/// The four generators `c_11, c_12, c_21, c_22`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cgen {
    C11,
    C12,
    C21,
    C22,
}

impl Cgen {
    pub fn from_indices(i: usize, j: usize) -> Option<Cgen> {
        match (i, j) {
            (1, 1) => Some(Cgen::C11),
            (1, 2) => Some(Cgen::C12),
            (2, 1) => Some(Cgen::C21),
            (2, 2) => Some(Cgen::C22),
            _ => None,
        }
    }
}

/// PBW monomial `c11^a c12^p c21^r` for `a >= 0`, `c22^{-a} c12^p c21^r` for `a < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub a: i64,
    pub p: u32,
    pub r: u32,
}

impl Mono {
    pub const ONE: Mono = Mono { a: 0, p: 0, r: 0 };

    pub fn new(family: u8, m: u32, p: u32, r: u32) -> Result<Mono, Cq2Error> {
        match family {
            1 => Ok(Mono { a: m as i64, p, r }),
            2 if m == 0 => Err(Cq2Error::EmptyFamily2),
            2 => Ok(Mono { a: -(m as i64), p, r }),
            f => Err(Cq2Error::BadFamily(f)),
        }
    }

    pub fn family(&self) -> u8 {
        if self.a < 0 {
            2
        } else {
            1
        }
    }

    pub fn m(&self) -> u32 {
        self.a.unsigned_abs() as u32
    }

    pub fn degree(&self) -> u32 {
        self.m() + self.p + self.r
    }

    /// Generator word, left to right.
    pub fn word(&self) -> Vec<Cgen> {
        let x = if self.a >= 0 { Cgen::C11 } else { Cgen::C22 };
        let mut w = vec![x; self.m() as usize];
        w.extend(std::iter::repeat(Cgen::C12).take(self.p as usize));
        w.extend(std::iter::repeat(Cgen::C21).take(self.r as usize));
        w
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut push = |name: &str, e: u32| match e {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{e}")),
        };
        push(if self.a >= 0 { "c11" } else { "c22" }, self.m());
        push("c12", self.p);
        push("c21", self.r);
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Element of the algebra as a combination of PBW monomials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalFormElem {
    terms: BTreeMap<Mono, RatQ>,
}

impl NormalFormElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Mono::ONE, RatQ::one())
    }

    pub fn monomial(m: Mono, c: RatQ) -> Self {
        let mut x = Self::zero();
        x.add_term(m, c);
        x
    }

    pub fn scalar(c: RatQ) -> Self {
        Self::monomial(Mono::ONE, c)
    }

    pub fn gen(g: Cgen) -> Self {
        let m = match g {
            Cgen::C11 => Mono { a: 1, p: 0, r: 0 },
            Cgen::C22 => Mono { a: -1, p: 0, r: 0 },
            Cgen::C12 => Mono { a: 0, p: 1, r: 0 },
            Cgen::C21 => Mono { a: 0, p: 0, r: 1 },
        };
        Self::monomial(m, RatQ::one())
    }

    pub fn add_term(&mut self, m: Mono, c: RatQ) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(RatQ::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &RatQ)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> RatQ {
        self.terms.get(m).cloned().unwrap_or_else(RatQ::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&RatQ::from(-1)))
    }

    pub fn scale(&self, c: &RatQ) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        NormalFormElem { terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    /// Substitutes `q -> q^d` in every coefficient.
    pub fn dilate(&self, d: i64) -> Self {
        NormalFormElem { terms: self.terms.iter().map(|(m, x)| (*m, x.dilate(d))).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (x, cx) in &self.terms {
            for (y, cy) in &other.terms {
                let c = cx * cy;
                for (m, k) in mono_mul(*x, *y) {
                    out.add_term(m, &c * &k);
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn from_word(word: &[Cgen]) -> Self {
        word.iter().fold(Self::one(), |acc, g| acc.mul(&Self::gen(*g)))
    }

    pub fn counit(&self) -> RatQ {
        self.terms.iter().filter(|(m, _)| m.p == 0 && m.r == 0).map(|(_, c)| c.clone()).sum()
    }

    pub fn antipode(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            // anti-homomorphism: reverse the word
            let img = m.word().iter().rev().fold(Self::one(), |acc, g| acc.mul(&antipode_gen(*g)));
            out = out.add(&img.scale(c));
        }
        out
    }

    /// The star involution; `q` is real so coefficients are unchanged.
    pub fn star(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let img = m.word().iter().rev().fold(Self::one(), |acc, g| acc.mul(&star_gen(*g)));
            out = out.add(&img.scale(c));
        }
        out
    }

    pub fn coproduct(&self) -> NfTensor {
        let mut out = NfTensor::zero();
        for (m, c) in &self.terms {
            let img = m.word().iter().fold(NfTensor::one(), |acc, g| acc.mul(&coproduct_gen(*g)));
            out = out.add(&img.scale(c));
        }
        out
    }

    /// The Haar state via the closed form on each monomial.
    pub fn haar(&self) -> RatQ {
        self.terms.iter().map(|(m, c)| c * &haar_mono(m)).sum()
    }

    /// Canonical JSON: monomials in sorted order with string coefficients.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| json!({"family": m.family(), "m": m.m(), "p": m.p, "r": m.r, "coef": c.to_string()}))
                .collect(),
        )
    }
}

impl fmt::Display for NormalFormElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| match (c.is_one(), *m == Mono::ONE) {
                (_, true) => format!("({c})"),
                (true, false) => m.to_string(),
                (false, false) => format!("({c})*{m}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Product of two PBW monomials, reduced.
fn mono_mul(x: Mono, y: Mono) -> Vec<(Mono, RatQ)> {
    // move y's c11/c22 block left past x's c12^p c21^r
    let shift = (x.p + x.r) as i64 * y.a;
    let a = x.a + y.a;
    let mut ypoly: Vec<LaurentQ> = vec![LaurentQ::one()];
    let mut factor = |e: i64| {
        // multiply the polynomial in Y = c12 c21 by (1 + q^e Y)
        let mut next = vec![LaurentQ::zero(); ypoly.len() + 1];
        for (j, c) in ypoly.iter().enumerate() {
            next[j] = &next[j] + c;
            next[j + 1] = &next[j + 1] + &c.shift(e);
        }
        ypoly = next;
    };
    if x.a > 0 && y.a < 0 {
        let (m, n) = (x.a, -y.a);
        for k in 0..m.min(n) {
            factor(-2 * (n - k) + 1);
        }
    } else if x.a < 0 && y.a > 0 {
        let (m, n) = (-x.a, y.a);
        for k in 0..m.min(n) {
            factor(2 * (n - k) - 1);
        }
    }
    ypoly
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| {
            let j = j as u32;
            (Mono { a, p: x.p + y.p + j, r: x.r + y.r + j }, RatQ::from(c.shift(shift)))
        })
        .collect()
}

fn antipode_gen(g: Cgen) -> NormalFormElem {
    match g {
        Cgen::C11 => NormalFormElem::gen(Cgen::C22),
        Cgen::C22 => NormalFormElem::gen(Cgen::C11),
        Cgen::C12 => NormalFormElem::gen(Cgen::C12).scale(&-RatQ::q_pow(1)),
        Cgen::C21 => NormalFormElem::gen(Cgen::C21).scale(&-RatQ::q_pow(-1)),
    }
}

fn star_gen(g: Cgen) -> NormalFormElem {
    match g {
        Cgen::C11 => NormalFormElem::gen(Cgen::C22),
        Cgen::C22 => NormalFormElem::gen(Cgen::C11),
        Cgen::C21 => NormalFormElem::gen(Cgen::C12).scale(&-RatQ::q_pow(1)),
        Cgen::C12 => NormalFormElem::gen(Cgen::C21).scale(&-RatQ::q_pow(-1)),
    }
}

fn coproduct_gen(g: Cgen) -> NfTensor {
    let (i, j) = match g {
        Cgen::C11 => (1, 1),
        Cgen::C12 => (1, 2),
        Cgen::C21 => (2, 1),
        Cgen::C22 => (2, 2),
    };
    let mut t = NfTensor::zero();
    for k in 1..=2 {
        let l = Cgen::from_indices(i, k).expect("index");
        let r = Cgen::from_indices(k, j).expect("index");
        t = t.add(&NfTensor::pure(&NormalFormElem::gen(l), &NormalFormElem::gen(r)));
    }
    t
}

/// Element of the tensor square, as combinations of monomial pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NfTensor {
    terms: BTreeMap<(Mono, Mono), RatQ>,
}

impl NfTensor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::pure(&NormalFormElem::one(), &NormalFormElem::one())
    }

    pub fn pure(a: &NormalFormElem, b: &NormalFormElem) -> Self {
        let mut t = Self::zero();
        for (x, cx) in a.terms() {
            for (y, cy) in b.terms() {
                t.add_term((*x, *y), cx * cy);
            }
        }
        t
    }

    fn add_term(&mut self, k: (Mono, Mono), c: RatQ) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(k).or_insert_with(RatQ::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Mono, Mono), &RatQ)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &RatQ) -> Self {
        let mut out = Self::zero();
        for (k, x) in &self.terms {
            out.add_term(*k, x * c);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            for ((a2, b2), c2) in &o.terms {
                let left = mono_mul(*a, *a2);
                let right = mono_mul(*b, *b2);
                let cc = c * c2;
                for (l, kl) in &left {
                    for (r, kr) in &right {
                        out.add_term((*l, *r), &(&cc * kl) * kr);
                    }
                }
            }
        }
        out
    }

    /// Applies linear maps to each leg and multiplies back: `m (f (x) g)`.
    pub fn contract(&self, f: impl Fn(&NormalFormElem) -> NormalFormElem, g: impl Fn(&NormalFormElem) -> NormalFormElem) -> NormalFormElem {
        let mut out = NormalFormElem::zero();
        for ((a, b), c) in &self.terms {
            let l = f(&NormalFormElem::monomial(*a, RatQ::one()));
            let r = g(&NormalFormElem::monomial(*b, RatQ::one()));
            out = out.add(&l.mul(&r).scale(c));
        }
        out
    }

    /// `(id (x) phi)`, with `phi` scalar valued.
    pub fn apply_right(&self, phi: impl Fn(&Mono) -> RatQ) -> NormalFormElem {
        let mut out = NormalFormElem::zero();
        for ((a, b), c) in &self.terms {
            out.add_term(*a, c * &phi(b));
        }
        out
    }

    /// `(phi (x) id)`, with `phi` scalar valued.
    pub fn apply_left(&self, phi: impl Fn(&Mono) -> RatQ) -> NormalFormElem {
        let mut out = NormalFormElem::zero();
        for ((a, b), c) in &self.terms {
            out.add_term(*b, c * &phi(a));
        }
        out
    }

    /// `(Delta (x) id)` or `(id (x) Delta)` as a map into the triple tensor.
    pub fn coproduct_leg(&self, left: bool) -> BTreeMap<(Mono, Mono, Mono), RatQ> {
        let mut out: BTreeMap<(Mono, Mono, Mono), RatQ> = BTreeMap::new();
        for ((a, b), c) in &self.terms {
            let (split, keep) = if left { (a, b) } else { (b, a) };
            let d = NormalFormElem::monomial(*split, RatQ::one()).coproduct();
            for ((x, y), cd) in d.terms() {
                let key = if left { (*x, *y, *keep) } else { (*keep, *x, *y) };
                let e = out.entry(key).or_insert_with(RatQ::zero);
                *e += &(c * cd);
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// `(* (x) *)` applied to both legs.
    pub fn star_legs(&self) -> NfTensor {
        let mut out = NfTensor::zero();
        for ((a, b), c) in &self.terms {
            let l = NormalFormElem::monomial(*a, RatQ::one()).star();
            let r = NormalFormElem::monomial(*b, RatQ::one()).star();
            out = out.add(&NfTensor::pure(&l, &r).scale(c));
        }
        out
    }
}

fn haar_mono(m: &Mono) -> RatQ {
    haar_closed_form(m.family(), m.m(), m.p, m.r).expect("valid monomial")
}

/// `H(c11^m c12^p c21^r) = H(c22^m c12^p c21^r)
///  = delta_{m,0} delta_{p,r} (-q)^p (q^2 - 1) / (q^{2p+2} - 1)`.
pub fn haar_closed_form(family: u8, m: u32, p: u32, r: u32) -> Result<RatQ, Cq2Error> {
    if family != 1 && family != 2 {
        return Err(Cq2Error::BadFamily(family));
    }
    if m != 0 || p != r {
        return Ok(RatQ::zero());
    }
    let sign = if p % 2 == 0 { 1 } else { -1 };
    let num = RatQ::q_pow(p as i64) * RatQ::from(sign) * RatQ::q_pow_minus_one(2);
    Ok(num / RatQ::q_pow_minus_one(2 * p as i64 + 2))
}

// ---------------------------------------------------------------------------
// the l^2(N) representation

/// `pi(a)` as an exact operator for the generators at parameter `q^d`.
/// Coefficients of `a` are taken as they stand (already functions of `q`).
pub fn pi_su2(a: &NormalFormElem, d: i64) -> ShiftOp {
    let mut out = ShiftOp::zero(d);
    let gens: HashMap<Cgen, ShiftOp> =
        [Cgen::C11, Cgen::C12, Cgen::C21, Cgen::C22].into_iter().map(|g| (g, ShiftOp::generator(g, d))).collect();
    for (m, c) in a.terms() {
        let op = m.word().iter().fold(ShiftOp::identity(d), |acc, g| acc.compose(&gens[g]));
        out = out.add(&op.scale(c));
    }
    out
}

/// `pi(a)` as an `n x n` float band matrix at the numeric point `q0`,
/// generators at parameter `q0^d`.
pub fn pi_su2_float(a: &NormalFormElem, d: i64, q0: f64, n: usize) -> BandOp {
    let mut out = BandOp::zeros(n);
    let gens: HashMap<Cgen, BandOp> = [Cgen::C11, Cgen::C12, Cgen::C21, Cgen::C22]
        .into_iter()
        .map(|g| (g, BandOp::generator(g, d, q0, n)))
        .collect();
    for (m, c) in a.terms() {
        let op = m.word().iter().fold(BandOp::identity(n), |acc, g| acc.mul(&gens[g]));
        let cv = c.eval(q0).expect("coefficients have no poles at q > 1");
        out = out.add(&op.scale(cv.into()));
    }
    out
}

// ---------------------------------------------------------------------------
// bridge from rank-one matrix coefficients

type BridgeKey = (usize, usize, usize);

fn bridge_cache() -> &'static Mutex<HashMap<BridgeKey, NormalFormElem>> {
    static CACHE: OnceLock<Mutex<HashMap<BridgeKey, NormalFormElem>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn tensor_power(m: usize) -> Arc<UqModule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<UqModule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(x) = cache.lock().expect("tensor cache").get(&m) {
        return x.clone();
    }
    let cd = Arc::new(build_cartan('A', 1).expect("A1"));
    let built = if m == 0 {
        irrep(&cd, &[0]).expect("trivial")
    } else {
        let v = irrep(&cd, &[1]).expect("L(1)");
        let mut acc = (*v).clone();
        for _ in 1..m {
            acc = tensor_module(&acc, &v).expect("same datum");
        }
        Arc::new(acc)
    };
    cache.lock().expect("tensor cache").entry(m).or_insert(built).clone()
}

/// The coefficient `c^(m)_{x,y}` of the `(m+1)`-dimensional module, for the
/// basis `u_y = F^(y) u_0` and its dual basis, as an element of the algebra.
pub fn sl2_coeff_to_nf(m: usize, x: usize, y: usize) -> Result<NormalFormElem, Cq2Error> {
    if x > m || y > m {
        return Err(Cq2Error::BadIndex(format!("({x}, {y}) for m = {m}")));
    }
    if let Some(v) = bridge_cache().lock().expect("bridge cache").get(&(m, x, y)) {
        return Ok(v.clone());
    }
    let t = tensor_power(m);
    let n = t.dim();
    let top = crate::linalg::unit_vec(n, 0);
    let chain = |k: usize| -> Vector {
        (0..k).fold(top.clone(), |acc, j| {
            let fv = t.apply_gen(Gen::F(0), &acc);
            let inv = RatQ::from(crate::qnum::q_int(j as i64 + 1, 1)).inv().expect("nonzero");
            crate::linalg::scale_vec(&fv, &inv)
        })
    };
    let ux = chain(x);
    let uy = chain(y);
    let i = ux.iter().position(|c| !c.is_zero()).expect("nonzero chain vector");
    let norm = ux[i].inv().expect("nonzero");
    let mut out = NormalFormElem::zero();
    let bits = |idx: usize| -> Vec<usize> { (0..m).map(|k| (idx >> (m - 1 - k)) & 1).collect() };
    let ib = bits(i);
    for (j, c) in uy.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let jb = bits(j);
        let word: Vec<Cgen> =
            (0..m).map(|k| Cgen::from_indices(ib[k] + 1, jb[k] + 1).expect("index")).collect();
        out = out.add(&NormalFormElem::from_word(&word).scale(&(c * &norm)));
    }
    bridge_cache().lock().expect("bridge cache").insert((m, x, y), out.clone());
    Ok(out)
}

/// `c_{l,v}` for a rank-one chain with `l`, `v` given in chain coordinates.
pub fn chain_coeff_to_nf(chain: &Sl2Chain, l: &[RatQ], v: &[RatQ]) -> Result<NormalFormElem, Cq2Error> {
    if l.len() != chain.len + 1 || v.len() != chain.len + 1 {
        return Err(Cq2Error::BadIndex(format!("vectors must have length {}", chain.len + 1)));
    }
    let mut out = NormalFormElem::zero();
    for (x, lx) in l.iter().enumerate() {
        for (y, vy) in v.iter().enumerate() {
            if lx.is_zero() || vy.is_zero() {
                continue;
            }
            out = out.add(&sl2_coeff_to_nf(chain.len, x, y)?.scale(&(lx * vy)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(x: Cgen) -> NormalFormElem {
        NormalFormElem::gen(x)
    }

    #[test]
    fn listed_products() {
        let c21c11 = g(Cgen::C21).mul(&g(Cgen::C11));
        assert_eq!(c21c11, NormalFormElem::monomial(Mono { a: 1, p: 0, r: 1 }, RatQ::q_pow(1)));
        let c11c22 = g(Cgen::C11).mul(&g(Cgen::C22));
        let y = Mono { a: 0, p: 1, r: 1 };
        assert_eq!(c11c22, NormalFormElem::one().add(&NormalFormElem::monomial(y, RatQ::q_pow(-1))));
        let c22c11 = g(Cgen::C22).mul(&g(Cgen::C11));
        assert_eq!(c22c11, NormalFormElem::one().add(&NormalFormElem::monomial(y, RatQ::q_pow(1))));
    }

    #[test]
    fn all_seven_relations() {
        let q = RatQ::q_pow(1);
        let qi = RatQ::q_pow(-1);
        let (a, b, c, d) = (g(Cgen::C11), g(Cgen::C12), g(Cgen::C21), g(Cgen::C22));
        assert_eq!(a.mul(&b), b.mul(&a).scale(&qi));
        assert_eq!(a.mul(&c), c.mul(&a).scale(&qi));
        assert_eq!(b.mul(&d), d.mul(&b).scale(&qi));
        assert_eq!(c.mul(&d), d.mul(&c).scale(&qi));
        assert_eq!(b.mul(&c), c.mul(&b));
        assert_eq!(a.mul(&d).sub(&d.mul(&a)), b.mul(&c).scale(&(&qi - &q)));
        assert_eq!(a.mul(&d).sub(&b.mul(&c).scale(&qi)), NormalFormElem::one());
    }

    #[test]
    fn hopf_examples() {
        let d = g(Cgen::C11).coproduct();
        let expect = NfTensor::pure(&g(Cgen::C11), &g(Cgen::C11)).add(&NfTensor::pure(&g(Cgen::C12), &g(Cgen::C21)));
        assert_eq!(d, expect);
        assert_eq!(g(Cgen::C21).antipode(), g(Cgen::C21).scale(&-RatQ::q_pow(-1)));
        assert_eq!(g(Cgen::C21).scale(&-RatQ::q_pow(-1)).star(), g(Cgen::C12));
    }

    #[test]
    fn closed_form_examples() {
        assert!(haar_closed_form(1, 0, 0, 0).unwrap().is_one());
        assert_eq!(haar_closed_form(1, 0, 1, 1).unwrap().to_string(), "-q/(q^2+1)");
        assert!(haar_closed_form(1, 2, 1, 1).unwrap().is_zero());
        assert!(haar_closed_form(3, 0, 0, 0).is_err());
    }

    #[test]
    fn bridge_small_cases() {
        assert_eq!(sl2_coeff_to_nf(0, 0, 0).unwrap(), NormalFormElem::one());
        assert_eq!(sl2_coeff_to_nf(1, 0, 1).unwrap(), g(Cgen::C12));
        assert_eq!(sl2_coeff_to_nf(1, 1, 0).unwrap(), g(Cgen::C21));
        assert_eq!(sl2_coeff_to_nf(2, 0, 0).unwrap(), g(Cgen::C11).pow(2));
        assert!(sl2_coeff_to_nf(1, 2, 0).is_err());
    }

    #[test]
    fn pi_examples() {
        let op = pi_su2(&g(Cgen::C12), 1);
        assert!((op.entry(3, 3, 2.0) - 2f64.powi(-4)).abs() < 1e-15);
        let c11 = pi_su2(&g(Cgen::C11), 1);
        assert_eq!(c11.entry(0, 0, 2.0), 0.0);
        let y = pi_su2(&g(Cgen::C21).mul(&g(Cgen::C12)), 1);
        for k in 0..6 {
            let want = -(2f64.powi(-(k as i32))) * 2f64.powi(-(k as i32) - 1);
            assert!((y.entry(k, k, 2.0) - want).abs() < 1e-15);
        }
    }
}
