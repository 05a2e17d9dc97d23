use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::cqsu2::{compose_keys, BandOp, ShiftKey, ShiftOp};
use crate::qnum::{QnumError, RatQ};

use super::RepError;

type ExactKey = (Vec<i64>, Vec<ShiftKey>);

/// Exact operator on `l^2(N)^{(x) n}` with a torus character: a combination
/// of pure tensors `t^mu (x)_j term_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactOp {
    pub ds: Vec<i64>,
    pub rank: usize,
    terms: BTreeMap<ExactKey, RatQ>,
}

impl ExactOp {
    pub fn zero(ds: Vec<i64>, rank: usize) -> Self {
        ExactOp { ds, rank, terms: BTreeMap::new() }
    }

    pub fn identity(ds: Vec<i64>, rank: usize) -> Self {
        let n = ds.len();
        let mut x = Self::zero(ds, rank);
        x.add_term((vec![0; rank], vec![ShiftKey::diagonal(0); n]), RatQ::one());
        x
    }

    /// `coef t^torus (x)_j slots[j]`, expanded.
    pub fn pure(ds: Vec<i64>, torus: Vec<i64>, coef: RatQ, slots: &[&ShiftOp]) -> Self {
        let rank = torus.len();
        let mut acc: Vec<(Vec<ShiftKey>, RatQ)> = vec![(Vec::new(), coef)];
        for s in slots {
            let mut next = Vec::new();
            for (keys, c) in &acc {
                for (k, x) in s.terms() {
                    let mut keys = keys.clone();
                    keys.push(k.clone());
                    next.push((keys, c * x));
                }
            }
            acc = next;
        }
        let mut out = Self::zero(ds, rank);
        for (keys, c) in acc {
            out.add_term((torus.clone(), keys), c);
        }
        out
    }

    pub fn add_term(&mut self, k: ExactKey, c: RatQ) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(k.clone()).or_insert_with(RatQ::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExactKey, &RatQ)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &RatQ) -> Self {
        let mut out = Self::zero(self.ds.clone(), self.rank);
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.ds, o.ds, "operators on different slot layouts");
        let mut out = Self::zero(self.ds.clone(), self.rank);
        for ((ta, ka), ca) in &self.terms {
            for ((tb, kb), cb) in &o.terms {
                let torus: Vec<i64> = ta.iter().zip(tb).map(|(x, y)| x + y).collect();
                let mut acc: Vec<(Vec<ShiftKey>, RatQ)> = vec![(Vec::new(), ca * cb)];
                for (j, (a, b)) in ka.iter().zip(kb).enumerate() {
                    let parts = compose_keys(a, b, self.ds[j]);
                    let mut next = Vec::with_capacity(acc.len() * parts.len());
                    for (keys, c) in &acc {
                        for (k, f) in &parts {
                            let mut keys = keys.clone();
                            keys.push(k.clone());
                            next.push((keys, c * f));
                        }
                    }
                    acc = next;
                }
                for (keys, c) in acc {
                    out.add_term((torus.clone(), keys), c);
                }
            }
        }
        out
    }

    /// Adjoint for a unitary torus point: `t^mu -> t^{-mu}`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.ds.clone(), self.rank);
        for ((t, keys), c) in &self.terms {
            let mut coef = c.clone();
            let mut ks = Vec::with_capacity(keys.len());
            for k in keys {
                let (k2, f) = k.adjoint();
                coef = &coef * &f;
                ks.push(k2);
            }
            out.add_term((t.iter().map(|x| -x).collect(), ks), coef);
        }
        out
    }

    /// Operator on the concatenated slots.
    pub fn tensor(&self, o: &Self) -> Self {
        let mut ds = self.ds.clone();
        ds.extend(&o.ds);
        let mut out = Self::zero(ds, self.rank);
        for ((ta, ka), ca) in &self.terms {
            for ((tb, kb), cb) in &o.terms {
                let torus = ta.iter().zip(tb).map(|(x, y)| x + y).collect();
                let mut keys = ka.clone();
                keys.extend(kb.iter().cloned());
                out.add_term((torus, keys), ca * cb);
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(|(_, ks)| ks.iter().all(|k| k.shift == 0))
    }

    /// Keeps only the torus-invariant part (the integral over the torus).
    pub fn torus_constant_term(&self) -> Self {
        let mut out = Self::zero(self.ds.clone(), self.rank);
        for ((t, ks), c) in &self.terms {
            if t.iter().all(|x| *x == 0) {
                out.add_term((t.clone(), ks.clone()), c.clone());
            }
        }
        out
    }

    /// Substitutes `t = q^nu` for `nu` given by `pairing(mu) = (nu, mu)`.
    pub fn at_q_power(&self, pairing: impl Fn(&[i64]) -> i64) -> Self {
        let mut out = Self::zero(self.ds.clone(), self.rank);
        for ((t, ks), c) in &self.terms {
            out.add_term((vec![0; self.rank], ks.clone()), c.scale_q(pairing(t)));
        }
        out
    }

    /// Closed-form trace, as a Laurent polynomial in the torus variables.
    pub fn trace(&self) -> Result<BTreeMap<Vec<i64>, RatQ>, RepError> {
        let mut out: BTreeMap<Vec<i64>, RatQ> = BTreeMap::new();
        for ((t, ks), c) in &self.terms {
            if ks.iter().any(|k| k.shift != 0) {
                continue;
            }
            let mut v = c.clone();
            for k in ks {
                v = &v * &crate::cqsu2::geometric_sum(k)?;
            }
            *out.entry(t.clone()).or_insert_with(RatQ::zero) += &v;
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    /// Trace of the torus-invariant part.
    pub fn trace_invariant(&self) -> Result<RatQ, RepError> {
        Ok(self.torus_constant_term().trace()?.into_values().sum())
    }

    /// Matrix entry between basis vectors at `q = q0` and torus angles
    /// (in turns); `None` angles means `t = 1`.
    pub fn entry(&self, row: &[usize], col: &[usize], q0: f64, angles: Option<&[f64]>) -> Result<C64, QnumError> {
        let mut acc = C64::default();
        for ((t, ks), c) in &self.terms {
            let mut x = 1.0;
            for (j, k) in ks.iter().enumerate() {
                if row[j] as i64 - col[j] as i64 != k.shift {
                    x = 0.0;
                    break;
                }
                x *= k.eval_at(col[j] as i64, self.ds[j], q0);
            }
            if x == 0.0 {
                continue;
            }
            acc += torus_at(t, angles) * c.eval(q0)? * x;
        }
        Ok(acc)
    }
}

pub fn torus_at(t: &[i64], angles: Option<&[f64]>) -> C64 {
    match angles {
        None => C64::new(1.0, 0.0),
        Some(a) => {
            let phase: f64 = t.iter().zip(a).map(|(m, th)| *m as f64 * th).sum();
            C64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase)
        }
    }
}

/// One pure tensor of a [`FloatOp`].
#[derive(Debug, Clone)]
pub struct FloatTerm {
    pub torus: Vec<i64>,
    pub coef: C64,
    pub slots: Vec<BandOp>,
}

/// Truncated float operator: per-slot band matrices of size `n`.
#[derive(Debug, Clone)]
pub struct FloatOp {
    pub n: usize,
    pub rank: usize,
    pub ds: Vec<i64>,
    pub terms: Vec<FloatTerm>,
}

impl FloatOp {
    pub fn zero(ds: Vec<i64>, rank: usize, n: usize) -> Self {
        FloatOp { n, rank, ds, terms: Vec::new() }
    }

    pub fn identity(ds: Vec<i64>, rank: usize, n: usize) -> Self {
        let slots = ds.iter().map(|_| BandOp::identity(n)).collect();
        FloatOp { n, rank, ds, terms: vec![FloatTerm { torus: vec![0; rank], coef: C64::new(1.0, 0.0), slots }] }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.terms.extend(o.terms.iter().cloned());
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coef *= c;
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                terms.push(FloatTerm {
                    torus: a.torus.iter().zip(&b.torus).map(|(x, y)| x + y).collect(),
                    coef: a.coef * b.coef,
                    slots: a.slots.iter().zip(&b.slots).map(|(x, y)| x.mul(y)).collect(),
                });
            }
        }
        FloatOp { n: self.n, rank: self.rank, ds: self.ds.clone(), terms }
    }

    pub fn adjoint(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| FloatTerm {
                torus: t.torus.iter().map(|x| -x).collect(),
                coef: t.coef.conj(),
                slots: t.slots.iter().map(|s| s.adjoint()).collect(),
            })
            .collect();
        FloatOp { n: self.n, rank: self.rank, ds: self.ds.clone(), terms }
    }

    /// Operator on the concatenated slots.
    pub fn tensor(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let mut ds = self.ds.clone();
        ds.extend(&o.ds);
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                terms.push(FloatTerm {
                    torus: a.torus.iter().zip(&b.torus).map(|(x, y)| x + y).collect(),
                    coef: a.coef * b.coef,
                    slots: a.slots.iter().chain(&b.slots).cloned().collect(),
                });
            }
        }
        FloatOp { n: self.n, rank: self.rank, ds, terms }
    }

    pub fn torus_constant_term(&self) -> Self {
        let terms = self.terms.iter().filter(|t| t.torus.iter().all(|x| *x == 0)).cloned().collect();
        FloatOp { n: self.n, rank: self.rank, ds: self.ds.clone(), terms }
    }

    /// Entry between multi-indices, torus at the given angles.
    pub fn entry(&self, row: &[usize], col: &[usize], angles: Option<&[f64]>) -> C64 {
        self.terms
            .iter()
            .map(|t| {
                let x: C64 = t.slots.iter().enumerate().map(|(j, s)| s.get(row[j], col[j])).product();
                t.coef * torus_at(&t.torus, angles) * x
            })
            .sum()
    }

    /// Smallest exact region over all slots and terms.
    pub fn exact(&self) -> usize {
        self.terms.iter().flat_map(|t| t.slots.iter().map(|s| s.exact)).min().unwrap_or(self.n)
    }

    /// Norm bound of the untruncated operator (torus unitary).
    pub fn bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coef.norm() * t.slots.iter().map(|s| s.bound).product::<f64>()).sum()
    }
}
