use std::collections::BTreeMap;

use super::{Cgen, Cq2Error};
use crate::qnum::RatQ;

/// One term of an exact operator on `l^2(N)`:
///
/// `e_k -> q^{slope k} prod_{o in edges} E(k + o) e_{k + shift}`,
///
/// with `E(j) = sqrt(1 - q^{-2dj})`. Offsets in `edges` are distinct: a
/// repeated edge is collapsed into the rational factor it squares to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShiftKey {
    pub shift: i64,
    pub slope: i64,
    pub edges: Vec<i64>,
}

impl ShiftKey {
    pub fn diagonal(slope: i64) -> Self {
        ShiftKey { shift: 0, slope, edges: Vec::new() }
    }

    /// Numeric entry factor at column `k` (without the coefficient).
    pub fn eval_at(&self, k: i64, d: i64, q0: f64) -> f64 {
        if k + self.shift < 0 {
            return 0.0;
        }
        let mut x = q0.powf((self.slope * k) as f64);
        for o in &self.edges {
            let j = k + o;
            x *= (1.0 - q0.powf((-2 * d * j) as f64)).max(0.0).sqrt();
        }
        x
    }

    /// Key of the adjoint term and the factor its coefficient picks up.
    pub fn adjoint(&self) -> (ShiftKey, RatQ) {
        let s = self.shift;
        let key = ShiftKey { shift: -s, slope: self.slope, edges: self.edges.iter().map(|o| o - s).collect() };
        (key, RatQ::q_pow(-self.slope * s))
    }
}

/// `a . b` (apply `b` first) on single terms, expanded into canonical terms.
pub fn compose_keys(a: &ShiftKey, b: &ShiftKey, d: i64) -> Vec<(ShiftKey, RatQ)> {
    let base = RatQ::q_pow(a.slope * b.shift);
    let mut acc: Vec<(i64, Vec<i64>, RatQ)> = vec![(a.slope + b.slope, b.edges.clone(), base)];
    for o in a.edges.iter().map(|o| o + b.shift) {
        let mut next = Vec::with_capacity(acc.len() * 2);
        for (slope, mut edges, c) in acc {
            match edges.binary_search(&o) {
                Err(pos) => {
                    edges.insert(pos, o);
                    next.push((slope, edges, c));
                }
                Ok(pos) => {
                    // E(k+o)^2 = 1 - q^{-2do} q^{-2dk}
                    edges.remove(pos);
                    next.push((slope - 2 * d, edges.clone(), -(&c * &RatQ::q_pow(-2 * d * o))));
                    next.push((slope, edges, c));
                }
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(slope, edges, c)| (ShiftKey { shift: a.shift + b.shift, slope, edges }, c))
        .collect()
}

/// Exact operator on `l^2(N)` in the representation with parameter `q^d`:
/// a finite combination of [`ShiftKey`] terms with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftOp {
    pub d: i64,
    terms: BTreeMap<ShiftKey, RatQ>,
}

impl ShiftOp {
    pub fn zero(d: i64) -> Self {
        ShiftOp { d, terms: BTreeMap::new() }
    }

    pub fn identity(d: i64) -> Self {
        Self::from_term(d, ShiftKey::diagonal(0), RatQ::one())
    }

    pub fn from_term(d: i64, k: ShiftKey, c: RatQ) -> Self {
        let mut x = Self::zero(d);
        x.add_term(k, c);
        x
    }

    /// The image of a generator.
    pub fn generator(g: Cgen, d: i64) -> Self {
        match g {
            Cgen::C12 => Self::from_term(d, ShiftKey::diagonal(-d), RatQ::q_pow(-d)),
            Cgen::C21 => Self::from_term(d, ShiftKey::diagonal(-d), RatQ::from(-1)),
            Cgen::C11 => Self::from_term(d, ShiftKey { shift: -1, slope: 0, edges: vec![0] }, RatQ::one()),
            Cgen::C22 => Self::from_term(d, ShiftKey { shift: 1, slope: 0, edges: vec![1] }, RatQ::one()),
        }
    }

    pub fn add_term(&mut self, k: ShiftKey, c: RatQ) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(k.clone()).or_insert_with(RatQ::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ShiftKey, &RatQ)> {
        self.terms.iter()
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
        let mut out = Self::zero(self.d);
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x * c);
        }
        out
    }

    /// `self . other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "operators for different parameters");
        let mut out = Self::zero(self.d);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let c = ca * cb;
                for (k, f) in compose_keys(a, b, self.d) {
                    out.add_term(k, &c * &f);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.d);
        for (k, c) in &self.terms {
            let (k2, f) = k.adjoint();
            out.add_term(k2, c * &f);
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(|k| k.shift == 0)
    }

    /// Matrix entry `<e_row, A e_col>` at `q = q0`.
    pub fn entry(&self, row: usize, col: usize, q0: f64) -> f64 {
        let s = row as i64 - col as i64;
        self.terms
            .iter()
            .filter(|(k, _)| k.shift == s)
            .map(|(k, c)| c.eval(q0).unwrap_or(f64::NAN) * k.eval_at(col as i64, self.d, q0))
            .sum()
    }

    /// `sum_k <e_k, A e_k>` in closed form.
    pub fn trace(&self) -> Result<RatQ, Cq2Error> {
        let mut acc = RatQ::zero();
        for (k, c) in self.terms.iter().filter(|(k, _)| k.shift == 0) {
            acc += &(c * &geometric_sum(k)?);
        }
        Ok(acc)
    }
}

/// `sum_{k >= 0} q^{slope k}` for a diagonal term.
pub fn geometric_sum(k: &ShiftKey) -> Result<RatQ, Cq2Error> {
    assert!(k.shift == 0 && k.edges.is_empty(), "closed walks pair every edge");
    if k.slope >= 0 {
        return Err(Cq2Error::NotTraceClass { slope: k.slope });
    }
    Ok(RatQ::one() / (RatQ::one() - RatQ::q_pow(k.slope)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowering_then_raising_is_diagonal() {
        let a = ShiftOp::generator(Cgen::C11, 1);
        let d = ShiftOp::generator(Cgen::C22, 1);
        // c11 c22 e_k = (1 - q^{-2k-2}) e_k
        let p = a.compose(&d);
        assert!(p.is_diagonal());
        assert!(p.terms().all(|(k, _)| k.edges.is_empty()));
        for k in 0..5 {
            let want = 1.0 - 2f64.powi(-2 * k - 2);
            assert!((p.entry(k as usize, k as usize, 2.0) - want).abs() < 1e-15);
        }
        // c22 c11 vanishes on e_0
        assert_eq!(d.compose(&a).entry(0, 0, 2.0), 0.0);
    }

    #[test]
    fn adjoint_swaps_raising_and_lowering() {
        let a = ShiftOp::generator(Cgen::C11, 2);
        let d = ShiftOp::generator(Cgen::C22, 2);
        assert_eq!(a.adjoint(), d);
        assert_eq!(d.adjoint(), a);
    }

    #[test]
    fn trace_needs_decay() {
        let y = ShiftOp::generator(Cgen::C12, 1);
        assert_eq!(y.trace().unwrap(), RatQ::q_pow(-1) / (RatQ::one() - RatQ::q_pow(-1)));
        assert!(ShiftOp::identity(1).trace().is_err());
    }
}
