use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_traits::Zero;

/// Laurent polynomial in torus variables `t_1..t_l` with coefficients `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoly<C> {
    rank: usize,
    terms: BTreeMap<Vec<i64>, C>,
}

impl<C: Clone + Zero> TorusPoly<C> {
    pub fn zero(rank: usize) -> Self {
        TorusPoly { rank, terms: BTreeMap::new() }
    }

    pub fn monomial(exps: Vec<i64>, c: C) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn add_term(&mut self, exps: Vec<i64>, c: C) {
        assert_eq!(exps.len(), self.rank, "torus exponent length");
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&exps) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(exps, s);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &C)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The torus integral: coefficient of `t^0`.
    pub fn constant_term(&self) -> C {
        self.terms.get(&vec![0; self.rank]).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeff(&self, exps: &[i64]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    /// Multiplies by `t^mu`.
    pub fn shift(&self, mu: &[i64]) -> Self {
        let mut out = Self::zero(self.rank);
        for (e, c) in &self.terms {
            out.add_term(e.iter().zip(mu).map(|(a, b)| a + b).collect(), c.clone());
        }
        out
    }

    pub fn map<D: Clone + Zero>(&self, f: impl Fn(&C) -> D) -> TorusPoly<D> {
        let mut out = TorusPoly::zero(self.rank);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }
}

impl<C: Clone + Zero> Add for &TorusPoly<C> {
    type Output = TorusPoly<C>;
    fn add(self, rhs: &TorusPoly<C>) -> TorusPoly<C> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<C: Clone + Zero + Mul<Output = C>> Mul for &TorusPoly<C> {
    type Output = TorusPoly<C>;
    fn mul(self, rhs: &TorusPoly<C>) -> TorusPoly<C> {
        let mut out = TorusPoly::zero(self.rank);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.clone() * c2.clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::{rq, RatQ};

    #[test]
    fn constant_terms() {
        let mut p = TorusPoly::<RatQ>::monomial(vec![2], rq(3));
        p.add_term(vec![0], rq(-5));
        assert_eq!(p.constant_term(), rq(-5));
        let m = TorusPoly::<RatQ>::monomial(vec![1, -1], rq(1));
        assert!(m.constant_term().is_zero());
    }

    #[test]
    fn shift_moves_constant_term() {
        let mut p = TorusPoly::<RatQ>::monomial(vec![1, 0], rq(7));
        p.add_term(vec![0, 2], rq(4));
        let s = p.shift(&[-1, 0]);
        assert_eq!(s.constant_term(), p.coeff(&[1, 0]));
    }
}
