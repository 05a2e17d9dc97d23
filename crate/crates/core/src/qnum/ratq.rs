use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::laurent::{rat, LaurentQ};
use super::poly;
use super::QnumError;

/// Rational function in `q` over the rationals.
///
/// Canonical form: `num / den` where `den` is an ordinary polynomial with
/// nonzero constant term and leading coefficient 1, coprime to `num`. Any
/// power of `q` lives in the numerator. With this normalization structural
/// equality decides value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatQ {
    num: LaurentQ,
    den: LaurentQ,
}

impl Default for RatQ {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<LaurentQ> for RatQ {
    fn from(num: LaurentQ) -> Self {
        RatQ { num, den: LaurentQ::one() }
    }
}

impl From<i64> for RatQ {
    fn from(n: i64) -> Self {
        RatQ::from(LaurentQ::from_int(n))
    }
}

impl From<BigRational> for RatQ {
    fn from(c: BigRational) -> Self {
        RatQ::from(LaurentQ::constant(c))
    }
}

impl RatQ {
    pub fn zero() -> Self {
        RatQ::from(LaurentQ::zero())
    }

    pub fn one() -> Self {
        RatQ::from(LaurentQ::one())
    }

    pub fn q_pow(e: i64) -> Self {
        RatQ::from(LaurentQ::q_pow(e))
    }

    /// `q^e - 1`, the ubiquitous factor of closed forms.
    pub fn q_pow_minus_one(e: i64) -> Self {
        RatQ::from(&LaurentQ::q_pow(e) - &LaurentQ::one())
    }

    /// Builds `num / den`, failing on a zero denominator.
    pub fn new(num: LaurentQ, den: LaurentQ) -> Result<Self, QnumError> {
        if den.is_zero() {
            return Err(QnumError::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: LaurentQ, den: LaurentQ) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if let Some((c, e)) = den.as_monomial() {
            let inv = c.recip();
            return RatQ { num: num.shift(-e).scale(&inv), den: LaurentQ::one() };
        }
        let (ds, dp) = den.to_poly();
        let (ns, np) = num.to_poly();
        let g = poly::gcd(&np, &dp);
        let (np, mut dp) = if poly::degree(&g).unwrap_or(0) > 0 {
            (poly::div_exact(&np, &g), poly::div_exact(&dp, &g))
        } else {
            (np, dp)
        };
        poly::trim(&mut dp);
        let lc = dp.last().cloned().expect("nonzero denominator");
        let inv = lc.recip();
        let dp: Vec<BigRational> = dp.iter().map(|c| c * &inv).collect();
        let num = LaurentQ::from_poly(ns - ds, &np).scale(&inv);
        let den = LaurentQ::from_poly(0, &dp);
        if den.is_one() {
            RatQ::from(num)
        } else {
            RatQ { num, den }
        }
    }

    pub fn numer(&self) -> &LaurentQ {
        &self.num
    }

    pub fn denom(&self) -> &LaurentQ {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    /// The Laurent polynomial when the denominator is trivial.
    pub fn as_laurent(&self) -> Option<&LaurentQ> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn inv(&self) -> Result<Self, QnumError> {
        RatQ::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, n: i32) -> Result<Self, QnumError> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = RatQ::one();
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    pub fn scale_q(&self, k: i64) -> Self {
        RatQ { num: self.num.shift(k), den: self.den.clone() }
    }

    /// Substitute `q -> q^d` (`d >= 1`).
    pub fn dilate(&self, d: i64) -> Self {
        if d == 1 {
            return self.clone();
        }
        Self::canonical(self.num.dilate(d), self.den.dilate(d))
    }

    /// Evaluation at a real point; fails at a pole.
    pub fn eval(&self, q0: f64) -> Result<f64, QnumError> {
        let d = self.den.eval(q0);
        if d == 0.0 || !d.is_finite() {
            return Err(QnumError::Pole { at: q0 });
        }
        Ok(self.num.eval(q0) / d)
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, q0: &BigRational) -> Result<BigRational, QnumError> {
        let ev = |x: &LaurentQ| {
            x.terms().fold(BigRational::zero(), |acc, (e, c)| {
                acc + c * num_traits::pow::Pow::pow(q0, e as i32)
            })
        };
        let d = ev(&self.den);
        if d.is_zero() {
            return Err(QnumError::Pole { at: q0.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(ev(&self.num) / d)
    }

    pub fn to_f64_at(&self, q0: f64) -> f64 {
        self.eval(q0).unwrap_or(f64::NAN)
    }

    /// Real constant if this is one.
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.den.is_one() {
            if let Some((c, 0)) = self.num.as_monomial() {
                return Some(c.clone());
            }
        }
        None
    }
}

impl fmt::Display for RatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap_num = self.num.len() > 1;
        if wrap_num {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        write!(f, "/({})", self.den)
    }
}

impl fmt::Debug for RatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatQ({self})")
    }
}

impl Zero for RatQ {
    fn zero() -> Self {
        RatQ::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatQ {
    fn one() -> Self {
        RatQ::one()
    }
}

impl<'a> Add<&'a RatQ> for &'a RatQ {
    type Output = RatQ;
    fn add(self, rhs: &RatQ) -> RatQ {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return RatQ::from(num);
            }
            return RatQ::canonical(num, self.den.clone());
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatQ::canonical(num, &self.den * &rhs.den)
    }
}

impl<'a> Sub<&'a RatQ> for &'a RatQ {
    type Output = RatQ;
    fn sub(self, rhs: &RatQ) -> RatQ {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RatQ> for &'a RatQ {
    type Output = RatQ;
    fn mul(self, rhs: &RatQ) -> RatQ {
        if self.is_zero() || rhs.is_zero() {
            return RatQ::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatQ::from(&self.num * &rhs.num);
        }
        RatQ::canonical(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl<'a> Div<&'a RatQ> for &'a RatQ {
    type Output = RatQ;
    /// Panics on division by zero; use [`RatQ::inv`] for a fallible path.
    fn div(self, rhs: &RatQ) -> RatQ {
        assert!(!rhs.is_zero(), "RatQ division by zero");
        RatQ::canonical(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for RatQ {
            type Output = RatQ;
            fn $m(self, rhs: RatQ) -> RatQ {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a RatQ> for RatQ {
            type Output = RatQ;
            fn $m(self, rhs: &RatQ) -> RatQ {
                (&self).$m(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&RatQ> for RatQ {
    fn add_assign(&mut self, rhs: &RatQ) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&RatQ> for RatQ {
    fn sub_assign(&mut self, rhs: &RatQ) {
        *self = &*self - rhs;
    }
}

impl Neg for &RatQ {
    type Output = RatQ;
    fn neg(self) -> RatQ {
        RatQ { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatQ {
    type Output = RatQ;
    fn neg(self) -> RatQ {
        RatQ { num: -self.num, den: self.den }
    }
}

impl std::iter::Sum for RatQ {
    fn sum<I: Iterator<Item = RatQ>>(iter: I) -> RatQ {
        iter.fold(RatQ::zero(), |a, b| &a + &b)
    }
}

impl std::iter::Product for RatQ {
    fn product<I: Iterator<Item = RatQ>>(iter: I) -> RatQ {
        iter.fold(RatQ::one(), |a, b| &a * &b)
    }
}

/// Convenience: the integer `n` as a rational function.
pub fn rq(n: i64) -> RatQ {
    RatQ::from(LaurentQ::constant(rat(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm1(e: i64) -> RatQ {
        RatQ::q_pow_minus_one(e)
    }

    #[test]
    fn reduces_common_factor() {
        let x = &qm1(2) / &qm1(4);
        assert_eq!(x.to_string(), "1/(q^2+1)");
        assert!((x.eval(2.0).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn q_powers_move_to_numerator() {
        let x = &RatQ::one() / &RatQ::from(&LaurentQ::q_pow(3) - &LaurentQ::q_pow(1));
        assert_eq!(x.denom().to_string(), "q^2-1");
        assert_eq!(x.numer().to_string(), "q^-1");
    }

    #[test]
    fn pole_is_reported() {
        let x = &RatQ::one() / &qm1(1);
        assert!(matches!(x.eval(1.0), Err(QnumError::Pole { .. })));
    }

    #[test]
    fn dilation_commutes_with_division() {
        let x = &qm1(2) / &qm1(6);
        assert_eq!(x.dilate(2), &qm1(4) / &qm1(12));
    }
}
