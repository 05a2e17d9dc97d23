//! Exact scalars: Laurent polynomials and rational functions in `q`,
//! q-integers, and Laurent polynomials in torus variables.

mod laurent;
mod parse;
pub(crate) mod poly;
mod ratq;
mod torus;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use laurent::LaurentQ;
pub(crate) use laurent::rat;
pub use parse::parse_ratq;
pub use ratq::{rq, RatQ};
pub use torus::TorusPoly;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QnumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at q = {at}")]
    Pole { at: f64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// `[n]_{q^d} = (q^{dn} - q^{-dn}) / (q^d - q^{-d})`, any integer `n`.
pub fn q_int(n: i64, d: i64) -> LaurentQ {
    assert!(d >= 1, "q_int needs d >= 1");
    let sign = if n < 0 { -1 } else { 1 };
    let m = n.abs();
    LaurentQ::from_terms((0..m).map(|k| (d * (m - 1 - 2 * k), rat(sign))))
}

pub fn q_factorial(n: u32, d: i64) -> LaurentQ {
    (1..=n as i64).fold(LaurentQ::one(), |acc, k| &acc * &q_int(k, d))
}

/// Gaussian binomial `[n choose m]_{q^d}`.
pub fn q_binomial(n: i64, m: i64, d: i64) -> Result<LaurentQ, QnumError> {
    if n < 0 || m < 0 || m > n {
        return Err(QnumError::Invalid(format!("q_binomial({n}, {m}) out of range")));
    }
    let num = RatQ::from(q_factorial(n as u32, d));
    let den = RatQ::from(&q_factorial(m as u32, d) * &q_factorial((n - m) as u32, d));
    let r = &num / &den;
    Ok(r.as_laurent().cloned().expect("Gaussian binomials are Laurent polynomials"))
}

/// Evaluation of an exact scalar at a real `q0 > 1`.
pub fn eval_scalar(x: &RatQ, q0: f64) -> Result<f64, QnumError> {
    x.eval(q0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// Numerical parameters shared by the trace pipelines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QParams {
    pub mode: Mode,
    /// `q` as a rational; exact-mode results are symbolic and only use this
    /// for reporting numeric values.
    pub q_num: i64,
    pub q_den: i64,
    pub trunc: usize,
    pub tol: f64,
}

impl Default for QParams {
    fn default() -> Self {
        QParams { mode: Mode::Exact, q_num: 2, q_den: 1, trunc: 40, tol: 1e-9 }
    }
}

impl QParams {
    pub fn float(q: f64, trunc: usize) -> Self {
        let (q_num, q_den) = rational_approx(q);
        QParams { mode: Mode::Float, q_num, q_den, trunc, tol: 1e-9 }
    }

    pub fn exact(q: i64) -> Self {
        QParams { mode: Mode::Exact, q_num: q, q_den: 1, ..Default::default() }
    }

    pub fn q(&self) -> f64 {
        self.q_num as f64 / self.q_den as f64
    }

    pub fn q_exact(&self) -> BigRational {
        BigRational::new(BigInt::from(self.q_num), BigInt::from(self.q_den))
    }

    pub fn validate(&self) -> Result<(), QnumError> {
        if self.q_den <= 0 || self.q_num <= self.q_den {
            return Err(QnumError::Invalid(format!("q must exceed 1, got {}", self.q())));
        }
        if self.trunc == 0 {
            return Err(QnumError::Invalid("truncation must be positive".into()));
        }
        Ok(())
    }
}

fn rational_approx(x: f64) -> (i64, i64) {
    let mut den = 1i64;
    while den < 1_000_000 && ((x * den as f64).round() - x * den as f64).abs() > 1e-12 {
        den *= 10;
    }
    ((x * den as f64).round() as i64, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn q_int_examples() {
        assert!(q_int(1, 1).is_one());
        assert_eq!(q_int(2, 1).to_string(), "q+q^-1");
        let x = q_int(3, 2);
        assert_eq!(x.to_string(), "q^4+1+q^-4");
        assert!((x.eval(2.0) - (16.0 + 1.0 + 1.0 / 16.0)).abs() < 1e-12);
        assert!(q_int(0, 3).is_zero());
    }

    #[test]
    fn q_int_recursion_up_to_twenty() {
        for n in 1..=20 {
            let lhs = q_int(n + 1, 1);
            let rhs = &LaurentQ::q_pow(1) * &q_int(n, 1) + LaurentQ::q_pow(-n);
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    // Pascal-type recursion for Gaussian binomials, independent of factorials.
    fn gauss(n: i64, m: i64) -> LaurentQ {
        if m == 0 || m == n {
            return LaurentQ::one();
        }
        &LaurentQ::q_pow(-m) * &gauss(n - 1, m) + &LaurentQ::q_pow(n - m) * &gauss(n - 1, m - 1)
    }

    #[test]
    fn binomial_matches_recursion() {
        for n in 0..=8 {
            for m in 0..=n {
                assert_eq!(q_binomial(n, m, 1).unwrap(), gauss(n, m), "({n},{m})");
            }
        }
        assert_eq!(q_binomial(4, 2, 1).unwrap().to_string(), "q^4+q^2+2+q^-2+q^-4");
        assert!(q_binomial(2, 3, 1).is_err());
    }

    #[test]
    fn binomial_specializes_near_one() {
        let b = q_binomial(6, 3, 2).unwrap();
        assert_eq!(b.at_one(), rat(20));
    }

    #[test]
    fn eval_examples() {
        let x = RatQ::from(&LaurentQ::q_pow(1) + &LaurentQ::q_pow(-1));
        assert!((eval_scalar(&x, 2.0).unwrap() - 2.5).abs() < 1e-15);
        let y = &RatQ::one() / &RatQ::q_pow_minus_one(2);
        assert!((eval_scalar(&y, 2.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    fn small_laurent() -> impl Strategy<Value = LaurentQ> {
        prop::collection::vec((-4i64..=4, -5i64..=5), 0..4)
            .prop_map(|v| LaurentQ::from_terms(v.into_iter().map(|(e, c)| (e, rat(c)))))
    }

    fn positive_laurent() -> impl Strategy<Value = LaurentQ> {
        prop::collection::vec((-4i64..=4, 1i64..=5), 1..4)
            .prop_map(|v| LaurentQ::from_terms(v.into_iter().map(|(e, c)| (e, rat(c)))))
    }

    fn small_ratq() -> impl Strategy<Value = RatQ> {
        (small_laurent(), small_laurent()).prop_map(|(a, b)| {
            if b.is_zero() {
                RatQ::from(a)
            } else {
                RatQ::new(a, b).unwrap()
            }
        })
    }

    proptest! {
        #[test]
        fn eval_is_multiplicative(a in positive_laurent(), b in positive_laurent()) {
            // positive coefficients keep evaluation free of cancellation
            let q0 = 1.7;
            let (x, y) = (a.eval(q0), b.eval(q0));
            let xy = (&a * &b).eval(q0);
            prop_assert!((xy - x * y).abs() <= 8.0 * f64::EPSILON * (x * y).abs());
        }

        #[test]
        fn equality_matches_cross_multiplication(a in small_ratq(), b in small_ratq()) {
            let same = a == b;
            let cross = (&(a.numer() * b.denom()) - &(b.numer() * a.denom())).is_zero();
            prop_assert_eq!(same, cross);
        }

        #[test]
        fn field_axioms(a in small_ratq(), b in small_ratq(), c in small_ratq()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
        }

        #[test]
        fn display_round_trips(a in small_ratq()) {
            prop_assert_eq!(parse_ratq(&a.to_string()).unwrap(), a);
        }
    }
}
