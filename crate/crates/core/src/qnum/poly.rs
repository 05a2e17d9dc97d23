//! Dense univariate polynomials over the rationals, used only to bring
//! rational functions in `q` to lowest terms.

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Coefficients lowest degree first; no trailing zeros.
pub(crate) type Poly = Vec<BigRational>;

pub(crate) fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub(crate) fn degree(p: &Poly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

fn make_monic(p: &mut Poly) {
    if let Some(lc) = p.last().cloned() {
        if !lc.is_one() {
            for c in p.iter_mut() {
                *c /= &lc;
            }
        }
    }
}

/// Remainder of `a` modulo `b` (`b` nonzero).
fn rem(mut a: Poly, b: &Poly) -> Poly {
    let db = b.len() - 1;
    let lb = b[db].clone();
    while a.len() > db {
        let da = a.len() - 1;
        let factor = &a[da] / &lb;
        let shift = da - db;
        for (i, c) in b.iter().enumerate() {
            if !c.is_zero() {
                a[shift + i] -= &factor * c;
            }
        }
        trim(&mut a);
    }
    a
}

/// Monic greatest common divisor.
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (a.clone(), b.clone());
    trim(&mut x);
    trim(&mut y);
    make_monic(&mut x);
    make_monic(&mut y);
    while !y.is_empty() {
        let mut r = rem(x, &y);
        make_monic(&mut r);
        x = y;
        y = r;
    }
    x
}

/// Exact quotient `a / b`; the caller guarantees divisibility.
pub(crate) fn div_exact(a: &Poly, b: &Poly) -> Poly {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return Vec::new();
    }
    let mut r = a.clone();
    let mut quot = vec![BigRational::zero(); a.len() - db];
    let lb = b[db].clone();
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = &r[dr] / &lb;
        let shift = dr - db;
        for (i, c) in b.iter().enumerate() {
            if !c.is_zero() {
                r[shift + i] -= &factor * c;
            }
        }
        quot[shift] = factor;
        trim(&mut r);
    }
    debug_assert!(r.is_empty(), "inexact polynomial division");
    trim(&mut quot);
    quot
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn p(c: &[i64]) -> Poly {
        let mut v: Poly = c.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
        trim(&mut v);
        v
    }

    #[test]
    fn gcd_of_cyclotomic_like_factors() {
        // (x^2 - 1) and (x^4 - 1) share x^2 - 1
        let g = gcd(&p(&[-1, 0, 1]), &p(&[-1, 0, 0, 0, 1]));
        assert_eq!(g, p(&[-1, 0, 1]));
        let q = div_exact(&p(&[-1, 0, 0, 0, 1]), &g);
        assert_eq!(q, p(&[1, 0, 1]));
    }

    #[test]
    fn coprime_gives_one() {
        assert_eq!(gcd(&p(&[1, 1]), &p(&[-1, 1])), p(&[1]));
    }
}
