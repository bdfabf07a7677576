//! Reduced fractions of polynomials.

use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use super::gcd::poly_gcd;
use super::poly::{Poly, Vars};
use super::scalar::ExactScalar;

/// `num / den` with `gcd(num, den) = 1` and `den` monic in graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Builds and reduces `num / den`. Returns `None` when `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Option<RatFunc> {
        if den.is_zero() {
            return None;
        }
        let (num, den) = Poly::align(&num, &den);
        if num.is_zero() {
            return Some(RatFunc {
                den: Poly::one(num.vars().clone()),
                num,
            });
        }
        let g = poly_gcd(&num, &den);
        let num = num.exact_div(&g).expect("gcd divides numerator");
        let den = den.exact_div(&g).expect("gcd divides denominator");
        let lc = den.leading_coeff().inv().expect("nonzero denominator");
        Some(RatFunc {
            num: num.scale(&lc),
            den: den.scale(&lc),
        })
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        let den = Poly::one(p.vars().clone());
        RatFunc { num: p, den }
    }

    pub fn zero(vars: Vars) -> RatFunc {
        RatFunc::from_poly(Poly::zero(vars))
    }

    pub fn one(vars: Vars) -> RatFunc {
        RatFunc::from_poly(Poly::one(vars))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(self.num.add(&o.num), self.den.clone()).unwrap();
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        RatFunc::new(num, self.den.mul(&o.den)).unwrap()
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den)).unwrap()
    }

    pub fn inv(&self) -> Option<RatFunc> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RatFunc) -> Option<RatFunc> {
        Some(self.mul(&o.inv()?))
    }

    pub fn scale(&self, c: &ExactScalar) -> RatFunc {
        RatFunc {
            num: self.num.scale(c),
            den: if c.is_zero() {
                Poly::one(self.vars().clone())
            } else {
                self.den.clone()
            },
        }
    }

    /// Quotient rule.
    pub fn derivative(&self, idx: usize) -> RatFunc {
        let (num, den) = Poly::align(&self.num, &self.den);
        let n = num.derivative(idx).mul(&den).sub(&num.mul(&den.derivative(idx)));
        RatFunc::new(n, den.mul(&den)).unwrap()
    }

    pub fn eval(&self, p: &[ExactScalar]) -> Option<ExactScalar> {
        let d = self.den.eval(p);
        if d.is_zero() {
            return None;
        }
        Some(&self.num.eval(p) / &d)
    }

    pub fn eval_complex(&self, p: &[Complex64]) -> Complex64 {
        self.num.eval_complex(p) / self.den.eval_complex(p)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::parse::parse_poly;

    fn p(s: &str) -> Poly {
        parse_poly(s, &["x", "y"]).unwrap()
    }

    #[test]
    fn reduces_common_factor() {
        let r = RatFunc::new(p("x^2 - 1"), p("2*x - 2")).unwrap();
        assert_eq!(r.num(), &p("1/2*x + 1/2"));
        assert_eq!(r.den(), &p("1"));
        assert!(r.is_polynomial());
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(RatFunc::new(p("x"), p("0")).is_none());
    }

    #[test]
    fn quotient_rule() {
        let r = RatFunc::new(p("1"), p("x")).unwrap();
        let d = r.derivative(0);
        assert_eq!(d, RatFunc::new(p("-1"), p("x^2")).unwrap());
    }
}
