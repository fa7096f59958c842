//! Rational functions as reduced-on-a-best-effort pairs of [`MPoly`]s.
//!
//! Full gcd reduction is never needed: equality is decided by
//! cross-multiplication, and the denominators arising in this crate are
//! products of a few known polynomials (discriminants, Jacobian
//! determinants, covering monomials), so targeted cancellation keeps
//! sizes in check.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::cyc::CycNum;
use crate::exactalg::mpoly::{MPoly, Vars};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RatFn {
    num: MPoly,
    den: MPoly,
}

impl RatFn {
    pub fn new(num: MPoly, den: MPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = RatFn { num, den };
        r.reduce();
        r
    }

    pub fn from_poly(p: MPoly) -> Self {
        let one = MPoly::one(&p.vars);
        RatFn { num: p, den: one }
    }

    pub fn zero(vars: &Arc<Vars>) -> Self {
        Self::from_poly(MPoly::zero(vars))
    }

    pub fn one(vars: &Arc<Vars>) -> Self {
        Self::from_poly(MPoly::one(vars))
    }

    pub fn constant(vars: &Arc<Vars>, c: CycNum) -> Self {
        Self::from_poly(MPoly::constant(vars, c))
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.num.vars
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Returns the numerator if the denominator has been reduced to one.
    pub fn as_poly(&self) -> Option<&MPoly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = MPoly::one(&self.num.vars);
            return;
        }
        // strip common monomial content
        let cn = self.num.monomial_content();
        let cd = self.den.monomial_content();
        let common: Vec<u32> = cn.0.iter().zip(&cd.0).map(|(a, b)| *a.min(b)).collect();
        if common.iter().any(|&e| e > 0) {
            let m = crate::exactalg::mpoly::Mono(common);
            self.num = self.num.divide_by_mono(&m).unwrap();
            self.den = self.den.divide_by_mono(&m).unwrap();
        }
        if let Some(c) = self.den.as_constant() {
            let ci = c.inv().expect("zero denominator");
            self.num = self.num.scale(&ci);
            self.den = MPoly::one(&self.num.vars);
            return;
        }
        if let Some(q) = self.num.try_exact_div(&self.den) {
            self.num = q;
            self.den = MPoly::one(&self.num.vars);
            return;
        }
        // normalize leading coefficient of the denominator to 1
        let (_, lc) = self.den.leading().unwrap();
        if !lc.is_one() {
            let inv = lc.inv().unwrap();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    /// Cancel a known common factor as often as possible.
    pub fn cancel_factor(&mut self, f: &MPoly) {
        loop {
            match (self.num.try_exact_div(f), self.den.try_exact_div(f)) {
                (Some(n), Some(d)) => {
                    self.num = n;
                    self.den = d;
                }
                _ => break,
            }
        }
        self.reduce();
    }

    pub fn inv(&self) -> Result<RatFn> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFn::new(self.den.clone(), self.num.clone()))
    }

    pub fn derivative(&self, idx: usize) -> RatFn {
        let dn = self.num.derivative(idx);
        if self.den.is_one() {
            return RatFn::from_poly(dn);
        }
        let dd = self.den.derivative(idx);
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        let mut out = RatFn::new(num, &self.den * &self.den);
        out.cancel_factor(&self.den);
        out
    }

    pub fn substitute(&self, images: &[MPoly], target: &Arc<Vars>) -> RatFn {
        RatFn::new(
            self.num.substitute(images, target),
            self.den.substitute(images, target),
        )
    }

    pub fn scale(&self, c: &CycNum) -> RatFn {
        RatFn::new(self.num.scale(c), self.den.clone())
    }
}

impl PartialEq for RatFn {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RatFn {}

impl std::ops::Add for &RatFn {
    type Output = RatFn;
    fn add(self, rhs: &RatFn) -> RatFn {
        if self.den == rhs.den {
            return RatFn::new(&self.num + &rhs.num, self.den.clone());
        }
        // try den divisibility to keep the common denominator small
        if let Some(q) = rhs.den.try_exact_div(&self.den) {
            return RatFn::new(&(&self.num * &q) + &rhs.num, rhs.den.clone());
        }
        if let Some(q) = self.den.try_exact_div(&rhs.den) {
            return RatFn::new(&self.num + &(&rhs.num * &q), self.den.clone());
        }
        RatFn::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl std::ops::Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, rhs: &RatFn) -> RatFn {
        self + &(-rhs)
    }
}

impl std::ops::Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, rhs: &RatFn) -> RatFn {
        if self.is_zero() || rhs.is_zero() {
            return RatFn::zero(&self.num.vars);
        }
        // cross-cancel before multiplying
        let (mut an, mut bd) = (self.num.clone(), rhs.den.clone());
        if let Some(q) = an.try_exact_div(&bd) {
            an = q;
            bd = MPoly::one(&an.vars);
        }
        let (mut bn, mut ad) = (rhs.num.clone(), self.den.clone());
        if let Some(q) = bn.try_exact_div(&ad) {
            bn = q;
            ad = MPoly::one(&bn.vars);
        }
        RatFn::new(&an * &bn, &ad * &bd)
    }
}

impl std::ops::Div for &RatFn {
    type Output = RatFn;
    fn div(self, rhs: &RatFn) -> RatFn {
        self * &rhs.inv().expect("division by zero RatFn")
    }
}

impl std::ops::Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! owned_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl std::ops::$trait for RatFn {
            type Output = RatFn;
            fn $method(self, rhs: RatFn) -> RatFn {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
        impl std::ops::$trait<&RatFn> for RatFn {
            type Output = RatFn;
            fn $method(self, rhs: &RatFn) -> RatFn {
                std::ops::$trait::$method(&self, rhs)
            }
        }
        impl std::ops::$trait<RatFn> for &RatFn {
            type Output = RatFn;
            fn $method(self, rhs: RatFn) -> RatFn {
                std::ops::$trait::$method(self, &rhs)
            }
        }
    )*};
}
owned_ops!(Add::add, Sub::sub, Mul::mul, Div::div);

impl std::ops::Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        -(&self)
    }
}

impl fmt::Display for RatFn {
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
    use crate::exactalg::mpoly::Vars;

    #[test]
    fn reduce_collapses_exact_quotients() {
        let vars = Vars::new(&[("u", 1), ("v", 1)]);
        let u = MPoly::var(&vars, 0);
        let v = MPoly::var(&vars, 1);
        let r = RatFn::new(&(&u * &u) - &(&v * &v), &u - &v);
        assert!(r.is_polynomial());
        assert_eq!(*r.num(), &u + &v);
    }

    #[test]
    fn cross_mul_equality() {
        let vars = Vars::new(&[("u", 1), ("v", 1)]);
        let u = MPoly::var(&vars, 0);
        let v = MPoly::var(&vars, 1);
        let a = RatFn::new(u.clone(), v.clone());
        let b = RatFn::new(&u * &u, &u * &v);
        assert_eq!(a, b);
    }

    #[test]
    fn derivative_quotient_rule() {
        let vars = Vars::new(&[("u", 1)]);
        let u = MPoly::var(&vars, 0);
        // d/du (1/u) = -1/u^2
        let r = RatFn::new(MPoly::one(&vars), u.clone());
        let d = r.derivative(0);
        assert_eq!(d, RatFn::new(-&MPoly::one(&vars), &u * &u));
    }
}
