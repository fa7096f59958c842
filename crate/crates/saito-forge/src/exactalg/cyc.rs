//! Exact cyclotomic arithmetic.
//!
//! A [`CycNum`] is an element of the field Q(zeta_N) for some order N,
//! stored as an integer polynomial in the power basis
//! `1, zeta, ..., zeta^(phi(N)-1)` over a single positive denominator,
//! reduced modulo the N-th cyclotomic polynomial. Mixed-order arithmetic
//! promotes both operands to the field of order lcm(N, N') first, which
//! is always possible and exact.
//!
//! Orders are normalized so that N is never congruent to 2 mod 4
//! (Q(zeta_{2m}) = Q(zeta_m) for odd m), which keeps the normal form
//! unique per field. The common-denominator layout keeps the hot
//! multiply/reduce loop in plain integer arithmetic; gcd normalization
//! happens once per operation.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Euler totient for small orders.
pub fn phi(n: u32) -> usize {
    let mut n = n as u64;
    let mut result = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result as usize
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

// ---- integer univariate helpers, coefficients ascending ----

fn itrim(v: &mut Vec<BigInt>) {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
}

fn imul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    itrim(&mut out);
    out
}

/// Remainder of `a` modulo the monic integer polynomial `m`.
fn irem_monic(mut r: Vec<BigInt>, m: &[BigInt]) -> Vec<BigInt> {
    itrim(&mut r);
    let dm = m.len() - 1;
    debug_assert!(m[dm].is_one());
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = r[dr].clone();
        if !c.is_zero() {
            for k in 0..=dm {
                let t = &c * &m[k];
                r[dr - dm + k] -= t;
            }
        }
        itrim(&mut r);
        if r.len() > dr {
            break; // safety: should strictly shrink
        }
    }
    r
}

/// Exact quotient of `a` by `b` over Z (used for cyclotomic polynomials).
fn iexact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    itrim(&mut r);
    let db = b.len() - 1;
    let lead = &b[db];
    let mut q = vec![BigInt::zero(); r.len().saturating_sub(db)];
    while !r.is_empty() && r.len() - 1 >= db {
        let dr = r.len() - 1;
        let (c, rem) = r[dr].div_rem(lead);
        assert!(rem.is_zero(), "inexact integer division");
        q[dr - db] = c.clone();
        for k in 0..=db {
            let t = &c * &b[k];
            r[dr - db + k] -= t;
        }
        itrim(&mut r);
    }
    assert!(r.is_empty(), "inexact polynomial division");
    q
}

// rational univariate division for the inverse path
fn rtrim(v: &mut Vec<Rat>) {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
}

fn rdivmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut r = a.to_vec();
    rtrim(&mut r);
    let db = b.len() - 1;
    let lead = &b[db];
    let mut q = vec![Rat::zero(); r.len().saturating_sub(db).max(1)];
    while r.len() > db {
        let dr = r.len() - 1;
        let c = &r[dr] / lead;
        q[dr - db] = c.clone();
        for k in 0..=db {
            let t = &c * &b[k];
            r[dr - db + k] -= t;
        }
        rtrim(&mut r);
    }
    rtrim(&mut q);
    (q, r)
}

fn rmul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    rtrim(&mut out);
    out
}

fn rsub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] = c.clone();
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    rtrim(&mut out);
    out
}

/// Extended Euclid against the (irreducible) modulus: u with u*a = 1 mod m.
fn rinv_mod(a: &[Rat], m: &[Rat]) -> Vec<Rat> {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    rtrim(&mut r1);
    let mut u0: Vec<Rat> = Vec::new();
    let mut u1: Vec<Rat> = vec![Rat::one()];
    while r1.len() > 1 {
        let (q, r) = rdivmod(&r0, &r1);
        let u2 = rsub(&u0, &rmul(&q, &u1));
        r0 = r1;
        r1 = r;
        u0 = u1;
        u1 = u2;
    }
    assert!(!r1.is_empty(), "element not invertible (gcd nonunit)");
    let g = r1[0].clone();
    u1.iter().map(|c| c / &g).collect()
}

fn cyclotomic_cache() -> &'static Mutex<HashMap<u32, Vec<BigInt>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<BigInt>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The N-th cyclotomic polynomial, monic with integer coefficients,
/// ascending.
pub fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    if let Some(p) = cyclotomic_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    let p = if n == 1 {
        vec![-BigInt::one(), BigInt::one()]
    } else {
        let mut num = vec![BigInt::zero(); n as usize + 1];
        num[0] = -BigInt::one();
        num[n as usize] = BigInt::one();
        let mut den = vec![BigInt::one()];
        for d in divisors(n) {
            if d < n {
                den = imul(&den, &cyclotomic_poly(d));
            }
        }
        iexact_div(&num, &den)
    };
    cyclotomic_cache().lock().unwrap().insert(n, p.clone());
    p
}

/// Normalize an order: drop the factor 2 when N = 2 mod 4.
fn normal_order(n: u32) -> u32 {
    if n % 4 == 2 {
        n / 2
    } else {
        n
    }
}

/// An exact element of the cyclotomic field Q(zeta_order), stored as an
/// integer coefficient vector over one positive denominator.
#[derive(Clone, Debug)]
pub struct CycNum {
    order: u32,
    den: BigInt,
    /// Length phi(order), entry k is den times the coefficient of zeta^k.
    coeffs: Vec<BigInt>,
}

impl CycNum {
    pub fn zero() -> Self {
        CycNum {
            order: 1,
            den: BigInt::one(),
            coeffs: vec![BigInt::zero()],
        }
    }

    pub fn one() -> Self {
        CycNum {
            order: 1,
            den: BigInt::one(),
            coeffs: vec![BigInt::one()],
        }
    }

    pub fn from_rat(r: Rat) -> Self {
        CycNum {
            order: 1,
            den: r.denom().clone(),
            coeffs: vec![r.numer().clone()],
        }
    }

    pub fn from_i64(n: i64) -> Self {
        CycNum {
            order: 1,
            den: BigInt::one(),
            coeffs: vec![BigInt::from(n)],
        }
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Self::from_rat(rat(n, d))
    }

    /// Primitive N-th root of unity.
    pub fn zeta(n: u32) -> Self {
        assert!(n >= 1);
        if n == 1 {
            return Self::one();
        }
        if n == 2 {
            return Self::from_i64(-1);
        }
        if n % 4 == 2 {
            // zeta_{2m} = -zeta_m^{(m+1)/2} for odd m
            let m = n / 2;
            return -Self::zeta(m).pow(((m + 1) / 2) as i64);
        }
        let deg = phi(n);
        let mut coeffs = vec![BigInt::zero(); deg];
        coeffs[1] = BigInt::one();
        CycNum {
            order: n,
            den: BigInt::one(),
            coeffs,
        }
    }

    /// zeta_N^k for any integer k.
    pub fn zeta_pow(n: u32, k: i64) -> Self {
        let n_ = n as i64;
        let k = ((k % n_) + n_) % n_;
        Self::zeta(n).pow(k)
    }

    /// The imaginary unit i = zeta_4.
    pub fn i() -> Self {
        Self::zeta(4)
    }

    /// i*sqrt(3) = zeta_3 - zeta_3^2.
    pub fn i_sqrt3() -> Self {
        Self::zeta(3) - Self::zeta(3).pow(2)
    }

    /// sqrt(2) = zeta_8 + zeta_8^{-1}.
    pub fn sqrt2() -> Self {
        Self::zeta(8) + Self::zeta_pow(8, -1)
    }

    /// sqrt(3) = -i * (i*sqrt(3)).
    pub fn sqrt3() -> Self {
        -Self::i() * Self::i_sqrt3()
    }

    /// sqrt(5) = zeta_5 - zeta_5^2 - zeta_5^3 + zeta_5^4.
    pub fn sqrt5() -> Self {
        Self::zeta(5) - Self::zeta(5).pow(2) - Self::zeta(5).pow(3) + Self::zeta(5).pow(4)
    }

    /// Golden ratio tau = zeta_5 + zeta_5^{-1} + 1.
    pub fn tau() -> Self {
        Self::zeta(5) + Self::zeta_pow(5, -1) + Self::one()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Returns the value as a rational if it is one.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(Rat::new(self.coeffs[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        let r = self.as_rat()?;
        if r.is_integer() {
            r.to_integer().try_into().ok()
        } else {
            None
        }
    }

    /// Coefficients as rationals in the power basis.
    pub fn rat_coeffs(&self) -> Vec<Rat> {
        self.coeffs
            .iter()
            .map(|c| Rat::new(c.clone(), self.den.clone()))
            .collect()
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in &mut self.coeffs {
                *c = -&*c;
            }
        }
        let mut g = self.den.clone();
        for c in &self.coeffs {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() && !g.is_zero() {
            self.den = &self.den / &g;
            for c in &mut self.coeffs {
                *c = &*c / &g;
            }
        }
        if self.is_zero() {
            self.den = BigInt::one();
        }
        self.demote_constant();
    }

    fn demote_constant(&mut self) {
        if self.order > 1 && self.coeffs[1..].iter().all(|c| c.is_zero()) {
            self.coeffs.truncate(1);
            self.order = 1;
        }
    }

    fn reduce_at_order(order: u32, den: BigInt, raw: Vec<BigInt>) -> Self {
        let modp = cyclotomic_poly(order);
        let mut r = irem_monic(raw, &modp);
        let deg = phi(order);
        r.resize(deg, BigInt::zero());
        let mut out = CycNum {
            order,
            den,
            coeffs: r,
        };
        out.normalize();
        out
    }

    /// Embed into Q(zeta_m); requires order | m. The result keeps order m
    /// even when the value is rational, so promoted pairs stay aligned.
    pub fn to_order(&self, m: u32) -> Self {
        assert_eq!(
            m % self.order,
            0,
            "cannot promote Q(zeta_{}) into Q(zeta_{})",
            self.order,
            m
        );
        if m == self.order {
            return self.clone();
        }
        let deg = phi(m);
        if self.order == 1 {
            let mut coeffs = vec![BigInt::zero(); deg];
            coeffs[0] = self.coeffs[0].clone();
            return CycNum {
                order: m,
                den: self.den.clone(),
                coeffs,
            };
        }
        let step = (m / self.order) as usize;
        let mut raw = vec![BigInt::zero(); (self.coeffs.len() - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                raw[k * step] = c.clone();
            }
        }
        let modp = cyclotomic_poly(m);
        let mut r = irem_monic(raw, &modp);
        r.resize(deg, BigInt::zero());
        CycNum {
            order: m,
            den: self.den.clone(),
            coeffs: r,
        }
    }

    fn lcm_order(a: u32, b: u32) -> u32 {
        normal_order(num_integer::lcm(a, b))
    }

    pub fn pow(&self, mut e: i64) -> Self {
        if e < 0 {
            return self.inv().expect("zero to negative power").pow(-e);
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.order == 1 {
            return Ok(Self::from_rat(Rat::new(
                self.den.clone(),
                self.coeffs[0].clone(),
            )));
        }
        let modp: Vec<Rat> = cyclotomic_poly(self.order)
            .iter()
            .map(|c| Rat::from_integer(c.clone()))
            .collect();
        let a = self.rat_coeffs();
        let inv = rinv_mod(&a, &modp);
        // clear denominators
        let mut den = BigInt::one();
        for c in &inv {
            den = den.lcm(c.denom());
        }
        let coeffs: Vec<BigInt> = {
            let mut v: Vec<BigInt> = inv.iter().map(|c| (c * Rat::from_integer(den.clone())).to_integer()).collect();
            v.resize(phi(self.order), BigInt::zero());
            v
        };
        let mut out = CycNum {
            order: self.order,
            den,
            coeffs,
        };
        out.normalize();
        Ok(out)
    }

    /// Multiply by a plain rational.
    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() || self.is_zero() {
            return Self::zero();
        }
        let mut out = CycNum {
            order: self.order,
            den: &self.den * r.denom(),
            coeffs: self.coeffs.iter().map(|c| c * r.numer()).collect(),
        };
        out.normalize();
        out
    }

    /// A deterministic key for hashing/dedup at a fixed promoted order.
    pub fn key_at_order(&self, m: u32) -> String {
        let p = self.to_order(m);
        let mut parts: Vec<String> = p.coeffs.iter().map(|c| c.to_string()).collect();
        parts.push(p.den.to_string());
        parts.join(",")
    }
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.den == other.den && self.coeffs == other.coeffs;
        }
        let m = Self::lcm_order(self.order, other.order);
        let a = self.to_order(m);
        let b = other.to_order(m);
        // both normalized except possibly non-demoted; cross-multiply dens
        a.coeffs
            .iter()
            .zip(&b.coeffs)
            .all(|(x, y)| x * &b.den == y * &a.den)
    }
}

impl Eq for CycNum {}

fn add_like(a: &CycNum, b: &CycNum, negate: bool) -> CycNum {
    debug_assert_eq!(a.order, b.order);
    let g = a.den.gcd(&b.den);
    let fa = &b.den / &g;
    let fb = &a.den / &g;
    let den = &a.den * &fa;
    let coeffs: Vec<BigInt> = a
        .coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| {
            let t = x * &fa;
            let u = y * &fb;
            if negate {
                t - u
            } else {
                t + u
            }
        })
        .collect();
    let mut out = CycNum {
        order: a.order,
        den,
        coeffs,
    };
    out.normalize();
    out
}

fn mul_same_order(a: &CycNum, b: &CycNum) -> CycNum {
    if a.is_zero() || b.is_zero() {
        return CycNum::zero();
    }
    if a.order == 1 {
        let mut out = CycNum {
            order: 1,
            den: &a.den * &b.den,
            coeffs: vec![&a.coeffs[0] * &b.coeffs[0]],
        };
        out.normalize();
        return out;
    }
    let raw = imul(&a.coeffs, &b.coeffs);
    CycNum::reduce_at_order(a.order, &a.den * &b.den, raw)
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait for &CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &CycNum) -> CycNum {
                dispatch(self, rhs, stringify!($method))
            }
        }
        impl std::ops::$trait for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: CycNum) -> CycNum {
                (&self) $op (&rhs)
            }
        }
        impl std::ops::$trait<&CycNum> for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &CycNum) -> CycNum {
                (&self) $op rhs
            }
        }
        impl std::ops::$trait<CycNum> for &CycNum {
            type Output = CycNum;
            fn $method(self, rhs: CycNum) -> CycNum {
                self $op (&rhs)
            }
        }
    };
}

fn dispatch(a: &CycNum, b: &CycNum, op: &str) -> CycNum {
    match op {
        "mul" => {
            if a.order == b.order {
                return mul_same_order(a, b);
            }
            if a.order == 1 {
                return b.scale(&Rat::new(a.coeffs[0].clone(), a.den.clone()));
            }
            if b.order == 1 {
                return a.scale(&Rat::new(b.coeffs[0].clone(), b.den.clone()));
            }
            let m = CycNum::lcm_order(a.order, b.order);
            mul_same_order(&a.to_order(m), &b.to_order(m))
        }
        "add" | "sub" => {
            let negate = op == "sub";
            if a.order == b.order {
                return add_like(a, b, negate);
            }
            let m = CycNum::lcm_order(a.order, b.order);
            add_like(&a.to_order(m), &b.to_order(m), negate)
        }
        "div" => {
            if b.order == 1 {
                return a.scale(&Rat::new(b.den.clone(), b.coeffs[0].clone()));
            }
            let inv = b.inv().expect("division by zero CycNum");
            dispatch(a, &inv, "mul")
        }
        _ => unreachable!(),
    }
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);
impl_binop!(Div, div, /);

impl std::ops::Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            order: self.order,
            den: self.den.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl std::ops::Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -(&self)
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rc = self.rat_coeffs();
        if self.order == 1 {
            return write!(f, "{}", fmt_rat(&rc[0]));
        }
        let mut parts = Vec::new();
        for (k, c) in rc.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let base = if k == 0 {
                fmt_rat(c)
            } else {
                let z = if k == 1 {
                    format!("z{}", self.order)
                } else {
                    format!("z{}^{}", self.order, k)
                };
                if c.is_one() {
                    z
                } else if (-c).is_one() {
                    format!("-{}", z)
                } else {
                    format!("{}*{}", fmt_rat(c), z)
                }
            };
            parts.push(base);
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut s = parts[0].clone();
        for p in &parts[1..] {
            if let Some(stripped) = p.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(stripped);
            } else {
                s.push_str(" + ");
                s.push_str(p);
            }
        }
        write!(f, "{}", s)
    }
}

#[derive(Serialize, Deserialize)]
struct CycNumWire {
    order: u32,
    coeffs: Vec<String>,
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycNumWire {
            order: self.order,
            coeffs: self.rat_coeffs().iter().map(fmt_rat).collect(),
        }
        .serialize(s)
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = CycNumWire::deserialize(d)?;
        if wire.order == 0 || normal_order(wire.order) != wire.order {
            return Err(D::Error::custom("invalid cyclotomic order"));
        }
        if wire.coeffs.len() != phi(wire.order) {
            return Err(D::Error::custom("coefficient count != phi(order)"));
        }
        let mut rats = Vec::with_capacity(wire.coeffs.len());
        for c in &wire.coeffs {
            rats.push(parse_rat(c).ok_or_else(|| D::Error::custom("bad rational"))?);
        }
        let mut den = BigInt::one();
        for r in &rats {
            den = den.lcm(r.denom());
        }
        let coeffs = rats
            .iter()
            .map(|r| (r * Rat::from_integer(den.clone())).to_integer())
            .collect();
        let mut out = CycNum {
            order: wire.order,
            den,
            coeffs,
        };
        out.normalize();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta4_squared_is_minus_one() {
        let i = CycNum::zeta(4);
        assert_eq!(&i * &i, CycNum::from_i64(-1));
    }

    #[test]
    fn i_sqrt3_squared_is_minus_three() {
        let z = CycNum::i_sqrt3();
        assert_eq!(&z * &z, CycNum::from_i64(-3));
    }

    #[test]
    fn sqrt5_squared_is_five() {
        // oracle: expand (z - z^2 - z^3 + z^4)^2 by hand and reduce with
        // z^5 = 1 and 1 + z + z^2 + z^3 + z^4 = 0; the result is 5.
        let s = CycNum::sqrt5();
        assert_eq!(&s * &s, CycNum::from_i64(5));
    }

    #[test]
    fn sqrt2_squared_is_two() {
        let s = CycNum::sqrt2();
        assert_eq!(&s * &s, CycNum::from_i64(2));
    }

    #[test]
    fn tau_is_golden() {
        let t = CycNum::tau();
        assert_eq!(&t * &t, &t + &CycNum::one());
        let half = CycNum::rational(1, 2);
        assert_eq!(t, (CycNum::one() + CycNum::sqrt5()) * half);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = CycNum::zeta(12) + CycNum::rational(3, 7);
        let b = a.inv().unwrap();
        assert_eq!(&a * &b, CycNum::one());
        assert!(CycNum::zero().inv().is_err());
    }

    #[test]
    fn promotion_commutes_with_arithmetic() {
        let a = CycNum::zeta(3);
        let b = CycNum::zeta(4);
        let c = &a + &b;
        let a12 = a.to_order(12);
        let b12 = b.to_order(12);
        assert_eq!(c, &a12 + &b12);
        assert_eq!(&a * &b, &a12 * &b12);
    }

    #[test]
    fn order_normalization() {
        let z6 = CycNum::zeta(6);
        assert_eq!(z6.order(), 3);
        assert_eq!(z6.pow(6), CycNum::one());
        assert_eq!(z6.pow(3), CycNum::from_i64(-1));
    }

    #[test]
    fn denominators_normalize() {
        let a = CycNum::rational(2, 4);
        assert_eq!(a, CycNum::rational(1, 2));
        let b = CycNum::rational(6, 3);
        assert_eq!(b.as_i64(), Some(2));
        let c = CycNum::rational(1, -2);
        assert_eq!(c, CycNum::rational(-1, 2));
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(CycNum::rational(-3, 2).to_string(), "-3/2");
        let z = CycNum::zeta(8);
        assert_eq!(z.to_string(), "z8");
        assert_eq!(parse_rat("7/3"), Some(rat(7, 3)));
        assert_eq!(parse_rat("1/0"), None);
    }
}
