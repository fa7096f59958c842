//! Sparse multivariate polynomials over [`CycNum`] with a weighted grading.
//!
//! Terms are kept in a BTreeMap under graded-lex monomial order (total
//! exponent first, then lex), so iteration order, printing and
//! serialization are canonical. No zero coefficients are ever stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::cyc::{CycNum, Rat};

/// An ordered variable set with positive integer weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vars {
    pub names: Vec<String>,
    pub weights: Vec<i64>,
}

impl Vars {
    pub fn new(spec: &[(&str, i64)]) -> Arc<Vars> {
        Arc::new(Vars {
            names: spec.iter().map(|(n, _)| n.to_string()).collect(),
            weights: spec.iter().map(|(_, w)| *w).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Exponent vector under graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    fn total(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
pub struct MPoly {
    pub vars: Arc<Vars>,
    terms: BTreeMap<Mono, CycNum>,
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        *self.vars == *other.vars && self.terms == other.terms
    }
}

impl Eq for MPoly {}

impl MPoly {
    pub fn zero(vars: &Arc<Vars>) -> Self {
        MPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &Arc<Vars>) -> Self {
        Self::constant(vars, CycNum::one())
    }

    pub fn constant(vars: &Arc<Vars>, c: CycNum) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Mono(vec![0; vars.len()]), c);
        }
        p
    }

    pub fn var(vars: &Arc<Vars>, idx: usize) -> Self {
        Self::monomial(vars, &{
            let mut e = vec![0; vars.len()];
            e[idx] = 1;
            e
        }, CycNum::one())
    }

    pub fn var_pow(vars: &Arc<Vars>, idx: usize, e: u32) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[idx] = e;
        Self::monomial(vars, &exps, CycNum::one())
    }

    pub fn monomial(vars: &Arc<Vars>, exps: &[u32], coeff: CycNum) -> Self {
        assert_eq!(exps.len(), vars.len());
        let mut p = Self::zero(vars);
        if !coeff.is_zero() {
            p.terms.insert(Mono(exps.to_vec()), coeff);
        }
        p
    }

    pub fn from_terms(vars: &Arc<Vars>, terms: Vec<(Vec<u32>, CycNum)>) -> Self {
        let mut p = Self::zero(vars);
        for (exps, c) in terms {
            p.add_term(Mono(exps), c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map_or(false, |(m, c)| m.total() == 0 && c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.leading().unwrap().0.total() == 0)
    }

    pub fn as_constant(&self) -> Option<CycNum> {
        if self.terms.is_empty() {
            return Some(CycNum::zero());
        }
        if self.is_constant() {
            return Some(self.terms.values().next().unwrap().clone());
        }
        None
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &CycNum)> {
        self.terms.iter()
    }

    fn add_term(&mut self, m: Mono, c: CycNum) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn leading(&self) -> Option<(&Mono, &CycNum)> {
        self.terms.iter().next_back()
    }

    fn check_vars(&self, other: &Self) {
        assert!(
            *self.vars == *other.vars,
            "mixed variable sets: {:?} vs {:?}",
            self.vars.names,
            other.vars.names
        );
    }

    pub fn scale(&self, c: &CycNum) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        let mut out = Self::zero(&self.vars);
        for (m, a) in &self.terms {
            out.terms.insert(m.clone(), a * c);
        }
        out
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&CycNum::from_rat(r.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, idx: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[idx] = e - 1;
            out.add_term(Mono(exps), c * &CycNum::from_i64(e as i64));
        }
        out
    }

    /// Weighted degree of a monomial under this poly's weights.
    pub fn mono_weight(&self, m: &Mono) -> i64 {
        m.0.iter()
            .zip(&self.vars.weights)
            .map(|(&e, &w)| e as i64 * w)
            .sum()
    }

    /// Maximum weighted degree over all terms (None for the zero poly).
    pub fn weighted_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| self.mono_weight(m)).max()
    }

    /// Some(d) iff nonzero and every term has weighted degree d.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys();
        let first = self.mono_weight(it.next()?);
        for m in it {
            if self.mono_weight(m) != first {
                return None;
            }
        }
        Some(first)
    }

    /// Splits into weighted-homogeneous components, ascending in degree.
    pub fn homogeneous_parts(&self) -> Vec<(i64, MPoly)> {
        let mut parts: BTreeMap<i64, MPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let d = self.mono_weight(m);
            parts
                .entry(d)
                .or_insert_with(|| Self::zero(&self.vars))
                .add_term(m.clone(), c.clone());
        }
        parts.into_iter().collect()
    }

    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0)
    }

    /// The coefficient of `var^k` as a polynomial with that exponent removed.
    pub fn coeff_of_power(&self, idx: usize, k: u32) -> Self {
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            if m.0[idx] == k {
                let mut exps = m.0.clone();
                exps[idx] = 0;
                out.add_term(Mono(exps), c.clone());
            }
        }
        out
    }

    pub fn add_assign_poly(&mut self, other: &MPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// Substitute each variable by the given image (all over `target`
    /// vars), by iterated Horner evaluation in the first variable.
    pub fn substitute(&self, images: &[MPoly], target: &Arc<Vars>) -> MPoly {
        assert_eq!(images.len(), self.vars.len());
        if self.is_zero() {
            return MPoly::zero(target);
        }
        if images.is_empty() {
            return MPoly::constant(target, self.as_constant().unwrap());
        }
        let dmax = self.degree_in(0);
        // coefficients of var0^k, each substituted in the remaining vars
        let rest_vars = Arc::new(Vars {
            names: self.vars.names[1..].to_vec(),
            weights: self.vars.weights[1..].to_vec(),
        });
        let mut acc = MPoly::zero(target);
        let mut k = dmax as i64;
        while k >= 0 {
            let coeff_k = {
                let mut q = MPoly::zero(&rest_vars);
                for (m, c) in &self.terms {
                    if m.0[0] == k as u32 {
                        q.add_term(Mono(m.0[1..].to_vec()), c.clone());
                    }
                }
                q
            };
            let coeff_img = coeff_k.substitute(&images[1..], target);
            if acc.is_zero() {
                acc = coeff_img;
            } else {
                acc = &acc * &images[0];
                acc.add_assign_poly(&coeff_img);
            }
            k -= 1;
        }
        acc
    }

    /// Componentwise min of exponents over all terms.
    pub fn monomial_content(&self) -> Mono {
        let n = self.vars.len();
        let mut content = vec![u32::MAX; n];
        for m in self.terms.keys() {
            for i in 0..n {
                content[i] = content[i].min(m.0[i]);
            }
        }
        if self.terms.is_empty() {
            content = vec![0; n];
        }
        Mono(content)
    }

    pub fn divide_by_mono(&self, m: &Mono) -> Option<Self> {
        let mut out = Self::zero(&self.vars);
        for (t, c) in &self.terms {
            if !m.divides(t) {
                return None;
            }
            out.terms.insert(t.div(m), c.clone());
        }
        Some(out)
    }

    /// Exact division by a single divisor; fails loudly when not divisible.
    pub fn exact_div(&self, den: &MPoly) -> Result<MPoly> {
        self.check_vars(den);
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(&self.vars));
        }
        if let Some(c) = den.as_constant() {
            let ci = c.inv()?;
            return Ok(self.scale(&ci));
        }
        let (dlm, dlc) = den.leading().unwrap();
        let dlm = dlm.clone();
        let dlc_inv = dlc.inv()?;
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.vars);
        while let Some((rlm, rlc)) = rem.leading() {
            if !dlm.divides(rlm) {
                return Err(Error::NotDivisible(format!(
                    "leading term not divisible ({} terms remain)",
                    rem.num_terms()
                )));
            }
            let qm = rlm.div(&dlm);
            let qc = rlc * &dlc_inv;
            quot.add_term(qm.clone(), qc.clone());
            // rem -= (qc * qm) * den
            let mut sub = Self::zero(&self.vars);
            for (m, c) in &den.terms {
                sub.add_term(m.mul(&qm), c * &qc);
            }
            rem = &rem - &sub;
        }
        Ok(quot)
    }

    pub fn try_exact_div(&self, den: &MPoly) -> Option<MPoly> {
        self.exact_div(den).ok()
    }

    /// Euler-degree operator: sum_i w_i x_i d/dx_i applied via the weights.
    pub fn euler_apply(&self) -> Self {
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let d = self.mono_weight(m);
            out.add_term(m.clone(), c * &CycNum::from_i64(d));
        }
        out
    }

    /// Rename/reorder variables into a superset variable ring.
    pub fn embed(&self, target: &Arc<Vars>) -> MPoly {
        let map: Vec<usize> = self
            .vars
            .names
            .iter()
            .map(|n| target.index_of(n).expect("missing variable in target"))
            .collect();
        let mut out = MPoly::zero(target);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; target.len()];
            for (i, &e) in m.0.iter().enumerate() {
                exps[map[i]] = e;
            }
            out.add_term(Mono(exps), c.clone());
        }
        out
    }
}

impl std::ops::Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl std::ops::Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        self.check_vars(rhs);
        let mut out = MPoly::zero(&self.vars);
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl std::ops::Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        let mut out = MPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c);
        }
        out
    }
}

macro_rules! owned_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl std::ops::$trait for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: MPoly) -> MPoly {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
        impl std::ops::$trait<&MPoly> for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: &MPoly) -> MPoly {
                std::ops::$trait::$method(&self, rhs)
            }
        }
        impl std::ops::$trait<MPoly> for &MPoly {
            type Output = MPoly;
            fn $method(self, rhs: MPoly) -> MPoly {
                std::ops::$trait::$method(self, &rhs)
            }
        }
    )*};
}
owned_ops!(Add::add, Sub::sub, Mul::mul);

impl std::ops::Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -(&self)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    factors.push(self.vars.names[i].clone());
                } else if e > 1 {
                    factors.push(format!("{}^{}", self.vars.names[i], e));
                }
            }
            let cs = c.to_string();
            let coeff_str = if cs.contains('+') || (cs.contains('-') && !cs.starts_with('-')) || cs.contains(" - ") {
                format!("({})", cs)
            } else {
                cs
            };
            let term = if factors.is_empty() {
                coeff_str
            } else if c.is_one() {
                factors.join("*")
            } else if (-c).is_one() {
                format!("-{}", factors.join("*"))
            } else {
                format!("{}*{}", coeff_str, factors.join("*"))
            };
            parts.push(term);
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
struct MPolyWire {
    vars: Vec<String>,
    weights: Vec<i64>,
    terms: Vec<TermWire>,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    exps: Vec<u32>,
    coeff: CycNum,
}

impl Serialize for MPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MPolyWire {
            vars: self.vars.names.clone(),
            weights: self.vars.weights.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermWire {
                    exps: m.0.clone(),
                    coeff: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = MPolyWire::deserialize(d)?;
        let vars = Arc::new(Vars {
            names: wire.vars,
            weights: wire.weights,
        });
        let mut p = MPoly::zero(&vars);
        for t in wire.terms {
            if t.exps.len() != vars.len() {
                return Err(serde::de::Error::custom("exponent arity mismatch"));
            }
            p.add_term(Mono(t.exps), t.coeff);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uv() -> Arc<Vars> {
        Vars::new(&[("u", 1), ("v", 1)])
    }

    #[test]
    fn exact_division() {
        let vars = uv();
        let u = MPoly::var(&vars, 0);
        let v = MPoly::var(&vars, 1);
        // (u^2 - v^2) / (u - v) = u + v
        let num = &(&u * &u) - &(&v * &v);
        let den = &u - &v;
        assert_eq!(num.exact_div(&den).unwrap(), &u + &v);
        // u / v fails
        assert!(u.exact_div(&v).is_err());
    }

    #[test]
    fn grading() {
        let vars = Vars::new(&[("x", 6), ("y", 4)]);
        let x = MPoly::var(&vars, 0);
        let y = MPoly::var(&vars, 1);
        let p = &(&x * &x) - &(&(&y * &y) * &y);
        assert_eq!(p.homogeneous_degree(), Some(12));
    }

    #[test]
    fn substitution() {
        let xv = Vars::new(&[("x", 2), ("y", 1)]);
        let uvv = uv();
        let x = MPoly::var(&xv, 0);
        let u = MPoly::var(&uvv, 0);
        let v = MPoly::var(&uvv, 1);
        // x -> u*v, y -> u+v; p = x^2
        let p = &x * &x;
        let img = p.substitute(&[&u * &v, &u + &v], &uvv);
        assert_eq!(img, (&u * &v) * (&u * &v));
    }

    #[test]
    fn coeff_extraction() {
        let xv = Vars::new(&[("x", 3), ("y", 2)]);
        let x = MPoly::var(&xv, 0);
        let y = MPoly::var(&xv, 1);
        let p = &(&x * &x) - &(&y * &(&x * &x)); // x^2 (1 - y)
        let c2 = p.coeff_of_power(0, 2);
        assert_eq!(c2, &MPoly::one(&xv) - &y);
    }
}
