//! Square matrices over an exact ring, with adjugate/determinant.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactalg::cyc::CycNum;
use crate::exactalg::mpoly::MPoly;
use crate::exactalg::ratfn::RatFn;

/// Minimal ring interface shared by the scalar types of this crate.
/// `ring_zero`/`ring_one` derive the context (variable set) from `self`.
pub trait Ring: Clone + PartialEq {
    fn ring_zero(&self) -> Self;
    fn ring_one(&self) -> Self;
    fn r_add(&self, o: &Self) -> Self;
    fn r_sub(&self, o: &Self) -> Self;
    fn r_mul(&self, o: &Self) -> Self;
    fn r_neg(&self) -> Self;
    fn r_is_zero(&self) -> bool;
}

impl Ring for CycNum {
    fn ring_zero(&self) -> Self {
        CycNum::zero()
    }
    fn ring_one(&self) -> Self {
        CycNum::one()
    }
    fn r_add(&self, o: &Self) -> Self {
        self + o
    }
    fn r_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn r_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn r_neg(&self) -> Self {
        -self
    }
    fn r_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Ring for MPoly {
    fn ring_zero(&self) -> Self {
        MPoly::zero(&self.vars)
    }
    fn ring_one(&self) -> Self {
        MPoly::one(&self.vars)
    }
    fn r_add(&self, o: &Self) -> Self {
        self + o
    }
    fn r_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn r_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn r_neg(&self) -> Self {
        -self
    }
    fn r_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Ring for RatFn {
    fn ring_zero(&self) -> Self {
        RatFn::zero(self.vars())
    }
    fn ring_one(&self) -> Self {
        RatFn::one(self.vars())
    }
    fn r_add(&self, o: &Self) -> Self {
        self + o
    }
    fn r_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn r_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn r_neg(&self) -> Self {
        -self
    }
    fn r_is_zero(&self) -> bool {
        self.is_zero()
    }
}

/// A square matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mat<T> {
    pub n: usize,
    pub entries: Vec<T>,
}

impl<T: Ring> Mat<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            entries.extend(r);
        }
        Mat { n, entries }
    }

    pub fn filled(n: usize, zero: T) -> Self {
        Mat {
            n,
            entries: vec![zero; n * n],
        }
    }

    pub fn identity(n: usize, like: &T) -> Self {
        let mut m = Self::filled(n, like.ring_zero());
        for i in 0..n {
            *m.at_mut(i, i) = like.ring_one();
        }
        m
    }

    pub fn at(&self, row: usize, col: usize) -> &T {
        &self.entries[row * self.n + col]
    }

    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut T {
        &mut self.entries[row * self.n + col]
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        Mat {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| a.r_add(b))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        Mat {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| a.r_sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Mat {
            n: self.n,
            entries: self.entries.iter().map(|a| a.r_neg()).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let n = self.n;
        let zero = self.entries[0].ring_zero();
        let mut out = Self::filled(n, zero);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a.r_is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = o.at(k, j);
                    if b.r_is_zero() {
                        continue;
                    }
                    let prod = a.r_mul(b);
                    let cur = out.at(i, j).r_add(&prod);
                    *out.at_mut(i, j) = cur;
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        Mat {
            n: self.n,
            entries: self.entries.iter().map(|a| a.r_mul(c)).collect(),
        }
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.at(j, i).clone());
            }
        }
        Mat { n, entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.r_is_zero())
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.n);
        let zero = self.entries[0].ring_zero();
        let mut out = vec![zero; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                let t = self.at(i, j).r_mul(&v[j]);
                out[i] = out[i].r_add(&t);
            }
        }
        out
    }

    fn minor(&self, row: usize, col: usize) -> Mat<T> {
        let n = self.n;
        let mut entries = Vec::with_capacity((n - 1) * (n - 1));
        for i in 0..n {
            if i == row {
                continue;
            }
            for j in 0..n {
                if j == col {
                    continue;
                }
                entries.push(self.at(i, j).clone());
            }
        }
        Mat {
            n: n - 1,
            entries,
        }
    }

    pub fn det(&self) -> T {
        match self.n {
            0 => panic!("empty matrix"),
            1 => self.entries[0].clone(),
            2 => self
                .at(0, 0)
                .r_mul(self.at(1, 1))
                .r_sub(&self.at(0, 1).r_mul(self.at(1, 0))),
            _ => {
                let mut acc = self.entries[0].ring_zero();
                for j in 0..self.n {
                    let a = self.at(0, j);
                    if a.r_is_zero() {
                        continue;
                    }
                    let m = self.minor(0, j).det();
                    let term = a.r_mul(&m);
                    acc = if j % 2 == 0 {
                        acc.r_add(&term)
                    } else {
                        acc.r_sub(&term)
                    };
                }
                acc
            }
        }
    }

    /// Adjugate: adj(A) * A = det(A) * I.
    pub fn adjugate(&self) -> Mat<T> {
        let n = self.n;
        if n == 1 {
            return Mat {
                n: 1,
                entries: vec![self.entries[0].ring_one()],
            };
        }
        let zero = self.entries[0].ring_zero();
        let mut out = Self::filled(n, zero);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).det();
                let signed = if (i + j) % 2 == 0 { c } else { c.r_neg() };
                *out.at_mut(j, i) = signed;
            }
        }
        out
    }
}

impl<T: Ring + fmt::Display> fmt::Display for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "[ ")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::mpoly::Vars;

    #[test]
    fn adjugate_identity() {
        let i2: Mat<CycNum> = Mat::identity(2, &CycNum::one());
        assert_eq!(i2.adjugate(), i2);
        assert_eq!(i2.det(), CycNum::one());
    }

    #[test]
    fn adjugate_diag() {
        let a = CycNum::from_i64(3);
        let b = CycNum::from_i64(5);
        let m = Mat::from_rows(vec![
            vec![a.clone(), CycNum::zero()],
            vec![CycNum::zero(), b.clone()],
        ]);
        let adj = m.adjugate();
        assert_eq!(*adj.at(0, 0), b);
        assert_eq!(*adj.at(1, 1), a);
        assert_eq!(m.det(), CycNum::from_i64(15));
    }

    #[test]
    fn adjugate_jacobian_g332() {
        // Jacobian of (u^3 + v^3, u v): [[3u^2, 3v^2], [v, u]]
        let vars = Vars::new(&[("u", 1), ("v", 1)]);
        let u = MPoly::var(&vars, 0);
        let v = MPoly::var(&vars, 1);
        let three = |p: &MPoly| p.scale(&CycNum::from_i64(3));
        let j = Mat::from_rows(vec![
            vec![three(&(&u * &u)), three(&(&v * &v))],
            vec![v.clone(), u.clone()],
        ]);
        // det = 3u^3 - 3v^3 = 3(u^3 - v^3)
        let u3 = (&u * &u) * u.clone();
        let v3 = (&v * &v) * v.clone();
        let expected = (&u3 - &v3).scale(&CycNum::from_i64(3));
        assert_eq!(j.det(), expected);
        // adj(J)*J = det(J)*I
        let prod = j.adjugate().mul(&j);
        let scaled_id: Mat<MPoly> = Mat::identity(2, &u).scale(&j.det());
        assert_eq!(prod, scaled_id);
    }

    #[test]
    fn det_3x3() {
        let m = Mat::from_rows(vec![
            vec![CycNum::from_i64(1), CycNum::from_i64(2), CycNum::from_i64(3)],
            vec![CycNum::from_i64(4), CycNum::from_i64(5), CycNum::from_i64(6)],
            vec![CycNum::from_i64(7), CycNum::from_i64(8), CycNum::from_i64(10)],
        ]);
        assert_eq!(m.det(), CycNum::from_i64(-3));
        let prod = m.adjugate().mul(&m);
        let scaled: Mat<CycNum> = Mat::identity(3, &CycNum::one()).scale(&m.det());
        assert_eq!(prod, scaled);
    }
}
