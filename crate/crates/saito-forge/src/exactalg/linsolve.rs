//! Exact linear solving over cyclotomic scalars.

use crate::error::{Error, Result};
use crate::exactalg::cyc::CycNum;

/// Outcome of solving A x = b exactly.
pub struct LinSolution {
    /// One solution, with free variables set to zero.
    pub particular: Vec<CycNum>,
    /// Basis of the kernel of A; empty when the solution is unique.
    pub nullspace: Vec<Vec<CycNum>>,
}

/// Gaussian elimination over Q(zeta). `a` is row-major, `b` the right side.
pub fn linsolve(a: &[Vec<CycNum>], b: &[CycNum]) -> Result<LinSolution> {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<CycNum>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), cols);
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].inv()?;
        for j in c..=cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=cols {
                    let t = &m[r][j] * &f;
                    m[i][j] = &m[i][j] - &t;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }

    // consistency: zero row with nonzero rhs
    for i in r..rows {
        if !m[i][cols].is_zero() {
            return Err(Error::Inconsistent(format!(
                "rank {} system has incompatible right-hand side",
                r
            )));
        }
    }

    let mut particular = vec![CycNum::zero(); cols];
    for (pi, &pc) in pivot_cols.iter().enumerate() {
        particular[pc] = m[pi][cols].clone();
    }

    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut nullspace = Vec::new();
    for &fc in &free_cols {
        let mut v = vec![CycNum::zero(); cols];
        v[fc] = CycNum::one();
        for (pi, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -&m[pi][fc];
        }
        nullspace.push(v);
    }

    Ok(LinSolution {
        particular,
        nullspace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let a = vec![
            vec![CycNum::one(), CycNum::zero()],
            vec![CycNum::zero(), CycNum::one()],
        ];
        let b = vec![CycNum::from_i64(4), CycNum::from_i64(-7)];
        let s = linsolve(&a, &b).unwrap();
        assert_eq!(s.particular, b);
        assert!(s.nullspace.is_empty());
    }

    #[test]
    fn one_by_one() {
        let a = vec![vec![CycNum::from_i64(2)]];
        let b = vec![CycNum::one()];
        let s = linsolve(&a, &b).unwrap();
        assert_eq!(s.particular[0], CycNum::rational(1, 2));
    }

    #[test]
    fn inconsistent() {
        let a = vec![vec![CycNum::one()], vec![CycNum::one()]];
        let b = vec![CycNum::one(), CycNum::from_i64(2)];
        assert!(linsolve(&a, &b).is_err());
    }

    #[test]
    fn underdetermined() {
        let a = vec![vec![CycNum::one(), CycNum::one()]];
        let b = vec![CycNum::from_i64(3)];
        let s = linsolve(&a, &b).unwrap();
        assert_eq!(s.nullspace.len(), 1);
        assert_eq!(s.particular[0], CycNum::from_i64(3));
    }
}
