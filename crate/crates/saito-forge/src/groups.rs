//! Catalog of complex reflection groups at rank <= 3 with basic
//! invariants, discriminants and generators, plus rewriting of invariant
//! polynomials into the basic invariants.
//!
//! Discriminants come from closed product forms in the source
//! coordinates; their expression in the basic invariants is produced by
//! [`invariant_reduce`] and pinned by an identity check at build time.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::exactalg::cyc::CycNum;
use crate::exactalg::linsolve::linsolve;
use crate::exactalg::mat::Mat;
use crate::exactalg::mpoly::{MPoly, Vars};

#[derive(Debug)]
pub struct GroupData {
    pub name: String,
    pub rank: usize,
    /// Degrees in descending order, d_1 first.
    pub degrees: Vec<i64>,
    pub generators: Vec<Mat<CycNum>>,
    pub u_vars: Arc<Vars>,
    pub x_vars: Arc<Vars>,
    /// Basic invariants x^alpha(u), deg x^alpha = degrees[alpha].
    pub invariants: Vec<MPoly>,
    /// delta(u), scaled consistently with `discriminant_x`.
    pub discriminant_u: MPoly,
    /// Delta(x) with Delta(x(u)) = delta(u); monic in x^1 when the top
    /// x^1-coefficient is constant, else with leading coefficient one.
    pub discriminant_x: MPoly,
    /// Number of alpha with d_alpha = d_1.
    pub max_deg_multiplicity: usize,
    /// True iff Delta is monic of degree `rank` in x^1 and all degrees
    /// exceed one.
    pub is_duality: bool,
}

impl GroupData {
    pub fn d1(&self) -> i64 {
        self.degrees[0]
    }

    /// Indices alpha with d_alpha = d_1 (the degree -d_1 vector fields).
    pub fn top_degree_indices(&self) -> Vec<usize> {
        (0..self.rank)
            .filter(|&a| self.degrees[a] == self.degrees[0])
            .collect()
    }
}

// ---- generator matrix alphabet ----

fn m2(a: CycNum, b: CycNum, c: CycNum, d: CycNum) -> Mat<CycNum> {
    Mat::from_rows(vec![vec![a, b], vec![c, d]])
}

pub fn gen_rho() -> Mat<CycNum> {
    m2(
        CycNum::zero(),
        CycNum::one(),
        CycNum::one(),
        CycNum::zero(),
    )
}

pub fn gen_tau(m: u32) -> Mat<CycNum> {
    m2(
        CycNum::zeta(m),
        CycNum::zero(),
        CycNum::zero(),
        CycNum::one(),
    )
}

pub fn gen_sigma(m: u32) -> Mat<CycNum> {
    m2(
        CycNum::zero(),
        CycNum::zeta_pow(m, -1),
        CycNum::zeta(m),
        CycNum::zero(),
    )
}

pub fn gen_r() -> Mat<CycNum> {
    m2(
        CycNum::one(),
        CycNum::zero(),
        CycNum::zero(),
        CycNum::from_i64(-1),
    )
}

pub fn gen_r1() -> Mat<CycNum> {
    let z3 = CycNum::zeta(3);
    let i = CycNum::i();
    let half = CycNum::rational(1, 2);
    let c = &z3 * &half;
    m2(
        &c * &(-&CycNum::one() - &i),
        &c * &(&CycNum::one() - &i),
        &c * &(-&CycNum::one() - &i),
        &c * &(-&CycNum::one() + &i),
    )
}

pub fn gen_r2() -> Mat<CycNum> {
    let z3 = CycNum::zeta(3);
    let i = CycNum::i();
    let half = CycNum::rational(1, 2);
    let c = &z3 * &half;
    m2(
        &c * &(-&CycNum::one() + &i),
        &c * &(-&CycNum::one() + &i),
        &c * &(&CycNum::one() + &i),
        &c * &(-&CycNum::one() - &i),
    )
}

pub fn gen_s() -> Mat<CycNum> {
    m2(
        CycNum::zeta_pow(8, -1),
        CycNum::zero(),
        CycNum::zero(),
        CycNum::zeta(8),
    )
}

pub fn gen_r3() -> Mat<CycNum> {
    let c = CycNum::sqrt2().inv().unwrap();
    m2(c.clone(), -&c, -&c, -&c)
}

pub fn gen_r4() -> Mat<CycNum> {
    m2(CycNum::one(), CycNum::zero(), CycNum::zero(), CycNum::i())
}

/// The order-5 reflection of the icosahedral family. The overall scalar
/// is zeta_5^2 / 2: each row of the bracketed matrix has squared length
/// four, so 1/2 (not 1/sqrt 2) is what makes the matrix unitary.
pub fn gen_r5() -> Mat<CycNum> {
    let tau = CycNum::tau();
    let i = CycNum::i();
    let c = CycNum::zeta(5).pow(2) * CycNum::rational(1, 2);
    m2(
        &c * &(-&tau + &i),
        &c * &(-&tau + &CycNum::one()),
        &c * &(&tau - &CycNum::one()),
        &c * &(-&tau - &i),
    )
}

pub fn mat_inv(g: &Mat<CycNum>) -> Mat<CycNum> {
    let det = g.det();
    let inv = det.inv().expect("singular generator");
    g.adjugate().map(|e| e * inv.clone())
}

/// a g a^{-1}
pub fn conj(a: &Mat<CycNum>, g: &Mat<CycNum>) -> Mat<CycNum> {
    a.mul(g).mul(&mat_inv(a))
}

fn zero_rows3() -> Vec<Vec<CycNum>> {
    vec![
        vec![CycNum::zero(), CycNum::zero(), CycNum::zero()],
        vec![CycNum::zero(), CycNum::zero(), CycNum::zero()],
        vec![CycNum::zero(), CycNum::zero(), CycNum::zero()],
    ]
}

fn perm3(p: [usize; 3]) -> Mat<CycNum> {
    let mut rows = zero_rows3();
    for (i, &pi) in p.iter().enumerate() {
        rows[i][pi] = CycNum::one();
    }
    Mat::from_rows(rows)
}

/// Places a 2x2 block on coordinates (1,2) of a rank-3 matrix.
fn embed3(g: &Mat<CycNum>) -> Mat<CycNum> {
    let mut rows = zero_rows3();
    for i in 0..2 {
        for j in 0..2 {
            rows[i][j] = g.at(i, j).clone();
        }
    }
    rows[2][2] = CycNum::one();
    Mat::from_rows(rows)
}

fn diag3(a: CycNum, b: CycNum, c: CycNum) -> Mat<CycNum> {
    let mut rows = zero_rows3();
    rows[0][0] = a;
    rows[1][1] = b;
    rows[2][2] = c;
    Mat::from_rows(rows)
}

// ---- invariant builders ----

fn uv_vars() -> Arc<Vars> {
    Vars::new(&[("u", 1), ("v", 1)])
}

fn u3_vars() -> Arc<Vars> {
    Vars::new(&[("u1", 1), ("u2", 1), ("u3", 1)])
}

/// Binary form from (exp_u, exp_v, coeff) triples.
fn bform(vars: &Arc<Vars>, terms: &[(u32, u32, CycNum)]) -> MPoly {
    MPoly::from_terms(
        vars,
        terms
            .iter()
            .map(|(i, j, c)| (vec![*i, *j], c.clone()))
            .collect(),
    )
}

pub fn poly_f_t(vars: &Arc<Vars>) -> MPoly {
    let is3 = CycNum::i_sqrt3();
    bform(
        vars,
        &[
            (4, 0, CycNum::one()),
            (2, 2, CycNum::from_i64(2) * is3),
            (0, 4, CycNum::one()),
        ],
    )
}

pub fn poly_h_t(vars: &Arc<Vars>) -> MPoly {
    let is3 = CycNum::i_sqrt3();
    bform(
        vars,
        &[
            (4, 0, CycNum::one()),
            (2, 2, CycNum::from_i64(-2) * is3),
            (0, 4, CycNum::one()),
        ],
    )
}

pub fn poly_t_t(vars: &Arc<Vars>) -> MPoly {
    bform(
        vars,
        &[(5, 1, CycNum::one()), (1, 5, CycNum::from_i64(-1))],
    )
}

pub fn poly_f_o(vars: &Arc<Vars>) -> MPoly {
    poly_t_t(vars)
}

pub fn poly_h_o(vars: &Arc<Vars>) -> MPoly {
    bform(
        vars,
        &[
            (8, 0, CycNum::one()),
            (4, 4, CycNum::from_i64(14)),
            (0, 8, CycNum::one()),
        ],
    )
}

pub fn poly_t_o(vars: &Arc<Vars>) -> MPoly {
    bform(
        vars,
        &[
            (12, 0, CycNum::one()),
            (8, 4, CycNum::from_i64(-33)),
            (4, 8, CycNum::from_i64(-33)),
            (0, 12, CycNum::one()),
        ],
    )
}

pub fn poly_f_i(vars: &Arc<Vars>) -> MPoly {
    // 22/sqrt5 = 22 sqrt5 / 5
    let c = CycNum::sqrt5() * CycNum::rational(22, 5);
    bform(
        vars,
        &[
            (12, 0, CycNum::one()),
            (10, 2, c.clone()),
            (8, 4, CycNum::from_i64(-33)),
            (6, 6, CycNum::from_i64(-2) * c.clone()),
            (4, 8, CycNum::from_i64(-33)),
            (2, 10, c),
            (0, 12, CycNum::one()),
        ],
    )
}

pub fn poly_h_i(vars: &Arc<Vars>) -> MPoly {
    let f = poly_f_i(vars);
    let fuu = f.derivative(0).derivative(0);
    let fuv = f.derivative(0).derivative(1);
    let fvv = f.derivative(1).derivative(1);
    let hess = &(&fuu * &fvv) - &(&fuv * &fuv);
    hess.scale(&(CycNum::sqrt5() * CycNum::rational(1, 5808)))
}

pub fn poly_t_i(vars: &Arc<Vars>) -> MPoly {
    let f = poly_f_i(vars);
    let h = poly_h_i(vars);
    let jac = &(&f.derivative(0) * &h.derivative(1)) - &(&f.derivative(1) * &h.derivative(0));
    // -1/(480 sqrt5) = -sqrt5/2400
    jac.scale(&(CycNum::sqrt5() * CycNum::rational(-1, 2400)))
}

/// (uv)^k
fn uv_pow(vars: &Arc<Vars>, k: u32) -> MPoly {
    bform(vars, &[(k, k, CycNum::one())])
}

/// u^m + v^m
fn power_sum2(vars: &Arc<Vars>, m: u32) -> MPoly {
    bform(vars, &[(m, 0, CycNum::one()), (0, m, CycNum::one())])
}

/// (u^m - v^m)^2
fn diff_sq2(vars: &Arc<Vars>, m: u32) -> MPoly {
    bform(
        vars,
        &[
            (2 * m, 0, CycNum::one()),
            (m, m, CycNum::from_i64(-2)),
            (0, 2 * m, CycNum::one()),
        ],
    )
}

/// Elementary symmetric e_k(u1^m, u2^m, u3^m).
fn esym3(vars: &Arc<Vars>, k: usize, m: u32) -> MPoly {
    let terms: Vec<(Vec<u32>, CycNum)> = match k {
        1 => vec![
            (vec![m, 0, 0], CycNum::one()),
            (vec![0, m, 0], CycNum::one()),
            (vec![0, 0, m], CycNum::one()),
        ],
        2 => vec![
            (vec![m, m, 0], CycNum::one()),
            (vec![m, 0, m], CycNum::one()),
            (vec![0, m, m], CycNum::one()),
        ],
        3 => vec![(vec![m, m, m], CycNum::one())],
        _ => unreachable!(),
    };
    MPoly::from_terms(vars, terms)
}

/// prod_{i<j} (u_i^m - u_j^m)^2, written as the discriminant of the
/// monic cubic with roots u_i^m.
fn disc3(vars: &Arc<Vars>, m: u32) -> MPoly {
    let e1 = esym3(vars, 1, m);
    let e2 = esym3(vars, 2, m);
    let e3 = esym3(vars, 3, m);
    let t1 = &(&e1 * &e1) * &(&e2 * &e2);
    let t2 = (&(&e2 * &e2) * &e2).scale(&CycNum::from_i64(-4));
    let t3 = (&(&(&e1 * &e1) * &e1) * &e3).scale(&CycNum::from_i64(-4));
    let t4 = (&(&e1 * &e2) * &e3).scale(&CycNum::from_i64(18));
    let t5 = (&e3 * &e3).scale(&CycNum::from_i64(-27));
    &(&(&(&t1 + &t2) + &t3) + &t4) + &t5
}

// ---- invariant rewriting ----

/// Enumerates exponent vectors with given weighted degree.
pub fn weighted_monomials(weights: &[i64], degree: i64) -> Vec<Vec<u32>> {
    fn rec(weights: &[i64], degree: i64, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>) {
        if weights.len() == 1 {
            if degree >= 0 && degree % weights[0] == 0 {
                cur.push((degree / weights[0]) as u32);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        let w = weights[0];
        let mut e = 0i64;
        while e * w <= degree {
            cur.push(e as u32);
            rec(&weights[1..], degree - e * w, out, cur);
            cur.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    if degree < 0 {
        return out;
    }
    let mut cur = Vec::new();
    rec(weights, degree, &mut out, &mut cur);
    out.sort();
    out
}

/// Rewrites polynomials of the source ring as polynomials in a fixed set
/// of image polynomials, by weighted-homogeneous ansatz and exact linear
/// solving.
pub struct Rewriter {
    pub images: Vec<MPoly>,
    pub target: Arc<Vars>,
    pow_cache: Vec<Vec<MPoly>>,
}

impl Rewriter {
    pub fn new(images: Vec<MPoly>, target: Arc<Vars>) -> Self {
        let pow_cache = images
            .iter()
            .map(|f| vec![MPoly::one(&f.vars), f.clone()])
            .collect();
        Rewriter {
            images,
            target,
            pow_cache,
        }
    }

    fn image_pow(&mut self, idx: usize, e: u32) -> MPoly {
        while self.pow_cache[idx].len() <= e as usize {
            let next = {
                let t = &self.pow_cache[idx];
                &t[t.len() - 1] * &t[1]
            };
            self.pow_cache[idx].push(next);
        }
        self.pow_cache[idx][e as usize].clone()
    }

    fn mono_image(&mut self, exps: &[u32]) -> MPoly {
        let mut acc = MPoly::one(&self.images[0].vars);
        for (i, &e) in exps.iter().enumerate() {
            if e > 0 {
                let p = self.image_pow(i, e);
                acc = &acc * &p;
            }
        }
        acc
    }

    /// Writes `p` as a polynomial in the images, or fails.
    pub fn rewrite(&mut self, p: &MPoly) -> Result<MPoly> {
        let mut out = MPoly::zero(&self.target);
        for (d, part) in p.homogeneous_parts() {
            let q = self.rewrite_homogeneous(&part, d)?;
            out = &out + &q;
        }
        Ok(out)
    }

    fn rewrite_homogeneous(&mut self, p: &MPoly, degree: i64) -> Result<MPoly> {
        let monos = weighted_monomials(&self.target.weights, degree);
        if monos.is_empty() {
            return Err(Error::NotInvariant(format!(
                "no target monomials of weighted degree {}",
                degree
            )));
        }
        let expansions: Vec<MPoly> = monos.iter().map(|m| self.mono_image(m)).collect();
        let mut rows: Vec<crate::exactalg::mpoly::Mono> = Vec::new();
        {
            let mut seen = std::collections::BTreeSet::new();
            for f in expansions.iter().chain(std::iter::once(p)) {
                for (m, _) in f.terms() {
                    seen.insert(m.clone());
                }
            }
            rows.extend(seen);
        }
        let lookup = |f: &MPoly, rm: &crate::exactalg::mpoly::Mono| -> CycNum {
            f.terms()
                .find(|(m, _)| *m == rm)
                .map(|(_, c)| c.clone())
                .unwrap_or_else(CycNum::zero)
        };
        let mut a = Vec::with_capacity(rows.len());
        let mut b = Vec::with_capacity(rows.len());
        for rm in &rows {
            a.push(expansions.iter().map(|f| lookup(f, rm)).collect::<Vec<_>>());
            b.push(lookup(p, rm));
        }
        let sol = linsolve(&a, &b)
            .map_err(|_| Error::NotInvariant("coefficient matching inconsistent".into()))?;
        let mut out = MPoly::zero(&self.target);
        for (mono, c) in monos.iter().zip(sol.particular) {
            out = &out + &MPoly::monomial(&self.target, mono, c);
        }
        Ok(out)
    }
}

/// Writes a G-invariant polynomial in u as a polynomial in the basic
/// invariants of G.
pub fn invariant_reduce(p: &MPoly, g: &GroupData) -> Result<MPoly> {
    let mut rw = Rewriter::new(g.invariants.clone(), g.x_vars.clone());
    rw.rewrite(p)
}

/// Applies a matrix to a polynomial: (g . f)(u) = f(g u).
pub fn apply_matrix(f: &MPoly, g: &Mat<CycNum>) -> MPoly {
    let vars = &f.vars;
    let n = vars.len();
    assert_eq!(g.n, n);
    let images: Vec<MPoly> = (0..n)
        .map(|i| {
            let mut row = MPoly::zero(vars);
            for j in 0..n {
                let c = g.at(i, j);
                if !c.is_zero() {
                    row = &row + &MPoly::var(vars, j).scale(c);
                }
            }
            row
        })
        .collect();
    f.substitute(&images, vars)
}

/// True iff f is fixed by every generator; on failure returns the
/// violating generator index and the difference g(f) - f.
pub fn verify_invariance(f: &MPoly, g: &GroupData) -> std::result::Result<(), (usize, MPoly)> {
    verify_invariance_gens(f, &g.generators)
}

fn verify_invariance_gens(
    f: &MPoly,
    gens: &[Mat<CycNum>],
) -> std::result::Result<(), (usize, MPoly)> {
    for (k, g) in gens.iter().enumerate() {
        let gf = apply_matrix(f, g);
        let diff = &gf - f;
        if !diff.is_zero() {
            return Err((k, diff));
        }
    }
    Ok(())
}

// ---- semi-invariants (abelian quotient averaging) ----

/// An abelian quotient acting on the source coordinates, with its
/// character table. `elements[0]` is the identity.
pub struct CharacterTable {
    pub elements: Vec<Mat<CycNum>>,
    /// characters[j][i] = chi_j(elements[i])
    pub characters: Vec<Vec<CycNum>>,
}

impl CharacterTable {
    /// Cyclic quotient generated by `rep` of the given order.
    pub fn cyclic(rep: &Mat<CycNum>, order: u32) -> Self {
        let mut elements = vec![Mat::identity(rep.n, &CycNum::one())];
        for _ in 1..order {
            let next = elements.last().unwrap().mul(rep);
            elements.push(next);
        }
        let mut characters = Vec::new();
        for j in 0..order {
            characters.push(
                (0..order)
                    .map(|i| CycNum::zeta_pow(order, (i * j) as i64))
                    .collect(),
            );
        }
        CharacterTable {
            elements,
            characters,
        }
    }

    pub fn verify_multiplicative(&self) -> bool {
        for chi in &self.characters {
            for i in 1..self.elements.len() {
                if chi[i] != chi[1].pow(i as i64) {
                    return false;
                }
            }
        }
        true
    }
}

/// Averaging projector onto the chi-semi-invariant component:
/// y = (1/|Q|) sum_g chi(g)^{-1} g(z).
pub fn semi_invariant_project(z: &MPoly, quotient: &CharacterTable, chi: usize) -> Result<MPoly> {
    let q = quotient.elements.len() as i64;
    let mut acc = MPoly::zero(&z.vars);
    for (i, g) in quotient.elements.iter().enumerate() {
        let gz = apply_matrix(z, g);
        let c = quotient.characters[chi][i].inv()?;
        acc = &acc + &gz.scale(&c);
    }
    let y = acc.scale(&CycNum::rational(1, q));
    if y.is_zero() {
        return Err(Error::ZeroProjection(format!(
            "character {} not realized on this degree slice",
            chi
        )));
    }
    for (i, g) in quotient.elements.iter().enumerate() {
        let gy = apply_matrix(&y, g);
        if gy != y.scale(&quotient.characters[chi][i]) {
            return Err(Error::PropertyViolation(
                "projection is not semi-invariant".into(),
            ));
        }
    }
    Ok(y)
}

// ---- catalog ----

fn x_vars_for(n: usize, degrees: &[i64]) -> Arc<Vars> {
    let names: Vec<(&str, i64)> = match n {
        2 => vec![("x", degrees[0]), ("y", degrees[1])],
        3 => vec![("x1", degrees[0]), ("x2", degrees[1]), ("x3", degrees[2])],
        _ => panic!("rank {} not in catalog", n),
    };
    Vars::new(&names)
}

struct RawGroup {
    name: String,
    degrees: Vec<i64>,
    generators: Vec<Mat<CycNum>>,
    invariants: Vec<MPoly>,
    delta_u: MPoly,
}

fn exceptional_raw(k: u32) -> Result<RawGroup> {
    let vars = uv_vars();
    let (x, y, delta_parts): (MPoly, MPoly, Vec<(MPoly, u32)>) = match k {
        4 => (
            poly_t_t(&vars),
            poly_f_t(&vars),
            vec![(poly_h_t(&vars), 3)],
        ),
        5 => (
            poly_f_t(&vars).pow(3),
            poly_t_t(&vars),
            vec![(poly_f_t(&vars), 3), (poly_h_t(&vars), 3)],
        ),
        6 => (
            poly_t_t(&vars).pow(2),
            poly_f_t(&vars),
            vec![(poly_h_t(&vars), 3), (poly_t_t(&vars), 2)],
        ),
        7 => (
            poly_f_t(&vars).pow(3),
            poly_t_t(&vars).pow(2),
            vec![
                (poly_f_t(&vars), 3),
                (poly_h_t(&vars), 3),
                (poly_t_t(&vars), 2),
            ],
        ),
        8 => (
            poly_t_o(&vars),
            poly_h_o(&vars),
            vec![(poly_f_o(&vars), 4)],
        ),
        9 => (
            poly_t_o(&vars).pow(2),
            poly_h_o(&vars),
            vec![(poly_f_o(&vars), 4), (poly_t_o(&vars), 2)],
        ),
        10 => (
            poly_h_o(&vars).pow(3),
            poly_t_o(&vars),
            vec![(poly_f_o(&vars), 4), (poly_h_o(&vars), 3)],
        ),
        11 => (
            poly_h_o(&vars).pow(3),
            poly_t_o(&vars).pow(2),
            vec![
                (poly_f_o(&vars), 4),
                (poly_h_o(&vars), 3),
                (poly_t_o(&vars), 2),
            ],
        ),
        12 => (
            poly_h_o(&vars),
            poly_f_o(&vars),
            vec![(poly_t_o(&vars), 2)],
        ),
        13 => (
            poly_f_o(&vars).pow(2),
            poly_h_o(&vars),
            vec![(poly_f_o(&vars), 2), (poly_t_o(&vars), 2)],
        ),
        14 => (
            poly_t_o(&vars).pow(2),
            poly_f_o(&vars),
            vec![(poly_h_o(&vars), 3), (poly_t_o(&vars), 2)],
        ),
        15 => (
            poly_t_o(&vars).pow(2),
            poly_f_o(&vars).pow(2),
            vec![
                (poly_f_o(&vars), 2),
                (poly_h_o(&vars), 3),
                (poly_t_o(&vars), 2),
            ],
        ),
        16 => (
            poly_t_i(&vars),
            poly_h_i(&vars),
            vec![(poly_f_i(&vars), 5)],
        ),
        17 => (
            poly_t_i(&vars).pow(2),
            poly_h_i(&vars),
            vec![(poly_f_i(&vars), 5), (poly_t_i(&vars), 2)],
        ),
        18 => (
            poly_h_i(&vars).pow(3),
            poly_t_i(&vars),
            vec![(poly_f_i(&vars), 5), (poly_h_i(&vars), 3)],
        ),
        19 => (
            poly_h_i(&vars).pow(3),
            poly_t_i(&vars).pow(2),
            vec![
                (poly_f_i(&vars), 5),
                (poly_h_i(&vars), 3),
                (poly_t_i(&vars), 2),
            ],
        ),
        20 => (
            poly_t_i(&vars),
            poly_f_i(&vars),
            vec![(poly_h_i(&vars), 3)],
        ),
        21 => (
            poly_t_i(&vars).pow(2),
            poly_f_i(&vars),
            vec![(poly_h_i(&vars), 3), (poly_t_i(&vars), 2)],
        ),
        22 => (
            poly_h_i(&vars),
            poly_f_i(&vars),
            vec![(poly_t_i(&vars), 2)],
        ),
        23..=37 => {
            return Err(Error::UnsupportedGroup(format!(
                "G{} is outside the rank <= 2 exceptional catalog",
                k
            )))
        }
        _ => return Err(Error::UnsupportedGroup(format!("G{}", k))),
    };

    let generators: Vec<Mat<CycNum>> = match k {
        4 => vec![gen_r1(), conj(&gen_s(), &gen_r2())],
        5 => vec![gen_r1(), conj(&gen_r(), &gen_r2())],
        6 => vec![gen_r(), gen_r1()],
        7 => vec![gen_r(), gen_r1(), gen_r2()],
        8 => vec![gen_r4(), conj(&gen_r3(), &gen_r4())],
        9 => vec![gen_r3(), gen_r4()],
        10 => vec![gen_r1(), conj(&gen_r3(), &gen_r4())],
        11 => vec![gen_r1(), gen_r3(), gen_r4()],
        12 => vec![
            gen_r3(),
            conj(&gen_r4(), &gen_r3()),
            conj(&gen_r4().mul(&gen_r4()), &gen_r3()),
        ],
        13 => vec![gen_r(), gen_r3(), conj(&gen_r4(), &gen_r3())],
        14 => vec![gen_r1(), {
            let r4sq = gen_r4().mul(&gen_r4());
            r4sq.mul(&gen_r3()).mul(&r4sq)
        }],
        15 => vec![gen_r(), gen_r1(), gen_r3()],
        16 => vec![gen_r5(), conj(&gen_r1(), &gen_r5())],
        17 => vec![gen_r(), gen_r5()],
        18 => vec![gen_r1().mul(&gen_r1()), gen_r5()],
        19 => vec![gen_r(), gen_r1(), gen_r5()],
        20 => vec![gen_r1(), conj(&gen_r5(), &gen_r1())],
        21 => vec![gen_r(), conj(&gen_r5(), &gen_r1())],
        22 => vec![
            gen_r(),
            conj(&gen_r5(), &gen_r()),
            conj(&gen_r1(), &gen_r()),
        ],
        _ => unreachable!(),
    };

    let dx = x.homogeneous_degree().unwrap();
    let dy = y.homogeneous_degree().unwrap();
    let mut delta = MPoly::one(&vars);
    for (p, e) in &delta_parts {
        delta = &delta * &p.pow(*e);
    }
    Ok(RawGroup {
        name: format!("G{}", k),
        degrees: vec![dx, dy],
        generators,
        invariants: vec![x, y],
        delta_u: delta,
    })
}

fn monomial_raw(m: u32, p: u32, n: u32) -> Result<RawGroup> {
    if p == 0 || m % p != 0 {
        return Err(Error::UnsupportedGroup(format!(
            "G({},{},{}): p must divide m",
            m, p, n
        )));
    }
    if (m, p, n) == (2, 2, 2) {
        return Err(Error::ReducibleGroup(
            "G(2,2,2) = A1 x A1 is not irreducible".into(),
        ));
    }
    if n != 2 && n != 3 {
        return Err(Error::UnsupportedGroup(format!(
            "G({},{},{}): only ranks 2 and 3 are in the catalog",
            m, p, n
        )));
    }
    if m < 2 {
        return Err(Error::UnsupportedGroup(format!(
            "G({},{},{}): need m >= 2 for an irreducible monomial group",
            m, p, n
        )));
    }
    let name = format!("G({},{},{})", m, p, n);
    let k = m / p;
    if n == 2 {
        let vars = uv_vars();
        let (degrees, x, y): (Vec<i64>, MPoly, MPoly) = if p == 1 {
            (
                vec![2 * m as i64, m as i64],
                uv_pow(&vars, m),
                power_sum2(&vars, m),
            )
        } else if p == m {
            if m < 3 {
                return Err(Error::ReducibleGroup(name));
            }
            (vec![m as i64, 2], power_sum2(&vars, m), uv_pow(&vars, 1))
        } else {
            // 1 < p < m; degrees m >= 2k with equality iff p = 2
            (
                vec![m as i64, 2 * k as i64],
                power_sum2(&vars, m),
                uv_pow(&vars, k),
            )
        };
        let mut delta = diff_sq2(&vars, m);
        if p < m {
            delta = &delta * &uv_pow(&vars, k);
        }
        let mut generators = vec![gen_sigma(m), gen_rho()];
        if p < m {
            generators.push(m2(
                CycNum::zeta(m).pow(p as i64),
                CycNum::zero(),
                CycNum::zero(),
                CycNum::one(),
            ));
        }
        Ok(RawGroup {
            name,
            degrees,
            generators,
            invariants: vec![x, y],
            delta_u: delta,
        })
    } else {
        let vars = u3_vars();
        let sigma1 = esym3(&vars, 1, m);
        let sigma2 = esym3(&vars, 2, m);
        let en_pow = esym3(&vars, 3, k); // (u1 u2 u3)^{m/p}
        let mut inv: Vec<(i64, usize, MPoly)> = vec![
            (m as i64, 1, sigma1),
            (2 * m as i64, 0, sigma2),
            (3 * k as i64, 2, en_pow),
        ];
        // descending by degree; ties broken by the listed priority
        inv.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let degrees: Vec<i64> = inv.iter().map(|t| t.0).collect();
        let invariants: Vec<MPoly> = inv.into_iter().map(|t| t.2).collect();
        let mut delta = disc3(&vars, m);
        if p < m {
            delta = &delta * &esym3(&vars, 3, k);
        }
        let mut generators = vec![embed3(&gen_sigma(m)), perm3([1, 0, 2]), perm3([0, 2, 1])];
        if p < m {
            generators.push(diag3(
                CycNum::zeta(m).pow(p as i64),
                CycNum::one(),
                CycNum::one(),
            ));
        }
        Ok(RawGroup {
            name,
            degrees,
            generators,
            invariants,
            delta_u: delta,
        })
    }
}

fn parse_name(name: &str) -> Result<RawGroup> {
    let s = name.trim();
    if s.starts_with('{') {
        // JSON group spec: {"name": "..."} and/or {"params": {"m":..,"p":..,"n":..}}
        let v: serde_json::Value = serde_json::from_str(s)
            .map_err(|e| Error::ParseError(format!("group spec JSON: {}", e)))?;
        if let Some(params) = v.get("params") {
            let get = |k: &str| -> Result<u32> {
                params
                    .get(k)
                    .and_then(|x| x.as_u64())
                    .map(|x| x as u32)
                    .ok_or_else(|| Error::ParseError(format!("group spec missing params.{}", k)))
            };
            return monomial_raw(get("m")?, get("p")?, get("n")?);
        }
        if let Some(n) = v.get("name").and_then(|x| x.as_str()) {
            return parse_name(n);
        }
        return Err(Error::ParseError(
            "group spec JSON needs a name or params".into(),
        ));
    }
    if let Some(rest) = s.strip_prefix("G(").and_then(|r| r.strip_suffix(')')) {
        let parts: Vec<&str> = rest.split(',').map(|t| t.trim()).collect();
        if parts.len() != 3 {
            return Err(Error::UnsupportedGroup(format!(
                "cannot parse group name '{}'",
                s
            )));
        }
        let mut nums = Vec::new();
        for p in parts {
            nums.push(
                p.parse::<u32>()
                    .map_err(|_| Error::UnsupportedGroup(s.into()))?,
            );
        }
        return monomial_raw(nums[0], nums[1], nums[2]);
    }
    if let Some(num) = s.strip_prefix('G').or_else(|| s.strip_prefix('g')) {
        if let Ok(k) = num.parse::<u32>() {
            return exceptional_raw(k);
        }
    }
    Err(Error::UnsupportedGroup(format!("unknown group name '{}'", s)))
}

fn finish_group(raw: RawGroup) -> Result<GroupData> {
    let n = raw.degrees.len();
    let u_vars = raw.invariants[0].vars.clone();
    let x_vars = x_vars_for(n, &raw.degrees);

    for (alpha, f) in raw.invariants.iter().enumerate() {
        match f.homogeneous_degree() {
            Some(d) if d == raw.degrees[alpha] => {}
            _ => {
                return Err(Error::PropertyViolation(format!(
                    "{}: invariant {} is not homogeneous of degree {}",
                    raw.name, alpha, raw.degrees[alpha]
                )))
            }
        }
        if let Err((kk, _)) = verify_invariance_gens(f, &raw.generators) {
            return Err(Error::NotInvariant(format!(
                "{}: invariant {} moves under generator {}",
                raw.name, alpha, kk
            )));
        }
    }

    // algebraic independence via nonvanishing Jacobian determinant
    let jac = Mat::from_rows(
        raw.invariants
            .iter()
            .map(|f| (0..n).map(|i| f.derivative(i)).collect())
            .collect(),
    );
    if jac.det().is_zero() {
        return Err(Error::PropertyViolation(format!(
            "{}: invariants are algebraically dependent",
            raw.name
        )));
    }

    let mut group = GroupData {
        name: raw.name,
        rank: n,
        degrees: raw.degrees,
        generators: raw.generators,
        u_vars,
        x_vars,
        invariants: raw.invariants,
        discriminant_u: raw.delta_u,
        discriminant_x: MPoly::zero(&Vars::new(&[("x", 1)])),
        max_deg_multiplicity: 0,
        is_duality: false,
    };
    group.max_deg_multiplicity = group
        .degrees
        .iter()
        .filter(|&&d| d == group.degrees[0])
        .count();

    let mut delta_x = invariant_reduce(&group.discriminant_u, &group)?;

    // normalization: monic in x^1 when the top x^1-coefficient is a
    // constant, otherwise unit leading coefficient in graded-lex order
    let top = delta_x.degree_in(0);
    let top_coeff = delta_x.coeff_of_power(0, top);
    let scale = if let Some(c) = top_coeff.as_constant() {
        c
    } else {
        delta_x.leading().unwrap().1.clone()
    };
    let inv = scale.inv().expect("discriminant has zero leading term");
    delta_x = delta_x.scale(&inv);
    group.discriminant_u = group.discriminant_u.scale(&inv);
    group.discriminant_x = delta_x;

    let back = group
        .discriminant_x
        .substitute(&group.invariants, &group.u_vars);
    if back != group.discriminant_u {
        return Err(Error::PropertyViolation(format!(
            "{}: Delta(x(u)) != delta(u)",
            group.name
        )));
    }

    group.is_duality = group.degrees.iter().all(|&d| d > 1)
        && group.discriminant_x.degree_in(0) == n as u32
        && group.discriminant_x.coeff_of_power(0, n as u32).is_one();

    Ok(group)
}

fn registry() -> &'static Mutex<HashMap<String, Arc<GroupData>>> {
    static REG: OnceLock<Mutex<HashMap<String, Arc<GroupData>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Builds (and memoizes) a catalog group by name, e.g. "G(3,3,2)" or "G4".
pub fn build_group(name: &str) -> Result<Arc<GroupData>> {
    let key = name.trim().to_string();
    if let Some(g) = registry().lock().unwrap().get(&key) {
        return Ok(g.clone());
    }
    let raw = parse_name(&key)?;
    let canonical = raw.name.clone();
    if let Some(g) = registry().lock().unwrap().get(&canonical) {
        return Ok(g.clone());
    }
    let group = Arc::new(finish_group(raw)?);
    let mut reg = registry().lock().unwrap();
    reg.insert(key, group.clone());
    reg.insert(canonical, group.clone());
    Ok(group)
}

/// Rank-2 duality groups of the catalog, in a fixed report order.
pub fn rank2_duality_names() -> Vec<String> {
    let mut names = Vec::new();
    for m in 2..=6 {
        names.push(format!("G({},1,2)", m));
    }
    for m in 3..=6 {
        names.push(format!("G({},{},2)", m, m));
    }
    for k in [4u32, 5, 6, 8, 9, 10, 14, 16, 17, 18, 20, 21] {
        names.push(format!("G{}", k));
    }
    names
}

/// Rank-3 monomial duality groups of the catalog.
pub fn rank3_duality_names() -> Vec<String> {
    vec![
        "G(2,1,3)".into(),
        "G(3,1,3)".into(),
        "G(2,2,3)".into(),
        "G(3,3,3)".into(),
    ]
}

pub fn expected_order(name: &str) -> Option<usize> {
    let table = [
        ("G4", 24),
        ("G5", 72),
        ("G6", 48),
        ("G7", 144),
        ("G8", 96),
        ("G9", 192),
        ("G10", 288),
        ("G11", 576),
        ("G12", 48),
        ("G13", 96),
        ("G14", 144),
        ("G15", 288),
        ("G16", 600),
        ("G17", 1200),
        ("G18", 1800),
        ("G19", 3600),
        ("G20", 360),
        ("G21", 720),
        ("G22", 240),
    ];
    for (n, o) in table {
        if n == name {
            return Some(o);
        }
    }
    let raw = name.strip_prefix("G(")?.strip_suffix(')')?;
    let parts: Vec<usize> = raw
        .split(',')
        .filter_map(|t| t.trim().parse().ok())
        .collect();
    if parts.len() != 3 {
        return None;
    }
    let (m, p, n) = (parts[0], parts[1], parts[2]);
    let fact: usize = (1..=n).product();
    Some(m.pow(n as u32) * fact / p)
}

/// BFS closure of the generated matrix group; errors out when the
/// closure exceeds `cap` elements.
pub fn group_closure_order(gens: &[Mat<CycNum>], cap: usize) -> Result<usize> {
    let mut order: u32 = 1;
    for g in gens {
        for e in &g.entries {
            order = num_integer::lcm(order, e.order());
        }
    }
    let key = |m: &Mat<CycNum>| -> String {
        m.entries
            .iter()
            .map(|e| e.key_at_order(order))
            .collect::<Vec<_>>()
            .join(";")
    };
    let id = Mat::identity(gens[0].n, &CycNum::one());
    let mut seen = std::collections::HashSet::new();
    seen.insert(key(&id));
    let mut frontier = vec![id];
    while let Some(g) = frontier.pop() {
        for h in gens {
            let gh = g.mul(h);
            let k = key(&gh);
            if seen.insert(k) {
                if seen.len() > cap {
                    return Err(Error::PropertyViolation(format!(
                        "closure exceeded cap {}",
                        cap
                    )));
                }
                frontier.push(gh);
            }
        }
    }
    Ok(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g312_catalog_row() {
        let g = build_group("G(3,1,2)").unwrap();
        assert_eq!(g.degrees, vec![6, 3]);
        assert_eq!(g.invariants[0], uv_pow(&g.u_vars, 3));
        assert_eq!(g.invariants[1], power_sum2(&g.u_vars, 3));
        assert!(g.is_duality);
        // delta = u^3 v^3 (u^3 - v^3)^2 normalized by -1/4:
        // Delta = x^2 - x y^2 / 4
        let x = MPoly::var(&g.x_vars, 0);
        let y = MPoly::var(&g.x_vars, 1);
        let expect = &(&x * &x) - &(&x * &(&y * &y)).scale(&CycNum::rational(1, 4));
        assert_eq!(g.discriminant_x, expect);
    }

    #[test]
    fn g332_catalog_row() {
        let g = build_group("G(3,3,2)").unwrap();
        assert_eq!(g.degrees, vec![3, 2]);
        let x = MPoly::var(&g.x_vars, 0);
        let y = MPoly::var(&g.x_vars, 1);
        let y3 = (&(&y * &y) * &y).scale(&CycNum::from_i64(4));
        assert_eq!(g.discriminant_x, &(&x * &x) - &y3);
        assert!(g.is_duality);
    }

    #[test]
    fn g4_catalog_row() {
        let g = build_group("G4").unwrap();
        assert_eq!(g.degrees, vec![6, 4]);
        assert!(g.is_duality);
        assert_eq!(g.discriminant_x.degree_in(0), 2);
        assert!(g.discriminant_x.coeff_of_power(0, 2).is_one());
    }

    #[test]
    fn json_group_spec() {
        let a = build_group(r#"{"params": {"m": 3, "p": 3, "n": 2}}"#).unwrap();
        assert_eq!(a.name, "G(3,3,2)");
        let b = build_group(r#"{"name": "G4"}"#).unwrap();
        assert_eq!(b.name, "G4");
        assert!(matches!(
            build_group(r#"{"oops": 1}"#),
            Err(Error::ParseError(_))
        ));
    }

    #[test]
    fn g222_is_reducible() {
        assert!(matches!(
            build_group("G(2,2,2)"),
            Err(Error::ReducibleGroup(_))
        ));
    }

    #[test]
    fn g23_unsupported() {
        assert!(matches!(build_group("G23"), Err(Error::UnsupportedGroup(_))));
        assert!(matches!(build_group("G31"), Err(Error::UnsupportedGroup(_))));
    }

    #[test]
    fn invariant_reduce_g332() {
        // (u^3 - v^3)^2 = x^2 - 4 y^3 for x = u^3+v^3, y = uv
        let g = build_group("G(3,3,2)").unwrap();
        let p = diff_sq2(&g.u_vars, 3);
        let q = invariant_reduce(&p, &g).unwrap();
        let x = MPoly::var(&g.x_vars, 0);
        let y = MPoly::var(&g.x_vars, 1);
        let expect = &(&x * &x) - &(&(&y * &y) * &y).scale(&CycNum::from_i64(4));
        assert_eq!(q, expect);
        let c = MPoly::constant(&g.u_vars, CycNum::from_i64(7));
        assert_eq!(
            invariant_reduce(&c, &g).unwrap(),
            MPoly::constant(&g.x_vars, CycNum::from_i64(7))
        );
    }

    #[test]
    fn octahedral_syzygy() {
        // h_O^3 - t_O^2 = 108 f_O^4, checked through reduction for G8
        let g = build_group("G8").unwrap();
        let vars = &g.u_vars;
        let p = &poly_h_o(vars).pow(3) - &poly_t_o(vars).pow(2);
        assert_eq!(p, poly_f_o(vars).pow(4).scale(&CycNum::from_i64(108)));
        // for G8 (x = t_O, y = h_O): p = y^3 - x^2
        let q = invariant_reduce(&p, &g).unwrap();
        let x = MPoly::var(&g.x_vars, 0);
        let y = MPoly::var(&g.x_vars, 1);
        assert_eq!(q, &(&(&y * &y) * &y) - &(&x * &x));
    }

    #[test]
    fn icosahedral_syzygy() {
        let vars = uv_vars();
        let lhs = poly_f_i(&vars).pow(5);
        let rhs = &poly_h_i(&vars).pow(3)
            + &poly_t_i(&vars)
                .pow(2)
                .scale(&(CycNum::sqrt5() * CycNum::from_i64(60)));
        assert_eq!(lhs, rhs);
        let h = poly_h_i(&vars);
        assert!(h
            .terms()
            .any(|(m, c)| m.0 == vec![20, 0] && c.is_one()));
        let t = poly_t_i(&vars);
        assert_eq!(t.degree_in(0), 29);
    }

    #[test]
    fn type_t_syzygy() {
        let vars = uv_vars();
        let lhs = &poly_f_t(&vars).pow(3) - &poly_h_t(&vars).pow(3);
        let rhs = poly_t_t(&vars)
            .pow(2)
            .scale(&(CycNum::i_sqrt3() * CycNum::from_i64(12)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn invariance_witnesses() {
        let g = build_group("G(3,3,2)").unwrap();
        assert!(verify_invariance(&power_sum2(&g.u_vars, 3), &g).is_ok());
        let u = MPoly::var(&g.u_vars, 0);
        assert!(verify_invariance(&u, &g).is_err());
        // u^3 - v^3 flips sign under a swap-type generator
        let skew = &MPoly::var_pow(&g.u_vars, 0, 3) - &MPoly::var_pow(&g.u_vars, 1, 3);
        let err = verify_invariance(&skew, &g).unwrap_err();
        assert_eq!(err.1, skew.scale(&CycNum::from_i64(-2)));
    }

    #[test]
    fn rank3_groups_build() {
        for name in rank3_duality_names() {
            let g = build_group(&name).unwrap();
            assert!(g.is_duality, "{} should satisfy the monic condition", name);
        }
        let g = build_group("G(3,1,3)").unwrap();
        assert_eq!(g.degrees, vec![9, 6, 3]);
        let g = build_group("G(2,2,3)").unwrap();
        assert_eq!(g.degrees, vec![4, 3, 2]);
    }

    #[test]
    fn nonduality_flags() {
        for name in [
            "G7",
            "G11",
            "G12",
            "G13",
            "G15",
            "G19",
            "G22",
            "G(4,2,2)",
            "G(6,3,2)",
        ] {
            let g = build_group(name).unwrap();
            assert!(!g.is_duality, "{} must not satisfy the monic condition", name);
        }
        // G12/G13/G22 have Delta monic of degree n+1 in x^1
        for name in ["G12", "G13", "G22"] {
            let g = build_group(name).unwrap();
            assert_eq!(g.discriminant_x.degree_in(0), 3, "{}", name);
            assert!(g.discriminant_x.coeff_of_power(0, 3).is_one(), "{}", name);
        }
    }

    #[test]
    fn semi_invariant_projection() {
        // (G, K) = (G(4,2,2), G(4,4,2)): quotient representative tau_4^2,
        // uv is already semi-invariant for the sign character
        let rep = {
            let t = gen_tau(4);
            t.mul(&t)
        };
        let table = CharacterTable::cyclic(&rep, 2);
        assert!(table.verify_multiplicative());
        let vars = uv_vars();
        let z = uv_pow(&vars, 1);
        let proj = semi_invariant_project(&z, &table, 1).unwrap();
        assert_eq!(proj, z);
        let w = power_sum2(&vars, 4);
        assert_eq!(semi_invariant_project(&w, &table, 0).unwrap(), w);
        assert!(matches!(
            semi_invariant_project(&z, &table, 0),
            Err(Error::ZeroProjection(_))
        ));
    }

    #[test]
    #[ignore = "slow: enumerates matrix group closures"]
    fn generator_closure_orders() {
        for name in [
            "G4", "G5", "G6", "G7", "G8", "G9", "G10", "G11", "G12", "G13", "G14", "G15",
            "G(3,1,2)", "G(4,2,2)", "G(6,3,2)", "G(3,1,3)", "G(3,3,3)", "G16", "G20", "G21",
            "G22", "G17",
        ] {
            let g = build_group(name).unwrap();
            let expect = expected_order(name).unwrap();
            let got = group_closure_order(&g.generators, expect * 2).unwrap();
            assert_eq!(got, expect, "group {} closure order", name);
        }
    }
}



