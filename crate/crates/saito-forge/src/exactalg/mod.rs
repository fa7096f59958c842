//! Exact arithmetic foundation: cyclotomic scalars, sparse weighted
//! multivariate polynomials, rational functions, matrices and linear
//! solving. Everything here is immutable after construction and pure.

pub mod cyc;
pub mod linsolve;
pub mod mat;
pub mod mpoly;
pub mod ratfn;

pub use cyc::{parse_rat, phi, CycNum, Rat};
pub use linsolve::{linsolve, LinSolution};
pub use mat::{Mat, Ring};
pub use mpoly::{MPoly, Mono, Vars};
pub use ratfn::RatFn;
