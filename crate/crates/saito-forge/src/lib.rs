//! saito-forge: exact symbolic construction, verification and
//! dualization of the natural Saito structures on orbit spaces of
//! finite complex reflection groups.
//!
//! The crate is organised bottom-up:
//!
//! - [`exactalg`]: cyclotomic scalars, sparse polynomials, rational
//!   functions, matrices, exact linear solving.
//! - [`groups`]: the catalog of reflection groups with basic invariants
//!   and discriminants, plus invariant rewriting.
//! - [`connection`]: the flat connection induced on the orbit space by
//!   the trivial connection upstairs, as discriminant-denominated
//!   polynomial matrices.
//! - [`saito`]: extraction of the polynomial Saito structure, axiom
//!   residual checks, flat coordinates, Okubo systems, basic
//!   derivations.
//! - [`duality`]: the Saito <-> almost-Saito transforms, the
//!   two-parameter family, regular multiplications and the naturality
//!   test.
//! - [`covering`]: pushforwards along branched coverings and the
//!   admissible unit-line searches.
//! - [`cli`]: the command-line driver and JSON persistence.
//!
//! See the `examples/` directory for one runnable example per major
//! capability.

pub mod cli;
pub mod connection;
pub mod covering;
pub mod duality;
pub mod error;
pub mod exactalg;
pub mod groups;
pub mod saito;

pub use error::{Error, Result};
