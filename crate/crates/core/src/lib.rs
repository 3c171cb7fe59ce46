//! Positive definite hermitian lattices over maximal orders of imaginary
//! quadratic fields.
//!
//! The crate covers exact ideal arithmetic and class groups
//! ([`order`], [`ideal`], [`classgroup`]), hermitian lattices in pseudo-basis
//! form with their invariants ([`lattice`]), isometry testing, automorphism
//! groups and orthogonal decomposition ([`isometry`]), bounded enumeration of
//! unimodular lattices ([`enumeration`]), and the Galois-action tests that
//! decide whether the corresponding principally polarized abelian variety
//! has field of moduli `Q` ([`moduli`]).

pub mod arith;
pub mod classgroup;
pub mod enumeration;
pub mod ideal;
pub mod isometry;
pub mod kmat;
pub mod lattice;
pub mod moduli;
pub mod order;
pub mod pseudo;
pub mod zlattice;

pub use classgroup::{IdealClass, IdealClassGroup};
pub use ideal::FracIdeal;
pub use isometry::{is_isometric, IsometryWitness, Separation};
pub use lattice::{HermitianLattice, TraceLattice};
pub use order::{KNumber, Order};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid discriminant {disc}: {reason}")]
    Discriminant { disc: i64, reason: &'static str },
    #[error("the zero ideal is not allowed")]
    ZeroIdeal,
    #[error("Z-module is not stable under multiplication by w")]
    NotAnIdeal,
    #[error("ideal tuple is not in normalized HNF")]
    NotNormalized,
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(i64, i64),
    #[error("invalid lattice: {0}")]
    Lattice(String),
    #[error("unsupported rank {0}")]
    Rank(usize),
    #[error("lattice is not integral")]
    NotIntegral,
    #[error("parse error: {0}")]
    Parse(String),
}
