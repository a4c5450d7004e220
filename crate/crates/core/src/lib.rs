//! Exact computations with order-preserving self-maps of the rationals.
//!
//! Points of the extended real line are rationals, quadratic surds or
//! infinities ([`ExtReal`]); subsets of Q are finite unions of intervals
//! ([`QSet`]); maps are finitely piecewise ([`Endo`]).

pub mod constructions;
pub mod endo;
pub mod error;
pub mod exact;
pub mod green;
pub mod lazyorder;
pub mod orbitals;
pub mod parse;
pub mod qset;
pub mod sample;

pub use endo::{compose, equal, invert, is_idempotent, Endo, KernelDescriptor, Piece, PieceMap, Tristate};
pub use error::{Error, Result};
pub use exact::{compare, rational_between, ExtReal, Rational};
pub use qset::{QInterval, QSet, Signature};
