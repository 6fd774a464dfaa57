//! Exact computation with partial infinitary semigroups: ordinal arithmetic
//! in Cantor normal form, term-represented transfinite words, finitely
//! presented partial algebras with an axiom auditor, semigroup constructions,
//! theorem oracles, and inferior limits.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live in
//! the companion `infsemi` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algebra;
pub mod audit;
pub mod constructions;
pub mod limits;
pub mod ordinal;
pub mod pseq;
pub mod theorems;
pub mod word;

pub use algebra::{Algebra, EvalError, EvalOutcome, FinAlgebra};
pub use audit::{AxiomId, CheckReport, Verdict, Witness};
pub use ordinal::Ordinal;
pub use pseq::PiecewiseSeq;
pub use word::{ScatteredTerm, WordTerm};
