//! Exact arithmetic for tree Banach lattices and their function-space models.
//!
//! The crate realizes, at desk scale and entirely over arbitrary-precision
//! rationals, a family of normed vector lattices built on well-founded trees
//! together with their concrete function-space incarnations:
//!
//! * [`ordinal`] — Cantor-normal-form ordinal arithmetic (comparison, sums,
//!   `w^-` powers, fundamental sequences, interval normal forms).
//! * [`trees`] — nodes of the finitely branching tree of finite natural
//!   sequences, canonical well-founded trees of prescribed root rank, and
//!   trunks (finite downward-closed node sets).
//! * [`treespace`] — finitely supported coefficient families over a tree
//!   with the chain-sum norm, the induced lattice operations, restrictions,
//!   and finite trunk approximation.
//! * [`cantor`] — exact step functions on the Cantor space, the binary
//!   node encodings, and the isometric embedding of full-tree elements with
//!   its explicit inverse.
//! * [`ordfun`] — step functions on ordinal intervals and the recursive
//!   isometry from canonical-tree elements, including the node-to-point map.
//! * [`projtree`] — biorthogonal (vector, functional) families over the
//!   step-function host, the coefficient operator, and the induced
//!   projection, plus the canonical example.
//! * [`holfin`] — isometry/projection extraction for finite compacta from
//!   rational matrices, with exact verification of the conclusions.
//! * [`selftest`] — the seeded verification suites the CLI and the
//!   acceptance tests share.
//!
//! Everything is pure value semantics: no interior mutability, no floats,
//! deterministic outputs for fixed inputs and seeds.

pub mod cantor;
pub mod error;
pub mod holfin;
pub mod ordfun;
pub mod ordinal;
pub mod projtree;
pub mod rat;
pub mod selftest;
pub mod trees;
pub mod treespace;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
